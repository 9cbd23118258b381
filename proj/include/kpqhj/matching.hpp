#pragma once

// Continuation of the reduced action across a region interface: S0, S0' and
// S0'' are required to be continuous there.

#include <array>

#include "kpqhj/action.hpp"
#include "kpqhj/model.hpp"

namespace kpqhj {

struct InterfaceSolution {
  ActionConstants left;
  ActionConstants right;
  double interface_x;
};

// Constants on the right of interface_x reproducing the value and first two
// derivatives of the left action there.
//
// When both bases are canonical and the interface sits at both origins, the
// solution is closed form: mu_r = mu_l kappa_l / kappa_r, nu_r = nu_l,
// l_r = l_l, with kappa = k (Linear: 1). Otherwise chi'/chi is matched at the
// interface, which fixes (mu_r, nu_r) uniquely; l_r absorbs any pi offset so
// that S0 itself, not only tan S0, is continuous.
//
// Throws ConstantError for left.mu == 0 and DegenerateError if the right basis
// cannot carry the required derivative signature.
ActionConstants propagate_constants(const ActionConstants& left, const BasisPair& basis_left,
                                    const BasisPair& basis_right, double interface_x);

// The generic route, even where the closed form applies. Exposed for
// cross-checking the closed forms.
ActionConstants propagate_constants_generic(const ActionConstants& left,
                                            const BasisPair& basis_left,
                                            const BasisPair& basis_right, double interface_x);

// |s0_r - s0_l|, |ds0_r - ds0_l|, |d2s0_r - d2s0_l| at the interface, each
// divided by max(1, |left value|).
std::array<double, 3> continuity_residuals(const InterfaceSolution& sol,
                                           const BasisPair& basis_left,
                                           const BasisPair& basis_right);

}  // namespace kpqhj
