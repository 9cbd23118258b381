#pragma once

// Reduced action S0 = arctan(mu phi1 / phi2 + nu) + l of one region,
// continued across the poles of phi1 / phi2 so that it is smooth in x.

#include <complex>
#include <span>
#include <vector>

#include "kpqhj/model.hpp"
#include "kpqhj/superposition.hpp"

namespace kpqhj {

struct ActionConstants {
  double mu;
  double nu;
  double l;

  // Throws ConstantError for mu == 0 or non-finite values.
  static ActionConstants make(double mu, double nu, double l = 0.0);

  friend bool operator==(const ActionConstants&, const ActionConstants&) = default;
};

struct ActionSample {
  double x;
  double s0;
  double ds0;
  double d2s0;
  double r;          // |ds0|^(-1/2)
  long branch_count;  // pi-jumps absorbed between the basis origin and x
  double principal;  // s0 - branch_count * pi, evaluated directly
};

// Closed-form S0, S0', S0'' at x. branch_count is zero at the basis origin and
// changes by sign(ds0) at every zero of phi2 crossed to the right; at a zero of
// phi2 the left limit is returned. Throws ConstantError for mu == 0.
ActionSample eval_action(double x, const BasisPair& basis, const ActionConstants& k);

// eval_action along a strictly increasing grid. Throws GridError otherwise.
std::vector<ActionSample> amplitude_profile(std::span<const double> grid, const BasisPair& basis,
                                            const ActionConstants& k);

// max over interior points of
//   |(S0')^2 + V - E - (1/2)[(3/2)(S0'')^2 / (S0')^2 - S0''' / S0']|
// with S0''' from a central difference of the analytic S0''.
// Needs >= 5 uniform points inside one region; throws GridError otherwise.
double qshje_residual(std::span<const double> grid, std::span<const ActionSample> samples,
                      double energy, const LatticeSpec& lat);

// Pointwise (signed) QSHJE residual at each interior grid point, same stencil as
// qshje_residual. Entry i corresponds to grid[i + 1].
std::vector<double> qshje_residual_profile(std::span<const double> grid,
                                           std::span<const ActionSample> samples, double energy,
                                           const LatticeSpec& lat);

// R [alpha exp(i S0) + beta exp(-i S0)].
std::complex<double> reconstruct_wavefunction(double x, const ActionSample& sample,
                                              const SuperpositionParams& sp);

// The same wavefunction written directly as a combination of phi1 and phi2:
// equal to reconstruct_wavefunction(x, eval_action(x, basis, k), sp) but free
// of the rounding of the phase evaluation, which matters under finite
// differencing.
std::complex<double> wavefunction_from_basis(double x, const BasisPair& basis,
                                             const ActionConstants& k,
                                             const SuperpositionParams& sp);

}  // namespace kpqhj
