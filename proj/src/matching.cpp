#include "kpqhj/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kpqhj/errors.hpp"

namespace kpqhj {

namespace {

// Slope of phi1 / phi2 at the origin of a canonical pair.
double kappa(const BasisPair& basis) {
  return basis.kind() == BasisKind::Linear ? 1.0 : basis.k();
}

bool at_origin(const BasisPair& basis, double x) {
  return std::abs(x - basis.origin()) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                             std::max(1.0, std::abs(x));
}

}  // namespace

ActionConstants propagate_constants_generic(const ActionConstants& left,
                                            const BasisPair& basis_left,
                                            const BasisPair& basis_right, double interface_x) {
  const ActionSample target = eval_action(interface_x, basis_left, left);
  const double s1 = target.ds0;
  const double s2 = target.d2s0;

  // For chi = phi2 + i psi, S0' = Im(chi'/chi) and S0'' = -S0' * 2 Re(chi'/chi).
  // Prescribing chi'/chi = a + i b fixes psi and psi' at the interface.
  const double a = -s2 / (2.0 * s1);
  const double b = s1;
  const BasisValues v = basis_right.eval(interface_x);
  const double psi = (a * v.phi2 - v.dphi2) / b;
  const double dpsi = b * v.phi2 + a * psi;

  // psi = mu phi1 + nu phi2, psi' = mu phi1' + nu phi2'.
  const double w = basis_right.wronskian();
  const double mu = (psi * v.dphi2 - dpsi * v.phi2) / w;
  const double nu = (v.phi1 * dpsi - v.dphi1 * psi) / w;
  if (!(mu != 0.0) || !std::isfinite(mu) || !std::isfinite(nu)) {
    throw DegenerateError("propagate_constants: right basis cannot match the left action");
  }

  const ActionSample unshifted = eval_action(interface_x, basis_right, {mu, nu, 0.0});
  return {mu, nu, target.s0 - unshifted.s0};
}

ActionConstants propagate_constants(const ActionConstants& left, const BasisPair& basis_left,
                                    const BasisPair& basis_right, double interface_x) {
  if (!(left.mu != 0.0) || !std::isfinite(left.mu)) {
    throw ConstantError("propagate_constants: left mu must be nonzero");
  }
  // tan, tanh and t all have unit slope and zero curvature at 0, so matching
  // at a shared origin only rescales mu.
  if (basis_left.canonical() && basis_right.canonical() && at_origin(basis_left, interface_x) &&
      at_origin(basis_right, interface_x)) {
    return {left.mu * kappa(basis_left) / kappa(basis_right), left.nu, left.l};
  }
  return propagate_constants_generic(left, basis_left, basis_right, interface_x);
}

std::array<double, 3> continuity_residuals(const InterfaceSolution& sol,
                                           const BasisPair& basis_left,
                                           const BasisPair& basis_right) {
  const ActionSample l = eval_action(sol.interface_x, basis_left, sol.left);
  const ActionSample r = eval_action(sol.interface_x, basis_right, sol.right);
  auto rel = [](double lhs, double rhs) {
    return std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
  };
  return {rel(l.s0, r.s0), rel(l.ds0, r.ds0), rel(l.d2s0, r.d2s0)};
}

}  // namespace kpqhj
