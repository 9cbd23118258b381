#pragma once

// Bloch periodicity expressed on the reduced action, and the reduced-action
// route to the Kronig-Penney dispersion relation.
//
// Geometry of the constraint: region I is the barrier (-d, 0), region II the
// well (0, c). Both bases have their origin at x = 0 and region I carries
// l = -delta. Region III, (c, e), is region I translated by one period.

#include <complex>
#include <optional>
#include <vector>

#include "kpqhj/action.hpp"
#include "kpqhj/model.hpp"
#include "kpqhj/superposition.hpp"

namespace kpqhj {

using cplx = std::complex<double>;

// z -> (p z + q) / (m z + n)
struct MobiusMap {
  cplx p, q, m, n;

  cplx trace() const { return p + n; }
  cplx determinant() const { return p * n - q * m; }
};

// The map carrying exp(2i S0(x)) to exp(2i S0(x + e)):
//   P = -(1 - G)^2 + (1 + G)^2 w,  Q = (1 - G^2)(w - 1) exp(-2i D),
//   M = -(1 - G^2)(w - 1) exp(2i D),  N = (1 + G)^2 - (1 - G)^2 w,
// with w = exp(2i Ke), G = gamma, D = delta.
MobiusMap mobius_coefficients(const SuperpositionParams& sp, double ke);

// Throws PoleError if |m z + n| < 1e-14.
cplx apply_mobius(const MobiusMap& map, cplx z);

// arg(cos y + i gamma sin y) for y = s + delta, continuous in s. Equal to
// arctan(gamma tan y) modulo pi. Throws GammaDegenerateError for gamma == 0.
double unwrapped_bloch_phase(double s0, double gamma, double delta);

struct BlochDefect {
  double defect;
  long n;
};

// Residual of
//   arctan{G tan[S0(x + e) + D]} = arctan{G tan[S0(x) + D]} + Ke + n pi
// with n the nearest integer. Throws GammaDegenerateError for gamma == 0.
BlochDefect bloch_defect(double s0_x, double s0_xe, const SuperpositionParams& sp, double ke);

struct BohmDefect {
  double defect;
  long n_prime;
  double f_shift;  // F(x + e) - F(x), F = (S0 - K x) / pi
};

// Residual of S0(x + e) = S0(x) + Ke + n' pi.
BohmDefect bohm_defect(double s0_x, double s0_xe, double ke);

struct InterfaceQuantities {
  double a_val;  // -mu1 tan(k1 d) + nu1
  double b_val;  // (k1 / k2) mu1 tan(k2 c) + nu1
  double w_val;  // (k1 tan k1d + k2 tan k2c)(k1 tan k2c + k2 tan k1d)
};

// Above the barrier only (DomainError otherwise). Throws TanPoleError when
// |cos k1d| or |cos k2c| < 1e-12.
InterfaceQuantities interface_quantities(double mu1, double nu1, const Wavenumbers& wn,
                                         const LatticeSpec& lat);

// tan(S0 + delta) at x = -d (A) and at x = c (B) for region-I constants
// (mu1, nu1) in any regime; below the barrier tan k1d becomes tanh k3d, at
// threshold A = -mu1 d + nu1. B is infinite at a pole of tan k2c.
std::pair<double, double> constraint_arguments(double mu1, double nu1, const Wavenumbers& wn,
                                               const LatticeSpec& lat);

struct BlochRelationResiduals {
  std::optional<double> tan_form;  // G B - (G A + tan Ke) / (1 - G A tan Ke); absent near poles
  double cos2_form;                // cos^2 Ke - (1 + G^2 AB)^2 / ((1 + G^2 A^2)(1 + G^2 B^2))
};

// Both residuals are relative (divided by 1 + |G B| for the tan form).
BlochRelationResiduals bloch_relation_residuals(double a_val, double b_val, double gamma,
                                                double ke);

// The derivative constraints in the explicit form valid above the barrier:
//   (1 + G^2 B^2) cos^2 k2c - (1 + G^2 A^2) cos^2 k1d
//   k2 tan k2c / D_B + k1 tan k1d / D_A - mu1 k1 G^2 B / D_B^2 + mu1 k1 G^2 A / D_A^2
// with D_B = (1 + G^2 B^2) cos^2 k2c, D_A = (1 + G^2 A^2) cos^2 k1d.
// Throws as interface_quantities.
std::pair<double, double> explicit_constraint_residuals(double mu1, double nu1, double gamma,
                                                        const Wavenumbers& wn,
                                                        const LatticeSpec& lat);

// Continuity of the first and second derivative of H = arctan{G tan[S0 + D]}
// between x = c (region II) and x = -d (region I), as
//   (log(H'_II / H'_I), (H''_II / H'_II - H''_I / H'_I) / k_max).
// They vanish exactly where the explicit constraints above do, in every regime.
std::pair<double, double> constraint_residuals(double mu1, double nu1,
                                               const SuperpositionParams& sp,
                                               const Wavenumbers& wn, const LatticeSpec& lat);

// (1 + G^2 AB) / (1 + G^2 A^2).
double dispersion_bracket(double a_val, double b_val, double gamma);

// 1/2 [1 + cos^2 k1d / cos^2 k2c - W cos^2 k1d / (k1 k2)], continued to
// k1 -> i k3 below the barrier. Throws TanPoleError as interface_quantities
// and DomainError at threshold.
double dispersion_bracket_closed(const Wavenumbers& wn, const LatticeSpec& lat);

struct BlochConstants {
  double mu1;
  double nu1;
  long n;         // integer of the period-wise Bloch relation
  double defect;  // its residual, modulo n pi
  double residual_first;
  double residual_second;
  // Every distinct converged root of the derivative constraints, in start order.
  std::vector<std::pair<double, double>> solutions;
};

// Damped Newton on constraint_residuals from 24 starts
// (mu1 in +-{1e-2, 1e-1, 1, 10} x nu1 in {0, 1, -1}), converged when both
// residuals are < 1e-12. If none of them lands on an admissible root, the 16
// best points of a coarse scan in (nu1 / mu1, 1 / mu1) are tried in order of
// increasing residual. The constraints admit the pair of roots (mu1, nu1)
// and (-mu1, -nu1), one for each of exp(+-iKe); the root whose period-wise
// relation closes with an even n (the exp(+iKe) eigenstate) is returned.
//
// Throws ForbiddenEnergyError if |cos Ke(E)| > 1, GammaDegenerateError for
// gamma == 0 and NoConvergenceError (listing every start) if no start yields
// an admissible root.
BlochConstants solve_bloch_constants(double energy, const LatticeSpec& lat,
                                     const SuperpositionParams& sp, double ke);

// cos Ke = dispersion_bracket cos k2c / cos k1d, Gamma-free by construction; below
// the barrier with tan k1d -> i tanh k3d, cos k1d -> cosh k3d. Falls back to
// dispersion_rhs at threshold and within 1e-12 of a tan pole.
double dispersion_via_action(double energy, const LatticeSpec& lat,
                             const SuperpositionParams& sp);

// (mu1, nu1) read off the transfer-matrix Bloch eigenvector for exp(+iKe):
// with (phi, phi') at x = 0 written as c1 phi1 + c2 phi2 over the region-I
// basis and w = c2 / c1, mu1 = -1 / (gamma Im w), nu1 = mu1 Re w. Independent
// of the constraint equations. Throws ForbiddenEnergyError in a gap,
// GammaDegenerateError for gamma == 0 and DegenerateError at a band edge.
std::pair<double, double> bloch_constants_from_transfer(double energy, const LatticeSpec& lat,
                                                        double gamma);

struct RegionAction {
  Region region;
  long cell;
  double x_lo;
  double x_hi;
  BasisPair basis;
  ActionConstants constants;
};

// The reduced action of one Bloch state over several periods, built by
// matching S0 region by region from x = -d.
class BlochAction {
 public:
  // Solves for (mu1, nu1) and builds `periods` periods starting at x = -d.
  static BlochAction construct(double energy, const LatticeSpec& lat,
                               const SuperpositionParams& sp, int periods);

  // Builds the chain from given region-I constants, without solving.
  static BlochAction from_constants(double energy, const LatticeSpec& lat,
                                    const SuperpositionParams& sp, double mu1, double nu1,
                                    int periods);

  double energy() const { return energy_; }
  const LatticeSpec& lattice() const { return lat_; }
  const SuperpositionParams& superposition() const { return sp_; }
  const Wavenumbers& wavenumbers() const { return wn_; }
  double ke() const { return ke_; }
  double k_bloch() const { return ke_ / lat_.period(); }
  double mu1() const { return mu1_; }
  double nu1() const { return nu1_; }
  // Integer of the period-wise relation; absent for from_constants chains.
  std::optional<long> n() const { return n_; }
  const std::vector<RegionAction>& regions() const { return regions_; }
  double x_begin() const { return regions_.front().x_lo; }
  double x_end() const { return regions_.back().x_hi; }

  // Region containing x (right-continuous; x_end maps to the last region).
  // Throws DomainError outside [x_begin, x_end].
  const RegionAction& region_at(double x) const;

  ActionSample sample(double x) const;
  // R [alpha exp(i S0) + beta exp(-i S0)] through wavefunction_from_basis.
  std::complex<double> wavefunction(double x) const;

 private:
  BlochAction(double energy, const LatticeSpec& lat, const SuperpositionParams& sp,
              const Wavenumbers& wn, double ke);
  void build(double mu1, double nu1, int periods);

  double energy_;
  LatticeSpec lat_;
  SuperpositionParams sp_;
  Wavenumbers wn_;
  double ke_;
  double mu1_ = 0.0;
  double nu1_ = 0.0;
  std::optional<long> n_;
  std::vector<RegionAction> regions_;
};

}  // namespace kpqhj
