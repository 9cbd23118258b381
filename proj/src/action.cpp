#include "kpqhj/action.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "kpqhj/errors.hpp"

namespace kpqhj {

namespace {

using cplx = std::complex<double>;

void require_mu(const ActionConstants& k) {
  if (!(k.mu != 0.0) || !std::isfinite(k.mu) || !std::isfinite(k.nu) || !std::isfinite(k.l)) {
    throw ConstantError("action constants must be finite with mu != 0");
  }
}

// chi = phi2 + i (mu phi1 + nu phi2) = c1 f1 + c2 f2 over the canonical pair.
struct ChiCoefficients {
  cplx c1;
  cplx c2;
};

ChiCoefficients chi_coefficients(const BasisPair& basis, const ActionConstants& k) {
  const Mat2& m = basis.mix();
  return {cplx(m[1][0], k.mu * m[0][0] + k.nu * m[1][0]),
          cplx(m[1][1], k.mu * m[0][1] + k.nu * m[1][1])};
}

// Arg(1 + z) is continuous along any path that keeps 1 + z off the negative
// real axis; every branch below is arranged so that this holds.
double arg1p(cplx z) { return std::arg(1.0 + z); }

// A continuous determination of arg chi(t). Since phi2 and Im chi have a
// nonzero Wronskian, chi never vanishes and the phase is smooth in t.
double continuous_phase(const BasisPair& basis, const ChiCoefficients& cc, double t) {
  const double k = basis.k();
  switch (basis.kind()) {
    case BasisKind::Trig: {
      // sin = (e^{ikt} - e^{-ikt}) / 2i, cos = (e^{ikt} + e^{-ikt}) / 2
      const cplx p = cc.c1 / cplx(0.0, 2.0) + cc.c2 / 2.0;
      const cplx q = -cc.c1 / cplx(0.0, 2.0) + cc.c2 / 2.0;
      if (std::abs(p) > std::abs(q)) {
        return k * t + std::arg(p) + arg1p(q / p * std::polar(1.0, -2.0 * k * t));
      }
      return -k * t + std::arg(q) + arg1p(p / q * std::polar(1.0, 2.0 * k * t));
    }
    case BasisKind::Hyperbolic: {
      const cplx p = (cc.c1 + cc.c2) / 2.0;  // e^{kt}
      const cplx q = (cc.c2 - cc.c1) / 2.0;  // e^{-kt}
      if (std::abs(q) == 0.0) {
        return std::arg(p);
      }
      if (std::abs(p) == 0.0) {
        return std::arg(q);
      }
      const cplx ratio = p / q;
      const double log_mod = std::log(std::abs(ratio)) + 2.0 * k * t;
      if (log_mod <= 0.0) {
        return std::arg(q) + arg1p(ratio * std::exp(2.0 * k * t));
      }
      return std::arg(q) + std::arg(ratio) + arg1p(1.0 / ratio * std::exp(-2.0 * k * t));
    }
    case BasisKind::Linear:
      return std::arg(cc.c2) + arg1p(cc.c1 / cc.c2 * t);
  }
  return 0.0;
}

struct LocalValues {
  double ds0;
  double d2s0;
  double principal;  // arctan(u), left limit at a zero of phi2
};

LocalValues local_values(const BasisValues& v, double wronskian, const ActionConstants& k) {
  const double psi = k.mu * v.phi1 + k.nu * v.phi2;
  const double dpsi = k.mu * v.dphi1 + k.nu * v.dphi2;
  const double rho = v.phi2 * v.phi2 + psi * psi;
  const double w_chi = -k.mu * wronskian;
  LocalValues out{};
  out.ds0 = w_chi / rho;
  out.d2s0 = -2.0 * w_chi * (v.phi2 * v.dphi2 + psi * dpsi) / (rho * rho);
  if (v.phi2 == 0.0) {
    out.principal = std::copysign(std::numbers::pi / 2.0, out.ds0);
  } else {
    out.principal = std::atan(psi / v.phi2);
  }
  return out;
}

}  // namespace

ActionConstants ActionConstants::make(double mu, double nu, double l) {
  ActionConstants k{mu, nu, l};
  require_mu(k);
  return k;
}

ActionSample eval_action(double x, const BasisPair& basis, const ActionConstants& k) {
  require_mu(k);
  const ChiCoefficients cc = chi_coefficients(basis, k);
  const LocalValues here = local_values(basis.eval(x), basis.wronskian(), k);
  const LocalValues at_origin = local_values(basis.eval(basis.origin()), basis.wronskian(), k);
  const double t = x - basis.origin();
  const double swept = continuous_phase(basis, cc, t) - continuous_phase(basis, cc, 0.0);

  ActionSample s{};
  s.x = x;
  s.ds0 = here.ds0;
  s.d2s0 = here.d2s0;
  s.r = 1.0 / std::sqrt(std::abs(here.ds0));
  s.s0 = at_origin.principal + k.l + swept;
  s.branch_count = std::lround((at_origin.principal + swept - here.principal) / std::numbers::pi);
  s.principal = here.principal + k.l;
  return s;
}

std::vector<ActionSample> amplitude_profile(std::span<const double> grid, const BasisPair& basis,
                                            const ActionConstants& k) {
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw GridError("amplitude_profile: grid must be strictly increasing");
    }
  }
  std::vector<ActionSample> out;
  out.reserve(grid.size());
  for (double x : grid) {
    out.push_back(eval_action(x, basis, k));
  }
  return out;
}

std::vector<double> qshje_residual_profile(std::span<const double> grid,
                                           std::span<const ActionSample> samples, double energy,
                                           const LatticeSpec& lat) {
  if (samples.size() != grid.size()) {
    throw GridError("qshje_residual: samples and grid sizes differ");
  }
  const double v = grid_region_potential(grid, lat, 5);
  std::vector<double> out;
  out.reserve(grid.size() - 2);
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double s1 = samples[i].ds0;
    const double s2 = samples[i].d2s0;
    const double s3 = (samples[i + 1].d2s0 - samples[i - 1].d2s0) / (grid[i + 1] - grid[i - 1]);
    const double quantum = 0.5 * (1.5 * s2 * s2 / (s1 * s1) - s3 / s1);
    out.push_back(s1 * s1 + v - energy - quantum);
  }
  return out;
}

double qshje_residual(std::span<const double> grid, std::span<const ActionSample> samples,
                      double energy, const LatticeSpec& lat) {
  double worst = 0.0;
  for (double r : qshje_residual_profile(grid, samples, energy, lat)) {
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

std::complex<double> reconstruct_wavefunction(double /*x*/, const ActionSample& sample,
                                              const SuperpositionParams& sp) {
  // exp(i S0) = exp(i principal) (-1)^branch_count, avoiding the rounding of the
  // large unwrapped s0.
  const double parity = (sample.branch_count % 2 == 0) ? 1.0 : -1.0;
  const cplx phase = parity * std::polar(1.0, sample.principal);
  const cplx alpha = std::polar(sp.alpha_mod, sp.a);
  const cplx beta = std::polar(sp.beta_mod, sp.b);
  return sample.r * (alpha * phase + beta * std::conj(phase));
}

std::complex<double> wavefunction_from_basis(double x, const BasisPair& basis,
                                             const ActionConstants& k,
                                             const SuperpositionParams& sp) {
  require_mu(k);
  // exp(i (S0 - l)) = sigma chi / |chi| and R = |chi| / sqrt|mu W|, so phi is a
  // fixed combination of phi1 and phi2 with no phase evaluation at x.
  const BasisValues o = basis.eval(basis.origin());
  double sigma = o.phi2 > 0.0 ? 1.0 : -1.0;
  if (o.phi2 == 0.0) {
    const double psi = k.mu * o.phi1 + k.nu * o.phi2;
    sigma = (psi > 0.0) == (-k.mu * basis.wronskian() > 0.0) ? 1.0 : -1.0;
  }

  // The combination cancels heavily in the barrier; extended precision keeps
  // the result within an ulp.
  using real = long double;
  const real t = static_cast<real>(x) - static_cast<real>(basis.origin());
  const real kt = static_cast<real>(basis.k()) * t;
  real f1 = t;
  real f2 = 1.0L;
  if (basis.kind() == BasisKind::Trig) {
    f1 = std::sin(kt);
    f2 = std::cos(kt);
  } else if (basis.kind() == BasisKind::Hyperbolic) {
    f1 = std::sinh(kt);
    f2 = std::cosh(kt);
  }
  const Mat2& m = basis.mix();
  const real phi1 = m[0][0] * f1 + m[0][1] * f2;
  const real phi2 = m[1][0] * f1 + m[1][1] * f2;
  const real re_chi = phi2;
  const real im_chi = static_cast<real>(k.mu) * phi1 + static_cast<real>(k.nu) * phi2;

  const real pa = static_cast<real>(sp.a) + static_cast<real>(k.l);
  const real pb = static_cast<real>(sp.b) - static_cast<real>(k.l);
  const real ca = sp.alpha_mod * std::cos(pa), sa = sp.alpha_mod * std::sin(pa);
  const real cb = sp.beta_mod * std::cos(pb), sb = sp.beta_mod * std::sin(pb);
  // alpha chi + beta conj(chi)
  const real re = (ca + cb) * re_chi - (sa - sb) * im_chi;
  const real im = (sa + sb) * re_chi + (ca - cb) * im_chi;
  const real scale = sigma / std::sqrt(std::abs(static_cast<real>(k.mu) * basis.wronskian()));
  return {static_cast<double>(re * scale), static_cast<double>(im * scale)};
}

}  // namespace kpqhj
