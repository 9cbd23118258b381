#include "kpqhj/bloch.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "kpqhj/errors.hpp"
#include "kpqhj/matching.hpp"
#include "kpqhj/spectrum.hpp"

namespace kpqhj {

namespace {

constexpr double kPi = std::numbers::pi;

void require_gamma(double gamma, const char* where) {
  if (std::abs(gamma) <= 1e-14) {
    throw GammaDegenerateError(std::string(where) + ": gamma = 0 is not supported");
  }
}

}  // namespace

MobiusMap mobius_coefficients(const SuperpositionParams& sp, double ke) {
  const double g = sp.gamma();
  const double dl = sp.delta();
  const cplx w = std::polar(1.0, 2.0 * ke);
  const double minus = (1.0 - g) * (1.0 - g);
  const double plus = (1.0 + g) * (1.0 + g);
  const double cross = 1.0 - g * g;
  MobiusMap map{};
  map.p = -minus + plus * w;
  map.q = cross * (w - 1.0) * std::polar(1.0, -2.0 * dl);
  map.m = -cross * (w - 1.0) * std::polar(1.0, 2.0 * dl);
  map.n = plus - minus * w;
  return map;
}

cplx apply_mobius(const MobiusMap& map, cplx z) {
  const cplx den = map.m * z + map.n;
  if (std::abs(den) < 1e-14) {
    throw PoleError("apply_mobius: m z + n vanishes");
  }
  return (map.p * z + map.q) / den;
}

double unwrapped_bloch_phase(double s0, double gamma, double delta) {
  require_gamma(gamma, "unwrapped_bloch_phase");
  const double y = s0 + delta;
  const double s = std::sin(y);
  const double c = std::cos(y);
  // (cos y + i G sin y) e^{-iy} has positive real part for G > 0, and
  // (cos y + i G sin y) e^{+iy} for G < 0.
  if (gamma > 0.0) {
    return y + std::atan2((gamma - 1.0) * s * c, c * c + gamma * s * s);
  }
  return -y + std::atan2((1.0 + gamma) * s * c, c * c - gamma * s * s);
}

BlochDefect bloch_defect(double s0_x, double s0_xe, const SuperpositionParams& sp, double ke) {
  const double g = sp.gamma();
  require_gamma(g, "bloch_defect");
  const double dl = sp.delta();
  const double raw =
      unwrapped_bloch_phase(s0_xe, g, dl) - unwrapped_bloch_phase(s0_x, g, dl) - ke;
  const long n = std::lround(raw / kPi);
  return {std::abs(raw - static_cast<double>(n) * kPi), n};
}

BohmDefect bohm_defect(double s0_x, double s0_xe, double ke) {
  const double raw = s0_xe - s0_x - ke;
  const long n = std::lround(raw / kPi);
  return {std::abs(raw - static_cast<double>(n) * kPi), n, raw / kPi};
}

namespace {

void require_no_tan_pole(double cos_value, const char* what) {
  if (std::abs(cos_value) < 1e-12) {
    throw TanPoleError(std::string("tan pole: |cos ") + what + "| < 1e-12");
  }
}

// Slope at the origin of the region-I ratio phi1 / phi2.
double barrier_kappa(const Wavenumbers& wn) {
  switch (wn.regime) {
    case Regime::AboveBarrier:
      return *wn.k1;
    case Regime::BelowBarrier:
      return *wn.k3;
    case Regime::AtThreshold:
      break;
  }
  return 1.0;
}

}  // namespace

InterfaceQuantities interface_quantities(double mu1, double nu1, const Wavenumbers& wn,
                                         const LatticeSpec& lat) {
  if (wn.regime != Regime::AboveBarrier) {
    throw DomainError("interface_quantities: defined above the barrier only");
  }
  const double k1 = *wn.k1;
  const double k2 = wn.k2;
  const double cos_d = std::cos(k1 * lat.d());
  const double cos_c = std::cos(k2 * lat.c());
  require_no_tan_pole(cos_d, "k1 d");
  require_no_tan_pole(cos_c, "k2 c");
  const double tan_d = std::sin(k1 * lat.d()) / cos_d;
  const double tan_c = std::sin(k2 * lat.c()) / cos_c;
  InterfaceQuantities q{};
  q.a_val = -mu1 * tan_d + nu1;
  q.b_val = k1 / k2 * mu1 * tan_c + nu1;
  q.w_val = (k1 * tan_d + k2 * tan_c) * (k1 * tan_c + k2 * tan_d);
  return q;
}

std::pair<double, double> constraint_arguments(double mu1, double nu1, const Wavenumbers& wn,
                                               const LatticeSpec& lat) {
  const double d = lat.d();
  double a_val = 0.0;
  switch (wn.regime) {
    case Regime::AboveBarrier:
      a_val = -mu1 * std::tan(*wn.k1 * d) + nu1;
      break;
    case Regime::BelowBarrier:
      a_val = -mu1 * std::tanh(*wn.k3 * d) + nu1;
      break;
    case Regime::AtThreshold:
      a_val = -mu1 * d + nu1;
      break;
  }
  const double mu2 = barrier_kappa(wn) * mu1 / wn.k2;
  const double cos_c = std::cos(wn.k2 * lat.c());
  const double b_val = cos_c == 0.0 ? std::copysign(HUGE_VAL, mu2)
                                    : mu2 * std::sin(wn.k2 * lat.c()) / cos_c + nu1;
  return {a_val, b_val};
}

BlochRelationResiduals bloch_relation_residuals(double a_val, double b_val, double gamma,
                                                double ke) {
  BlochRelationResiduals out{};
  const double ga = gamma * a_val;
  const double g2 = gamma * gamma;
  const double cos_ke = std::cos(ke);
  if (std::isfinite(b_val) && std::abs(cos_ke) > 1e-8) {
    const double t = std::tan(ke);
    const double den = 1.0 - ga * t;
    if (std::abs(den) > 1e-8) {
      const double gb = gamma * b_val;
      out.tan_form = (gb - (ga + t) / den) / (1.0 + std::abs(gb));
    }
  }
  // Written in 1/B when |B| > 1 so that B -> infinity stays finite.
  double ratio = 0.0;
  if (std::abs(b_val) > 1.0) {
    const double inv_b = std::isfinite(b_val) ? 1.0 / b_val : 0.0;
    const double num = inv_b + g2 * a_val;
    ratio = num * num / ((1.0 + ga * ga) * (inv_b * inv_b + g2));
  } else {
    const double num = 1.0 + g2 * a_val * b_val;
    ratio = num * num / ((1.0 + ga * ga) * (1.0 + g2 * b_val * b_val));
  }
  out.cos2_form = cos_ke * cos_ke - ratio;
  return out;
}

std::pair<double, double> explicit_constraint_residuals(double mu1, double nu1, double gamma,
                                                        const Wavenumbers& wn,
                                                        const LatticeSpec& lat) {
  const InterfaceQuantities q = interface_quantities(mu1, nu1, wn, lat);
  const double k1 = *wn.k1;
  const double k2 = wn.k2;
  const double g2 = gamma * gamma;
  const double cos_d = std::cos(k1 * lat.d());
  const double cos_c = std::cos(k2 * lat.c());
  const double d_b = (1.0 + g2 * q.b_val * q.b_val) * cos_c * cos_c;
  const double d_a = (1.0 + g2 * q.a_val * q.a_val) * cos_d * cos_d;
  const double first = d_b - d_a;
  const double second = k2 * std::tan(k2 * lat.c()) / d_b + k1 * std::tan(k1 * lat.d()) / d_a -
                        mu1 * k1 * g2 * q.b_val / (d_b * d_b) +
                        mu1 * k1 * g2 * q.a_val / (d_a * d_a);
  return {first, second};
}

namespace {

struct PhaseDerivatives {
  double first;
  double second;
};

// First two x-derivatives of arctan{G tan[S0 + D]} from S0 and its derivatives.
PhaseDerivatives phase_derivatives(const ActionSample& s, double gamma, double delta) {
  const double y = s.s0 + delta;
  const double sn = std::sin(y);
  const double cs = std::cos(y);
  const double den = cs * cs + gamma * gamma * sn * sn;
  const double g1 = gamma / den;
  const double g2 = -2.0 * gamma * (gamma * gamma - 1.0) * sn * cs / (den * den);
  return {g1 * s.ds0, g2 * s.ds0 * s.ds0 + g1 * s.d2s0};
}

struct ConstraintFrame {
  BasisPair barrier;
  BasisPair well;
};

ConstraintFrame constraint_frame(const Wavenumbers& wn) {
  return {basis_for_region(Region::Barrier, wn, 0.0), basis_for_region(Region::Well, wn, 0.0)};
}

// S0 of region I at -d and of region II at c.
std::pair<ActionSample, ActionSample> constraint_samples(double mu1, double nu1,
                                                         const SuperpositionParams& sp,
                                                         const ConstraintFrame& frame,
                                                         const LatticeSpec& lat) {
  const ActionConstants region1{mu1, nu1, -sp.delta()};
  const ActionConstants region2 = propagate_constants(region1, frame.barrier, frame.well, 0.0);
  return {eval_action(-lat.d(), frame.barrier, region1),
          eval_action(lat.c(), frame.well, region2)};
}

std::pair<double, double> constraint_residuals_in(double mu1, double nu1,
                                                  const SuperpositionParams& sp,
                                                  const ConstraintFrame& frame,
                                                  const Wavenumbers& wn, const LatticeSpec& lat) {
  const auto [at_minus_d, at_c] = constraint_samples(mu1, nu1, sp, frame, lat);
  const PhaseDerivatives lhs = phase_derivatives(at_c, sp.gamma(), sp.delta());
  const PhaseDerivatives rhs = phase_derivatives(at_minus_d, sp.gamma(), sp.delta());
  const double k_scale =
      std::max({wn.k2, wn.k1.value_or(0.0), wn.k3.value_or(0.0), 1.0 / lat.period()});
  // H' has the sign of gamma mu on both sides. Log-ratios do not saturate when
  // one side dominates, which keeps Newton away from flat plateaus.
  return {std::log(lhs.first / rhs.first),
          (lhs.second / lhs.first - rhs.second / rhs.first) / k_scale};
}

}  // namespace

std::pair<double, double> constraint_residuals(double mu1, double nu1,
                                               const SuperpositionParams& sp,
                                               const Wavenumbers& wn, const LatticeSpec& lat) {
  require_gamma(sp.gamma(), "constraint_residuals");
  if (!(mu1 != 0.0)) {
    throw ConstantError("constraint_residuals: mu1 must be nonzero");
  }
  return constraint_residuals_in(mu1, nu1, sp, constraint_frame(wn), wn, lat);
}

double dispersion_bracket(double a_val, double b_val, double gamma) {
  const double g2 = gamma * gamma;
  return (1.0 + g2 * a_val * b_val) / (1.0 + g2 * a_val * a_val);
}

namespace {

// The closed bracket together with cos k2c / cos k1d (cosh k3d below).
struct ClosedChain {
  double bracket;
  double ratio;
};

ClosedChain closed_chain(const Wavenumbers& wn, const LatticeSpec& lat) {
  const double k2 = wn.k2;
  const double cos_c = std::cos(k2 * lat.c());
  require_no_tan_pole(cos_c, "k2 c");
  const double tan_c = std::sin(k2 * lat.c()) / cos_c;
  switch (wn.regime) {
    case Regime::AboveBarrier: {
      const double k1 = *wn.k1;
      const double cos_d = std::cos(k1 * lat.d());
      require_no_tan_pole(cos_d, "k1 d");
      const double tan_d = std::sin(k1 * lat.d()) / cos_d;
      const double w = (k1 * tan_d + k2 * tan_c) * (k1 * tan_c + k2 * tan_d);
      const double cd2 = cos_d * cos_d;
      return {0.5 * (1.0 + cd2 / (cos_c * cos_c) - w * cd2 / (k1 * k2)), cos_c / cos_d};
    }
    case Regime::BelowBarrier: {
      // k1 -> i k3: k1 tan k1d -> -k3 tanh k3d, k2 tan k1d -> i k2 tanh k3d,
      // k1 tan k2c -> i k3 tan k2c, so W / (k1 k2) stays real.
      const double k3 = *wn.k3;
      const double ch = std::cosh(k3 * lat.d());
      const double th = std::tanh(k3 * lat.d());
      const double w_over = (k2 * tan_c - k3 * th) * (k3 * tan_c + k2 * th) / (k2 * k3);
      const double ch2 = ch * ch;
      return {0.5 * (1.0 + ch2 / (cos_c * cos_c) - w_over * ch2), cos_c / ch};
    }
    case Regime::AtThreshold:
      break;
  }
  throw DomainError("dispersion bracket: undefined at threshold");
}

}  // namespace

double dispersion_bracket_closed(const Wavenumbers& wn, const LatticeSpec& lat) {
  return closed_chain(wn, lat).bracket;
}

double dispersion_via_action(double energy, const LatticeSpec& lat,
                             const SuperpositionParams& /*sp*/) {
  const Wavenumbers wn = wavenumbers(energy, lat);
  if (wn.regime == Regime::AtThreshold) {
    return dispersion_rhs(energy, lat);
  }
  try {
    const ClosedChain chain = closed_chain(wn, lat);
    return chain.bracket * chain.ratio;
  } catch (const TanPoleError&) {
    return dispersion_rhs(energy, lat);
  }
}

namespace {

struct NewtonOutcome {
  bool converged = false;
  double mu = 0.0;
  double nu = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  int iterations = 0;
};

// Iterates on the projective coordinates v = 1 / mu, u = nu / mu, in which
// chi = phi2 + i (mu phi1 + nu phi2) is proportional to phi1 + (u - i v) phi2.
// The constraints are far better conditioned there than in (mu, nu).
NewtonOutcome damped_newton(double mu, double nu, const SuperpositionParams& sp,
                            const ConstraintFrame& frame, const Wavenumbers& wn,
                            const LatticeSpec& lat) {
  constexpr double kTol = 1e-12;
  constexpr int kMaxIter = 200;
  auto residual = [&](double u, double v) {
    return constraint_residuals_in(1.0 / v, u / v, sp, frame, wn, lat);
  };
  auto norm = [](std::pair<double, double> r) { return std::hypot(r.first, r.second); };

  double u = nu / mu;
  double v = 1.0 / mu;
  NewtonOutcome out;
  std::pair<double, double> r = residual(u, v);
  for (int it = 0; it < kMaxIter; ++it) {
    out.iterations = it;
    if (!std::isfinite(r.first) || !std::isfinite(r.second)) {
      break;
    }
    if (std::abs(r.first) < kTol && std::abs(r.second) < kTol) {
      out.converged = true;
      break;
    }
    const double hu = 1e-7 * std::max(1.0, std::abs(u));
    const double hv = 1e-7 * std::abs(v);
    const auto rup = residual(u + hu, v);
    const auto rum = residual(u - hu, v);
    const auto rvp = residual(u, v + hv);
    const auto rvm = residual(u, v - hv);
    const double j11 = (rup.first - rum.first) / (2.0 * hu);
    const double j21 = (rup.second - rum.second) / (2.0 * hu);
    const double j12 = (rvp.first - rvm.first) / (2.0 * hv);
    const double j22 = (rvp.second - rvm.second) / (2.0 * hv);
    const double det = j11 * j22 - j12 * j21;
    if (!(std::abs(det) > 0.0) || !std::isfinite(det)) {
      break;
    }
    const double du = -(j22 * r.first - j12 * r.second) / det;
    const double dv = -(-j21 * r.first + j11 * r.second) / det;

    const double current = norm(r);
    double lambda = 1.0;
    bool accepted = false;
    for (int half = 0; half < 40; ++half, lambda *= 0.5) {
      const double u_new = u + lambda * du;
      const double v_new = v + lambda * dv;
      // mu keeps its sign: S0 may not change direction.
      if (!(v_new * v > 0.0)) {
        continue;
      }
      const auto r_new = residual(u_new, v_new);
      if (std::isfinite(r_new.first) && std::isfinite(r_new.second) && norm(r_new) < current) {
        u = u_new;
        v = v_new;
        r = r_new;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      break;
    }
  }
  out.mu = 1.0 / v;
  out.nu = u / v;
  out.r1 = r.first;
  out.r2 = r.second;
  out.converged = out.converged ||
                  (std::abs(r.first) < kTol && std::abs(r.second) < kTol);
  return out;
}

}  // namespace

BlochConstants solve_bloch_constants(double energy, const LatticeSpec& lat,
                                     const SuperpositionParams& sp, double ke) {
  require_gamma(sp.gamma(), "solve_bloch_constants");
  const double cos_ke = dispersion_rhs(energy, lat);
  if (std::abs(cos_ke) > 1.0) {
    std::ostringstream msg;
    msg << "energy " << energy << " lies in a gap (cos Ke = " << cos_ke << ")";
    throw ForbiddenEnergyError(msg.str());
  }
  const Wavenumbers wn = wavenumbers(energy, lat);
  const ConstraintFrame frame = constraint_frame(wn);

  BlochConstants best{};
  bool found = false;
  std::ostringstream log;
  auto try_start = [&](double mu0, double nu0) {
    const NewtonOutcome o = damped_newton(mu0, nu0, sp, frame, wn, lat);
    log << "  start (" << mu0 << ", " << nu0 << "): " << (o.converged ? "converged" : "failed")
        << " at (" << o.mu << ", " << o.nu << ") residuals " << o.r1 << ", " << o.r2 << "\n";
    if (!o.converged) {
      return;
    }
    const bool seen =
        std::any_of(best.solutions.begin(), best.solutions.end(), [&](const auto& s) {
          return std::abs(s.first - o.mu) <= 1e-8 * std::max(1.0, std::abs(o.mu)) &&
                 std::abs(s.second - o.nu) <= 1e-8 * std::max(1.0, std::abs(o.nu));
        });
    if (!seen) {
      best.solutions.emplace_back(o.mu, o.nu);
    }
    if (found) {
      return;
    }
    const auto [at_minus_d, at_c] = constraint_samples(o.mu, o.nu, sp, frame, lat);
    const BlochDefect bd = bloch_defect(at_minus_d.s0, at_c.s0, sp, ke);
    if (bd.defect < 1e-9 && bd.n % 2 == 0) {
      found = true;
      best.mu1 = o.mu;
      best.nu1 = o.nu;
      best.n = bd.n;
      best.defect = bd.defect;
      best.residual_first = o.r1;
      best.residual_second = o.r2;
    }
  };

  for (double magnitude : {1e-2, 1e-1, 1.0, 10.0}) {
    for (double sign : {1.0, -1.0}) {
      for (double nu0 : {0.0, 1.0, -1.0}) {
        try_start(sign * magnitude, nu0);
      }
    }
  }

  // Fallback seeds: the best points of a coarse scan of the projective
  // coordinates, u = nu / mu = tan(theta) and v = 1 / mu = +-10^p.
  if (!found) {
    struct Seed {
      double norm;
      double mu;
      double nu;
    };
    std::vector<Seed> seeds;
    for (int i = 0; i < 48; ++i) {
      const double u = std::tan(kPi * (-0.5 + (i + 0.5) / 48.0));
      for (int j = 0; j <= 40; ++j) {
        for (double sign : {1.0, -1.0}) {
          const double v = sign * std::pow(10.0, -6.0 + 0.25 * j);
          const auto r = constraint_residuals_in(1.0 / v, u / v, sp, frame, wn, lat);
          const double norm = std::hypot(r.first, r.second);
          if (std::isfinite(norm)) {
            seeds.push_back({norm, 1.0 / v, u / v});
          }
        }
      }
    }
    const std::size_t keep = std::min<std::size_t>(16, seeds.size());
    std::partial_sort(seeds.begin(), seeds.begin() + static_cast<std::ptrdiff_t>(keep),
                      seeds.end(), [](const Seed& a, const Seed& b) { return a.norm < b.norm; });
    for (std::size_t i = 0; i < keep && !found; ++i) {
      try_start(seeds[i].mu, seeds[i].nu);
    }
  }
  if (!found) {
    throw NoConvergenceError("solve_bloch_constants: no admissible root at E = " +
                             std::to_string(energy) + "\n" + log.str());
  }
  const auto [a_val, b_val] = constraint_arguments(best.mu1, best.nu1, wn, lat);
  const BlochRelationResiduals rel = bloch_relation_residuals(a_val, b_val, sp.gamma(), ke);
  if (std::abs(rel.cos2_form) > 1e-9) {
    throw NoConvergenceError("solve_bloch_constants: root fails cos^2 Ke relation at E = " +
                             std::to_string(energy));
  }
  return best;
}

std::pair<double, double> bloch_constants_from_transfer(double energy, const LatticeSpec& lat,
                                                        double gamma) {
  require_gamma(gamma, "bloch_constants_from_transfer");
  const TransferResult tr = transfer_matrix_oracle(energy, lat);
  if (std::abs(tr.half_trace) > 1.0) {
    throw ForbiddenEnergyError("bloch_constants_from_transfer: energy lies in a gap");
  }
  const double ke = std::acos(tr.half_trace);
  const cplx lambda = std::polar(1.0, ke);
  const Mat2& m = tr.matrix;
  // (m - lambda) v = 0
  cplx phi0, dphi0;
  if (std::abs(m[0][1]) >= std::abs(m[1][0])) {
    phi0 = m[0][1];
    dphi0 = lambda - m[0][0];
  } else {
    phi0 = lambda - m[1][1];
    dphi0 = m[1][0];
  }
  const Wavenumbers wn = wavenumbers(energy, lat);
  const cplx w = phi0 * barrier_kappa(wn) / dphi0;
  if (!(std::abs(w.imag()) > 1e-14 * std::abs(w)) || !std::isfinite(std::abs(w))) {
    throw DegenerateError("bloch_constants_from_transfer: real eigenvector (band edge)");
  }
  const double mu = -1.0 / (gamma * w.imag());
  return {mu, mu * w.real()};
}

BlochAction::BlochAction(double energy, const LatticeSpec& lat, const SuperpositionParams& sp,
                         const Wavenumbers& wn, double ke)
    : energy_(energy), lat_(lat), sp_(sp), wn_(wn), ke_(ke) {}

BlochAction BlochAction::construct(double energy, const LatticeSpec& lat,
                                   const SuperpositionParams& sp, int periods) {
  const BlochPoint bp = bloch_wavenumber(energy, lat);
  if (!bp.allowed) {
    std::ostringstream msg;
    msg << "energy " << energy << " lies in a gap (cos Ke = " << bp.cos_ke << ")";
    throw ForbiddenEnergyError(msg.str());
  }
  const double ke = *bp.k_bloch * lat.period();
  const BlochConstants bc = solve_bloch_constants(energy, lat, sp, ke);
  BlochAction chain(energy, lat, sp, kpqhj::wavenumbers(energy, lat), ke);
  chain.n_ = bc.n;
  chain.build(bc.mu1, bc.nu1, periods);
  return chain;
}

BlochAction BlochAction::from_constants(double energy, const LatticeSpec& lat,
                                        const SuperpositionParams& sp, double mu1, double nu1,
                                        int periods) {
  const BlochPoint bp = bloch_wavenumber(energy, lat);
  const double ke = bp.k_bloch ? *bp.k_bloch * lat.period() : 0.0;
  BlochAction chain(energy, lat, sp, kpqhj::wavenumbers(energy, lat), ke);
  chain.build(mu1, nu1, periods);
  return chain;
}

void BlochAction::build(double mu1, double nu1, int periods) {
  if (periods < 1) {
    throw DomainError("BlochAction: periods must be >= 1");
  }
  mu1_ = mu1;
  nu1_ = nu1;
  const double e = lat_.period();
  const double c = lat_.c();
  regions_.clear();
  regions_.reserve(1 + 2 * static_cast<std::size_t>(periods));
  regions_.push_back({Region::Barrier, -1, -lat_.d(), 0.0,
                      basis_for_region(Region::Barrier, wn_, 0.0),
                      ActionConstants::make(mu1, nu1, -sp_.delta())});
  for (int cell = 0; cell < periods; ++cell) {
    const double start = cell * e;
    const double end = (cell + 1) * e;
    const BasisPair well = basis_for_region(Region::Well, wn_, start);
    const BasisPair barrier = basis_for_region(Region::Barrier, wn_, end);
    const RegionAction& prev = regions_.back();
    const ActionConstants in_well =
        propagate_constants(prev.constants, prev.basis, well, start);
    regions_.push_back({Region::Well, cell, start, start + c, well, in_well});
    const ActionConstants in_barrier = propagate_constants(in_well, well, barrier, start + c);
    regions_.push_back({Region::Barrier, cell, start + c, end, barrier, in_barrier});
  }
}

const RegionAction& BlochAction::region_at(double x) const {
  if (!(x >= x_begin() && x <= x_end())) {
    throw DomainError("BlochAction: x = " + std::to_string(x) + " outside the constructed range");
  }
  auto it = std::upper_bound(regions_.begin(), regions_.end(), x,
                             [](double v, const RegionAction& r) { return v < r.x_lo; });
  return *std::prev(it);
}

ActionSample BlochAction::sample(double x) const {
  const RegionAction& r = region_at(x);
  return eval_action(x, r.basis, r.constants);
}

std::complex<double> BlochAction::wavefunction(double x) const {
  const RegionAction& r = region_at(x);
  return wavefunction_from_basis(x, r.basis, r.constants, sp_);
}

}  // namespace kpqhj
