#include "kpqhj/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kpqhj/errors.hpp"

namespace kpqhj {

double dispersion_rhs(double energy, const LatticeSpec& lat) {
  const Wavenumbers wn = wavenumbers(energy, lat);
  const double k2 = wn.k2;
  const double c = lat.c();
  const double d = lat.d();
  switch (wn.regime) {
    case Regime::AboveBarrier: {
      const double k1 = *wn.k1;
      return std::cos(k1 * d) * std::cos(k2 * c) -
             (k1 * k1 + k2 * k2) / (2.0 * k1 * k2) * std::sin(k1 * d) * std::sin(k2 * c);
    }
    case Regime::BelowBarrier: {
      const double k3 = *wn.k3;
      return std::cosh(k3 * d) * std::cos(k2 * c) -
             (k2 * k2 - k3 * k3) / (2.0 * k2 * k3) * std::sinh(k3 * d) * std::sin(k2 * c);
    }
    case Regime::AtThreshold:
      break;
  }
  return std::cos(k2 * c) - 0.5 * k2 * d * std::sin(k2 * c);
}

BlochPoint bloch_wavenumber(double energy, const LatticeSpec& lat) {
  BlochPoint p{energy, dispersion_rhs(energy, lat), false, std::nullopt};
  p.allowed = std::abs(p.cos_ke) <= 1.0 + 1e-14;
  if (p.allowed) {
    p.k_bloch = std::acos(std::clamp(p.cos_ke, -1.0, 1.0)) / lat.period();
  }
  return p;
}

namespace {

bool is_allowed(double energy, const LatticeSpec& lat) {
  return std::abs(dispersion_rhs(energy, lat)) <= 1.0;
}

// Bisection between an allowed and a forbidden energy; returns the allowed end.
double refine_edge(const LatticeSpec& lat, double allowed_e, double forbidden_e, double tol) {
  while (std::abs(forbidden_e - allowed_e) > tol) {
    const double mid = 0.5 * (allowed_e + forbidden_e);
    if (mid == allowed_e || mid == forbidden_e) {
      break;
    }
    (is_allowed(mid, lat) ? allowed_e : forbidden_e) = mid;
  }
  return allowed_e;
}

}  // namespace

std::vector<Band> find_bands(const LatticeSpec& lat, double e_min, double e_max, int n_samples) {
  if (!(e_min > 0.0) || !(e_max > e_min) || !std::isfinite(e_max)) {
    throw DomainError("find_bands: need 0 < e_min < e_max, got [" + std::to_string(e_min) + ", " +
                      std::to_string(e_max) + "]");
  }
  if (n_samples < 2) {
    throw DomainError("find_bands: n_samples must be >= 2");
  }
  const double tol = 1e-12 * std::max(1.0, e_max);
  const double step = (e_max - e_min) / (n_samples - 1);
  auto energy_at = [&](int i) { return i == n_samples - 1 ? e_max : e_min + i * step; };

  std::vector<Band> bands;
  bool inside = false;
  Band current{};
  double prev_e = e_min;
  bool prev_allowed = false;
  for (int i = 0; i < n_samples; ++i) {
    const double e = energy_at(i);
    const bool allowed = is_allowed(e, lat);
    if (i == 0) {
      if (allowed) {
        inside = true;
        current = {0, e_min, e_max, true, false};
      }
    } else if (allowed && !prev_allowed) {
      inside = true;
      current = {0, refine_edge(lat, e, prev_e, tol), e_max, false, false};
    } else if (!allowed && prev_allowed) {
      current.e_hi = refine_edge(lat, prev_e, e, tol);
      if (current.e_hi > current.e_lo) {
        current.index = static_cast<int>(bands.size());
        bands.push_back(current);
      }
      inside = false;
    }
    prev_e = e;
    prev_allowed = allowed;
  }
  if (inside) {
    current.e_hi = e_max;
    current.clipped_hi = true;
    if (current.e_hi > current.e_lo) {
      current.index = static_cast<int>(bands.size());
      bands.push_back(current);
    }
  }
  return bands;
}

namespace {

Mat2 multiply(const Mat2& a, const Mat2& b) {
  Mat2 out{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    }
  }
  return out;
}

Mat2 trig_propagator(double k, double len) {
  const double s = std::sin(k * len);
  const double c = std::cos(k * len);
  return {{{c, s / k}, {-k * s, c}}};
}

Mat2 hyperbolic_propagator(double k, double len) {
  const double s = std::sinh(k * len);
  const double c = std::cosh(k * len);
  return {{{c, s / k}, {k * s, c}}};
}

}  // namespace

TransferResult transfer_matrix_oracle(double energy, const LatticeSpec& lat) {
  const Wavenumbers wn = wavenumbers(energy, lat);
  const Mat2 well = trig_propagator(wn.k2, lat.c());
  Mat2 barrier{};
  switch (wn.regime) {
    case Regime::AboveBarrier:
      barrier = trig_propagator(*wn.k1, lat.d());
      break;
    case Regime::BelowBarrier:
      barrier = hyperbolic_propagator(*wn.k3, lat.d());
      break;
    case Regime::AtThreshold:
      barrier = {{{1.0, lat.d()}, {0.0, 1.0}}};
      break;
  }
  TransferResult out{multiply(barrier, well), 0.0};
  out.half_trace = 0.5 * (out.matrix[0][0] + out.matrix[1][1]);
  return out;
}

}  // namespace kpqhj
