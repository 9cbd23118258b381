#include "kpqhj/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kpqhj/errors.hpp"

namespace kpqhj {

LatticeSpec::LatticeSpec(double v0, double c, double d) : v0_(v0), c_(c), d_(d), period_(c + d) {
  if (!std::isfinite(v0) || v0 < 0.0) {
    throw DomainError("lattice: v0 must be finite and >= 0, got " + std::to_string(v0));
  }
  if (!std::isfinite(c) || c <= 0.0) {
    throw DomainError("lattice: well width c must be finite and > 0, got " + std::to_string(c));
  }
  if (!std::isfinite(d) || d <= 0.0) {
    throw DomainError("lattice: barrier width d must be finite and > 0, got " + std::to_string(d));
  }
}

double LatticeSpec::potential(double x) const {
  return classify_point(x, *this).region == Region::Well ? 0.0 : v0_;
}

std::string_view to_string(Region region) {
  return region == Region::Well ? "well" : "barrier";
}

PointLocation classify_point(double x, const LatticeSpec& lat) {
  const double e = lat.period();
  double cell = std::floor(x / e);
  double local = x - cell * e;
  // x / e can round across an integer; keep local_x in [0, e).
  if (local < 0.0) {
    cell -= 1.0;
    local = x - cell * e;
  } else if (local >= e) {
    cell += 1.0;
    local = x - cell * e;
  }
  local = std::clamp(local, 0.0, std::nextafter(e, 0.0));
  const Region region = local < lat.c() ? Region::Well : Region::Barrier;
  return {region, static_cast<long>(cell), local};
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::AboveBarrier:
      return "above_barrier";
    case Regime::BelowBarrier:
      return "below_barrier";
    case Regime::AtThreshold:
      return "at_threshold";
  }
  return "unknown";
}

double threshold_window(double v0) { return 1e-8 * std::max(1.0, v0); }

Wavenumbers wavenumbers(double energy, const LatticeSpec& lat) {
  if (!(energy > 0.0) || !std::isfinite(energy)) {
    throw DomainError("energy must be finite and > 0, got " + std::to_string(energy));
  }
  Wavenumbers wn{Regime::AtThreshold, std::nullopt, std::sqrt(energy), std::nullopt};
  const double excess = energy - lat.v0();
  if (std::abs(excess) <= threshold_window(lat.v0())) {
    return wn;
  }
  if (excess > 0.0) {
    wn.regime = Regime::AboveBarrier;
    wn.k1 = std::sqrt(excess);
  } else {
    wn.regime = Regime::BelowBarrier;
    wn.k3 = std::sqrt(-excess);
  }
  return wn;
}

namespace {

double canonical_wronskian(BasisKind kind, double k) {
  // sin/cos: sin(-k sin) - k cos cos = -k; sinh/cosh: k sinh^2 - k cosh^2 = -k;
  // (t, 1): t * 0 - 1 * 1 = -1.
  return kind == BasisKind::Linear ? -1.0 : -k;
}

}  // namespace

BasisPair::BasisPair(BasisKind kind, double k, double origin, Mat2 mix)
    : kind_(kind), k_(kind == BasisKind::Linear ? 0.0 : k), origin_(origin), mix_(mix) {
  if (kind != BasisKind::Linear && !(k > 0.0 && std::isfinite(k))) {
    throw DomainError("basis wavenumber must be finite and > 0");
  }
  const double det = mix_[0][0] * mix_[1][1] - mix_[0][1] * mix_[1][0];
  if (!(std::abs(det) > 0.0) || !std::isfinite(det)) {
    throw DomainError("basis recombination matrix must be invertible");
  }
  wronskian_ = det * canonical_wronskian(kind_, k_);
}

double BasisPair::curvature() const {
  switch (kind_) {
    case BasisKind::Trig:
      return -1.0;
    case BasisKind::Hyperbolic:
      return 1.0;
    case BasisKind::Linear:
      return 0.0;
  }
  return 0.0;
}

BasisValues BasisPair::eval(double x) const {
  const double t = x - origin_;
  double f1 = 0.0, f2 = 0.0, df1 = 0.0, df2 = 0.0;
  switch (kind_) {
    case BasisKind::Trig: {
      const double s = std::sin(k_ * t);
      const double c = std::cos(k_ * t);
      f1 = s;
      f2 = c;
      df1 = k_ * c;
      df2 = -k_ * s;
      break;
    }
    case BasisKind::Hyperbolic: {
      const double s = std::sinh(k_ * t);
      const double c = std::cosh(k_ * t);
      f1 = s;
      f2 = c;
      df1 = k_ * c;
      df2 = k_ * s;
      break;
    }
    case BasisKind::Linear:
      f1 = t;
      f2 = 1.0;
      df1 = 1.0;
      df2 = 0.0;
      break;
  }
  const double k2c = curvature() * k_ * k_;
  BasisValues v{};
  v.phi1 = mix_[0][0] * f1 + mix_[0][1] * f2;
  v.phi2 = mix_[1][0] * f1 + mix_[1][1] * f2;
  v.dphi1 = mix_[0][0] * df1 + mix_[0][1] * df2;
  v.dphi2 = mix_[1][0] * df1 + mix_[1][1] * df2;
  v.ddphi1 = k2c * v.phi1;
  v.ddphi2 = k2c * v.phi2;
  return v;
}

BasisPair BasisPair::recombined(const Mat2& m) const {
  Mat2 out{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      out[i][j] = m[i][0] * mix_[0][j] + m[i][1] * mix_[1][j];
    }
  }
  return BasisPair(kind_, kind_ == BasisKind::Linear ? 1.0 : k_, origin_, out);
}

BasisPair basis_for_region(Region region, const Wavenumbers& wn, double origin) {
  if (region == Region::Well) {
    return BasisPair(BasisKind::Trig, wn.k2, origin);
  }
  switch (wn.regime) {
    case Regime::AboveBarrier:
      return BasisPair(BasisKind::Trig, *wn.k1, origin);
    case Regime::BelowBarrier:
      return BasisPair(BasisKind::Hyperbolic, *wn.k3, origin);
    case Regime::AtThreshold:
      break;
  }
  return BasisPair(BasisKind::Linear, 1.0, origin);
}

double grid_region_potential(std::span<const double> grid, const LatticeSpec& lat,
                             std::size_t min_points) {
  if (grid.size() < min_points) {
    throw GridError("grid needs at least " + std::to_string(min_points) + " points, got " +
                    std::to_string(grid.size()));
  }
  const double h = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
  if (!(h > 0.0)) {
    throw GridError("grid must be strictly increasing");
  }
  const PointLocation first = classify_point(grid.front(), lat);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i > 0) {
      const double step = grid[i] - grid[i - 1];
      if (!(step > 0.0) || std::abs(step - h) > 1e-6 * h) {
        throw GridError("grid spacing must be uniform");
      }
    }
    const PointLocation loc = classify_point(grid[i], lat);
    if (loc.region != first.region || loc.cell != first.cell) {
      throw GridError("grid crosses a region boundary");
    }
  }
  return first.region == Region::Well ? 0.0 : lat.v0();
}

double schrodinger_residual(std::span<const double> phi, double energy, const LatticeSpec& lat,
                            std::span<const double> grid) {
  if (phi.size() != grid.size()) {
    throw GridError("schrodinger_residual: phi and grid sizes differ");
  }
  const double v = grid_region_potential(grid, lat, 3);
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double hm = grid[i] - grid[i - 1];
    const double hp = grid[i + 1] - grid[i];
    const double second =
        2.0 * ((phi[i + 1] - phi[i]) / hp - (phi[i] - phi[i - 1]) / hm) / (hp + hm);
    worst = std::max(worst, std::abs(-second + (v - energy) * phi[i]));
  }
  return worst;
}

}  // namespace kpqhj
