#pragma once

// Kronig-Penney lattice, regime-tagged wavenumbers and real Schroedinger
// basis pairs. Units throughout: hbar = 1, 2m = 1, so k = sqrt(E - V).

#include <array>
#include <optional>
#include <span>
#include <string_view>

namespace kpqhj {

// Periodic rectangular-barrier potential: V = 0 on the well [n e, n e + c),
// V = v0 on the barrier [n e + c, (n + 1) e).
//
// v0 = 0 is accepted and describes the free lattice.
class LatticeSpec {
 public:
  // Throws DomainError unless v0 >= 0, c > 0, d > 0 (all finite).
  LatticeSpec(double v0, double c, double d);

  double v0() const { return v0_; }
  double c() const { return c_; }
  double d() const { return d_; }
  double period() const { return period_; }

  double potential(double x) const;

  friend bool operator==(const LatticeSpec&, const LatticeSpec&) = default;

 private:
  double v0_;
  double c_;
  double d_;
  double period_;
};

enum class Region { Well, Barrier };

std::string_view to_string(Region region);

struct PointLocation {
  Region region;
  long cell;       // x = cell * e + local_x
  double local_x;  // in [0, e)
};

// Total. Points with local_x in {0, c} belong to the region starting there.
PointLocation classify_point(double x, const LatticeSpec& lat);

enum class Regime { AboveBarrier, BelowBarrier, AtThreshold };

std::string_view to_string(Regime regime);

// |E - v0| <= threshold_window(v0) selects AtThreshold.
double threshold_window(double v0);

struct Wavenumbers {
  Regime regime;
  std::optional<double> k1;  // barrier, propagating (AboveBarrier)
  double k2;                 // well
  std::optional<double> k3;  // barrier, evanescent (BelowBarrier)
};

// Throws DomainError for E <= 0.
Wavenumbers wavenumbers(double energy, const LatticeSpec& lat);

enum class BasisKind {
  Trig,        // (sin kt, cos kt)
  Hyperbolic,  // (sinh kt, cosh kt)
  Linear,      // (t, 1), the E = V solutions
};

using Mat2 = std::array<std::array<double, 2>, 2>;

inline constexpr Mat2 kIdentity2{{{1.0, 0.0}, {0.0, 1.0}}};

struct BasisValues {
  double phi1, phi2;
  double dphi1, dphi2;
  double ddphi1, ddphi2;
};

// Two real independent solutions of -phi'' + (V - E) phi = 0 in one region,
// written in the local coordinate t = x - origin. The canonical pair for each
// kind may be recombined by a real invertible matrix:
//   phi1 = mix[0][0] f1 + mix[0][1] f2,  phi2 = mix[1][0] f1 + mix[1][1] f2.
class BasisPair {
 public:
  BasisPair(BasisKind kind, double k, double origin = 0.0, Mat2 mix = kIdentity2);

  BasisKind kind() const { return kind_; }
  double k() const { return k_; }
  double origin() const { return origin_; }
  const Mat2& mix() const { return mix_; }
  bool canonical() const { return mix_ == kIdentity2; }

  BasisValues eval(double x) const;

  // phi1 phi2' - phi1' phi2, constant in x.
  double wronskian() const { return wronskian_; }

  // phi'' = curvature() * k^2 * phi for both members of the pair:
  // -1 for Trig, +1 for Hyperbolic, 0 for Linear.
  double curvature() const;

  // Same kind, k and origin with the pair recombined by m (new = m * old).
  BasisPair recombined(const Mat2& m) const;

 private:
  BasisKind kind_;
  double k_;
  double origin_;
  Mat2 mix_;
  double wronskian_;
};

// Well -> Trig(k2); Barrier -> Trig(k1), Hyperbolic(k3) or Linear depending on
// the regime.
BasisPair basis_for_region(Region region, const Wavenumbers& wn, double origin = 0.0);

// Checks that grid has at least min_points strictly increasing, uniformly
// spaced points inside a single region and returns that region's potential.
// Throws GridError otherwise.
double grid_region_potential(std::span<const double> grid, const LatticeSpec& lat,
                             std::size_t min_points);

// max over interior points of |-phi'' + (V - E) phi| by three-point central
// differences. Spacing is taken from the grid itself, so the rounding of the
// grid coordinates does not enter the stencil.
// Throws GridError for fewer than 3 points, non-increasing or non-uniform
// spacing, or a grid spanning more than one region.
double schrodinger_residual(std::span<const double> phi, double energy, const LatticeSpec& lat,
                            std::span<const double> grid);

}  // namespace kpqhj
