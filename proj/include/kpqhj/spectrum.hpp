#pragma once

// Closed-form Kronig-Penney dispersion, Bloch wavenumbers, band edges and an
// independent transfer-matrix evaluation of cos Ke.

#include <optional>
#include <vector>

#include "kpqhj/model.hpp"

namespace kpqhj {

// cos Ke as a function of E:
//   E > V0: cos k1d cos k2c - (k1^2 + k2^2) / (2 k1 k2) sin k1d sin k2c
//   E < V0: cosh k3d cos k2c - (k2^2 - k3^2) / (2 k2 k3) sinh k3d sin k2c
//   E = V0: cos k2c - (k2 d / 2) sin k2c
// Throws DomainError for E <= 0.
double dispersion_rhs(double energy, const LatticeSpec& lat);

struct BlochPoint {
  double energy;
  double cos_ke;
  bool allowed;                    // |cos_ke| <= 1 + 1e-14
  std::optional<double> k_bloch;   // arccos(cos_ke) / e in [0, pi / e]
};

// The +K representative of the reduced zone; -K gives the same cos Ke.
BlochPoint bloch_wavenumber(double energy, const LatticeSpec& lat);

struct Band {
  int index;
  double e_lo;
  double e_hi;
  bool clipped_lo;  // e_lo is the scan boundary, not a band edge
  bool clipped_hi;
};

// Uniform scan of dispersion_rhs on n_samples points of [e_min, e_max]; every
// allowed/forbidden transition is refined by bisection on |f| - 1 to
// 1e-12 * max(1, e_max). Bands narrower than the scan step can be missed.
// Throws DomainError unless 0 < e_min < e_max and n_samples >= 2.
std::vector<Band> find_bands(const LatticeSpec& lat, double e_min, double e_max, int n_samples);

struct TransferResult {
  Mat2 matrix;  // (phi, phi') at x = e from (phi, phi') at x = 0
  double half_trace;
};

// Monodromy over one period from exact region propagators, well then
// barrier. det = 1 and half_trace = cos Ke.
TransferResult transfer_matrix_oracle(double energy, const LatticeSpec& lat);

}  // namespace kpqhj
