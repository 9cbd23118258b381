#pragma once

namespace kpqhj {

// alpha = |alpha| e^{ia}, beta = |beta| e^{ib} in
//   phi = R [alpha exp(i S0) + beta exp(-i S0)].
struct SuperpositionParams {
  double alpha_mod;
  double a;
  double beta_mod;
  double b;

  // Throws DomainError unless both moduli are >= 0 with a positive sum.
  SuperpositionParams(double alpha_mod, double a, double beta_mod, double b);

  // |alpha| = (1 + gamma) / 2, |beta| = (1 - gamma) / 2, a = delta, b = -delta.
  // gamma must lie in [-1, 1].
  static SuperpositionParams from_gamma_delta(double gamma, double delta);

  // The Bohm ansatz alpha = 1, beta = 0.
  static SuperpositionParams bohm() { return {1.0, 0.0, 0.0, 0.0}; }

  // (|alpha| - |beta|) / (|alpha| + |beta|), in [-1, 1].
  double gamma() const;

  // (a - b) / 2.
  double delta() const;
};

}  // namespace kpqhj
