#include "kpqhj/superposition.hpp"

#include <cmath>

#include "kpqhj/errors.hpp"

namespace kpqhj {

SuperpositionParams::SuperpositionParams(double alpha_mod_, double a_, double beta_mod_,
                                         double b_)
    : alpha_mod(alpha_mod_), a(a_), beta_mod(beta_mod_), b(b_) {
  if (!std::isfinite(alpha_mod) || !std::isfinite(beta_mod) || !std::isfinite(a) ||
      !std::isfinite(b) || alpha_mod < 0.0 || beta_mod < 0.0 || !(alpha_mod + beta_mod > 0.0)) {
    throw DomainError("superposition: need |alpha|, |beta| >= 0 with |alpha| + |beta| > 0");
  }
}

SuperpositionParams SuperpositionParams::from_gamma_delta(double gamma, double delta) {
  if (!(gamma >= -1.0 && gamma <= 1.0)) {
    throw DomainError("superposition: gamma must lie in [-1, 1]");
  }
  return {(1.0 + gamma) / 2.0, delta, (1.0 - gamma) / 2.0, -delta};
}

double SuperpositionParams::gamma() const {
  return (alpha_mod - beta_mod) / (alpha_mod + beta_mod);
}

double SuperpositionParams::delta() const { return (a - b) / 2.0; }

}  // namespace kpqhj
