#pragma once

#include <stdexcept>
#include <string>

namespace kpqhj {

// Base for every error raised by the library. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the physical domain (E <= 0, bad lattice, bad energy range).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Grid too short, non-uniform, or straddling a region boundary.
class GridError : public Error {
 public:
  using Error::Error;
};

// Integration constants violate mu != 0.
class ConstantError : public Error {
 public:
  using Error::Error;
};

// Interface matching has no admissible solution.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// Gamma = 0: the tangent form of the Bloch condition is not injective.
class GammaDegenerateError : public Error {
 public:
  using Error::Error;
};

// Evaluation too close to a pole of tan(k1 d) or tan(k2 c).
class TanPoleError : public Error {
 public:
  using Error::Error;
};

// Moebius denominator M z + N vanishes.
class PoleError : public Error {
 public:
  using Error::Error;
};

class NoConvergenceError : public Error {
 public:
  using Error::Error;
};

// Energy lies in a gap, |cos Ke| > 1.
class ForbiddenEnergyError : public Error {
 public:
  using Error::Error;
};

}  // namespace kpqhj
