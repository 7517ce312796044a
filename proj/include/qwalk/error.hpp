#pragma once

#include <stdexcept>
#include <string>

namespace qwalk {

// Non-finite or out-of-range numeric argument.
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

// Vertex count or dense storage too large.
class SizeError : public std::length_error {
 public:
  explicit SizeError(const std::string& what) : std::length_error(what) {}
};

// Operation requires odd cycle lengths.
class UnsupportedParity : public std::domain_error {
 public:
  explicit UnsupportedParity(const std::string& what) : std::domain_error(what) {}
};

// Quadrature step too coarse for the integrand.
class ResolutionError : public std::domain_error {
 public:
  explicit ResolutionError(const std::string& what) : std::domain_error(what) {}
};

// Hypotheses of a theorem-level check are not met.
class PreconditionError : public std::domain_error {
 public:
  explicit PreconditionError(const std::string& what) : std::domain_error(what) {}
};

}  // namespace qwalk
