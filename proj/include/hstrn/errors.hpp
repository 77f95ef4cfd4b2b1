#pragma once

#include <stdexcept>
#include <string>

namespace hstrn {

// An adaptively truncated series could not meet its tail tolerance
// before hitting the term cap (or started to diverge).
class truncation_error : public std::runtime_error {
 public:
  truncation_error(const std::string& what, double tail)
      : std::runtime_error(what), tail_estimate(tail) {}
  double tail_estimate;
};

// An enumeration or term budget would be exceeded.
class resource_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Quadrature or contour-integration failure.
class numerical_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hstrn
