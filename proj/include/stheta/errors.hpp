#pragma once

#include <stdexcept>
#include <string>

namespace stheta {

/// Thrown when a configured size cap (monomial space, coset count, lattice points) would be exceeded.
class ResourceLimitError : public std::runtime_error {
 public:
  explicit ResourceLimitError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace stheta
