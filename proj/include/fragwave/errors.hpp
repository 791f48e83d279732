#pragma once

#include <stdexcept>
#include <string>

namespace fragwave {

// Thrown when an algorithm cannot deliver its advertised accuracy or a
// required bracket/root does not exist for the given inputs.  Distinct from
// std::invalid_argument, which is reserved for malformed parameters.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fragwave
