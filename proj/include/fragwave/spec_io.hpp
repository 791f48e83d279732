#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "fragwave/dislocation.hpp"

namespace fragwave {

// Malformed measure files map to this (and to exit code 1 in the CLI),
// keeping them distinct from numerical failures.
class SpecError : public std::runtime_error {
 public:
  explicit SpecError(const std::string& what) : std::runtime_error(what) {}
};

// Optional per-file defaults; command-line flags override them.
struct SpecDefaults {
  std::optional<double> dx;
  std::optional<double> x_max;
  std::optional<double> horizon;
  std::optional<std::uint64_t> block_cap;
  std::optional<std::uint64_t> trials;
};

struct SpecFile {
  DislocationMeasure measure;
  SpecDefaults defaults;
};

// Measure file layout:
//   {
//     "name": "binary-half",
//     "atoms": [{"weight": 1.0, "fragments": [0.5, 0.5]}, ...],
//     "defaults": {"dx": ..., "x_max": ..., "horizon": ...,
//                  "block_cap": ..., "trials": ...}
//   }
// Field errors name the offending path, e.g. "atoms[2].fragments".
SpecFile parse_spec(const std::string& json_text);
SpecFile load_spec(const std::string& path);

}  // namespace fragwave
