#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fragwave/wave_solver.hpp"

namespace fragwave {

// Self-contained acceptance battery over two pinned reference measures
// (conservative binary split, dissipative half+quarter split).  Every
// criterion reports one line; the battery never patches a failure.
struct VerifyOptions {
  std::uint64_t seed = 0xF4A6;
  unsigned threads = 1;
  bool quick = false;  // 1/8 Monte Carlo budgets for smoke runs
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;  // measured values and the applied tolerance
};

struct VerificationReport {
  std::vector<CriterionResult> criteria;
  std::vector<CrossValidationRow> cross_rows;  // backing data for the CSV

  bool all_pass() const {
    for (const auto& c : criteria)
      if (!c.pass) return false;
    return true;
  }
};

VerificationReport run_verification(const VerifyOptions& opts = {});

}  // namespace fragwave
