#pragma once

#include <cstdint>
#include <span>

namespace fragwave {

// Point estimate with normal-approximation 99% confidence interval.
// For probabilities the interval is clamped to [0, 1].
struct EstimateCI {
  double point = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t n = 0;
};

// Two-sided 99% normal quantile.
inline constexpr double kZ99 = 2.5758293035489004;

// Estimate of a Bernoulli probability from `successes` out of `n` trials.
EstimateCI binomial_estimate(std::uint64_t successes, std::uint64_t n);

// Sample mean with standard error; CI clamped to [0, 1] when `clamp_unit`
// (all estimands in this library live in [0, 1]).
EstimateCI mean_estimate(std::span<const double> values, bool clamp_unit = true);

}  // namespace fragwave
