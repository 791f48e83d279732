#include "fragwave/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fragwave {

EstimateCI binomial_estimate(std::uint64_t successes, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("binomial_estimate: n must be > 0");
  if (successes > n) throw std::invalid_argument("binomial_estimate: successes > n");
  EstimateCI e;
  e.n = n;
  e.point = static_cast<double>(successes) / static_cast<double>(n);
  e.se = std::sqrt(e.point * (1.0 - e.point) / static_cast<double>(n));
  e.ci_low = std::max(0.0, e.point - kZ99 * e.se);
  e.ci_high = std::min(1.0, e.point + kZ99 * e.se);
  return e;
}

EstimateCI mean_estimate(std::span<const double> values, bool clamp_unit) {
  if (values.empty()) throw std::invalid_argument("mean_estimate: empty sample");
  EstimateCI e;
  e.n = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  e.point = sum / static_cast<double>(e.n);
  double ss = 0.0;
  for (double v : values) {
    double d = v - e.point;
    ss += d * d;
  }
  double var = e.n > 1 ? ss / static_cast<double>(e.n - 1) : 0.0;
  e.se = std::sqrt(var / static_cast<double>(e.n));
  e.ci_low = e.point - kZ99 * e.se;
  e.ci_high = e.point + kZ99 * e.se;
  if (clamp_unit) {
    e.ci_low = std::max(0.0, e.ci_low);
    e.ci_high = std::min(1.0, e.ci_high);
  }
  return e;
}

}  // namespace fragwave
