#include "fragwave/levy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "fragwave/errors.hpp"
#include "fragwave/parallel.hpp"
#include "fragwave/rng.hpp"
#include "fragwave/roots.hpp"

namespace fragwave {

namespace {
constexpr double kMergeTol = 1e-12;
}

double SubordinatorLaw::total_jump_rate() const {
  double acc = 0.0;
  for (const auto& j : jumps) acc += j.rate;
  return acc;
}

SubordinatorLaw tagged_law(const DislocationMeasure& nu) {
  std::vector<JumpAtom> raw;
  for (const auto& a : nu.atoms()) {
    const auto& sizes = a.fragments.sizes();
    const auto& logs = a.fragments.log_sizes();
    for (std::size_t n = 0; n < sizes.size(); ++n)
      raw.push_back({-logs[n], a.weight * sizes[n]});
  }
  std::sort(raw.begin(), raw.end(),
            [](const JumpAtom& l, const JumpAtom& r) { return l.size < r.size; });
  SubordinatorLaw law;
  for (const auto& j : raw) {
    if (!law.jumps.empty() && j.size - law.jumps.back().size <= kMergeTol)
      law.jumps.back().rate += j.rate;
    else
      law.jumps.push_back(j);
  }
  law.killing_rate = nu.killing_rate();
  return law;
}

double laplace_exponent_psi(const DislocationMeasure& nu, double c, double beta) {
  if (!std::isfinite(beta) || beta < 0.0)
    throw std::invalid_argument("laplace_exponent_psi: beta must be >= 0");
  if (beta == 0.0) return -nu.killing_rate();  // phi(0) without the p > -1 guard
  return c * beta - phi(nu, beta);
}

double largest_psi_root(const DislocationMeasure& nu, double c) {
  if (!std::isfinite(c) || c <= 0.0)
    throw std::invalid_argument("largest_psi_root: c must be > 0");
  auto psi = [&](double b) { return laplace_exponent_psi(nu, c, b); };

  // psi is convex with psi(beta)/beta -> c, so it is positive beyond some
  // point; double until found, then take the last nonpositive grid value.
  double hi = 1.0;
  int guard = 0;
  while (psi(hi) <= 0.0) {
    hi *= 2.0;
    if (++guard > 60) throw NumericalError("largest_psi_root: psi stays nonpositive");
  }
  const int steps = 4096;
  double prev_b = 0.0;
  double root_lo = -1.0, root_hi = -1.0;
  for (int k = 1; k <= steps; ++k) {
    double b = hi * static_cast<double>(k) / steps;
    if (psi(prev_b) <= 0.0 && psi(b) > 0.0) {
      root_lo = prev_b;
      root_hi = b;
    }
    prev_b = b;
  }
  if (root_lo < 0.0) return 0.0;  // psi > 0 on (0, hi]: largest root is 0
  double flo = psi(root_lo);
  if (flo == 0.0 && root_lo == 0.0) {
    // Root is exactly 0 unless psi dips negative afterwards, handled above.
    return 0.0;
  }
  return brent_root(psi, root_lo, root_hi, flo, psi(root_hi), 1e-13, 1e-14).x;
}

ScaleTable::ScaleTable(double dx, std::vector<double> values, double c)
    : dx_(dx), c_(c), values_(std::move(values)) {
  if (!std::isfinite(dx_) || dx_ <= 0.0)
    throw std::invalid_argument("ScaleTable: dx must be > 0");
  if (values_.size() < 2) throw std::invalid_argument("ScaleTable: need >= 2 nodes");
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (!std::isfinite(values_[i]) || values_[i] <= 0.0)
      throw NumericalError("ScaleTable: node " + std::to_string(i) +
                           " is not positive");
  for (std::size_t i = 0; i + 1 < values_.size(); ++i)
    if (values_[i + 1] <= values_[i])
      throw NumericalError("ScaleTable: values must increase strictly, node " +
                           std::to_string(i + 1) + " does not");
  x_max_ = dx_ * static_cast<double>(values_.size() - 1);
}

double ScaleTable::operator()(double x) const {
  if (!(x >= 0.0) || x > x_max_ * (1.0 + 1e-12))
    throw std::invalid_argument("ScaleTable: x outside [0, x_max]");
  double t = std::min(x, x_max_) / dx_;
  auto i = static_cast<std::size_t>(t);
  if (i + 1 >= values_.size()) return values_.back();
  double frac = t - static_cast<double>(i);
  return values_[i] + frac * (values_[i + 1] - values_[i]);
}

ScaleTable scale_function(const DislocationMeasure& nu, double c, double x_max,
                          double dx) {
  if (!std::isfinite(c) || c <= 0.0)
    throw std::invalid_argument("scale_function: c must be > 0");
  if (!std::isfinite(dx) || dx <= 0.0)
    throw std::invalid_argument("scale_function: dx must be > 0");
  if (!std::isfinite(x_max) || x_max < dx)
    throw std::invalid_argument("scale_function: x_max must be >= dx");

  const SubordinatorLaw law = tagged_law(nu);
  const auto n = static_cast<std::size_t>(std::ceil(x_max / dx - 1e-9)) + 1;

  // Kernel H(z) = killing + rate of jumps larger than z, sampled at the grid.
  // Exactly at a jump size the midpoint value is used so the trapezoid rule
  // stays second order across the kernel's discontinuity.
  std::vector<double> kernel(n, law.killing_rate);
  for (std::size_t j = 0; j < n; ++j) {
    double z = static_cast<double>(j) * dx;
    for (const auto& atom : law.jumps) {
      if (atom.size > z + kMergeTol)
        kernel[j] += atom.rate;
      else if (std::abs(atom.size - z) <= kMergeTol)
        kernel[j] += 0.5 * atom.rate;
    }
  }

  const double denom = c - 0.5 * dx * kernel[0];
  if (denom <= 0.0)
    throw std::invalid_argument("scale_function: dx too coarse for this drift");

  std::vector<double> w(n);
  w[0] = 1.0 / c;
  for (std::size_t j = 1; j < n; ++j) {
    double integral = 0.5 * kernel[j] * w[0];  // y = 0 endpoint
    const double* kview = kernel.data();
    const double* wview = w.data();
    for (std::size_t m = 1; m < j; ++m) integral += kview[j - m] * wview[m];
    w[j] = (1.0 + dx * integral) / denom;
  }
  return ScaleTable(dx, std::move(w), c);
}

double two_sided_exit(const ScaleTable& table, double x, double h) {
  if (!std::isfinite(x) || x < 0.0)
    throw std::invalid_argument("two_sided_exit: x must be >= 0");
  if (!std::isfinite(h) || h < 0.0)
    throw std::invalid_argument("two_sided_exit: h must be >= 0");
  if (x + h > table.x_max() * (1.0 + 1e-12))
    throw std::invalid_argument("two_sided_exit: x + h beyond the table");
  if (h == 0.0) return 1.0;
  return table(x) / table(x + h);
}

EstimateCI mc_first_passage(const DislocationMeasure& nu, double c, double x, double h,
                            std::uint64_t trials, std::uint64_t master_key,
                            unsigned threads) {
  if (!std::isfinite(c) || c <= 0.0)
    throw std::invalid_argument("mc_first_passage: c must be > 0");
  if (!std::isfinite(x) || x < 0.0)
    throw std::invalid_argument("mc_first_passage: x must be >= 0");
  if (!std::isfinite(h) || h < 0.0)
    throw std::invalid_argument("mc_first_passage: h must be >= 0");
  if (trials == 0) throw std::invalid_argument("mc_first_passage: trials must be >= 1");

  const SubordinatorLaw law = tagged_law(nu);
  const double jump_rate = law.total_jump_rate();
  const double total = jump_rate + law.killing_rate;
  std::vector<double> cum;
  cum.reserve(law.jumps.size());
  double acc = 0.0;
  for (const auto& j : law.jumps) {
    acc += j.rate;
    cum.push_back(acc);
  }

  std::vector<std::uint8_t> hit(trials, 0);
  parallel_for_index(trials, threads, [&](std::uint64_t i) {
    SplitRng rng(master_key, i);
    // Level of the process started at x, drifting up at rate c; killed at 0.
    double level = x;
    const double target = x + h;
    while (true) {
      if (level >= target) {  // drift reaches the target before the next event
        hit[i] = 1;
        return;
      }
      double dt = rng.exponential(total);
      if (level + c * dt >= target) {
        hit[i] = 1;
        return;
      }
      level += c * dt;
      double u = rng.next_unit() * total;
      if (u >= jump_rate) return;  // killed
      auto it = std::upper_bound(cum.begin(), cum.end(), u);
      std::size_t idx = static_cast<std::size_t>(it - cum.begin());
      if (idx >= law.jumps.size()) idx = law.jumps.size() - 1;
      level -= law.jumps[idx].size;
      if (level < 0.0) return;  // crossed the barrier
    }
  });

  std::uint64_t successes = 0;
  for (auto f : hit) successes += f;
  return binomial_estimate(successes, trials);
}

double scale_laplace_transform(const ScaleTable& table, double beta, double psi_root) {
  if (!(beta > psi_root))
    throw std::invalid_argument(
        "scale_laplace_transform: beta must exceed the largest psi root");
  const auto& w = table.values();
  const double dx = table.dx();
  double integral = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    double weight = (j == 0 || j + 1 == w.size()) ? 0.5 : 1.0;
    integral += weight * std::exp(-beta * static_cast<double>(j) * dx) * w[j];
  }
  integral *= dx;
  // W grows like exp(psi_root * x): extend the truncated integral with the
  // closed-form tail of that envelope anchored at the last node.
  double tail = w.back() * std::exp(-beta * table.x_max()) / (beta - psi_root);
  return integral + tail;
}

}  // namespace fragwave
