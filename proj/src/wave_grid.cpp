#include "fragwave/wave_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace fragwave {

namespace {
constexpr double kValueTol = 1e-12;
}

WaveGrid::WaveGrid(double dx, std::vector<double> values)
    : dx_(dx), values_(std::move(values)) {
  if (!std::isfinite(dx_) || dx_ <= 0.0)
    throw std::invalid_argument("WaveGrid: dx must be > 0");
  if (values_.size() < 2)
    throw std::invalid_argument("WaveGrid: need at least two nodes");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    double v = values_[i];
    if (!std::isfinite(v) || v < -kValueTol || v > 1.0 + kValueTol)
      throw std::invalid_argument("WaveGrid: node " + std::to_string(i) +
                                  " outside [0, 1]");
    values_[i] = std::clamp(v, 0.0, 1.0);
  }
  for (std::size_t i = 0; i + 1 < values_.size(); ++i) {
    if (values_[i + 1] > values_[i] + kValueTol)
      throw std::invalid_argument("WaveGrid: values must be nonincreasing, node " +
                                  std::to_string(i + 1) + " rises");
    values_[i + 1] = std::min(values_[i + 1], values_[i]);
  }
  x_max_ = dx_ * static_cast<double>(values_.size() - 1);
}

WaveGrid WaveGrid::constant(double dx, std::size_t nodes, double value) {
  return WaveGrid(dx, std::vector<double>(nodes, value));
}

double WaveGrid::operator()(double x) const {
  if (x < 0.0) return 1.0;
  if (x >= x_max_) return x == x_max_ ? values_.back() : 0.0;
  double t = x / dx_;
  auto i = static_cast<std::size_t>(t);
  if (i + 1 >= values_.size()) return values_.back();
  double frac = t - static_cast<double>(i);
  return values_[i] + frac * (values_[i + 1] - values_[i]);
}

double apply_generator(const DislocationMeasure& nu, const WaveGrid& f, double x) {
  double fx = f(x);
  double acc = 0.0;
  for (const auto& a : nu.atoms()) {
    double prod = 1.0;
    for (double ls : a.fragments.log_sizes()) prod *= f(x + ls);
    acc += a.weight * (prod - fx);
  }
  return acc;
}

double residual_at(const DislocationMeasure& nu, double c, const WaveGrid& f,
                   std::size_t i) {
  if (i == 0 || i + 1 >= f.size())
    throw std::invalid_argument("residual_at: need an interior node");
  const auto& v = f.values();
  double slope = (v[i + 1] - v[i - 1]) / (2.0 * f.dx());
  return c * slope + apply_generator(nu, f, static_cast<double>(i) * f.dx());
}

std::vector<double> kink_offsets(const DislocationMeasure& nu) {
  std::vector<double> offsets;
  for (const auto& a : nu.atoms())
    for (double ls : a.fragments.log_sizes()) offsets.push_back(-ls);
  std::sort(offsets.begin(), offsets.end());
  offsets.erase(std::unique(offsets.begin(), offsets.end(),
                            [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
                offsets.end());
  return offsets;
}

ResidualReport residual_report(const DislocationMeasure& nu, double c,
                               const WaveGrid& f) {
  ResidualReport report;
  const auto kinks = kink_offsets(nu);
  const double dx = f.dx();
  // A central difference straddling a slope jump converges to the kink
  // average, not f'(x); skip the nodes within one cell of an offset.
  const double guard = dx * (1.0 - 1e-9);
  for (std::size_t i = 1; i + 1 < f.size(); ++i) {
    double x = static_cast<double>(i) * dx;
    bool near_kink = false;
    for (double k : kinks) {
      if (std::abs(x - k) < guard) {
        near_kink = true;
        break;
      }
    }
    if (near_kink) {
      ++report.skipped_nodes;
      continue;
    }
    double r = residual_at(nu, c, f, i);
    report.xs.push_back(x);
    report.values.push_back(r);
    if (std::abs(r) > report.max_abs) {
      report.max_abs = std::abs(r);
      report.x_at_max = x;
    }
  }
  return report;
}

}  // namespace fragwave
