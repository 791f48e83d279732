#pragma once

#include <cstddef>
#include <vector>

#include "fragwave/dislocation.hpp"

namespace fragwave {

// Uniform-grid profile on [0, x_max] extended by the travelling-wave
// boundary convention: 1 on (-inf, 0), linear interpolation on the grid,
// 0 beyond x_max.  Values are kept in [0, 1] and nonincreasing; violations
// within 1e-12 are clamped, larger ones rejected.
class WaveGrid {
 public:
  WaveGrid(double dx, std::vector<double> values);

  static WaveGrid constant(double dx, std::size_t nodes, double value);

  double operator()(double x) const;

  double dx() const { return dx_; }
  double x_max() const { return x_max_; }
  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }

 private:
  double dx_;
  double x_max_;
  std::vector<double> values_;
};

// (L f)(x) = sum_a weight(a) * (prod_n f(x + ln s_n) - f(x)).
// The product form encodes independence of the children of one split.
double apply_generator(const DislocationMeasure& nu, const WaveGrid& f, double x);

// Wave residual c f'(x) + (L f)(x) at interior node i, with f' the central
// difference.  Nodes 0 and size-1 have no central difference and are
// rejected.
double residual_at(const DislocationMeasure& nu, double c, const WaveGrid& f,
                   std::size_t i);

struct ResidualReport {
  std::vector<double> xs;      // interior nodes, kink nodes excluded
  std::vector<double> values;  // residual at xs
  double max_abs = 0.0;
  double x_at_max = 0.0;
  std::size_t skipped_nodes = 0;  // nodes adjacent to a jump offset
};

// First-generation jump offsets -ln s (sorted, deduplicated).  The wave has
// a genuine slope jump at each, so the profile is only piecewise C^1 and a
// central difference there measures the kink, not the equation.
std::vector<double> kink_offsets(const DislocationMeasure& nu);

// Residual over all interior nodes except those within one grid cell of a
// kink offset (the same smoothness proviso that already excludes x = 0).
ResidualReport residual_report(const DislocationMeasure& nu, double c,
                               const WaveGrid& f);

}  // namespace fragwave
