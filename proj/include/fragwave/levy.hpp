#pragma once

#include <cstdint>
#include <vector>

#include "fragwave/dislocation.hpp"
#include "fragwave/estimate.hpp"

namespace fragwave {

struct JumpAtom {
  double size = 0.0;  // jump of -log(tagged fragment), > 0
  double rate = 0.0;  // > 0
};

// Law of the size-biased tagged fragment: following a uniform-mass particle
// through splits turns the fragmentation into a compound-Poisson subordinator
// with jumps -ln s_n at rate weight * s_n, plus killing at rate phi(nu, 0)
// (the tagged mass may land in the dust).
struct SubordinatorLaw {
  std::vector<JumpAtom> jumps;  // sorted by size, merged within 1e-12
  double killing_rate = 0.0;

  double total_jump_rate() const;
};

SubordinatorLaw tagged_law(const DislocationMeasure& nu);

// Laplace exponent of the spectrally negative process c t - (subordinator):
// psi(beta) = c beta - phi(nu, beta) for beta >= 0.  psi(0) = -phi(nu, 0).
double laplace_exponent_psi(const DislocationMeasure& nu, double c, double beta);

// Largest root of psi on [0, inf); 0 when psi has no positive root.
// Equals the decay rate governing the scale function's exponential growth.
double largest_psi_root(const DislocationMeasure& nu, double c);

// Tabulated scale function W on [0, x_max]: the unique nondecreasing
// solution of c W(x) = 1 + int_0^x H(x - y) W(y) dy with W(0) = 1/c, where
// H(z) = killing + (jump rate of sizes > z).
class ScaleTable {
 public:
  ScaleTable(double dx, std::vector<double> values, double c);

  double operator()(double x) const;  // linear interpolation, x in [0, x_max]

  double dx() const { return dx_; }
  double x_max() const { return x_max_; }
  double drift() const { return c_; }
  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }

 private:
  double dx_;
  double x_max_;
  double c_;
  std::vector<double> values_;
};

// Solves the Volterra equation by trapezoid marching.  The tail integrand is
// piecewise constant with jumps at the atom sizes; at a node equal to a jump
// location the kernel takes the midpoint value, which keeps the trapezoid
// rule second order across the discontinuity.
ScaleTable scale_function(const DislocationMeasure& nu, double c, double x_max,
                          double dx);

// P(hit x + h before the killing barrier at 0 | start at x) = W(x) / W(x + h).
double two_sided_exit(const ScaleTable& table, double x, double h);

// Monte Carlo check of the same probability on the tagged-fragment walk.
EstimateCI mc_first_passage(const DislocationMeasure& nu, double c, double x, double h,
                            std::uint64_t trials, std::uint64_t master_key,
                            unsigned threads = 1);

// Trapezoid transform int_0^inf exp(-beta x) W(x) dx with the exponential
// tail beyond x_max estimated from the known growth rate; equals 1 / psi(beta)
// for beta above the largest psi root.
double scale_laplace_transform(const ScaleTable& table, double beta, double psi_root);

}  // namespace fragwave
