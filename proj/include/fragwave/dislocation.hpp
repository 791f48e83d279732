#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fragwave/rng.hpp"

namespace fragwave {

// One point of the decreasing simplex: fragment sizes s1 >= s2 >= ... > 0
// with sum <= 1.  At least two entries are required; a dislocation measure
// never charges states with s2 = 0 (a split must actually split).
// Construction normalises harmless float noise (ordering violations and
// mass excess up to 1e-12) and rejects anything worse.
class FragmentVector {
 public:
  explicit FragmentVector(std::vector<double> sizes);

  const std::vector<double>& sizes() const { return sizes_; }
  const std::vector<double>& log_sizes() const { return log_sizes_; }  // ln s_n < 0
  double mass() const { return mass_; }                                // sum of sizes
  std::size_t count() const { return sizes_.size(); }

 private:
  std::vector<double> sizes_;
  std::vector<double> log_sizes_;
  double mass_ = 0.0;
};

struct DislocationAtom {
  double weight;  // jump rate, > 0
  FragmentVector fragments;
};

// Finite atomic dislocation measure: a fragment with log-size x splits at
// rate weight(a) into children at x + ln s_n for each atom a chosen in
// proportion to its weight.
class DislocationMeasure {
 public:
  explicit DislocationMeasure(std::vector<DislocationAtom> atoms, std::string name = "");

  const std::vector<DislocationAtom>& atoms() const { return atoms_; }
  const std::string& name() const { return name_; }
  double total_rate() const { return total_rate_; }

  // Rate of mass lost to dust per unit time: sum of weight * (1 - mass).
  double killing_rate() const { return killing_rate_; }

  // Same split distribution, all rates multiplied by m > 0.
  DislocationMeasure scaled(double m) const;

  // Samples an atom in proportion to its weight.
  const FragmentVector& sample_fragments(SplitRng& rng) const;

 private:
  std::vector<DislocationAtom> atoms_;
  std::string name_;
  std::vector<double> cumulative_;
  double total_rate_ = 0.0;
  double killing_rate_ = 0.0;
};

// phi(p) = sum_a w_a (1 - sum_n s_n^{1+p}), finite for p > -1.  Increasing
// and concave; phi(0) is the killing rate.
double phi(const DislocationMeasure& nu, double p);

// phi'(p) = sum_a w_a sum_n (-ln s_n) s_n^{1+p}, strictly positive.
double phi_prime(const DislocationMeasure& nu, double p);

// c_p = phi(p) / (1 + p), the speed attached to exponent p.
double wave_speed(const DislocationMeasure& nu, double p);

// g(p) = (1+p) phi'(p) - phi(p).  g > 0 near p = -1 and the critical
// exponent is its unique root; beyond it c_p starts decreasing.
double critical_gap(const DislocationMeasure& nu, double p);

// True when g changes sign on the scan range (-1, 64]; every valid finite
// atomic measure does unless the root lies beyond the cap.
bool has_critical_exponent(const DislocationMeasure& nu);

// Root of g, located by bracket scan plus Brent to |g| < 1e-10.
// Throws NumericalError when no bracket exists in (-1, 64].
double critical_exponent(const DislocationMeasure& nu);

// c_bar = phi'(p_bar) = c_{p_bar}; the minimal speed admitting a wave.
double critical_speed(const DislocationMeasure& nu);

}  // namespace fragwave
