#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fragwave/dislocation.hpp"
#include "fragwave/rng.hpp"

namespace testhelp {

inline fragwave::DislocationMeasure binary_half() {
  return fragwave::DislocationMeasure({{1.0, fragwave::FragmentVector({0.5, 0.5})}},
                                      "binary-half");
}

inline fragwave::DislocationMeasure half_quarter() {
  return fragwave::DislocationMeasure({{1.0, fragwave::FragmentVector({0.5, 0.25})}},
                                      "half-quarter");
}

// Returns the message of the expected exception, or a marker string that will
// fail any substring check.
template <class Ex, class Fn>
std::string thrown_message(Fn&& fn) {
  try {
    fn();
  } catch (const Ex& e) {
    return e.what();
  } catch (...) {
    return "<wrong exception type>";
  }
  return "<no exception>";
}

inline bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

// Plain bisection used as an independent oracle against library root finding.
inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    double fmid = f(mid);
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Random measures for property checks.  Conservative atoms use dyadic masses
// that sum to exactly 1; dissipative ones scale those by a factor < 1.
inline std::vector<fragwave::DislocationMeasure> random_measures(std::uint64_t seed,
                                                                 int count) {
  std::vector<fragwave::DislocationMeasure> out;
  fragwave::SplitRng rng(seed, 0);
  const std::vector<std::vector<double>> dyadic = {
      {0.5, 0.5},
      {0.5, 0.25, 0.25},
      {0.5, 0.25, 0.125, 0.125},
      {0.25, 0.25, 0.25, 0.25},
      {0.75, 0.125, 0.125},
  };
  for (int i = 0; i < count; ++i) {
    std::size_t n_atoms = 1 + rng.uniform_index(3);
    std::vector<fragwave::DislocationAtom> atoms;
    for (std::size_t a = 0; a < n_atoms; ++a) {
      auto sizes = dyadic[rng.uniform_index(dyadic.size())];
      if (rng.next_unit() < 0.4) {
        double shrink = 0.6 + 0.35 * rng.next_unit();
        for (double& s : sizes) s *= shrink;
      }
      double weight = 0.25 + 2.0 * rng.next_unit();
      atoms.push_back({weight, fragwave::FragmentVector(std::move(sizes))});
    }
    out.emplace_back(std::move(atoms), "random-" + std::to_string(i));
  }
  return out;
}

}  // namespace testhelp
