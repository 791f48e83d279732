#include "fragwave/dislocation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "fragwave/errors.hpp"
#include "fragwave/roots.hpp"

namespace fragwave {

namespace {
constexpr double kSimplexTol = 1e-12;
}

FragmentVector::FragmentVector(std::vector<double> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2)
    throw std::invalid_argument(
        "FragmentVector: need at least two fragment sizes; measures never "
        "charge states with s2 = 0");
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    double s = sizes_[i];
    if (!std::isfinite(s) || s <= 0.0 || s >= 1.0)
      throw std::invalid_argument("FragmentVector: sizes must lie in (0, 1), entry " +
                                  std::to_string(i) + " is " + std::to_string(s));
  }
  for (std::size_t i = 0; i + 1 < sizes_.size(); ++i) {
    if (sizes_[i + 1] > sizes_[i] + kSimplexTol)
      throw std::invalid_argument("FragmentVector: sizes must be nonincreasing, entries " +
                                  std::to_string(i) + " and " + std::to_string(i + 1) +
                                  " are out of order");
    sizes_[i + 1] = std::min(sizes_[i + 1], sizes_[i]);
  }
  double sum = 0.0;
  for (double s : sizes_) sum += s;
  if (sum > 1.0 + kSimplexTol)
    throw std::invalid_argument("FragmentVector: total mass " + std::to_string(sum) +
                                " exceeds 1");
  if (sum > 1.0)
    for (double& s : sizes_) s /= sum;

  mass_ = 0.0;
  log_sizes_.reserve(sizes_.size());
  for (double s : sizes_) {
    mass_ += s;
    log_sizes_.push_back(std::log(s));
  }
  mass_ = std::min(mass_, 1.0);
}

DislocationMeasure::DislocationMeasure(std::vector<DislocationAtom> atoms, std::string name)
    : atoms_(std::move(atoms)), name_(std::move(name)) {
  if (atoms_.empty())
    throw std::invalid_argument("DislocationMeasure: need at least one atom");
  cumulative_.reserve(atoms_.size());
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    double w = atoms_[i].weight;
    if (!std::isfinite(w) || w <= 0.0)
      throw std::invalid_argument("DislocationMeasure: atom " + std::to_string(i) +
                                  " has non-positive weight");
    total_rate_ += w;
    killing_rate_ += w * std::max(0.0, 1.0 - atoms_[i].fragments.mass());
    cumulative_.push_back(total_rate_);
  }
}

DislocationMeasure DislocationMeasure::scaled(double m) const {
  if (!std::isfinite(m) || m <= 0.0)
    throw std::invalid_argument("DislocationMeasure::scaled: factor must be > 0");
  std::vector<DislocationAtom> scaled_atoms = atoms_;
  for (auto& a : scaled_atoms) a.weight *= m;
  return DislocationMeasure(std::move(scaled_atoms), name_);
}

const FragmentVector& DislocationMeasure::sample_fragments(SplitRng& rng) const {
  double u = rng.next_unit() * total_rate_;
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  std::size_t i = static_cast<std::size_t>(it - cumulative_.begin());
  if (i >= atoms_.size()) i = atoms_.size() - 1;
  return atoms_[i].fragments;
}

namespace {

void require_exponent(double p, const char* who) {
  if (!std::isfinite(p) || p <= -1.0)
    throw std::invalid_argument(std::string(who) + ": exponent must satisfy p > -1");
}

}  // namespace

double phi(const DislocationMeasure& nu, double p) {
  require_exponent(p, "phi");
  double acc = 0.0;
  for (const auto& a : nu.atoms()) {
    double inner = 0.0;
    for (double s : a.fragments.sizes()) inner += std::pow(s, 1.0 + p);
    acc += a.weight * (1.0 - inner);
  }
  return acc;
}

double phi_prime(const DislocationMeasure& nu, double p) {
  require_exponent(p, "phi_prime");
  double acc = 0.0;
  for (const auto& a : nu.atoms()) {
    double inner = 0.0;
    const auto& sizes = a.fragments.sizes();
    const auto& logs = a.fragments.log_sizes();
    for (std::size_t n = 0; n < sizes.size(); ++n)
      inner += -logs[n] * std::pow(sizes[n], 1.0 + p);
    acc += a.weight * inner;
  }
  return acc;
}

double wave_speed(const DislocationMeasure& nu, double p) {
  require_exponent(p, "wave_speed");
  return phi(nu, p) / (1.0 + p);
}

double critical_gap(const DislocationMeasure& nu, double p) {
  return (1.0 + p) * phi_prime(nu, p) - phi(nu, p);
}

namespace {

// g(-1+) = -phi(-1+) > 0: each atom has >= 2 children so phi(-1+) =
// sum w (1 - count) < 0 while (1+p) phi'(p) -> 0.  g is eventually negative,
// so scanning (1+p) geometrically finds the sign change.
constexpr double kScanUnitLow = 1e-6;  // 1 + p lower bound
constexpr double kScanUnitHigh = 65.0; // 1 + p at the p = 64 cap
constexpr int kScanSteps = 256;

bool scan_bracket(const DislocationMeasure& nu, double& lo, double& hi, double& glo,
                  double& ghi) {
  double prev_p = kScanUnitLow - 1.0;
  double prev_g = critical_gap(nu, prev_p);
  const double ratio = std::pow(kScanUnitHigh / kScanUnitLow, 1.0 / kScanSteps);
  double u = kScanUnitLow;
  for (int k = 1; k <= kScanSteps; ++k) {
    u *= ratio;
    double p = u - 1.0;
    double g = critical_gap(nu, p);
    if (prev_g > 0.0 && g <= 0.0) {
      lo = prev_p;
      hi = p;
      glo = prev_g;
      ghi = g;
      return true;
    }
    prev_p = p;
    prev_g = g;
  }
  return false;
}

}  // namespace

bool has_critical_exponent(const DislocationMeasure& nu) {
  double lo, hi, glo, ghi;
  return scan_bracket(nu, lo, hi, glo, ghi);
}

double critical_exponent(const DislocationMeasure& nu) {
  double lo, hi, glo, ghi;
  if (!scan_bracket(nu, lo, hi, glo, ghi))
    throw NumericalError(
        "critical_exponent: no sign change of (1+p) phi'(p) - phi(p) in (-1, 64]");
  auto g = [&nu](double p) { return critical_gap(nu, p); };
  return brent_root(g, lo, hi, glo, ghi, 1e-10, 1e-14).x;
}

double critical_speed(const DislocationMeasure& nu) {
  return phi_prime(nu, critical_exponent(nu));
}

}  // namespace fragwave
