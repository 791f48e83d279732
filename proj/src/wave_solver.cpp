#include "fragwave/wave_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "fragwave/errors.hpp"
#include "fragwave/simulator.hpp"

namespace fragwave {

namespace {

// History lookup over the partially marched profile.  Values left of 0 are 1.
// `left_limit` resolves the value discontinuity at 0: the corrector endpoint
// closes the step interval from the left, where f is still 1, so evaluating
// the post-jump value there would cost O(dx * (1 - theta)) per crossing.
class History {
 public:
  History(const std::vector<double>& values, double dx) : v_(values), dx_(dx) {}

  double operator()(double y, bool left_limit) const {
    if (y < 0.0) return 1.0;
    if (left_limit && y <= 1e-12) return 1.0;
    double t = y / dx_;
    auto i = static_cast<std::size_t>(t);
    double frac = t - static_cast<double>(i);
    return v_[i] + frac * (v_[i + 1] - v_[i]);
  }

 private:
  const std::vector<double>& v_;
  double dx_;
};

double delayed_coupling(const DislocationMeasure& nu, const History& hist, double x,
                        bool left_limit) {
  double acc = 0.0;
  for (const auto& a : nu.atoms()) {
    double prod = 1.0;
    for (double ls : a.fragments.log_sizes()) prod *= hist(x + ls, left_limit);
    acc += a.weight * prod;
  }
  return acc;
}

void validate_march_params(const DislocationMeasure& nu, double c, double theta,
                           double dx, double x_max) {
  if (!std::isfinite(c) || c <= 0.0)
    throw std::invalid_argument("shoot: c must be > 0");
  if (!std::isfinite(theta) || theta <= 0.0 || theta >= 1.0)
    throw std::invalid_argument("shoot: theta must lie in (0, 1)");
  if (!std::isfinite(dx) || dx <= 0.0)
    throw std::invalid_argument("shoot: dx must be > 0");
  if (!std::isfinite(x_max) || x_max < 1.0)
    throw std::invalid_argument("shoot: x_max must be >= 1");
  double min_offset = kink_offsets(nu).front();
  if (dx > 0.5 * min_offset)
    throw std::invalid_argument(
        "shoot: dx must be at most half the smallest jump offset");
  if (x_max / dx > 2e7) throw std::invalid_argument("shoot: grid too large");
}

}  // namespace

ShootResult shoot(const DislocationMeasure& nu, double c, double theta, double dx,
                  double x_max, const SolverOptions& opts) {
  validate_march_params(nu, c, theta, dx, x_max);
  const auto n = static_cast<std::size_t>(std::ceil(x_max / dx - 1e-9)) + 1;
  const double m = nu.total_rate();

  ShootResult res;
  res.values.assign(n, 0.0);
  res.values[0] = theta;
  History hist(res.values, dx);

  // Heun predictor-corrector.  dx <= min_offset/2 guarantees the delayed
  // arguments at x_{j+1} stay within the already computed prefix.
  double run_min = theta;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double x0 = static_cast<double>(j) * dx;
    const double x1 = static_cast<double>(j + 1) * dx;
    const double f0 = res.values[j];
    const double slope0 = (m * f0 - delayed_coupling(nu, hist, x0, false)) / c;
    const double fp = f0 + dx * slope0;
    const double slope1 = (m * fp - delayed_coupling(nu, hist, x1, true)) / c;
    const double f1 = f0 + 0.5 * dx * (slope0 + slope1);
    res.values[j + 1] = f1;
    res.stop_node = j + 1;

    if (f1 < 0.0) {
      res.cls = ShootClass::BelowZero;
      return res;
    }
    if (f1 < opts.decay_floor) {
      std::fill(res.values.begin() + static_cast<std::ptrdiff_t>(j) + 1,
                res.values.end(), 0.0);
      res.cls = ShootClass::Decayed;
      return res;
    }
    // Overshoots need not stay flat: with dissipative measures they dip,
    // partially recover, then diverge.  Recovery well above the running
    // minimum is the robust plateau signature.
    if (f1 > std::max(opts.plateau_tol, 3.0 * run_min) && f1 > run_min + 1e-12 &&
        run_min < theta) {
      res.cls = ShootClass::Plateau;
      return res;
    }
    run_min = std::min(run_min, f1);
  }
  res.stop_node = n - 1;
  res.cls = res.values.back() >= opts.tail_tol ? ShootClass::Plateau
                                               : ShootClass::Decayed;
  return res;
}

double default_wave_dx(const DislocationMeasure& nu, double x_max) {
  const double ln2 = std::log(2.0);
  bool aligned = true;
  for (double off : kink_offsets(nu)) {
    double k = off / ln2;
    if (std::abs(k - std::round(k)) > 1e-9) {
      aligned = false;
      break;
    }
  }
  return aligned ? ln2 / 64.0 : x_max / 4096.0;
}

namespace {

// Below tail_tol the shot is at its resolution limit: the residual theta
// error excites a tiny recovery bump there before the march crashes to the
// floor.  Replacing that stretch by its running minimum keeps the profile
// monotone with error confined below tail_tol.  A rise at or above tail_tol
// is a genuine solver failure.
std::vector<double> enforce_monotone(std::vector<double> v, double tail_tol) {
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if (v[i + 1] > v[i]) {
      if (v[i] >= tail_tol)
        throw NumericalError("solve_wave: marched profile is not monotone");
      v[i + 1] = v[i];
    }
  }
  return v;
}

}  // namespace

WaveSolution solve_wave(const DislocationMeasure& nu, double c, double dx,
                        double x_max, const SolverOptions& opts) {
  if (!std::isfinite(c) || c <= 0.0)
    throw std::invalid_argument("solve_wave: c must be > 0");
  const double c_min = critical_speed(nu);
  if (c <= c_min)
    throw NumericalError("solve_wave: speed " + std::to_string(c) +
                         " is subcritical (critical speed " + std::to_string(c_min) +
                         "); no wave profile exists");
  if (dx == 0.0) dx = default_wave_dx(nu, x_max);

  int marches = 0;
  auto classify = [&](double theta) {
    ++marches;
    return shoot(nu, c, theta, dx, x_max, opts);
  };

  // Bracket undershoot against overshoot on a coarse theta ladder.
  double lo = 0.0, hi = 0.0;
  bool have_lo = false, have_hi = false;
  ShootResult decayed;
  bool have_decayed = false;
  const double probes[] = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9,
                           0.02, 0.98, 0.005, 0.995};
  for (double theta : probes) {
    ShootResult r = classify(theta);
    if (r.cls == ShootClass::Decayed) {
      decayed = std::move(r);
      lo = hi = theta;
      have_decayed = true;
      break;
    }
    if (r.cls == ShootClass::BelowZero) {
      if (!have_lo || theta > lo) lo = theta;
      have_lo = true;
    } else {
      if (!have_hi || theta < hi) hi = theta;
      have_hi = true;
    }
    if (have_lo && have_hi && lo < hi) break;
  }

  int bisections = 0;
  if (!have_decayed) {
    if (!(have_lo && have_hi && lo < hi))
      throw NumericalError(
          "solve_wave: shooting probes did not bracket the wave (all " +
          std::string(have_lo ? "undershoot" : "overshoot") + ")");
    while (hi - lo > opts.theta_tol) {
      if (++bisections > opts.max_bisections)
        throw NumericalError("solve_wave: bisection cap exceeded");
      double mid = 0.5 * (lo + hi);
      ShootResult r = classify(mid);
      if (r.cls == ShootClass::Decayed) {
        decayed = std::move(r);
        lo = hi = mid;
        have_decayed = true;
        break;
      }
      if (r.cls == ShootClass::BelowZero)
        lo = mid;
      else
        hi = mid;
    }
    if (!have_decayed)
      throw NumericalError(
          "solve_wave: bisection narrowed past theta_tol without a decaying "
          "profile; decrease decay_floor or x_max");
  }

  WaveSolution sol{
      WaveGrid(dx, enforce_monotone(std::move(decayed.values), opts.tail_tol)),
      {},
      lo,
      marches,
      bisections};
  sol.residual = residual_report(nu, c, sol.wave);
  return sol;
}

std::vector<CrossValidationRow> cross_validate(const DislocationMeasure& nu, double c,
                                               const std::vector<double>& xs,
                                               const MonteCarloBudget& budget,
                                               unsigned threads,
                                               const WaveSolution* solution) {
  if (xs.empty()) throw std::invalid_argument("cross_validate: no start points");
  WaveSolution local{WaveGrid::constant(1.0, 2, 0.0), {}, 0.0, 0, 0};
  if (solution == nullptr) {
    local = solve_wave(nu, c);
    solution = &local;
  }
  std::vector<CrossValidationRow> rows;
  rows.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double x = xs[i];
    TrialSummary s = estimate_extinction(nu, x, c, budget.horizon, budget.cap,
                                         budget.trials, derive_key(budget.seed, i),
                                         threads);
    CrossValidationRow row;
    row.x = x;
    row.f_solver = solution->wave(x);
    row.phi_mc = s.extinction.point;
    row.se = s.extinction.se;
    row.diff = std::abs(row.f_solver - row.phi_mc);
    row.tol = 3.0 * row.se + 0.02;
    row.pass = row.diff <= row.tol;
    row.ambiguous = s.ambiguous;
    row.events = s.total_events;
    row.violations = s.invariant_violations;
    rows.push_back(row);
  }
  return rows;
}

std::vector<PhaseScanRow> phase_scan(const DislocationMeasure& nu, double x,
                                     const std::vector<double>& cs,
                                     const MonteCarloBudget& budget,
                                     unsigned threads) {
  if (cs.empty()) throw std::invalid_argument("phase_scan: no speeds");
  std::vector<PhaseScanRow> rows;
  rows.reserve(cs.size());
  for (std::size_t i = 0; i < cs.size(); ++i) {
    TrialSummary s = estimate_extinction(nu, x, cs[i], budget.horizon, budget.cap,
                                         budget.trials, derive_key(budget.seed, i),
                                         threads);
    rows.push_back({cs[i], s.extinction.point, s.extinction.se, s.extinction.ci_low,
                    s.extinction.ci_high, s.capped, s.ambiguous});
  }
  return rows;
}

}  // namespace fragwave
