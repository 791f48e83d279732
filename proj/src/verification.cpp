#include "fragwave/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>

#include "fragwave/errors.hpp"
#include "fragwave/levy.hpp"
#include "fragwave/simulator.hpp"

namespace fragwave {

namespace {

std::string fmt(const char* pattern, ...) {
  va_list args;
  va_start(args, pattern);
  char buf[512];
  std::vsnprintf(buf, sizeof buf, pattern, args);
  va_end(args);
  return buf;
}

DislocationMeasure binary_half() {
  return DislocationMeasure({{1.0, FragmentVector({0.5, 0.5})}}, "binary-half");
}

DislocationMeasure half_quarter() {
  return DislocationMeasure({{1.0, FragmentVector({0.5, 0.25})}}, "half-quarter");
}

std::uint64_t scaled_trials(std::uint64_t full, bool quick) {
  return quick ? std::max<std::uint64_t>(200, full / 8) : full;
}

CriterionResult criterion_calculus() {
  CriterionResult r{1, "critical exponent calculus", false, ""};
  DislocationMeasure nu = binary_half();
  double p = critical_exponent(nu);
  double c = critical_speed(nu);
  double gap = std::abs(critical_gap(nu, p));
  bool ok = gap < 1e-10 && std::abs(p - 1.421) <= 0.005 && std::abs(c - 0.2589) <= 0.001;
  double worst_scale = 0.0;
  for (double m : {0.5, 2.0, 10.0}) {
    DislocationMeasure scaled = nu.scaled(m);
    double dp = std::abs(critical_exponent(scaled) - p);
    double dc = std::abs(critical_speed(scaled) - m * c);
    worst_scale = std::max({worst_scale, dp, dc});
    ok = ok && dp <= 1e-8 && dc <= 1e-8;
  }
  r.pass = ok;
  r.detail = fmt("p=%.9f c=%.9f |gap|=%.2e scale-drift=%.2e", p, c, gap, worst_scale);
  return r;
}

struct BatteryTotals {
  std::uint64_t events = 0;
  std::uint64_t violations = 0;
};

CriterionResult criterion_cross_validation(const VerifyOptions& opts,
                                           const WaveSolution& binary_wave,
                                           const WaveSolution& quarter_wave,
                                           double quarter_speed,
                                           std::vector<CrossValidationRow>& out_rows,
                                           BatteryTotals& totals) {
  CriterionResult r{2, "wave matches extinction Monte Carlo", false, ""};
  const std::vector<double> xs = {0.5, 1.0, 2.0};
  MonteCarloBudget budget;
  budget.trials = scaled_trials(4000, opts.quick);
  budget.horizon = 50.0;
  budget.cap = 500;

  bool ok = true;
  double worst = 0.0;
  double worst_x = 0.0;
  const char* worst_spec = "";
  struct Case {
    const char* label;
    const DislocationMeasure nu;
    double c;
    const WaveSolution* wave;
  } cases[] = {{"binary-half", binary_half(), 1.0, &binary_wave},
               {"half-quarter", half_quarter(), quarter_speed, &quarter_wave}};
  for (std::size_t k = 0; k < 2; ++k) {
    budget.seed = derive_key(opts.seed, 20 + k);
    auto rows = cross_validate(cases[k].nu, cases[k].c, xs, budget, opts.threads,
                               cases[k].wave);
    for (const auto& row : rows) {
      ok = ok && row.pass;
      totals.events += row.events;
      totals.violations += row.violations;
      if (row.tol > 0.0 && row.diff / row.tol > worst) {
        worst = row.diff / row.tol;
        worst_x = row.x;
        worst_spec = cases[k].label;
      }
      out_rows.push_back(row);
    }
  }
  r.pass = ok;
  r.detail = fmt("6 points, %llu trials each; worst |diff|/tol=%.2f at x=%.1f (%s)",
                 static_cast<unsigned long long>(budget.trials), worst, worst_x,
                 worst_spec);
  return r;
}

CriterionResult criterion_residual(const DislocationMeasure& binary,
                                   const DislocationMeasure& quarter,
                                   const WaveSolution& binary_wave,
                                   const WaveSolution& quarter_wave,
                                   double quarter_speed) {
  CriterionResult r{3, "wave residual and refinement", false, ""};
  struct Case {
    const char* label;
    const DislocationMeasure* nu;
    double c;
    const WaveSolution* coarse;
  } cases[] = {{"binary-half", &binary, 1.0, &binary_wave},
               {"half-quarter", &quarter, quarter_speed, &quarter_wave}};
  bool ok = true;
  std::string detail;
  for (const auto& cs : cases) {
    double coarse = cs.coarse->residual.max_abs;
    WaveSolution fine = solve_wave(*cs.nu, cs.c, cs.coarse->wave.dx() / 2.0);
    double ratio = fine.residual.max_abs > 0.0 ? coarse / fine.residual.max_abs : 1e9;
    ok = ok && coarse <= 1e-3 && ratio >= 2.0;
    if (!detail.empty()) detail += "; ";
    detail += fmt("%s max=%.2e ratio=%.2f", cs.label, coarse, ratio);
  }
  r.pass = ok;
  r.detail = detail;
  return r;
}

CriterionResult criterion_phase(const VerifyOptions& opts, BatteryTotals& totals) {
  CriterionResult r{4, "phase transition in barrier speed", false, ""};
  DislocationMeasure nu = binary_half();
  double c_crit = critical_speed(nu);
  std::uint64_t trials = scaled_trials(2000, opts.quick);
  TrialSummary slow = estimate_extinction(nu, 1.0, 0.5 * c_crit, 100.0, 500, trials,
                                          derive_key(opts.seed, 40), opts.threads);
  TrialSummary fast = estimate_extinction(nu, 1.0, 3.0 * c_crit, 50.0, 500, trials,
                                          derive_key(opts.seed, 41), opts.threads);
  totals.events += slow.total_events + fast.total_events;
  totals.violations += slow.invariant_violations + fast.invariant_violations;
  r.pass = slow.extinction.point >= 0.99 && fast.extinction.point <= 0.95;
  r.detail = fmt("phi(0.5c)=%.4f (need >= 0.99), phi(3c)=%.4f (need <= 0.95)",
                 slow.extinction.point, fast.extinction.point);
  return r;
}

CriterionResult criterion_truncation(const VerifyOptions& opts, BatteryTotals& totals) {
  CriterionResult r{5, "horizon and cap robustness", false, ""};
  DislocationMeasure nu = binary_half();
  std::uint64_t trials = scaled_trials(4000, opts.quick);
  TrialSummary base = estimate_extinction(nu, 1.0, 1.0, 50.0, 500, trials,
                                          derive_key(opts.seed, 50), opts.threads);
  TrialSummary wide = estimate_extinction(nu, 1.0, 1.0, 100.0, 1000, trials,
                                          derive_key(opts.seed, 51), opts.threads);
  totals.events += base.total_events + wide.total_events;
  totals.violations += base.invariant_violations + wide.invariant_violations;
  double diff = std::abs(base.extinction.point - wide.extinction.point);
  double pooled = std::hypot(base.extinction.se, wide.extinction.se);
  r.pass = diff < 3.0 * pooled;
  r.detail = fmt("|delta|=%.4f vs 3*pooled SE=%.4f", diff, 3.0 * pooled);
  return r;
}

CriterionResult criterion_block_bound(bool quick, const BatteryTotals& totals) {
  CriterionResult r{6, "block-count bound", false, ""};
  std::uint64_t needed = quick ? 125000 : 1000000;
  r.pass = totals.events >= needed && totals.violations == 0;
  r.detail = fmt("%llu events, %llu violations (need >= %llu events, 0 violations)",
                 static_cast<unsigned long long>(totals.events),
                 static_cast<unsigned long long>(totals.violations),
                 static_cast<unsigned long long>(needed));
  return r;
}

CriterionResult criterion_martingale(const VerifyOptions& opts,
                                     const WaveSolution& binary_wave) {
  CriterionResult r{7, "product-martingale flatness", false, ""};
  DislocationMeasure nu = binary_half();
  std::vector<double> times = {0.0, 1.0, 2.0, 4.0};
  std::uint64_t trials = scaled_trials(4000, opts.quick);
  MartingaleCheck mc = martingale_check(nu, 1.0, 1.0, binary_wave.wave, times, trials,
                                        500, derive_key(opts.seed, 70), opts.threads);
  bool flat = true;
  double worst = 0.0;
  for (const auto& m : mc.means) {
    double diff = std::abs(m.point - mc.reference);
    // The 1e-12 absolute term covers t = 0, where every trial contributes
    // exactly f(1) and the SE is 0 up to summation rounding.
    flat = flat && diff <= 3.0 * m.se + 1e-12;
    worst = std::max(worst, diff);
  }
  WaveGrid zero = WaveGrid::constant(binary_wave.wave.dx(), 2, 0.0);
  // The control's strict inequalities ride on ~2% total extinction mass, so
  // it always runs at the full sample size; it is the cheap half of the check.
  MartingaleCheck control = martingale_check(nu, 1.0, 1.0, zero, times, 4000, 500,
                                             derive_key(opts.seed, 71), opts.threads);
  bool increasing = true;
  for (std::size_t k = 0; k + 1 < control.means.size(); ++k)
    increasing = increasing && control.means[k].point < control.means[k + 1].point;
  r.pass = flat && increasing;
  r.detail = fmt("max |E[Z_t]-f(1)|=%.4f over t in {0,1,2,4}; control increasing: %s",
                 worst, increasing ? "yes" : "no");
  return r;
}

CriterionResult criterion_scale(const VerifyOptions& opts,
                                const DislocationMeasure& binary,
                                const DislocationMeasure& quarter,
                                double quarter_speed) {
  CriterionResult r{8, "scale function and first passage", false, ""};
  struct Case {
    const char* label;
    const DislocationMeasure* nu;
    double c;
    std::uint64_t salt;
  } cases[] = {{"binary-half", &binary, 1.0, 80},
               {"half-quarter", &quarter, quarter_speed, 81}};
  std::uint64_t trials = scaled_trials(100000, opts.quick);
  bool ok = true;
  std::string detail;
  for (const auto& cs : cases) {
    const double dx = std::log(2.0) / 512.0;
    ScaleTable coarse = scale_function(*cs.nu, cs.c, 12.0, dx);
    ScaleTable fine = scale_function(*cs.nu, cs.c, 12.0, dx / 2.0);
    double w0_err = std::abs(fine(0.0) - 1.0 / cs.c);
    double refine = std::abs(fine(coarse.x_max()) - coarse(coarse.x_max())) /
                    fine(coarse.x_max());

    double exit_p = two_sided_exit(fine, 1.0, 1.0);
    EstimateCI mc = mc_first_passage(*cs.nu, cs.c, 1.0, 1.0, trials,
                                     derive_key(opts.seed, cs.salt), opts.threads);
    double exit_diff = std::abs(exit_p - mc.point);
    bool exit_ok = exit_diff <= 3.0 * mc.se;

    double root = largest_psi_root(*cs.nu, cs.c);
    bool laplace_ok = true;
    double worst_laplace = 0.0;
    for (double beta : {root + 1.0, root + 2.0}) {
      double lhs = scale_laplace_transform(fine, beta, root);
      double rhs = 1.0 / laplace_exponent_psi(*cs.nu, cs.c, beta);
      double rel = std::abs(lhs - rhs) / std::abs(rhs);
      worst_laplace = std::max(worst_laplace, rel);
      laplace_ok = laplace_ok && rel <= 0.01;
    }

    ok = ok && w0_err <= 1e-6 && exit_ok && laplace_ok;
    if (!detail.empty()) detail += "; ";
    detail += fmt("%s W0err=%.1e refine=%.1e exit|diff|=%.4f (3SE=%.4f) laplace=%.2e",
                  cs.label, w0_err, refine, exit_diff, 3.0 * mc.se, worst_laplace);
  }
  r.pass = ok;
  r.detail = detail;
  return r;
}

}  // namespace

VerificationReport run_verification(const VerifyOptions& opts) {
  VerificationReport report;
  DislocationMeasure binary = binary_half();
  DislocationMeasure quarter = half_quarter();
  const double quarter_speed = 2.0 * critical_speed(quarter);

  WaveSolution binary_wave = solve_wave(binary, 1.0);
  WaveSolution quarter_wave = solve_wave(quarter, quarter_speed);

  BatteryTotals totals;
  report.criteria.push_back(criterion_calculus());
  report.criteria.push_back(criterion_cross_validation(
      opts, binary_wave, quarter_wave, quarter_speed, report.cross_rows, totals));
  report.criteria.push_back(
      criterion_residual(binary, quarter, binary_wave, quarter_wave, quarter_speed));
  report.criteria.push_back(criterion_phase(opts, totals));
  report.criteria.push_back(criterion_truncation(opts, totals));
  report.criteria.push_back(criterion_block_bound(opts.quick, totals));
  report.criteria.push_back(criterion_martingale(opts, binary_wave));
  report.criteria.push_back(criterion_scale(opts, binary, quarter, quarter_speed));
  std::sort(report.criteria.begin(), report.criteria.end(),
            [](const CriterionResult& a, const CriterionResult& b) { return a.id < b.id; });
  return report;
}

}  // namespace fragwave
