#include "fragwave/simulator.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "fragwave/parallel.hpp"

namespace fragwave {

namespace {

void require_start(double x, double c) {
  if (!std::isfinite(x) || x < 0.0)
    throw std::invalid_argument("Population: x must be finite and >= 0");
  if (!std::isfinite(c) || c < 0.0)
    throw std::invalid_argument("Population: c must be finite and >= 0");
}

// Applies one split at the given event time.  Draw order (block, atom) is
// part of the reproducibility contract.
StepRecord apply_event(Population& pop, const DislocationMeasure& nu, SplitRng& rng,
                       double event_time, double dt) {
  StepRecord rec;
  rec.dt = dt;
  pop.time = event_time;

  std::size_t idx = static_cast<std::size_t>(rng.uniform_index(pop.alive.size()));
  double parent = pop.alive[idx];
  pop.alive[idx] = pop.alive.back();
  pop.alive.pop_back();

  const FragmentVector& frags = nu.sample_fragments(rng);
  const double barrier = -(pop.x + pop.c * pop.time);
  for (double ls : frags.log_sizes()) {
    double child = parent + ls;
    if (child < barrier) {
      ++rec.killed;
    } else {
      ++rec.created;
      pop.alive.push_back(child);
    }
  }

  ++pop.events;
  if (pop.alive.size() > pop.peak_blocks) pop.peak_blocks = pop.alive.size();

  // Mass conservation forces N <= exp(x + c t); the slack only absorbs
  // floating-point rounding of the exponentials.
  double bound = std::exp(pop.x + pop.c * pop.time) * (1.0 + 1e-9);
  if (static_cast<double>(pop.alive.size()) > bound) ++pop.invariant_violations;
  return rec;
}

}  // namespace

Population Population::initial(double x, double c) {
  require_start(x, c);
  Population pop;
  pop.x = x;
  pop.c = c;
  pop.alive.push_back(0.0);
  return pop;
}

StepRecord step(Population& pop, const DislocationMeasure& nu, SplitRng& rng) {
  if (pop.alive.empty()) throw std::logic_error("step: population is extinct");
  double dt = rng.exponential(nu.total_rate() * static_cast<double>(pop.alive.size()));
  return apply_event(pop, nu, rng, pop.time + dt, dt);
}

std::string to_string(TrialOutcome o) {
  switch (o) {
    case TrialOutcome::ExtinctBeforeHorizon: return "extinct";
    case TrialOutcome::SurvivedToHorizon: return "survived_horizon";
    case TrialOutcome::SurvivedAtCap: return "survived_cap";
  }
  return "unknown";
}

TrialResult run_trial(const DislocationMeasure& nu, double x, double c, double horizon,
                      std::uint64_t cap, SplitRng& rng) {
  if (!(std::isfinite(horizon) && horizon > 0.0))
    throw std::invalid_argument("run_trial: horizon must be finite and > 0");
  if (cap == 0) throw std::invalid_argument("run_trial: cap must be >= 1");

  Population pop = Population::initial(x, c);
  TrialResult res;
  while (true) {
    double dt =
        rng.exponential(nu.total_rate() * static_cast<double>(pop.alive.size()));
    if (pop.time + dt > horizon) {
      res.outcome = TrialOutcome::SurvivedToHorizon;
      break;
    }
    apply_event(pop, nu, rng, pop.time + dt, dt);
    if (pop.alive.empty()) {
      res.outcome = TrialOutcome::ExtinctBeforeHorizon;
      res.extinction_time = pop.time;
      break;
    }
    if (pop.alive.size() > cap) {
      res.outcome = TrialOutcome::SurvivedAtCap;
      break;
    }
  }
  res.events = pop.events;
  res.peak_blocks = pop.peak_blocks;
  res.final_alive = pop.alive.size();
  res.invariant_violations = pop.invariant_violations;
  return res;
}

std::vector<TrialResult> run_trials(const DislocationMeasure& nu, double x, double c,
                                    double horizon, std::uint64_t cap,
                                    std::uint64_t trials, std::uint64_t master_key,
                                    unsigned threads) {
  if (trials == 0) throw std::invalid_argument("run_trials: trials must be >= 1");
  std::vector<TrialResult> results(trials);
  parallel_for_index(trials, threads, [&](std::uint64_t i) {
    SplitRng rng(master_key, i);
    results[i] = run_trial(nu, x, c, horizon, cap, rng);
  });
  return results;
}

TrialSummary summarize_trials(const std::vector<TrialResult>& results) {
  if (results.empty()) throw std::invalid_argument("summarize_trials: no trials");
  TrialSummary s;
  s.trials = results.size();
  for (const auto& r : results) {
    switch (r.outcome) {
      case TrialOutcome::ExtinctBeforeHorizon: ++s.extinct; break;
      case TrialOutcome::SurvivedToHorizon:
        ++s.survived;
        if (r.final_alive < kAmbiguousAliveThreshold) ++s.ambiguous;
        break;
      case TrialOutcome::SurvivedAtCap: ++s.capped; break;
    }
    s.total_events += r.events;
    s.invariant_violations += r.invariant_violations;
    if (r.peak_blocks > s.peak_blocks) s.peak_blocks = r.peak_blocks;
  }
  s.extinction = binomial_estimate(s.extinct, s.trials);
  return s;
}

TrialSummary estimate_extinction(const DislocationMeasure& nu, double x, double c,
                                 double horizon, std::uint64_t cap,
                                 std::uint64_t trials, std::uint64_t master_key,
                                 unsigned threads) {
  return summarize_trials(run_trials(nu, x, c, horizon, cap, trials, master_key, threads));
}

double empirical_product_value(const Population& pop, const WaveGrid& f) {
  double shift = pop.x + pop.c * pop.time;
  double prod = 1.0;
  for (double ls : pop.alive) prod *= f(shift + ls);
  return prod;
}

MartingaleCheck martingale_check(const DislocationMeasure& nu, double x, double c,
                                 const WaveGrid& f, std::vector<double> times,
                                 std::uint64_t trials, std::uint64_t cap,
                                 std::uint64_t master_key, unsigned threads) {
  if (times.empty()) throw std::invalid_argument("martingale_check: no checkpoints");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!std::isfinite(times[k]) || times[k] < 0.0)
      throw std::invalid_argument("martingale_check: checkpoints must be >= 0");
    if (k > 0 && times[k] < times[k - 1])
      throw std::invalid_argument("martingale_check: checkpoints must be sorted");
  }
  if (trials < 2) throw std::invalid_argument("martingale_check: need >= 2 trials");
  if (cap == 0) throw std::invalid_argument("martingale_check: cap must be >= 1");

  const std::size_t nt = times.size();
  std::vector<std::vector<double>> samples(nt, std::vector<double>(trials, 0.0));
  std::vector<std::uint8_t> capped(trials, 0);

  parallel_for_index(trials, threads, [&](std::uint64_t i) {
    SplitRng rng(master_key, i);
    Population pop = Population::initial(x, c);
    std::size_t k = 0;
    while (k < nt) {
      if (pop.alive.empty()) {
        for (; k < nt; ++k) samples[k][i] = 1.0;  // empty product
        break;
      }
      double dt =
          rng.exponential(nu.total_rate() * static_cast<double>(pop.alive.size()));
      double t_next = pop.time + dt;
      // Record every checkpoint strictly before the next event; the state is
      // right-continuous, so a checkpoint at the event time sees the split.
      for (; k < nt && times[k] < t_next; ++k) {
        Population snapshot = pop;
        snapshot.time = times[k];
        samples[k][i] = empirical_product_value(snapshot, f);
      }
      if (k >= nt) break;
      apply_event(pop, nu, rng, t_next, dt);
      if (pop.alive.size() > cap) {
        double frozen = empirical_product_value(pop, f);
        capped[i] = 1;
        for (; k < nt; ++k) samples[k][i] = frozen;
        break;
      }
    }
  });

  MartingaleCheck out;
  out.times = std::move(times);
  out.reference = f(x);
  out.trials = trials;
  for (std::size_t k = 0; k < nt; ++k) out.means.push_back(mean_estimate(samples[k]));
  for (auto flag : capped) out.capped_trials += flag;
  return out;
}

}  // namespace fragwave
