#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fragwave/dislocation.hpp"
#include "fragwave/estimate.hpp"
#include "fragwave/rng.hpp"
#include "fragwave/wave_grid.hpp"

namespace fragwave {

// Fragmentation with killing below a receding barrier.  Blocks are tracked
// by log-size relative to the initial unit block; a child born at log-size
// ell is killed iff ell < -(x + c t).  Total mass never increases, which
// forces the block-count bound N_t <= exp(x + c t).
struct Population {
  double x = 0.0;          // barrier headroom at t = 0, >= 0
  double c = 0.0;          // barrier speed, >= 0
  double time = 0.0;
  std::vector<double> alive;  // log-sizes of alive blocks

  std::uint64_t events = 0;
  std::uint64_t peak_blocks = 1;
  std::uint64_t invariant_violations = 0;  // block-count bound failures

  static Population initial(double x, double c);
};

struct StepRecord {
  double dt = 0.0;
  std::uint32_t created = 0;  // children above the barrier
  std::uint32_t killed = 0;   // children absorbed at the barrier
};

// Advances one split: waits Exp(total_rate * N), picks a uniform block and a
// weight-proportional atom, replaces the block by its surviving children.
// Throws std::logic_error on an extinct population (rate would be 0).
StepRecord step(Population& pop, const DislocationMeasure& nu, SplitRng& rng);

enum class TrialOutcome {
  ExtinctBeforeHorizon,
  SurvivedToHorizon,
  SurvivedAtCap,
};

std::string to_string(TrialOutcome o);

struct TrialResult {
  TrialOutcome outcome = TrialOutcome::SurvivedToHorizon;
  double extinction_time = 0.0;  // set only when extinct; always <= horizon
  std::uint64_t events = 0;
  std::uint64_t peak_blocks = 1;
  std::uint64_t final_alive = 0;
  std::uint64_t invariant_violations = 0;
};

// Runs until extinction, the horizon, or more than `cap` alive blocks.
// The horizon is checked before each event, so an extinct trial always has
// extinction_time <= horizon and a longer horizon only extends a trial.
TrialResult run_trial(const DislocationMeasure& nu, double x, double c, double horizon,
                      std::uint64_t cap, SplitRng& rng);

// Trial i draws from the stream (master_key, i); results are bit-identical
// for every thread count.
std::vector<TrialResult> run_trials(const DislocationMeasure& nu, double x, double c,
                                    double horizon, std::uint64_t cap,
                                    std::uint64_t trials, std::uint64_t master_key,
                                    unsigned threads = 1);

// Trials that survived the horizon with fewer than this many blocks are
// counted as ambiguous: they may still die, so the extinction estimate is
// biased low by at most their fraction.
inline constexpr std::uint64_t kAmbiguousAliveThreshold = 10;

struct TrialSummary {
  std::uint64_t trials = 0;
  std::uint64_t extinct = 0;
  std::uint64_t survived = 0;
  std::uint64_t capped = 0;
  std::uint64_t ambiguous = 0;
  std::uint64_t total_events = 0;
  std::uint64_t peak_blocks = 0;
  std::uint64_t invariant_violations = 0;
  EstimateCI extinction;  // P(extinct before horizon)
};

TrialSummary summarize_trials(const std::vector<TrialResult>& results);

TrialSummary estimate_extinction(const DislocationMeasure& nu, double x, double c,
                                 double horizon, std::uint64_t cap,
                                 std::uint64_t trials, std::uint64_t master_key,
                                 unsigned threads = 1);

// prod_n f(x + c t + ell_n) over alive blocks; 1 for an extinct population.
double empirical_product_value(const Population& pop, const WaveGrid& f);

struct MartingaleCheck {
  std::vector<double> times;
  std::vector<EstimateCI> means;  // mean of the product value at each time
  double reference = 0.0;         // f(x), the time-0 value
  std::uint64_t trials = 0;
  std::uint64_t capped_trials = 0;
};

// Estimates E[prod f(x + c t + ell_n)] at the given checkpoints.  When f is
// the solved wave this is constant in t; capped trials contribute their
// value at cap time.  Extinct trials contribute 1 from extinction onwards.
MartingaleCheck martingale_check(const DislocationMeasure& nu, double x, double c,
                                 const WaveGrid& f, std::vector<double> times,
                                 std::uint64_t trials, std::uint64_t cap,
                                 std::uint64_t master_key, unsigned threads = 1);

}  // namespace fragwave
