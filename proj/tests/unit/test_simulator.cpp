#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "fragwave/simulator.hpp"
#include "helpers.hpp"

using namespace fragwave;
using testhelp::binary_half;
using testhelp::half_quarter;

TEST_CASE("population construction validates the start") {
  CHECK_THROWS_AS(Population::initial(-0.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Population::initial(1.0, -0.1), std::invalid_argument);
  Population pop = Population::initial(0.0, 0.0);
  CHECK(pop.alive.size() == 1);
  CHECK(pop.alive[0] == 0.0);
}

TEST_CASE("a split at zero headroom kills every child") {
  DislocationMeasure nu = binary_half();
  Population pop = Population::initial(0.0, 0.0);
  SplitRng rng(1, 0);
  StepRecord rec = step(pop, nu, rng);
  CHECK(rec.killed == 2);
  CHECK(rec.created == 0);
  CHECK(rec.dt > 0.0);
  CHECK(pop.alive.empty());
  CHECK(pop.events == 1);
  CHECK_THROWS_AS(step(pop, nu, rng), std::logic_error);
}

TEST_CASE("a split far from the barrier keeps every child") {
  DislocationMeasure nu = binary_half();
  Population pop = Population::initial(10.0, 0.0);
  SplitRng rng(1, 0);
  StepRecord rec = step(pop, nu, rng);
  CHECK(rec.created == 2);
  CHECK(rec.killed == 0);
  REQUIRE(pop.alive.size() == 2);
  CHECK(pop.alive[0] == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
  CHECK(pop.alive[1] == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
  CHECK(pop.peak_blocks == 2);
}

TEST_CASE("total mass never increases and the block bound holds") {
  for (const auto& nu : {binary_half(), half_quarter()}) {
    Population pop = Population::initial(5.0, 0.1);
    SplitRng rng(77, 0);
    double mass = 1.0;
    for (int k = 0; k < 400 && !pop.alive.empty(); ++k) {
      step(pop, nu, rng);
      double next_mass = 0.0;
      for (double ls : pop.alive) next_mass += std::exp(ls);
      CHECK(next_mass <= mass + 1e-12);
      CHECK(static_cast<double>(pop.alive.size()) <=
            std::exp(pop.x + pop.c * pop.time) * (1.0 + 1e-9));
      mass = next_mass;
    }
    CHECK(pop.invariant_violations == 0);
  }
}

TEST_CASE("run_trial terminal states") {
  DislocationMeasure nu = binary_half();
  SUBCASE("zero headroom dies at the first event") {
    for (std::uint64_t i = 0; i < 50; ++i) {
      SplitRng rng(3, i);
      TrialResult r = run_trial(nu, 0.0, 0.0, 50.0, 500, rng);
      CHECK(r.outcome == TrialOutcome::ExtinctBeforeHorizon);
      CHECK(r.events == 1);
      CHECK(r.extinction_time > 0.0);
      CHECK(r.extinction_time <= 50.0);
      CHECK(r.final_alive == 0);
    }
  }
  SUBCASE("tiny cap trips on the first successful split") {
    SplitRng rng(4, 0);
    TrialResult r = run_trial(nu, 5.0, 0.0, 50.0, 1, rng);
    CHECK(r.outcome == TrialOutcome::SurvivedAtCap);
    CHECK(r.events == 1);
    CHECK(r.final_alive == 2);
    CHECK(r.peak_blocks == 2);
  }
  SUBCASE("extinction time never exceeds the horizon") {
    for (std::uint64_t i = 0; i < 200; ++i) {
      SplitRng rng(5, i);
      TrialResult r = run_trial(nu, 0.5, 0.3, 5.0, 500, rng);
      if (r.outcome == TrialOutcome::ExtinctBeforeHorizon) {
        CHECK(r.extinction_time <= 5.0);
        CHECK(r.final_alive == 0);
      } else {
        CHECK(r.final_alive >= 1);
      }
    }
  }
  SUBCASE("parameter validation") {
    SplitRng rng(6, 0);
    CHECK_THROWS_AS(run_trial(nu, 1.0, 1.0, 0.0, 500, rng), std::invalid_argument);
    CHECK_THROWS_AS(run_trial(nu, 1.0, 1.0, 50.0, 0, rng), std::invalid_argument);
    CHECK_THROWS_AS(run_trial(nu, -1.0, 1.0, 50.0, 500, rng), std::invalid_argument);
  }
}

TEST_CASE("trial batches are deterministic and thread-invariant") {
  DislocationMeasure nu = binary_half();
  auto a = run_trials(nu, 1.0, 1.0, 20.0, 200, 300, 42, 1);
  auto b = run_trials(nu, 1.0, 1.0, 20.0, 200, 300, 42, 4);
  auto c = run_trials(nu, 1.0, 1.0, 20.0, 200, 300, 42, 1);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].outcome == b[i].outcome);
    CHECK(a[i].events == b[i].events);
    CHECK(a[i].peak_blocks == b[i].peak_blocks);
    CHECK(a[i].extinction_time == b[i].extinction_time);
    CHECK(a[i].outcome == c[i].outcome);
  }

  auto d = run_trials(nu, 1.0, 1.0, 20.0, 200, 300, 43, 1);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.size(); ++i)
    any_diff = any_diff || a[i].events != d[i].events;
  CHECK(any_diff);
}

TEST_CASE("extending the horizon only adds extinctions (coupled streams)") {
  DislocationMeasure nu = binary_half();
  std::uint64_t extinct_prev = 0;
  for (double horizon : {5.0, 10.0, 20.0}) {
    TrialSummary s = estimate_extinction(nu, 1.0, 1.0, horizon, 100000, 300, 99, 2);
    CHECK(s.extinct >= extinct_prev);
    extinct_prev = s.extinct;
  }
}

TEST_CASE("slow barriers kill everything") {
  DislocationMeasure nu = binary_half();
  // c = 0.1 is far below the critical speed ~0.2588.
  TrialSummary s = estimate_extinction(nu, 0.5, 0.1, 100.0, 500, 300, 7, 2);
  CHECK(s.extinction.point >= 0.99);
  CHECK(s.invariant_violations == 0);
  CHECK(s.extinct + s.survived + s.capped == s.trials);
}

TEST_CASE("summary bookkeeping is consistent") {
  DislocationMeasure nu = half_quarter();
  auto results = run_trials(nu, 1.0, 0.7, 30.0, 200, 400, 11, 2);
  TrialSummary s = summarize_trials(results);
  CHECK(s.trials == 400);
  CHECK(s.extinct + s.survived + s.capped == 400);
  CHECK(s.ambiguous <= s.survived);
  CHECK(s.extinction.point == doctest::Approx(static_cast<double>(s.extinct) / 400.0));
  std::uint64_t events = 0;
  for (const auto& r : results) events += r.events;
  CHECK(s.total_events == events);
}

TEST_CASE("empirical product value follows the barrier frame") {
  WaveGrid f(0.5, {0.7, 0.7, 0.7, 0.7, 0.7});
  Population pop = Population::initial(1.0, 1.0);
  CHECK(empirical_product_value(pop, f) == doctest::Approx(0.7).epsilon(1e-15));
  pop.alive.push_back(-0.25);  // second block still inside the grid
  CHECK(empirical_product_value(pop, f) == doctest::Approx(0.49).epsilon(1e-12));
  pop.alive.clear();
  CHECK(empirical_product_value(pop, f) == 1.0);

  WaveGrid zero = WaveGrid::constant(0.5, 4, 0.0);
  Population q = Population::initial(1.0, 0.0);
  CHECK(empirical_product_value(q, zero) == 0.0);
}

TEST_CASE("martingale check validates inputs and sees the control rise") {
  DislocationMeasure nu = binary_half();
  WaveGrid zero = WaveGrid::constant(0.25, 4, 0.0);
  CHECK_THROWS_AS(martingale_check(nu, 1.0, 1.0, zero, {}, 100, 500, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(martingale_check(nu, 1.0, 1.0, zero, {1.0, 0.5}, 100, 500, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(martingale_check(nu, 1.0, 1.0, zero, {-1.0}, 100, 500, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(martingale_check(nu, 1.0, 1.0, zero, {1.0}, 1, 500, 1),
                  std::invalid_argument);

  // With f = 0 on the positive axis the product is the extinction indicator,
  // so the means reproduce the extinction CDF.  A slow barrier makes
  // extinction certain and the CDF climb through every checkpoint window.
  MartingaleCheck mc =
      martingale_check(nu, 0.5, 0.1, zero, {0.0, 1.0, 3.0, 8.0}, 800, 500, 21, 2);
  CHECK(mc.reference == 0.0);
  CHECK(mc.means[0].point == 0.0);
  for (std::size_t k = 0; k + 1 < mc.means.size(); ++k)
    CHECK(mc.means[k].point < mc.means[k + 1].point);
  CHECK(mc.means.back().point > 0.3);
}
