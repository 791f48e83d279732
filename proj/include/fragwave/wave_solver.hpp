#pragma once

#include <cstdint>
#include <vector>

#include "fragwave/dislocation.hpp"
#include "fragwave/estimate.hpp"
#include "fragwave/wave_grid.hpp"

namespace fragwave {

// The wave equation c f' + L f = 0 with f = 1 on the negative axis is a
// delay ODE in disguise: f'(x) = (m f(x) - A(x)) / c with m the total split
// rate and A(x) = sum_a w_a prod_n f(x + ln s_n) depending only on values
// strictly to the left.  Marching from f(0+) = theta turns the boundary
// value problem into a one-parameter shooting family.
struct SolverOptions {
  double plateau_tol = 1e-4;  // recovery above this flags an overshoot
  double tail_tol = 1e-4;     // profile must end below this to count as a wave
  double decay_floor = 1e-8;  // reaching this ends the march; tail is zeroed
  double theta_tol = 1e-15;   // bisection width on theta
  int max_bisections = 200;
};

enum class ShootClass {
  BelowZero,  // undershoot: profile crossed 0
  Plateau,    // overshoot: profile recovered or never left the plateau
  Decayed,    // profile fell to the decay floor: an admissible wave
};

struct ShootResult {
  ShootClass cls = ShootClass::Plateau;
  std::vector<double> values;   // marched profile, zero-filled after the floor
  std::size_t stop_node = 0;    // node where classification fired
};

// Single march of the shooting family.  dx must not exceed half the smallest
// jump offset so the delayed arguments always land in computed history.
ShootResult shoot(const DislocationMeasure& nu, double c, double theta, double dx,
                  double x_max, const SolverOptions& opts = {});

struct WaveSolution {
  WaveGrid wave;
  ResidualReport residual;
  double theta = 0.0;  // f(0+), the jump value at the front
  int marches = 0;     // total shooting marches including probes
  int bisections = 0;
};

// dx = ln2/64 when every jump offset is an integer multiple of ln 2 (grid
// nodes then hit the kinks exactly), otherwise x_max/4096.
double default_wave_dx(const DislocationMeasure& nu, double x_max);

// Probes theta in (0, 1), brackets BelowZero against Plateau, and bisects
// until a Decayed march appears.  Throws NumericalError when c is at or
// below the critical speed (no wave exists) or the bracket fails.
WaveSolution solve_wave(const DislocationMeasure& nu, double c, double dx = 0.0,
                        double x_max = 8.0, const SolverOptions& opts = {});

struct MonteCarloBudget {
  std::uint64_t trials = 4000;
  double horizon = 50.0;
  std::uint64_t cap = 500;
  std::uint64_t seed = 0xF4A6;
};

struct CrossValidationRow {
  double x = 0.0;
  double f_solver = 0.0;
  double phi_mc = 0.0;  // empirical extinction probability
  double se = 0.0;
  double diff = 0.0;
  double tol = 0.0;  // 3 se + 0.02 grid/truncation allowance
  bool pass = false;
  std::uint64_t ambiguous = 0;
  std::uint64_t events = 0;
  std::uint64_t violations = 0;
};

// Compares the solved wave against extinction estimates at the given starts.
// Each start uses an independent derived RNG key.
std::vector<CrossValidationRow> cross_validate(const DislocationMeasure& nu, double c,
                                               const std::vector<double>& xs,
                                               const MonteCarloBudget& budget,
                                               unsigned threads = 1,
                                               const WaveSolution* solution = nullptr);

struct PhaseScanRow {
  double c = 0.0;
  double phi_hat = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t capped = 0;
  std::uint64_t ambiguous = 0;
};

// Extinction probability from fixed x across a ladder of speeds; shows the
// transition from certain extinction (slow barrier) to likely survival.
std::vector<PhaseScanRow> phase_scan(const DislocationMeasure& nu, double x,
                                     const std::vector<double>& cs,
                                     const MonteCarloBudget& budget,
                                     unsigned threads = 1);

}  // namespace fragwave
