#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fragwave/errors.hpp"
#include "fragwave/levy.hpp"
#include "fragwave/simulator.hpp"
#include "fragwave/spec_io.hpp"
#include "fragwave/verification.hpp"
#include "fragwave/version.hpp"
#include "fragwave/wave_solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, end);
}

// Rows are accumulated in memory and flushed in one pass, so a failed
// computation never leaves a half-written table behind.
class CsvTable {
 public:
  explicit CsvTable(std::string header) : body_(std::move(header)) { body_ += '\n'; }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) body_ += ',';
      body_ += cells[i];
    }
    body_ += '\n';
  }

  const std::string& text() const { return body_; }

 private:
  std::string body_;
};

// Collects finished artifacts and writes them together; on a write error the
// already-written files of this run are removed.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, std::string content) {
    files_.emplace_back(name, std::move(content));
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [name, content] : files_) out.push_back(name);
    return out;
  }

  void write() {
    fs::create_directories(dir_);
    std::vector<fs::path> written;
    try {
      for (const auto& [name, content] : files_) {
        fs::path p = dir_ / name;
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        out << content;
        if (!out) throw std::runtime_error("cannot write " + p.string());
        written.push_back(p);
      }
    } catch (...) {
      std::error_code ec;
      for (const auto& p : written) fs::remove(p, ec);
      throw;
    }
  }

 private:
  fs::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

struct CommonArgs {
  std::string spec_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0xF4A6;
  unsigned threads = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool spec_required) {
  auto* spec = cmd->add_option("--spec", args.spec_path, "measure file (JSON)");
  if (spec_required) spec->required();
  cmd->add_option("--out", args.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--seed", args.seed, "master RNG seed")->capture_default_str();
  cmd->add_option("--threads", args.threads, "worker threads")->capture_default_str();
}

json manifest_skeleton(const std::string& subcommand, const CommonArgs& args,
                       json parameters) {
  json m;
  m["subcommand"] = subcommand;
  m["parameters"] = std::move(parameters);
  m["master_seed"] = args.seed;
  m["library_version"] = FRAGWAVE_VERSION;
  return m;
}

void finish_outputs(OutputSet& outputs, json manifest,
                    std::chrono::steady_clock::time_point start) {
  double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  manifest["wall_time_seconds"] = seconds;
  auto names = outputs.names();
  names.push_back("manifest.json");
  manifest["outputs"] = names;
  outputs.add("manifest.json", manifest.dump(2) + "\n");
  outputs.write();
  std::string joined;
  for (const auto& n : names) {
    if (!joined.empty()) joined += ", ";
    joined += n;
  }
  std::cout << "wrote " << joined << "\n";
}

void print_measure(const fragwave::SpecFile& spec) {
  const auto& nu = spec.measure;
  std::cout << "measure: " << (nu.name().empty() ? "(unnamed)" : nu.name()) << " ("
            << nu.atoms().size() << (nu.atoms().size() == 1 ? " atom" : " atoms")
            << ", total rate " << format_double(nu.total_rate()) << ", killing rate "
            << format_double(nu.killing_rate()) << ")\n";
}

int run_critical(const CommonArgs& args, double p_min, double p_max, unsigned steps) {
  auto start = std::chrono::steady_clock::now();
  fragwave::SpecFile spec = fragwave::load_spec(args.spec_path);
  const auto& nu = spec.measure;
  print_measure(spec);

  if (!(p_min > -1.0) || !(p_max > p_min))
    throw std::invalid_argument("critical: need -1 < p-min < p-max");
  if (steps < 2) throw std::invalid_argument("critical: need steps >= 2");

  double p_bar = fragwave::critical_exponent(nu);
  double c_bar = fragwave::critical_speed(nu);
  std::cout << "critical exponent: " << format_double(p_bar) << "\n";
  std::cout << "critical speed: " << format_double(c_bar) << "\n";

  CsvTable table("p,phi,phi_prime,c_p");
  for (unsigned k = 0; k < steps; ++k) {
    double p = p_min + (p_max - p_min) * static_cast<double>(k) /
                           static_cast<double>(steps - 1);
    table.row({format_double(p), format_double(fragwave::phi(nu, p)),
               format_double(fragwave::phi_prime(nu, p)),
               format_double(fragwave::wave_speed(nu, p))});
  }

  OutputSet outputs{args.out_dir};
  outputs.add("phi_table.csv", table.text());
  json params = {{"spec", args.spec_path}, {"p_min", p_min}, {"p_max", p_max},
                 {"steps", steps},         {"threads", args.threads}};
  finish_outputs(outputs, manifest_skeleton("critical", args, params), start);
  return 0;
}

int run_simulate(const CommonArgs& args, double x, double c,
                 std::optional<std::uint64_t> trials_opt,
                 std::optional<double> horizon_opt,
                 std::optional<std::uint64_t> cap_opt) {
  auto start = std::chrono::steady_clock::now();
  fragwave::SpecFile spec = fragwave::load_spec(args.spec_path);
  const auto& nu = spec.measure;
  print_measure(spec);

  std::uint64_t trials = trials_opt.value_or(spec.defaults.trials.value_or(1000));
  double horizon = horizon_opt.value_or(spec.defaults.horizon.value_or(50.0));
  std::uint64_t cap = cap_opt.value_or(spec.defaults.block_cap.value_or(500));

  auto results = fragwave::run_trials(nu, x, c, horizon, cap, trials, args.seed,
                                      args.threads);
  auto summary = fragwave::summarize_trials(results);

  std::printf("x=%g c=%g horizon=%g cap=%llu trials=%llu\n", x, c, horizon,
              static_cast<unsigned long long>(cap),
              static_cast<unsigned long long>(trials));
  std::printf("extinction estimate: %.4f (SE %.4f, 99%% CI [%.4f, %.4f])\n",
              summary.extinction.point, summary.extinction.se,
              summary.extinction.ci_low, summary.extinction.ci_high);
  std::printf("outcomes: %llu extinct, %llu survived to horizon (%llu ambiguous), "
              "%llu capped\n",
              static_cast<unsigned long long>(summary.extinct),
              static_cast<unsigned long long>(summary.survived),
              static_cast<unsigned long long>(summary.ambiguous),
              static_cast<unsigned long long>(summary.capped));
  std::printf("events: %llu, peak blocks: %llu, block-bound violations: %llu\n",
              static_cast<unsigned long long>(summary.total_events),
              static_cast<unsigned long long>(summary.peak_blocks),
              static_cast<unsigned long long>(summary.invariant_violations));

  CsvTable table("trial_id,outcome,extinction_time,peak_blocks,events");
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    bool extinct = r.outcome == fragwave::TrialOutcome::ExtinctBeforeHorizon;
    table.row({std::to_string(i), fragwave::to_string(r.outcome),
               extinct ? format_double(r.extinction_time) : std::string(),
               std::to_string(r.peak_blocks), std::to_string(r.events)});
  }

  OutputSet outputs{args.out_dir};
  outputs.add("trials.csv", table.text());
  json params = {{"spec", args.spec_path}, {"x", x},     {"c", c},
                 {"trials", trials},       {"horizon", horizon},
                 {"cap", cap},             {"threads", args.threads}};
  finish_outputs(outputs, manifest_skeleton("simulate", args, params), start);
  return 0;
}

int run_wave(const CommonArgs& args, double c, std::optional<double> dx_opt,
             std::optional<double> x_max_opt) {
  auto start = std::chrono::steady_clock::now();
  fragwave::SpecFile spec = fragwave::load_spec(args.spec_path);
  const auto& nu = spec.measure;
  print_measure(spec);

  double x_max = x_max_opt.value_or(spec.defaults.x_max.value_or(8.0));
  double dx = dx_opt.value_or(
      spec.defaults.dx.value_or(fragwave::default_wave_dx(nu, x_max)));

  std::cout << "critical speed: " << format_double(fragwave::critical_speed(nu))
            << "\n";
  fragwave::WaveSolution sol = fragwave::solve_wave(nu, c, dx, x_max);
  std::printf("front value theta = %.9f (%d marches, %d bisection steps)\n",
              sol.theta, sol.marches, sol.bisections);
  std::printf("max |residual| = %.3e at x = %.4f (%llu kink-adjacent nodes skipped)\n",
              sol.residual.max_abs, sol.residual.x_at_max,
              static_cast<unsigned long long>(sol.residual.skipped_nodes));

  // Matching tabulated first-passage data for the tagged fragment; reuse the
  // offset-alignment rule at a finer step.
  const double ln2 = std::log(2.0);
  bool aligned = fragwave::default_wave_dx(nu, x_max) == ln2 / 64.0;
  double scale_dx = aligned ? ln2 / 512.0 : x_max / 8192.0;
  fragwave::ScaleTable table = fragwave::scale_function(nu, c, x_max, scale_dx);
  std::printf("scale function: W(0) = %s (= 1/c)\n", format_double(table(0.0)).c_str());

  CsvTable wave_csv("x,f");
  const auto& values = sol.wave.values();
  for (std::size_t i = 0; i < values.size(); ++i)
    wave_csv.row({format_double(static_cast<double>(i) * sol.wave.dx()),
                  format_double(values[i])});

  CsvTable residual_csv("x,residual");
  for (std::size_t i = 0; i < sol.residual.xs.size(); ++i)
    residual_csv.row({format_double(sol.residual.xs[i]),
                      format_double(sol.residual.values[i])});

  CsvTable scale_csv("x,W");
  for (std::size_t i = 0; i < table.size(); ++i)
    scale_csv.row({format_double(static_cast<double>(i) * table.dx()),
                   format_double(table.values()[i])});

  OutputSet outputs{args.out_dir};
  outputs.add("wave.csv", wave_csv.text());
  outputs.add("residual.csv", residual_csv.text());
  outputs.add("scale.csv", scale_csv.text());
  json params = {{"spec", args.spec_path}, {"c", c},           {"dx", dx},
                 {"x_max", x_max},         {"scale_dx", scale_dx},
                 {"theta", sol.theta},     {"threads", args.threads}};
  finish_outputs(outputs, manifest_skeleton("wave", args, params), start);
  return 0;
}

int run_scan(const CommonArgs& args, double x, double c_min, double c_max,
             unsigned steps, std::optional<std::uint64_t> trials_opt,
             std::optional<double> horizon_opt, std::optional<std::uint64_t> cap_opt) {
  auto start = std::chrono::steady_clock::now();
  fragwave::SpecFile spec = fragwave::load_spec(args.spec_path);
  const auto& nu = spec.measure;
  print_measure(spec);

  if (!(c_min >= 0.0) || !(c_max >= c_min))
    throw std::invalid_argument("scan: need 0 <= c-min <= c-max");
  if (steps < 1) throw std::invalid_argument("scan: need steps >= 1");

  fragwave::MonteCarloBudget budget;
  budget.trials = trials_opt.value_or(spec.defaults.trials.value_or(1000));
  budget.horizon = horizon_opt.value_or(spec.defaults.horizon.value_or(50.0));
  budget.cap = cap_opt.value_or(spec.defaults.block_cap.value_or(500));
  budget.seed = args.seed;

  std::vector<double> cs;
  for (unsigned k = 0; k < steps; ++k)
    cs.push_back(steps == 1 ? c_min
                            : c_min + (c_max - c_min) * static_cast<double>(k) /
                                          static_cast<double>(steps - 1));

  auto rows = fragwave::phase_scan(nu, x, cs, budget, args.threads);

  std::printf("x=%g trials=%llu horizon=%g cap=%llu\n", x,
              static_cast<unsigned long long>(budget.trials), budget.horizon,
              static_cast<unsigned long long>(budget.cap));
  CsvTable table("c,phi_hat,se,ci_low,ci_high");
  for (const auto& r : rows) {
    std::printf("  c=%.6f  phi_hat=%.4f  (99%% CI [%.4f, %.4f])\n", r.c, r.phi_hat,
                r.ci_low, r.ci_high);
    table.row({format_double(r.c), format_double(r.phi_hat), format_double(r.se),
               format_double(r.ci_low), format_double(r.ci_high)});
  }

  OutputSet outputs{args.out_dir};
  outputs.add("scan.csv", table.text());
  json params = {{"spec", args.spec_path},   {"x", x},
                 {"c_min", c_min},           {"c_max", c_max},
                 {"steps", steps},           {"trials", budget.trials},
                 {"horizon", budget.horizon}, {"cap", budget.cap},
                 {"threads", args.threads}};
  finish_outputs(outputs, manifest_skeleton("scan", args, params), start);
  return 0;
}

int run_verify(const CommonArgs& args, const std::string& budget) {
  auto start = std::chrono::steady_clock::now();
  if (budget != "quick" && budget != "full")
    throw std::invalid_argument("verify: --budget must be quick or full");
  if (!args.spec_path.empty()) {
    // The battery runs on pinned reference measures; a user spec is still
    // validated so that a broken file fails fast here too.
    fragwave::SpecFile spec = fragwave::load_spec(args.spec_path);
    print_measure(spec);
    std::cout << "note: verify always runs on the built-in reference measures\n";
  }

  fragwave::VerifyOptions opts;
  opts.seed = args.seed;
  opts.threads = args.threads;
  opts.quick = budget == "quick";
  fragwave::VerificationReport report = fragwave::run_verification(opts);

  for (const auto& c : report.criteria)
    std::printf("[%s] criterion %d: %s — %s\n", c.pass ? "PASS" : "FAIL", c.id,
                c.name.c_str(), c.detail.c_str());

  CsvTable table("x,f_solver,phi_mc,se,pass");
  for (const auto& row : report.cross_rows)
    table.row({format_double(row.x), format_double(row.f_solver),
               format_double(row.phi_mc), format_double(row.se),
               row.pass ? "1" : "0"});

  OutputSet outputs{args.out_dir};
  outputs.add("cross_validation.csv", table.text());
  json params = {{"budget", budget}, {"threads", args.threads}};
  if (!args.spec_path.empty()) params["spec"] = args.spec_path;
  finish_outputs(outputs, manifest_skeleton("verify", args, params), start);

  if (!report.all_pass()) {
    std::cout << "verification FAILED\n";
    return 3;
  }
  std::cout << "verification passed\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fragmentation-with-killing toolkit: critical-speed calculus, "
               "extinction Monte Carlo, travelling waves, scale functions"};
  app.require_subcommand(1);

  CommonArgs critical_args;
  double p_min = -0.9, p_max = 4.0;
  unsigned p_steps = 50;
  auto* cmd_critical =
      app.add_subcommand("critical", "critical exponent, speed, and a phi table");
  add_common(cmd_critical, critical_args, true);
  cmd_critical->add_option("--p-min", p_min, "table start")->capture_default_str();
  cmd_critical->add_option("--p-max", p_max, "table end")->capture_default_str();
  cmd_critical->add_option("--steps", p_steps, "table rows")->capture_default_str();

  CommonArgs sim_args;
  double sim_x = 0.0, sim_c = 0.0;
  std::optional<std::uint64_t> sim_trials, sim_cap;
  std::optional<double> sim_horizon;
  auto* cmd_simulate =
      app.add_subcommand("simulate", "extinction trials for one (x, c)");
  add_common(cmd_simulate, sim_args, true);
  cmd_simulate->add_option("--x", sim_x, "initial barrier headroom")->required();
  cmd_simulate->add_option("--c", sim_c, "barrier speed")->required();
  cmd_simulate->add_option("--trials", sim_trials, "number of trials");
  cmd_simulate->add_option("--horizon", sim_horizon, "time horizon");
  cmd_simulate->add_option("--cap", sim_cap, "alive-block cap");

  CommonArgs wave_args;
  double wave_c = 0.0;
  std::optional<double> wave_dx, wave_x_max;
  auto* cmd_wave =
      app.add_subcommand("wave", "solve the travelling wave and scale function");
  add_common(cmd_wave, wave_args, true);
  cmd_wave->add_option("--c", wave_c, "wave speed (must exceed critical)")->required();
  cmd_wave->add_option("--dx", wave_dx, "grid step (default: offset-aligned rule)");
  cmd_wave->add_option("--x-max", wave_x_max, "grid extent");

  CommonArgs scan_args;
  double scan_x = 0.0, scan_c_min = 0.0, scan_c_max = 0.0;
  unsigned scan_steps = 16;
  std::optional<std::uint64_t> scan_trials, scan_cap;
  std::optional<double> scan_horizon;
  auto* cmd_scan =
      app.add_subcommand("scan", "extinction probability across barrier speeds");
  add_common(cmd_scan, scan_args, true);
  cmd_scan->add_option("--x", scan_x, "initial barrier headroom")->required();
  cmd_scan->add_option("--c-min", scan_c_min, "lowest speed")->required();
  cmd_scan->add_option("--c-max", scan_c_max, "highest speed")->required();
  cmd_scan->add_option("--steps", scan_steps, "number of speeds")
      ->capture_default_str();
  cmd_scan->add_option("--trials", scan_trials, "trials per speed");
  cmd_scan->add_option("--horizon", scan_horizon, "time horizon");
  cmd_scan->add_option("--cap", scan_cap, "alive-block cap");

  CommonArgs verify_args;
  std::string verify_budget = "full";
  auto* cmd_verify =
      app.add_subcommand("verify", "run the acceptance battery (exit 3 on failure)");
  add_common(cmd_verify, verify_args, false);
  cmd_verify->add_option("--budget", verify_budget, "quick | full")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (cmd_critical->parsed())
      return run_critical(critical_args, p_min, p_max, p_steps);
    if (cmd_simulate->parsed())
      return run_simulate(sim_args, sim_x, sim_c, sim_trials, sim_horizon, sim_cap);
    if (cmd_wave->parsed()) return run_wave(wave_args, wave_c, wave_dx, wave_x_max);
    if (cmd_scan->parsed())
      return run_scan(scan_args, scan_x, scan_c_min, scan_c_max, scan_steps,
                      scan_trials, scan_horizon, scan_cap);
    if (cmd_verify->parsed()) return run_verify(verify_args, verify_budget);
  } catch (const fragwave::SpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const fragwave::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
