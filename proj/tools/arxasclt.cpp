// Command line front end: limit-matrix, simulate, run, reproduce.
//
// Exit codes: 0 success, 2 validation failure, 3 numerical abort.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "arx/config.hpp"
#include "arx/errors.hpp"
#include "arx/harness.hpp"
#include "arx/model.hpp"
#include "arx/simulate.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct RunFlags {
  std::optional<std::uint64_t> seed;
  std::optional<int> replicates;
  std::optional<int> workers;
  std::string out;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--seed", f.seed, "Base seed for replicate seed derivation");
  cmd->add_option("--replicates", f.replicates, "Number of replicates N")->check(CLI::PositiveNumber);
  cmd->add_option("--workers", f.workers, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "Write the delimiter-separated report here");
}

void apply(const RunFlags& f, arx::ExperimentConfig& c) {
  if (f.seed) c.base_seed = *f.seed;
  if (f.replicates) c.replicates = *f.replicates;
  if (f.workers) c.workers = *f.workers;
  if (!f.out.empty()) c.out_path = f.out;
}

void write_outputs(const arx::ExperimentConfig& c, const arx::ExperimentReport& report,
                   const std::string& table) {
  std::cout << table;
  if (!c.out_path.empty()) {
    std::ofstream out(c.out_path);
    if (!out) throw arx::ValidationError("cannot write '" + c.out_path + "'");
    arx::write_report_csv(out, report);
  }
  if (!c.table_path.empty()) {
    std::ofstream out(c.table_path);
    if (!out) throw arx::ValidationError("cannot write '" + c.table_path + "'");
    out << table;
  }
}

int limit_matrix(const std::string& path, double tol) {
  const auto doc = arx::KeyValueDocument::load(path);
  doc.require_known_keys({"p", "q", "a", "b", "family", "sigma2", "mixture_weight",
                          "mixture_ratio", "reference", "reference_amplitude",
                          "reference_exponent", "reference_frequency", "horizons", "replicates",
                          "seed", "statistics", "workers", "theta_hat_0", "overflow_guard",
                          "refactor_interval", "burn_in", "allow_exclusions", "limit_matrix_tol",
                          "out", "table_out"});
  const auto model = arx::model_from_document(doc);
  const auto causal = arx::check_causality(model.B());
  const auto ctrl = arx::check_controllability(model.A(), model.B());
  std::printf("p = %d, q = %d\n", model.p(), model.q());
  std::printf("min root modulus of B: %.12g\n", causal.min_root_modulus);
  std::printf("controllability resultant |res(A-1, B)|: %.6g (threshold %.3g)\n",
              std::abs(ctrl.resultant), ctrl.threshold);
  arx::validate(model);
  const auto L = arx::build_limit_matrix(model, tol);
  std::printf("truncation K: %d\n", L.truncation());
  std::printf("tail estimate: %.3g\n", L.tail_estimate());
  std::printf("L =\n");
  for (int i = 0; i < L.dim(); ++i) {
    std::printf(" ");
    for (int j = 0; j < L.dim(); ++j) std::printf(" % .12f", L(i, j));
    std::printf("\n");
  }
  std::printf("min eigenvalue: %.12g\n", L.min_eigenvalue());
  return 0;
}

int simulate_cmd(const std::string& path, std::optional<long> n, std::uint64_t seed,
                 const std::string& out_path) {
  const auto doc = arx::KeyValueDocument::load(path);
  const auto model = arx::model_from_document(doc);
  const auto noise = arx::noise_from_document(doc);
  const auto reference = arx::reference_from_document(doc);
  long horizon = 1000;
  if (n)
    horizon = *n;
  else if (doc.has("horizons"))
    horizon = doc.get_int_list("horizons").back();
  arx::SimulationOptions opts;
  opts.overflow_guard = doc.get_double("overflow_guard", 1e12);
  opts.refactor_interval = doc.get_int("refactor_interval", 4096);
  const auto diag = arx::reference_check(reference, horizon);
  if (diag.flagged)
    std::cerr << "warning: reference energy (1/n) sum x_k^2 = " << diag.mean_square
              << " does not look o(n)\n";
  const auto traj = arx::simulate(model, noise, reference, horizon, seed, opts);
  if (out_path.empty()) {
    arx::write_trajectory_csv(std::cout, traj);
  } else {
    std::ofstream out(out_path);
    if (!out) throw arx::ValidationError("cannot write '" + out_path + "'");
    arx::write_trajectory_csv(out, traj);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ARX adaptive tracking: limit matrix, closed-loop simulation and ASCLT statistics"};
  app.require_subcommand(1);

  std::string model_path;
  double tol = 1e-12;
  auto* lm = app.add_subcommand("limit-matrix", "Print the limiting matrix L of a model file");
  lm->add_option("model", model_path, "Model file (p, q, a, b)")->required();
  lm->add_option("--tol", tol, "Relative truncation tolerance of the impulse series");

  std::string sim_path, sim_out;
  std::optional<long> sim_n;
  std::uint64_t sim_seed = arx::kDefaultSeed;
  auto* sim = app.add_subcommand("simulate", "Dump one closed-loop trajectory");
  sim->add_option("config", sim_path, "Model/noise/reference file")->required();
  sim->add_option("--n", sim_n, "Horizon (default: last horizon in the file, else 1000)");
  sim->add_option("--seed", sim_seed, "Seed of the noise stream");
  sim->add_option("--out", sim_out, "Output file (default stdout)");

  std::string run_path;
  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Run an experiment config file");
  run->add_option("config", run_path, "Experiment config file")->required();
  add_run_flags(run, run_flags);

  std::string table_name;
  RunFlags rep_flags;
  auto* rep = app.add_subcommand("reproduce", "Run a built-in table experiment");
  rep->add_option("table", table_name, "table1 | table2 | table3")
      ->required()
      ->check(CLI::IsMember({"table1", "table2", "table3"}));
  add_run_flags(rep, rep_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*lm) return limit_matrix(model_path, tol);
    if (*sim) return simulate_cmd(sim_path, sim_n, sim_seed, sim_out);
    if (*run) {
      auto config = arx::config_from_document(arx::KeyValueDocument::load(run_path));
      apply(run_flags, config);
      const auto report = arx::run_experiment(config);
      write_outputs(config, report, arx::format_report(report));
      return 0;
    }
    if (*rep) {
      const auto id = arx::parse_table_id(table_name);
      auto config = arx::builtin_config(id);
      apply(rep_flags, config);
      const auto report = arx::run_experiment(config);
      write_outputs(config, report, arx::format_table(id, report));
      return 0;
    }
  } catch (const arx::ValidationError& e) {
    std::cerr << "validation failure: " << e.what() << '\n';
    return kExitValidation;
  } catch (const arx::NumericalError& e) {
    std::cerr << "numerical abort: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
