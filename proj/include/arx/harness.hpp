#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "arx/config.hpp"
#include "arx/model.hpp"
#include "arx/noise.hpp"
#include "arx/simulate.hpp"
#include "arx/stats.hpp"

namespace arx {

inline constexpr std::uint64_t kDefaultSeed = 0x41525841ULL;

struct ExperimentConfig {
  ArxModeld model = reference_model();
  NoiseModel noise = NoiseModel::gaussian(0.64);
  ReferenceSpec reference = ReferenceSpec::zero();
  std::vector<long> horizons;
  int replicates = 100;
  std::uint64_t base_seed = kDefaultSeed;
  std::vector<StatisticRequest> statistics;
  int workers = 1;
  SimulationOptions simulation;
  LogAverageOptions log_average;
  /// If false, any replicate aborted by a NumericalError fails the run.
  bool allow_exclusions = false;
  double limit_matrix_tol = 1e-12;
  std::string out_path;    ///< delimiter-separated report
  std::string table_path;  ///< aligned human-readable table
};

struct ReportRow {
  StatisticKind kind;
  int m = 0;
  long n = 0;
  int replicates = 0;
  double mean = 0.0;
  double stddev = 0.0;  ///< sample standard deviation across replicates
  double target = 0.0;  ///< NaN when the statistic has no fixed limit
  double rel_error = 0.0;
};

struct ExperimentReport {
  std::vector<ReportRow> rows;  ///< statistics-major, horizons-minor
  /// per_replicate[row][r] over the included replicates, in replicate order.
  std::vector<std::vector<double>> per_replicate;
  int excluded = 0;
  std::vector<std::string> exclusion_messages;

  const ReportRow& find(StatisticKind kind, int m, long n) const;
};

/// Throws ValidationError before any simulation is started.
void validate(const ExperimentConfig& config);

/// Limit value of a statistic for this model and noise; NaN if none.
double statistic_target(StatisticKind kind, int m, int dim, const NoiseModel& noise);

/// One trajectory per replicate up to the largest horizon, statistics taken
/// at every horizon prefix, replicate r seeded with derive_seed(base_seed, r).
/// Replicates run on `workers` threads; the reduction is in replicate order,
/// so the report does not depend on the worker count.
ExperimentReport run_experiment(const ExperimentConfig& config);

enum class TableId { kTable1, kTable2, kTable3 };
TableId parse_table_id(const std::string& name);
std::string to_string(TableId id);

/// Built-in configurations for the ARX(2,2) example, Gaussian noise with
/// variance 0.64, zero reference, N = 100:
///   table1: qsl m = 1 at n = 100, 500, 1000, 2000, 5000
///   table2: cost m = 1..5 at n = 10000
///   table3: cost m = 5 at n = 20000, 30000, 50000
ExperimentConfig builtin_config(TableId id);

/// Columns: statistic, m, n, replicates, value, target, rel_error.
void write_report_csv(std::ostream& out, const ExperimentReport& report, char delimiter = ',');

/// Aligned table; the layout of the built-in tables plus a spread column.
std::string format_table(TableId id, const ExperimentReport& report);
std::string format_report(const ExperimentReport& report);

/// Model keys: p, q, a, b.
ArxModeld model_from_document(const KeyValueDocument& doc);
/// Noise keys: family (default gaussian), sigma2, mixture_weight, mixture_ratio.
NoiseModel noise_from_document(const KeyValueDocument& doc);
/// Reference keys: reference (zero|constant|power|sine), reference_amplitude,
/// reference_exponent, reference_frequency.
ReferenceSpec reference_from_document(const KeyValueDocument& doc);
/// Full experiment schema; see the configuration section of README.md.
ExperimentConfig config_from_document(const KeyValueDocument& doc);

}  // namespace arx
