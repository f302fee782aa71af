#include "arx/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "arx/errors.hpp"

namespace arx {

namespace {

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string render(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& body) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : body) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) out << (c ? "  " : "") << pad(cells[c], width[c]);
    out << '\n';
  };
  line(header);
  std::size_t total = 0;
  for (auto w : width) total += w;
  out << std::string(total + 2 * (width.size() - 1), '-') << '\n';
  for (const auto& row : body) line(row);
  return out.str();
}

std::string percent(double rel) { return std::isnan(rel) ? "-" : fmt("%.2f%%", 100.0 * rel); }

}  // namespace

const ReportRow& ExperimentReport::find(StatisticKind kind, int m, long n) const {
  for (const auto& r : rows)
    if (r.kind == kind && r.m == m && r.n == n) return r;
  throw ValidationError("report has no row " + to_string(kind) + ":" + std::to_string(m) +
                        " at n = " + std::to_string(n));
}

double statistic_target(StatisticKind kind, int m, int dim, const NoiseModel& noise) {
  switch (kind) {
    case StatisticKind::kQsl: return ell(m, dim);
    case StatisticKind::kCost:
    case StatisticKind::kNoiseMoment: return noise.even_moment(m);
    case StatisticKind::kMartingaleMoment:
    case StatisticKind::kQslGram: return ell_martingale(m, dim, noise.sigma2());
    case StatisticKind::kEstimationError: return std::numeric_limits<double>::quiet_NaN();
  }
  return std::numeric_limits<double>::quiet_NaN();
}

void validate(const ExperimentConfig& c) {
  validate(c.model);
  if (c.replicates < 1) throw ValidationError("replicates must be >= 1");
  if (c.workers < 1) throw ValidationError("workers must be >= 1");
  if (c.horizons.empty()) throw ValidationError("at least one horizon is required");
  if (c.horizons.front() < 1) throw ValidationError("horizons must be >= 1");
  for (std::size_t i = 1; i < c.horizons.size(); ++i)
    if (c.horizons[i] <= c.horizons[i - 1])
      throw ValidationError("horizons must be strictly ascending");
  if (c.statistics.empty()) throw ValidationError("at least one statistic is required");
  for (const auto& s : c.statistics) {
    if (s.m < 1) throw ValidationError("statistic order m must be >= 1");
    if (!(2.0 * s.m < c.noise.moment_order_bound()))
      throw ValidationError("moment order 2m = " + std::to_string(2 * s.m) +
                            " exceeds the noise moment bound");
    if (needs_log_normalizer(s.kind) && c.horizons.front() < 2)
      throw ValidationError(to_string(s.kind) + " needs horizons >= 2");
  }
  if (!(c.simulation.overflow_guard > 0.0)) throw ValidationError("overflow guard must be > 0");
}

ExperimentReport run_experiment(const ExperimentConfig& c) {
  validate(c);
  const int dim = c.model.dim();
  const Eigen::VectorXd theta = c.model.theta();
  const bool need_L = std::any_of(c.statistics.begin(), c.statistics.end(),
                                  [](const auto& s) { return s.kind == StatisticKind::kQsl; });
  const Eigen::MatrixXd L =
      need_L ? build_limit_matrix(c.model, c.limit_matrix_tol).entries() : Eigen::MatrixXd();
  const long horizon = c.horizons.back();

  struct Outcome {
    std::vector<std::vector<double>> values;
    std::string error;
  };
  std::vector<std::optional<Outcome>> outcomes(c.replicates);
  auto run_one = [&](int r) {
    Outcome o;
    try {
      const Trajectory traj = simulate(c.model, c.noise, c.reference, horizon,
                                       derive_seed(c.base_seed, static_cast<std::uint64_t>(r)),
                                       c.simulation);
      o.values = evaluate_prefixes(traj, theta, L, c.statistics, c.horizons, c.log_average);
    } catch (const NumericalError& e) {
      o.error = e.what();
    }
    outcomes[r] = std::move(o);
  };

  const int workers = std::min(c.workers, c.replicates);
  if (workers <= 1) {
    for (int r = 0; r < c.replicates; ++r) run_one(r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::mutex failure_mutex;
    std::exception_ptr failure;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int r = next++; r < c.replicates; r = next++) {
          try {
            run_one(r);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  ExperimentReport report;
  std::vector<int> included;
  for (int r = 0; r < c.replicates; ++r) {
    if (!outcomes[r]->error.empty()) {
      ++report.excluded;
      report.exclusion_messages.push_back("replicate " + std::to_string(r) + ": " +
                                          outcomes[r]->error);
    } else {
      included.push_back(r);
    }
  }
  if (report.excluded > 0 && !c.allow_exclusions)
    throw NumericalError(std::to_string(report.excluded) + " replicate(s) aborted; first: " +
                         report.exclusion_messages.front());
  if (included.empty()) throw NumericalError("every replicate aborted");

  for (std::size_t s = 0; s < c.statistics.size(); ++s) {
    const auto& req = c.statistics[s];
    const double target = statistic_target(req.kind, req.m, dim, c.noise);
    for (std::size_t h = 0; h < c.horizons.size(); ++h) {
      std::vector<double> vals;
      vals.reserve(included.size());
      for (int r : included) vals.push_back(outcomes[r]->values[s][h]);
      double sum = 0.0;
      for (double v : vals) sum += v;
      const double mean = sum / static_cast<double>(vals.size());
      double ss = 0.0;
      for (double v : vals) ss += (v - mean) * (v - mean);
      const double sd = vals.size() > 1 ? std::sqrt(ss / static_cast<double>(vals.size() - 1)) : 0.0;
      report.rows.push_back({req.kind, req.m, c.horizons[h], static_cast<int>(vals.size()), mean,
                             sd, target,
                             std::isnan(target) ? std::numeric_limits<double>::quiet_NaN()
                                                : relative_error(mean, target)});
      report.per_replicate.push_back(std::move(vals));
    }
  }
  return report;
}

TableId parse_table_id(const std::string& name) {
  if (name == "table1") return TableId::kTable1;
  if (name == "table2") return TableId::kTable2;
  if (name == "table3") return TableId::kTable3;
  throw ValidationError("unknown table '" + name + "' (expected table1, table2 or table3)");
}

std::string to_string(TableId id) {
  switch (id) {
    case TableId::kTable1: return "table1";
    case TableId::kTable2: return "table2";
    case TableId::kTable3: return "table3";
  }
  return "unknown";
}

ExperimentConfig builtin_config(TableId id) {
  ExperimentConfig c;
  c.replicates = 100;
  switch (id) {
    case TableId::kTable1:
      c.horizons = {100, 500, 1000, 2000, 5000};
      c.statistics = {{StatisticKind::kQsl, 1}};
      break;
    case TableId::kTable2:
      c.horizons = {10000};
      for (int m = 1; m <= 5; ++m) c.statistics.push_back({StatisticKind::kCost, m});
      break;
    case TableId::kTable3:
      c.horizons = {20000, 30000, 50000};
      c.statistics = {{StatisticKind::kCost, 5}};
      break;
  }
  return c;
}

void write_report_csv(std::ostream& out, const ExperimentReport& report, char d) {
  out << "statistic" << d << 'm' << d << 'n' << d << "replicates" << d << "value" << d << "target"
      << d << "rel_error\n";
  for (const auto& r : report.rows)
    out << to_string(r.kind) << d << r.m << d << r.n << d << r.replicates << d
        << fmt("%.10g", r.mean) << d << fmt("%.10g", r.target) << d << fmt("%.10g", r.rel_error)
        << '\n';
}

std::string format_table(TableId id, const ExperimentReport& report) {
  std::vector<std::vector<std::string>> body;
  switch (id) {
    case TableId::kTable1:
      for (const auto& r : report.rows)
        body.push_back({std::to_string(r.n), fmt("%.4f", r.mean), percent(r.rel_error),
                        fmt("%.4f", r.stddev)});
      return "Quadratic strong law (limit p + q = " + fmt("%.0f", report.rows.front().target) +
             ")\n" + render({"n", "Delta_n", "relative error", "replicate sd"}, body);
    case TableId::kTable2:
      for (const auto& r : report.rows)
        body.push_back({std::to_string(r.m), fmt("%.4f", r.mean), fmt("%.4f", r.target),
                        percent(r.rel_error), fmt("%.4f", r.stddev)});
      return "Convergence of even moments (n = " + std::to_string(report.rows.front().n) + ")\n" +
             render({"m", "C_n(m)", "sigma(2m)", "relative error", "replicate sd"}, body);
    case TableId::kTable3:
      for (const auto& r : report.rows)
        body.push_back({std::to_string(r.n), fmt("%.2f", r.mean), percent(r.rel_error),
                        fmt("%.2f", r.stddev)});
      return "Estimation of sigma(10) = " + fmt("%.2f", report.rows.front().target) + "\n" +
             render({"n", "C_n(5)", "relative error", "replicate sd"}, body);
  }
  return {};
}

std::string format_report(const ExperimentReport& report) {
  std::vector<std::vector<std::string>> body;
  for (const auto& r : report.rows)
    body.push_back({to_string(r.kind), std::to_string(r.m), std::to_string(r.n),
                    std::to_string(r.replicates), fmt("%.6g", r.mean), fmt("%.6g", r.target),
                    percent(r.rel_error), fmt("%.4g", r.stddev)});
  std::string out =
      render({"statistic", "m", "n", "replicates", "mean", "target", "rel error", "sd"}, body);
  if (report.excluded > 0)
    out += std::to_string(report.excluded) + " replicate(s) excluded after numerical aborts\n";
  return out;
}

ArxModeld model_from_document(const KeyValueDocument& doc) {
  const long p = doc.get_int("p");
  const long q = doc.get_int("q");
  const auto a = doc.get_double_list("a");
  const auto b = doc.get_double_list("b");
  if (p < 1 || q < 1) throw ValidationError("model needs p >= 1 and q >= 1");
  if (static_cast<long>(a.size()) != p) throw ValidationError("'a' must list exactly p values");
  if (static_cast<long>(b.size()) != q) throw ValidationError("'b' must list exactly q values");
  return ArxModeld(Eigen::Map<const Eigen::VectorXd>(a.data(), p),
                   Eigen::Map<const Eigen::VectorXd>(b.data(), q));
}

NoiseModel noise_from_document(const KeyValueDocument& doc) {
  const NoiseFamily family = parse_noise_family(doc.get_string("family", "gaussian"));
  const double sigma2 = doc.get_double("sigma2", 0.64);
  switch (family) {
    case NoiseFamily::kGaussian: return NoiseModel::gaussian(sigma2);
    case NoiseFamily::kUniform: return NoiseModel::uniform(sigma2);
    case NoiseFamily::kRademacherMixture:
      return NoiseModel::rademacher_mixture(sigma2, doc.get_double("mixture_weight", 0.2),
                                            doc.get_double("mixture_ratio", 3.0));
  }
  return NoiseModel::gaussian(sigma2);
}

ReferenceSpec reference_from_document(const KeyValueDocument& doc) {
  ReferenceSpec r;
  r.kind = parse_reference_kind(doc.get_string("reference", "zero"));
  r.amplitude = doc.get_double("reference_amplitude", 0.0);
  r.exponent = doc.get_double("reference_exponent", 0.0);
  r.frequency = doc.get_double("reference_frequency", 0.0);
  return r;
}

ExperimentConfig config_from_document(const KeyValueDocument& doc) {
  doc.require_known_keys({"p", "q", "a", "b", "family", "sigma2", "mixture_weight",
                          "mixture_ratio", "reference", "reference_amplitude",
                          "reference_exponent", "reference_frequency", "horizons", "replicates",
                          "seed", "statistics", "workers", "theta_hat_0", "overflow_guard",
                          "refactor_interval", "burn_in", "allow_exclusions", "limit_matrix_tol",
                          "out", "table_out"});
  ExperimentConfig c;
  c.model = model_from_document(doc);
  c.noise = noise_from_document(doc);
  c.reference = reference_from_document(doc);
  c.horizons = doc.get_int_list("horizons");
  c.replicates = static_cast<int>(doc.get_int("replicates", 100));
  if (doc.has("seed")) {
    try {
      c.base_seed = std::stoull(doc.get_string("seed"));
    } catch (const std::exception&) {
      throw ValidationError("seed must be a non-negative 64-bit integer");
    }
  }
  for (const auto& item : doc.get_string_list("statistics")) {
    const auto colon = item.find(':');
    const std::string name = item.substr(0, colon);
    int m = 1;
    if (colon != std::string::npos) {
      try {
        m = std::stoi(item.substr(colon + 1));
      } catch (const std::exception&) {
        throw ValidationError("malformed statistic '" + item + "' (expected name:m)");
      }
    }
    c.statistics.push_back({parse_statistic_kind(name), m});
  }
  c.workers = static_cast<int>(doc.get_int("workers", 1));
  if (doc.has("theta_hat_0")) {
    const auto v = doc.get_double_list("theta_hat_0");
    if (static_cast<int>(v.size()) != c.model.dim())
      throw ValidationError("theta_hat_0 must list p + q values");
    c.simulation.theta_hat_0 = Eigen::Map<const Eigen::VectorXd>(v.data(), c.model.dim());
  }
  c.simulation.overflow_guard = doc.get_double("overflow_guard", 1e12);
  c.simulation.refactor_interval = doc.get_int("refactor_interval", 4096);
  c.log_average.burn_in = doc.get_int("burn_in", 0);
  c.allow_exclusions = doc.get_string("allow_exclusions", "false") == "true";
  c.limit_matrix_tol = doc.get_double("limit_matrix_tol", 1e-12);
  c.out_path = doc.get_string("out", "");
  c.table_path = doc.get_string("table_out", "");
  return c;
}

}  // namespace arx
