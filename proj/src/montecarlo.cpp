#include "tvvar/montecarlo.hpp"

#include "tvvar/partial.hpp"
#include "tvvar/rng.hpp"
#include "tvvar/selection.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace tvvar {

std::string to_string(VarianceScenario scenario)
{
  switch (scenario) {
    case VarianceScenario::Constant:
      return "constant";
    case VarianceScenario::Smooth:
      return "smooth";
    case VarianceScenario::Break:
      return "break";
  }
  return "?";
}

VarianceScenario variance_scenario_from_name(const std::string& name)
{
  if (name == "constant") {
    return VarianceScenario::Constant;
  }
  if (name == "smooth") {
    return VarianceScenario::Smooth;
  }
  if (name == "break") {
    return VarianceScenario::Break;
  }
  throw std::invalid_argument("unknown variance scenario '" + name +
                              "' (expected constant, smooth or break)");
}

VarModel reference_dgp()
{
  Eigen::MatrixXd a1(2, 2);
  Eigen::MatrixXd a2(2, 2);
  a1 << -0.4, 0.1, 0.0, -0.7;
  a2 << -0.6, 0.0, 0.0, -0.3;
  return VarModel(2, {a1, a2});
}

VariancePath ExperimentSpec::variance_path() const
{
  switch (variance) {
    case VarianceScenario::Constant:
      return VariancePath::constant(Eigen::MatrixXd::Identity(dgp.dim(), dgp.dim()));
    case VarianceScenario::Smooth:
      return VariancePath::smooth_trend(gamma1, gamma2, rho);
    case VarianceScenario::Break:
      return VariancePath::abrupt_break(gamma1, gamma2, rho);
  }
  throw std::logic_error("unknown variance scenario");
}

double FrequencyTable::at(const std::string& row, int column) const
{
  const auto r = std::find(rows.begin(), rows.end(), row);
  const auto c = std::find(columns.begin(), columns.end(), column);
  if (r == rows.end() || c == columns.end()) {
    throw std::out_of_range("FrequencyTable::at: no cell " + row + "/" + std::to_string(column));
  }
  return percent(r - rows.begin(), c - columns.begin());
}

int resolve_thread_count(int requested)
{
  if (requested > 0) {
    return requested;
  }
  if (const char* env = std::getenv("TVVAR_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) {
      return v;
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

void validate(const ExperimentSpec& spec)
{
  if (spec.replications < 1 || spec.n < 1 || spec.p_max < 1) {
    throw std::invalid_argument("experiment: replications, n and p_max must be positive");
  }
  if (!is_stable(spec.dgp).stable) {
    throw std::invalid_argument("experiment: data generating process is not stable");
  }
}

// Runs body(i) for i in [0, count) on `threads` workers. Each index is
// handled exactly once; results must be written to per-index slots.
void parallel_for(int count, int threads, const std::function<void(int)>& body)
{
  threads = std::clamp(threads, 1, count);
  if (threads == 1) {
    for (int i = 0; i < count; ++i) {
      body(i);
    }
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        body(i);
      }
    });
  }
  for (auto& t : pool) {
    t.join();
  }
}

// Replication outcome: a row-major flag/choice vector or an error message.
struct Outcome
{
  std::vector<int> values;
  std::string error;
};

FrequencyTable aggregate(const ExperimentSpec& spec, std::string kind,
                         std::vector<std::string> rows, const std::vector<Outcome>& outcomes,
                         const std::function<void(const Outcome&, Eigen::MatrixXd&)>& tally)
{
  FrequencyTable table;
  table.kind = std::move(kind);
  table.rows = std::move(rows);
  for (int c = 1; c <= spec.p_max; ++c) {
    table.columns.push_back(c);
  }
  table.spec = spec;
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(table.rows.size(), table.columns.size());
  int ok = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (!outcomes[i].error.empty()) {
      ++table.failures;
      table.failure_messages.push_back("replication " + std::to_string(i) + ": " +
                                       outcomes[i].error);
      continue;
    }
    ++ok;
    tally(outcomes[i], counts);
  }
  table.replications = ok;
  table.percent = ok > 0 ? Eigen::MatrixXd(100.0 * counts / ok) : counts;
  return table;
}

} // namespace

FrequencyTable run_selection_experiment(const ExperimentSpec& spec)
{
  validate(spec);
  const auto start = std::chrono::steady_clock::now();
  const VariancePath path = spec.variance_path();
  std::vector<Outcome> outcomes(spec.replications);

  parallel_for(spec.replications, resolve_thread_count(spec.threads), [&](int i) {
    try {
      const TimeSeries ts =
        simulate(spec.dgp, path, spec.n, stream_seed(spec.seed, i), spec.p_max);
      SelectionOptions options;
      options.p_max = spec.p_max;
      options.cap = spec.p_max;
      options.kernel = spec.kernel;
      options.bandwidth = spec.bandwidth;
      options.true_path = &path;
      const SelectionReport report = select_order(ts, options);
      outcomes[i].values = {report.selected_aic, report.selected_als, *report.selected_gls};
    } catch (const std::exception& e) {
      outcomes[i].error = e.what();
    }
  });

  FrequencyTable table =
    aggregate(spec, "selection", {"AIC", "AIC_ALS", "AIC_GLS"}, outcomes,
              [](const Outcome& o, Eigen::MatrixXd& counts) {
                for (int r = 0; r < 3; ++r) {
                  counts(r, o.values[r] - 1) += 1.0;
                }
              });
  table.wall_seconds =
    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return table;
}

FrequencyTable run_bounds_experiment(const ExperimentSpec& spec)
{
  validate(spec);
  const auto start = std::chrono::steady_clock::now();
  const VariancePath path = spec.variance_path();
  const std::vector<BoundsMethod> methods{BoundsMethod::Standard, BoundsMethod::OLS,
                                          BoundsMethod::ALS, BoundsMethod::GLS};
  const int m = static_cast<int>(methods.size());
  const int lags = spec.p_max;
  std::vector<Outcome> outcomes(spec.replications);

  parallel_for(spec.replications, resolve_thread_count(spec.threads), [&](int i) {
    try {
      const TimeSeries ts =
        simulate(spec.dgp, path, spec.n, stream_seed(spec.seed, i), spec.p_max);
      PartialOptions options;
      options.p_max = spec.p_max;
      options.methods = methods;
      options.kernel = spec.kernel;
      options.bandwidth = spec.bandwidth;
      options.true_path = &path;
      const PartialAnalysis analysis = partial_analysis(ts, options);
      // Layout: [PAM rows][PCM rows], each row holding one flag per lag.
      std::vector<int> flags(2 * m * lags, 0);
      for (int h = 0; h < lags; ++h) {
        for (int k = 0; k < m; ++k) {
          const auto& pam = analysis.pam.lags[h].by_method.at(methods[k]);
          const auto& pcm = analysis.pcm[h].by_method.at(methods[k]);
          flags[k * lags + h] = std::abs(pam.estimate(0, 0)) > pam.half_width(0, 0);
          flags[(m + k) * lags + h] = std::abs(pcm.estimate(0)) > pcm.half_width(0);
        }
      }
      outcomes[i].values = std::move(flags);
    } catch (const std::exception& e) {
      outcomes[i].error = e.what();
    }
  });

  FrequencyTable table =
    aggregate(spec, "bounds",
              {"PAM_S", "PAM_OLS", "PAM_ALS", "PAM_GLS", "PCM_S", "PCM_OLS", "PCM_ALS", "PCM_GLS"},
              outcomes, [&](const Outcome& o, Eigen::MatrixXd& counts) {
                for (int r = 0; r < 2 * m; ++r) {
                  for (int h = 0; h < lags; ++h) {
                    counts(r, h) += o.values[r * lags + h];
                  }
                }
              });
  table.wall_seconds =
    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return table;
}

namespace {

nlohmann::ordered_json spec_to_json(const ExperimentSpec& spec)
{
  nlohmann::ordered_json j;
  j["variance"] = to_string(spec.variance);
  j["gamma1"] = spec.gamma1;
  j["gamma2"] = spec.gamma2;
  j["rho"] = spec.rho;
  j["n"] = spec.n;
  j["replications"] = spec.replications;
  j["seed"] = spec.seed;
  j["p_max"] = spec.p_max;
  j["kernel"] = spec.kernel.name();
  if (spec.bandwidth) {
    j["bandwidth"] = *spec.bandwidth;
  } else {
    j["bandwidth"] = "cross-validated";
  }
  const Eigen::VectorXd theta = spec.dgp.theta();
  j["dgp_theta"] = std::vector<double>(theta.data(), theta.data() + theta.size());
  return j;
}

std::string fmt(double v)
{
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

} // namespace

std::string spec_json(const ExperimentSpec& spec)
{
  return spec_to_json(spec).dump();
}

std::string table_metadata_json(const FrequencyTable& table)
{
  nlohmann::ordered_json j;
  j["kind"] = table.kind;
  j["spec"] = spec_to_json(table.spec);
  j["successful_replications"] = table.replications;
  j["failures"] = table.failures;
  j["failure_messages"] = table.failure_messages;
  j["wall_seconds"] = table.wall_seconds;
  return j.dump(2);
}

void write_table_csv(std::ostream& out, const FrequencyTable& table)
{
  out << "# " << table.kind << " " << spec_json(table.spec) << "\n";
  out << "method";
  for (int c : table.columns) {
    out << "," << c;
  }
  out << "\n";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out << table.rows[r];
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      out << "," << fmt(table.percent(r, c));
    }
    out << "\n";
  }
}

void write_table_text(std::ostream& out, const FrequencyTable& table)
{
  out << (table.kind == "selection" ? "Frequency (%) of selected lag length"
                                    : "Frequency (%) of (1,1) entries beyond 95% bounds")
      << "  [variance=" << to_string(table.spec.variance) << ", n=" << table.spec.n
      << ", replications=" << table.replications << ", failures=" << table.failures
      << ", seed=" << table.spec.seed << "]\n";
  out << std::setw(10) << (table.kind == "selection" ? "p" : "lag");
  for (int c : table.columns) {
    out << std::setw(8) << c;
  }
  out << "\n";
  out << std::fixed << std::setprecision(1);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out << std::setw(10) << table.rows[r];
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      out << std::setw(8) << table.percent(r, c);
    }
    out << "\n";
  }
  out.unsetf(std::ios_base::floatfield);
}

} // namespace tvvar
