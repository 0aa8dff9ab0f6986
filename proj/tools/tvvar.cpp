// tvvar: lag-order identification for VAR models with time-varying variance.

#include "tvvar/dataset.hpp"
#include "tvvar/estimation.hpp"
#include "tvvar/linalg.hpp"
#include "tvvar/montecarlo.hpp"
#include "tvvar/partial.hpp"
#include "tvvar/selection.hpp"
#include "tvvar/variance_kernel.hpp"
#include "tvvar/varproc.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace tvvar;

namespace {

std::string num(double v)
{
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

/// Every option of a subcommand with its effective value.
std::string effective_config(const std::string& command, const CLI::App& app)
{
  nlohmann::ordered_json j;
  j["command"] = command;
  for (const CLI::Option* opt : app.get_options()) {
    const std::string name = opt->get_name(false, true);
    if (name.empty() || opt == app.get_help_ptr()) {
      continue;
    }
    const auto& results = opt->results();
    std::string key = opt->get_single_name();
    if (results.empty()) {
      if (opt->get_expected_min() == 0) {
        j[key] = false;
      } else if (!opt->get_default_str().empty()) {
        j[key] = opt->get_default_str();
      }
      continue;
    }
    if (opt->get_expected_min() == 0) {
      j[key] = true;
    } else if (results.size() == 1) {
      j[key] = results.front();
    } else {
      j[key] = results;
    }
  }
  return j.dump();
}

/// Output target: a file when a path is given, stdout otherwise.
class Sink
{
public:
  explicit Sink(const std::string& path)
  {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) {
        throw std::runtime_error("cannot write " + path);
      }
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
  std::unique_ptr<std::ofstream> file_;
};

struct VarianceArgs
{
  std::string kind = "smooth";
  double gamma1 = 20.0;
  double gamma2 = 20.0 / 3.0;
  double rho = 0.2;

  void add(CLI::App* app, const std::string& flag, bool required_default)
  {
    auto* opt = app->add_option(flag, kind, "Variance path: constant, smooth or break");
    if (required_default) {
      opt->capture_default_str();
    }
    app->add_option("--gamma1", gamma1, "Variance ratio of the first component")
      ->capture_default_str();
    app->add_option("--gamma2", gamma2, "Variance ratio of the second component")
      ->capture_default_str();
    app->add_option("--rho", rho, "Correlation parameter")->capture_default_str();
  }

  VariancePath path(int dim) const
  {
    switch (variance_scenario_from_name(kind)) {
      case VarianceScenario::Constant:
        return VariancePath::constant(Eigen::MatrixXd::Identity(dim, dim));
      case VarianceScenario::Smooth:
        return VariancePath::smooth_trend(gamma1, gamma2, rho);
      case VarianceScenario::Break:
        return VariancePath::abrupt_break(gamma1, gamma2, rho);
    }
    throw std::logic_error("unreachable");
  }
};

struct DataArgs
{
  std::string path;
  bool difference = false;
  bool demean = false;
  std::vector<std::string> columns;
  std::string kernel = "gaussian";
  std::optional<double> bandwidth;
  double grid_cmin = 0.5;
  double grid_cmax = 3.0;
  int grid_points = 12;
  VarianceArgs truth{.kind = ""};
  std::string out;

  void add(CLI::App* app)
  {
    app->add_option("--data", path, "Input CSV (header row, optional date column)")
      ->required()
      ->check(CLI::ExistingFile);
    app->add_flag("--difference", difference, "Take first differences");
    app->add_flag("--demean", demean, "Remove column means");
    app->add_option("--columns", columns, "Columns to use, in order")->delimiter(',');
    app->add_option("--kernel", kernel, "Smoothing kernel: gaussian or epanechnikov")
      ->capture_default_str();
    app->add_option("--bandwidth", bandwidth, "Fixed bandwidth (skips cross-validation)");
    app->add_option("--grid-cmin", grid_cmin, "Bandwidth grid lower constant")
      ->capture_default_str();
    app->add_option("--grid-cmax", grid_cmax, "Bandwidth grid upper constant")
      ->capture_default_str();
    app->add_option("--grid-points", grid_points, "Bandwidth grid size")->capture_default_str();
    app->add_option("--true-variance", truth.kind,
                    "Known variance path of simulated data (constant, smooth, break); "
                    "enables GLS");
    app->add_option("--gamma1", truth.gamma1, "Known-path gamma1")->capture_default_str();
    app->add_option("--gamma2", truth.gamma2, "Known-path gamma2")->capture_default_str();
    app->add_option("--rho", truth.rho, "Known-path rho")->capture_default_str();
    app->add_option("--out", out, "Output CSV (stdout when omitted)");
  }

  TimeSeries series(int presample) const
  {
    const TimeSeries ts = to_series(read_dataset(path), IngestOptions{difference, demean, columns});
    if (presample >= ts.total_size()) {
      throw std::runtime_error("series is too short for the requested order");
    }
    return ts.with_presample(presample);
  }

  BandwidthGrid grid(int n) const
  {
    BandwidthGrid g = BandwidthGrid::for_sample_size(n);
    g.c_min = grid_cmin;
    g.c_max = grid_cmax;
    g.points = grid_points;
    return g;
  }

  std::optional<VariancePath> true_path(int dim) const
  {
    if (truth.kind.empty()) {
      return std::nullopt;
    }
    return truth.path(dim);
  }
};

std::vector<BoundsMethod> parse_bounds(const std::vector<std::string>& names)
{
  std::vector<BoundsMethod> out;
  for (const auto& n : names) {
    out.push_back(bounds_method_from_name(n));
  }
  return out;
}

void write_matrix_rows(std::ostream& out, int lag, const std::string& method,
                       const Eigen::MatrixXd& value, const Eigen::MatrixXd& half_width,
                       bool with_significance)
{
  for (Eigen::Index r = 0; r < value.rows(); ++r) {
    for (Eigen::Index c = 0; c < value.cols(); ++c) {
      out << lag << "," << r + 1 << "," << c + 1 << "," << method << "," << num(value(r, c)) << ","
          << num(half_width(r, c));
      if (with_significance) {
        out << "," << (std::abs(value(r, c)) > half_width(r, c) ? 1 : 0);
      }
      out << "\n";
    }
  }
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Lag-order identification for VAR models with time-varying variance"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Read options from a TOML/INI configuration file");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Simulate the bivariate reference VAR(2)");
  VarianceArgs sim_var;
  int sim_n = 200;
  std::uint64_t sim_seed = 1;
  int sim_presample = 5;
  int sim_burn = kDefaultBurnIn;
  std::string sim_out;
  sim_var.add(sim, "--variance", true);
  sim->add_option("--n", sim_n, "Sample size")->capture_default_str();
  sim->add_option("--seed", sim_seed, "Random seed")->capture_default_str();
  sim->add_option("--presample", sim_presample, "Presample observations")->capture_default_str();
  sim->add_option("--burn-in", sim_burn, "Discarded start-up draws")->capture_default_str();
  sim->add_option("--out", sim_out, "Output CSV (stdout when omitted)");

  // fit
  auto* fit = app.add_subcommand("fit", "Estimate a VAR(p) by OLS, ALS or GLS");
  DataArgs fit_data;
  int fit_p = 2;
  std::string fit_method = "ols";
  fit_data.add(fit);
  fit->add_option("--p", fit_p, "Autoregressive order")->capture_default_str();
  fit->add_option("--method", fit_method, "ols, als or gls")->capture_default_str();

  // select
  auto* sel = app.add_subcommand("select", "Order selection by AIC, AIC_ALS (and AIC_GLS)");
  DataArgs sel_data;
  int sel_pmax = 5;
  int sel_cap = 5;
  sel_data.add(sel);
  sel->add_option("--pmax", sel_pmax, "Largest order scanned")->capture_default_str();
  sel->add_option("--cap", sel_cap, "Orders above this are flagged unreliable")
    ->capture_default_str();

  // pam
  auto* pam_cmd = app.add_subcommand("pam", "Partial autoregressive matrices with bounds");
  DataArgs pam_data;
  int pam_pmax = 5;
  std::vector<std::string> pam_bounds{"standard", "ols", "als"};
  pam_data.add(pam_cmd);
  pam_cmd->add_option("--pmax", pam_pmax, "Largest lag")->capture_default_str();
  pam_cmd->add_option("--bounds", pam_bounds, "Bounds methods: standard, ols, als, gls")
    ->delimiter(',')
    ->capture_default_str();

  // pcm
  auto* pcm_cmd = app.add_subcommand("pcm", "Partial cross-correlation matrices with bounds");
  DataArgs pcm_data;
  int pcm_pmax = 5;
  std::optional<int> pcm_lag;
  std::vector<std::string> pcm_bounds{"standard", "ols", "als"};
  pcm_data.add(pcm_cmd);
  pcm_cmd->add_option("--pmax", pcm_pmax, "Largest lag (all lags 1..pmax)")
    ->capture_default_str();
  pcm_cmd->add_option("--lag", pcm_lag, "Single lag instead of 1..pmax");
  pcm_cmd->add_option("--bounds", pcm_bounds, "Bounds methods: standard, ols, als, gls")
    ->delimiter(',')
    ->capture_default_str();

  // cv-bandwidth
  auto* cv = app.add_subcommand("cv-bandwidth", "Cross-validated smoothing bandwidth");
  DataArgs cv_data;
  int cv_p = 5;
  cv_data.add(cv);
  cv->add_option("--p", cv_p, "Order of the OLS fit whose residuals are smoothed")
    ->capture_default_str();

  // mc-select / mc-bounds
  struct McArgs
  {
    VarianceArgs variance;
    int n = 100;
    int reps = 500;
    std::uint64_t seed = 1;
    int pmax = 5;
    int threads = 0;
    std::string kernel = "gaussian";
    std::optional<double> bandwidth;
    std::string out;
    std::string meta;
    bool text = false;
  };
  McArgs mc_sel_args;
  McArgs mc_bnd_args;
  auto add_mc = [](CLI::App* cmd, McArgs& a) {
    a.variance.add(cmd, "--variance", true);
    cmd->add_option("--n", a.n, "Sample size")->capture_default_str();
    cmd->add_option("--reps", a.reps, "Replications")->capture_default_str();
    cmd->add_option("--seed", a.seed, "Master seed")->capture_default_str();
    cmd->add_option("--pmax", a.pmax, "Largest order/lag")->capture_default_str();
    cmd->add_option("--threads", a.threads, "Worker threads (0: TVVAR_THREADS or all cores)")
      ->capture_default_str();
    cmd->add_option("--kernel", a.kernel, "Smoothing kernel")->capture_default_str();
    cmd->add_option("--bandwidth", a.bandwidth, "Fixed bandwidth (skips cross-validation)");
    cmd->add_option("--out", a.out, "Output CSV (stdout when omitted)");
    cmd->add_option("--meta", a.meta, "Metadata JSON path (default: <out>.meta.json)");
    cmd->add_flag("--text", a.text, "Also print an aligned text table to stdout");
  };
  auto* mc_sel = app.add_subcommand("mc-select", "Monte Carlo selection frequencies");
  add_mc(mc_sel, mc_sel_args);
  auto* mc_bnd = app.add_subcommand("mc-bounds", "Monte Carlo bounds rejection frequencies");
  add_mc(mc_bnd, mc_bnd_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      VarianceArgs v = sim_var;
      const TimeSeries ts =
        simulate(reference_dgp(), v.path(2), sim_n, sim_seed, sim_presample, sim_burn);
      Sink sink(sim_out);
      write_series_csv(sink.stream(), ts, {"x1", "x2"}, effective_config("simulate", *sim));
    } else if (*fit) {
      const TimeSeries ts = fit_data.series(fit_p);
      const Design design = build_design(ts, fit_p);
      const EstimationResult ols = ols_estimate(design);
      const Kernel kernel = Kernel::from_name(fit_data.kernel);
      const double bw =
        fit_data.bandwidth.value_or(
          cross_validate_bandwidth(ols.residuals, fit_data.grid(ts.size()), kernel).bandwidth);
      const VariancePathEstimate est = estimate_variance_path(ols.residuals, bw, kernel);
      const LambdaEstimates lam = lambda_estimates(design, ols.residuals, est, ols.sigma_u_hat);

      EstimationResult chosen = ols;
      Eigen::MatrixXd avar = lam.avar_ols;
      if (fit_method == "als") {
        chosen = als_estimate(design, est);
        avar = lam.avar_als;
      } else if (fit_method == "gls") {
        const auto truth = fit_data.true_path(ts.dim());
        if (!truth) {
          throw std::runtime_error("--method gls needs --true-variance");
        }
        chosen = gls_estimate(design, *truth);
        avar = linalg::symmetric_inverse(chosen.normal_matrix);
      } else if (fit_method != "ols") {
        throw std::runtime_error("unknown method '" + fit_method + "'");
      }
      const int d = ts.dim();
      const Eigen::VectorXd hw =
        kBoundQuantile * (avar.diagonal().cwiseMax(0.0) / ts.size()).cwiseSqrt();
      Sink sink(fit_data.out);
      auto& out = sink.stream();
      out << "# " << effective_config("fit", *fit) << "\n";
      out << "# n=" << ts.size() << " d=" << d << " bandwidth=" << num(bw) << "\n";
      out << "lag,row,col,method,value,halfwidth\n";
      for (int lag = 1; lag <= fit_p; ++lag) {
        const Eigen::Index start = static_cast<Eigen::Index>(lag - 1) * d * d;
        const Eigen::VectorXd v = chosen.theta.segment(start, d * d);
        const Eigen::VectorXd h = hw.segment(start, d * d);
        write_matrix_rows(out, lag, fit_method, Eigen::Map<const Eigen::MatrixXd>(v.data(), d, d),
                          Eigen::Map<const Eigen::MatrixXd>(h.data(), d, d), false);
      }
      for (Eigen::Index r = 0; r < d; ++r) {
        for (Eigen::Index c = 0; c < d; ++c) {
          out << "# sigma_u_hat," << r + 1 << "," << c + 1 << "," << num(ols.sigma_u_hat(r, c))
              << "\n";
        }
      }
    } else if (*sel) {
      const TimeSeries ts = sel_data.series(sel_pmax);
      const auto truth = sel_data.true_path(ts.dim());
      SelectionOptions options;
      options.p_max = sel_pmax;
      options.cap = sel_cap;
      options.kernel = Kernel::from_name(sel_data.kernel);
      options.bandwidth = sel_data.bandwidth;
      options.grid = sel_data.grid(ts.size());
      options.true_path = truth ? &*truth : nullptr;
      const SelectionReport report = select_order(ts, options);

      Sink sink(sel_data.out);
      auto& out = sink.stream();
      out << "# " << effective_config("select", *sel) << "\n";
      out << "# n=" << report.sample_size << " d=" << report.dim
          << " bandwidth=" << num(report.bandwidth) << "\n";
      out << "p,aic,aic_als" << (report.selected_gls ? ",aic_gls" : "") << "\n";
      for (const auto& tr : report.traces) {
        out << tr.order << "," << num(tr.aic) << "," << num(tr.aic_als);
        if (tr.aic_gls) {
          out << "," << num(*tr.aic_gls);
        }
        out << "\n";
      }
      for (Criterion c : {Criterion::AIC, Criterion::AIC_ALS, Criterion::AIC_GLS}) {
        if (const auto p = report.selected(c)) {
          out << "# selected " << to_string(c) << "=" << *p
              << (report.unreliable(c) ? " (unreliable: above the cap or on the scan boundary)" : "") << "\n";
        }
      }
    } else if (*pam_cmd || *pcm_cmd) {
      DataArgs& data = *pam_cmd ? pam_data : pcm_data;
      const int pmax = *pam_cmd ? pam_pmax : std::max(pcm_pmax, pcm_lag.value_or(0));
      const TimeSeries ts = data.series(pmax);
      const auto truth = data.true_path(ts.dim());
      PartialOptions options;
      options.p_max = pmax;
      options.methods = parse_bounds(*pam_cmd ? pam_bounds : pcm_bounds);
      options.kernel = Kernel::from_name(data.kernel);
      options.bandwidth = data.bandwidth;
      options.grid = data.grid(ts.size());
      options.true_path = truth ? &*truth : nullptr;

      Sink sink(data.out);
      auto& out = sink.stream();
      const int d = ts.dim();
      if (*pam_cmd) {
        const PamSequence seq = pam_sequence(ts, options);
        out << "# " << effective_config("pam", *pam_cmd) << "\n";
        out << "# n=" << ts.size() << " d=" << d << " bandwidth=" << num(seq.bandwidth) << "\n";
        out << "lag,row,col,method,value,halfwidth,significant\n";
        for (const auto& lag : seq.lags) {
          for (BoundsMethod m : options.methods) {
            const auto& b = lag.by_method.at(m);
            write_matrix_rows(out, lag.lag, to_string(m), b.estimate, b.half_width, true);
          }
        }
      } else {
        std::vector<PcmVector> vectors;
        if (pcm_lag) {
          vectors.push_back(pcm(ts, *pcm_lag, options));
        } else {
          vectors = partial_analysis(ts, options).pcm;
        }
        out << "# " << effective_config("pcm", *pcm_cmd) << "\n";
        out << "# n=" << ts.size() << " d=" << d << "\n";
        out << "lag,component,row,col,method,value,halfwidth,significant\n";
        for (const auto& v : vectors) {
          for (BoundsMethod m : options.methods) {
            const auto& b = v.by_method.at(m);
            for (Eigen::Index k = 0; k < b.estimate.size(); ++k) {
              out << v.lag << "," << k + 1 << "," << k % d + 1 << "," << k / d + 1 << ","
                  << to_string(m) << "," << num(b.estimate(k)) << "," << num(b.half_width(k))
                  << "," << (std::abs(b.estimate(k)) > b.half_width(k) ? 1 : 0) << "\n";
            }
          }
        }
      }
    } else if (*cv) {
      const TimeSeries ts = cv_data.series(cv_p);
      const EstimationResult ols = ols_estimate(build_design(ts, cv_p));
      const BandwidthChoice choice = cross_validate_bandwidth(
        ols.residuals, cv_data.grid(ts.size()), Kernel::from_name(cv_data.kernel));
      Sink sink(cv_data.out);
      auto& out = sink.stream();
      out << "# " << effective_config("cv-bandwidth", *cv) << "\n";
      out << "bandwidth,cv_score\n";
      for (std::size_t k = 0; k < choice.candidates.size(); ++k) {
        out << num(choice.candidates[k]) << "," << num(choice.scores[k]) << "\n";
      }
      out << "# selected bandwidth=" << num(choice.bandwidth) << "\n";
    } else if (*mc_sel || *mc_bnd) {
      const bool selection = static_cast<bool>(*mc_sel);
      const McArgs& a = selection ? mc_sel_args : mc_bnd_args;
      ExperimentSpec spec;
      spec.variance = variance_scenario_from_name(a.variance.kind);
      spec.gamma1 = a.variance.gamma1;
      spec.gamma2 = a.variance.gamma2;
      spec.rho = a.variance.rho;
      spec.n = a.n;
      spec.replications = a.reps;
      spec.seed = a.seed;
      spec.p_max = a.pmax;
      spec.threads = a.threads;
      spec.kernel = Kernel::from_name(a.kernel);
      spec.bandwidth = a.bandwidth;
      const FrequencyTable table =
        selection ? run_selection_experiment(spec) : run_bounds_experiment(spec);
      {
        Sink sink(a.out);
        write_table_csv(sink.stream(), table);
      }
      const std::string meta = !a.meta.empty() ? a.meta : (a.out.empty() ? "" : a.out + ".meta.json");
      if (!meta.empty()) {
        std::ofstream m(meta);
        if (!m) {
          throw std::runtime_error("cannot write " + meta);
        }
        m << table_metadata_json(table) << "\n";
      }
      if (a.text) {
        write_table_text(std::cout, table);
      }
      if (table.failures > 0) {
        std::cerr << "warning: " << table.failures << " replication(s) failed and were excluded\n";
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
