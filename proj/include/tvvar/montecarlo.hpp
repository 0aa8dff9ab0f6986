#pragma once

#include "tvvar/variance_kernel.hpp"
#include "tvvar/varproc.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace tvvar {

enum class VarianceScenario { Constant, Smooth, Break };

std::string to_string(VarianceScenario scenario);
VarianceScenario variance_scenario_from_name(const std::string& name);

/// Bivariate VAR(2) with A1 = [[-0.4, 0.1], [0, -0.7]] and A2 = diag(-0.6, -0.3).
VarModel reference_dgp();

/// One replication study.
struct ExperimentSpec
{
  VarModel dgp = reference_dgp();
  VarianceScenario variance = VarianceScenario::Smooth;
  double gamma1 = 20.0;
  double gamma2 = 20.0 / 3.0;
  double rho = 0.2;
  int n = 100;
  int replications = 500;
  std::uint64_t seed = 1;
  int p_max = 5;
  Kernel kernel;
  /// Fixed smoothing bandwidth; cross-validated per replication when unset.
  std::optional<double> bandwidth;
  /// Worker threads; 0 reads TVVAR_THREADS, then the hardware concurrency.
  int threads = 0;

  /// Σ(r) for the configured scenario; identity for Constant.
  VariancePath variance_path() const;
};

/// Rows are methods, columns are orders or lags 1..p_max, entries percentages.
struct FrequencyTable
{
  std::string kind; ///< "selection" or "bounds"
  std::vector<std::string> rows;
  std::vector<int> columns;
  Eigen::MatrixXd percent;
  int replications = 0;
  int failures = 0;
  std::vector<std::string> failure_messages;
  double wall_seconds = 0.0;
  ExperimentSpec spec;

  double at(const std::string& row, int column) const;
};

/// Per replication: simulate, scan AIC / AIC_ALS / AIC_GLS over p = 1..p_max
/// and record each argmin. Failed replications are counted and left out of
/// the denominators.
FrequencyTable run_selection_experiment(const ExperimentSpec& spec);

/// Per replication and lag h: whether the (1,1) PAM entry and the first PCM
/// component lie beyond their bounds, for Standard, OLS, ALS and GLS bounds.
FrequencyTable run_bounds_experiment(const ExperimentSpec& spec);

/// Resolved worker count for `requested` (see ExperimentSpec::threads).
int resolve_thread_count(int requested);

void write_table_csv(std::ostream& out, const FrequencyTable& table);
void write_table_text(std::ostream& out, const FrequencyTable& table);
/// JSON sidecar with the spec, seed, failures and wall time.
std::string table_metadata_json(const FrequencyTable& table);
/// JSON of the spec alone (no timing), embedded in table outputs.
std::string spec_json(const ExperimentSpec& spec);

} // namespace tvvar
