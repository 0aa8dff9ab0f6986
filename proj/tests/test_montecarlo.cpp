#include "tvvar/montecarlo.hpp"

#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <sstream>

using namespace tvvar;

namespace {

ExperimentSpec small_spec(VarianceScenario v, int n, int reps, std::uint64_t seed)
{
  ExperimentSpec s;
  s.variance = v;
  s.n = n;
  s.replications = reps;
  s.seed = seed;
  s.threads = 1;
  return s;
}

std::string csv(const FrequencyTable& t)
{
  std::ostringstream out;
  write_table_csv(out, t);
  return out.str();
}

} // namespace

TEST_CASE("a single replication is one full cell per row")
{
  const FrequencyTable t = run_selection_experiment(small_spec(VarianceScenario::Smooth, 100, 1, 3));
  REQUIRE(t.rows == std::vector<std::string>{"AIC", "AIC_ALS", "AIC_GLS"});
  for (Eigen::Index r = 0; r < t.percent.rows(); ++r) {
    CHECK(t.percent.row(r).maxCoeff() == 100.0);
    CHECK(t.percent.row(r).sum() == 100.0);
  }
}

TEST_CASE("selection rows sum to 100")
{
  const FrequencyTable t = run_selection_experiment(small_spec(VarianceScenario::Break, 80, 40, 4));
  CHECK(t.failures == 0);
  CHECK(t.columns == std::vector<int>{1, 2, 3, 4, 5});
  for (Eigen::Index r = 0; r < t.percent.rows(); ++r) {
    CHECK(t.percent.row(r).sum() == doctest::Approx(100.0).epsilon(1e-3));
  }
}

TEST_CASE("tables are identical across runs and thread counts")
{
  ExperimentSpec a = small_spec(VarianceScenario::Smooth, 60, 30, 9);
  ExperimentSpec b = a;
  b.threads = 3;
  const FrequencyTable ta = run_bounds_experiment(a);
  const FrequencyTable tb = run_bounds_experiment(b);
  const FrequencyTable tc = run_bounds_experiment(a);
  CHECK(ta.percent == tb.percent);
  CHECK(ta.percent == tc.percent);
  b.threads = 1;
  CHECK(csv(ta) == csv(run_bounds_experiment(b)));

  ExperimentSpec other = a;
  other.seed = 10;
  CHECK(run_selection_experiment(other).percent != run_selection_experiment(a).percent);
}

TEST_CASE("bounds table layout and range")
{
  const FrequencyTable t = run_bounds_experiment(small_spec(VarianceScenario::Break, 80, 30, 5));
  CHECK(t.rows == std::vector<std::string>{"PAM_S", "PAM_OLS", "PAM_ALS", "PAM_GLS", "PCM_S",
                                           "PCM_OLS", "PCM_ALS", "PCM_GLS"});
  CHECK(t.percent.minCoeff() >= 0.0);
  CHECK(t.percent.maxCoeff() <= 100.0);
}

TEST_CASE("standard bounds over-reject under a break at every sample size")
{
  for (int n : {50, 100, 200}) {
    const FrequencyTable t = run_bounds_experiment(small_spec(VarianceScenario::Break, n, 300, 11));
    double standard = 0.0;
    double adaptive = 0.0;
    for (int lag = 3; lag <= 5; ++lag) {
      standard += t.at("PAM_S", lag);
      adaptive += t.at("PAM_ALS", lag);
    }
    CAPTURE(n);
    CHECK(standard > adaptive);
  }
}

TEST_CASE("csv carries the spec and metadata records the run")
{
  const FrequencyTable t = run_selection_experiment(small_spec(VarianceScenario::Constant, 60, 5, 12));
  const std::string text = csv(t);
  REQUIRE(text.rfind("# selection {", 0) == 0);
  const auto header = nlohmann::json::parse(text.substr(12, text.find('\n') - 12));
  CHECK(header["seed"] == 12);
  CHECK(header["variance"] == "constant");
  CHECK(text.find("method,1,2,3,4,5") != std::string::npos);

  const auto meta = nlohmann::json::parse(table_metadata_json(t));
  CHECK(meta["successful_replications"] == 5);
  CHECK(meta["spec"]["seed"] == 12);
  CHECK(meta["failures"] == 0);
  CHECK(meta.contains("wall_seconds"));
}

TEST_CASE("scenario names and the reference DGP")
{
  for (VarianceScenario v : {VarianceScenario::Constant, VarianceScenario::Smooth, VarianceScenario::Break}) {
    CHECK(variance_scenario_from_name(to_string(v)) == v);
  }
  CHECK_THROWS(variance_scenario_from_name("garch"));
  const VarModel dgp = reference_dgp();
  CHECK(dgp.order() == 2);
  CHECK(dgp.coeff(1)(0, 1) == 0.1);
  CHECK(dgp.coeff(2)(1, 1) == -0.3);
  CHECK(is_stable(dgp).stable);
}

TEST_CASE("thread count resolution")
{
  CHECK(resolve_thread_count(3) == 3);
  CHECK(resolve_thread_count(0) >= 1);
}
