#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace {

struct Run
{
  int status;
  std::string out;
};

Run tvvar(const std::string& args)
{
  const std::string cmd = std::string(TVVAR_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) {
    out.append(buf, got);
  }
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::string slurp(const std::string& path)
{
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> data_lines(const std::string& text)
{
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') {
      out.push_back(line);
    }
  }
  return out;
}

nlohmann::json config_line(const std::string& text)
{
  REQUIRE(text.rfind("# {", 0) == 0);
  return nlohmann::json::parse(text.substr(2, text.find('\n') - 2));
}

} // namespace

TEST_CASE("seeded selection run")
{
  REQUIRE(tvvar("simulate --variance smooth --n 100 --seed 18 --out cli_smooth.csv").status == 0);
  const Run r = tvvar("select --data cli_smooth.csv --pmax 5");
  REQUIRE(r.status == 0);
  CHECK(r.out.find("# selected aic=5 (unreliable") != std::string::npos);
  CHECK(r.out.find("# selected aic_als=2\n") != std::string::npos);
  CHECK(r.out.find("aic_gls") == std::string::npos);
  const auto cfg = config_line(r.out);
  CHECK(cfg["command"] == "select");
  CHECK(cfg["pmax"] == "5");
  const auto rows = data_lines(r.out);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == "p,aic,aic_als");

  const Run gls = tvvar("select --data cli_smooth.csv --true-variance smooth");
  REQUIRE(gls.status == 0);
  CHECK(data_lines(gls.out)[0] == "p,aic,aic_als,aic_gls");
}

TEST_CASE("simulated file embeds its config and seed")
{
  REQUIRE(tvvar("simulate --variance break --n 50 --seed 4 --out cli_break.csv").status == 0);
  const std::string text = slurp("cli_break.csv");
  const auto cfg = config_line(text);
  CHECK(cfg["seed"] == "4");
  CHECK(cfg["variance"] == "break");
  const auto rows = data_lines(text);
  CHECK(rows[0] == "t,x1,x2");
  CHECK(rows.size() == 1 + 55);
}

TEST_CASE("pcm at one lag has four entries per bounds method")
{
  const Run r = tvvar("pcm --data cli_smooth.csv --lag 3 --bounds standard,ols,als");
  REQUIRE(r.status == 0);
  const auto rows = data_lines(r.out);
  REQUIRE(rows.size() == 1 + 12);
  CHECK(rows[0] == "lag,component,row,col,method,value,halfwidth,significant");
  int als = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].rfind("3,", 0) == 0);
    als += rows[i].find(",als,") != std::string::npos;
  }
  CHECK(als == 4);
}

TEST_CASE("pam covers every lag and method")
{
  const Run r = tvvar("pam --data cli_smooth.csv --pmax 4 --bounds standard,als --bandwidth 0.3");
  REQUIRE(r.status == 0);
  const auto rows = data_lines(r.out);
  CHECK(rows.size() == 1 + 4 * 2 * 4);
  CHECK(rows[0] == "lag,row,col,method,value,halfwidth,significant");
}

TEST_CASE("fit and cross-validation commands")
{
  const Run fit = tvvar("fit --data cli_smooth.csv --p 2 --method als");
  REQUIRE(fit.status == 0);
  CHECK(data_lines(fit.out).size() == 1 + 8);
  CHECK(fit.out.find("# sigma_u_hat,1,1,") != std::string::npos);
  CHECK(tvvar("fit --data cli_smooth.csv --p 2 --method gls").status != 0);
  CHECK(tvvar("fit --data cli_smooth.csv --p 2 --method gls --true-variance smooth").status == 0);

  const Run cv = tvvar("cv-bandwidth --data cli_smooth.csv --p 5");
  REQUIRE(cv.status == 0);
  CHECK(data_lines(cv.out).size() == 1 + 12);
  CHECK(cv.out.find("# selected bandwidth=") != std::string::npos);
}

TEST_CASE("monte carlo selection is byte-identical across runs")
{
  const std::string args = "mc-select --n 100 --reps 500 --variance smooth --seed 7";
  REQUIRE(tvvar(args + " --out cli_mc_a.csv").status == 0);
  REQUIRE(tvvar(args + " --out cli_mc_b.csv --threads 2").status == 0);
  const std::string a = slurp("cli_mc_a.csv");
  CHECK(!a.empty());
  CHECK(a == slurp("cli_mc_b.csv"));
  const auto meta = nlohmann::json::parse(slurp("cli_mc_a.csv.meta.json"));
  CHECK(meta["spec"]["seed"] == 7);
  CHECK(meta["successful_replications"] == 500);
}

TEST_CASE("config file supplies options and flags override it")
{
  {
    std::ofstream cfg("cli_config.toml");
    cfg << "[select]\ndata = \"cli_smooth.csv\"\npmax = 3\n";
  }
  const Run r = tvvar("select --config cli_config.toml");
  REQUIRE(r.status == 0);
  CHECK(data_lines(r.out).size() == 1 + 3);
  const Run o = tvvar("select --config cli_config.toml --pmax 4");
  REQUIRE(o.status == 0);
  CHECK(data_lines(o.out).size() == 1 + 4);
  CHECK(config_line(o.out)["pmax"] == "4");
}

TEST_CASE("errors exit nonzero")
{
  CHECK(tvvar("select --data missing_file.csv").status != 0);
  CHECK(tvvar("").status != 0);
  {
    std::ofstream bad("cli_gap.csv");
    bad << "a,b\n1,2\n3,\n";
  }
  const Run r = tvvar("select --data cli_gap.csv");
  CHECK(r.status != 0);
  CHECK(r.out.find("data row 2") != std::string::npos);
  CHECK(tvvar("pam --data cli_smooth.csv --bounds bootstrap").status != 0);
  CHECK(tvvar("mc-select --variance garch --reps 1").status != 0);
}
