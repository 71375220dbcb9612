#include "oipm/errors.hpp"
#include "oipm/experiment.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace oipm;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = OIPM_SOURCE_DIR;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string synthetic(int horizon, const std::string& extra = "") {
  return R"({"T": )" + std::to_string(horizon) +
         R"(, "seed": 3, "problem": {"type": "synthetic", "kind": "socp", "n": 8, "p": 3})" +
         extra + "}";
}

// Exit status of the CLI with stdout and stderr discarded.
int cli(const std::string& args) {
  const std::string cmd = std::string("\"") + OIPM_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("shipped configs carry the published settings") {
  const auto tec = load_config(kSource / "configs/case33_oipm_tec.json");
  CHECK(tec.algorithm == ExperimentAlgorithm::OipmTec);
  CHECK(tec.eta0 == 1.0);
  CHECK(tec.beta == 1.02);
  CHECK(tec.horizon == 2000);
  REQUIRE(tec.network);
  CHECK(tec.network->rule.scale == 0.01);
  CHECK(fs::exists(tec.network->path));

  const auto eps = load_config(kSource / "configs/case33_eps_oipm_tec.json");
  CHECK(eps.algorithm == ExperimentAlgorithm::EpsOipmTec);
  CHECK(eps.epsilon == 0.015);
  CHECK(eps.eta_fixed == 1e4);
  CHECK(eps.horizon == 2000);

  for (const auto& entry : fs::directory_iterator(kSource / "configs"))
    CHECK_NOTHROW(load_config(entry.path()));
}

TEST_CASE("config validation") {
  CHECK_NOTHROW(parse_config(synthetic(5)));
  CHECK_THROWS_AS(parse_config(synthetic(5, R"(, "bogus": 1)")), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"T": 5, "problem": {"type": "synthetic", "size": 4}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(synthetic(5, R"(, "oracle": {"tol": 1e-6, "x": 0})")),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(synthetic(-1)), ConfigError);
  CHECK_THROWS_AS(parse_config(synthetic(5, R"(, "beta": 0.9)")), ConfigError);
  CHECK_THROWS_AS(parse_config(synthetic(5, R"(, "epsilon": 0)")), ConfigError);
  CHECK_THROWS_AS(parse_config(synthetic(5, R"(, "algorithm": "sgd")")), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"T": 5})"), ConfigError);
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
  CHECK_THROWS_AS(load_config(kSource / "configs/missing.json"), ConfigError);

  const auto cfg = parse_config(R"({"problem": {"type": "case", "path": "c.json"}})", "/base");
  CHECK(cfg.network->path == fs::path("/base/c.json"));
}

TEST_CASE("zero horizon gives an empty ledger") {
  const auto res = run_experiment(parse_config(synthetic(0)));
  CHECK(res.records.empty());
  CHECK(res.summary.horizon == 0);
  CHECK(res.summary.totals.regret == 0.0);
  CHECK(res.summary.totals.violation == 0.0);
  CHECK(res.summary.totals.b_variation == 0.0);
}

TEST_CASE("same seed, same bytes") {
  const fs::path root = fs::temp_directory_path() / "oipm_test_experiment";
  fs::remove_all(root);
  auto cfg = parse_config(synthetic(40));
  write_artifacts(run_experiment(cfg), root / "a");
  write_artifacts(run_experiment(cfg), root / "b");
  const auto a = slurp(root / "a/ledger.csv");
  CHECK(a.size() > 100);
  CHECK(a == slurp(root / "b/ledger.csv"));
  for (const char* file : {"summary.json", "series/cumulative.csv", "series/trace.csv"})
    CHECK(fs::exists(root / "a" / file));

  const auto summary = nlohmann::json::parse(slurp(root / "a/summary.json"));
  CHECK(summary.at("T") == 40);

  cfg.seed = 4;
  write_artifacts(run_experiment(cfg), root / "c");
  CHECK(a != slurp(root / "c/ledger.csv"));
  fs::remove_all(root);
}

TEST_CASE("every algorithm runs on the same synthetic stream") {
  for (const char* algorithm : {"oipm_tec", "eps_oipm_tec", "pgd_baseline"}) {
    const auto res = run_experiment(
        parse_config(synthetic(20, std::string(R"(, "algorithm": ")") + algorithm + "\"")));
    CHECK(res.records.size() == 20);
    CHECK(res.summary.algorithm == algorithm);
    CHECK(std::isfinite(res.summary.totals.regret));
  }
}

TEST_CASE("cli exit codes") {
  const fs::path root = fs::temp_directory_path() / "oipm_test_cli";
  fs::remove_all(root);
  fs::create_directories(root);
  {
    std::ofstream(root / "bad.json") << synthetic(5, R"(, "bogus": true)");
    std::ofstream(root / "good.json") << synthetic(5);
  }
  CHECK(cli("check nonsense") == 2);
  CHECK(cli("run --config \"" + (root / "bad.json").string() + "\"") == 2);
  CHECK(cli("run --config \"" + (root / "good.json").string() + "\" --out \"" +
            (root / "out").string() + "\"") == 0);
  CHECK(fs::exists(root / "out/ledger.csv"));
  CHECK(cli("check opf") == 0);
  CHECK(cli("opf build --case \"" + (kSource / "data/cases/two_bus.json").string() +
            "\" --out \"" + (root / "enc").string() + "\"") == 0);
  CHECK(fs::exists(root / "enc/problem.json"));
  CHECK(cli("stream gen --case \"" + (kSource / "data/cases/two_bus.json").string() +
            "\" --seed 1 -T 3") == 0);
  CHECK(cli("") != 0);
  fs::remove_all(root);
}
