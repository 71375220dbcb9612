// oipm: run experiments, property checks and OPF utilities from the shell.
//
// Exit codes: 0 success, 1 check failure, 2 usage or config error,
// 3 runtime or solver error.

#include "oipm/checks.hpp"
#include "oipm/errors.hpp"
#include "oipm/experiment.hpp"
#include "oipm/metrics.hpp"
#include "oipm/opf.hpp"
#include "oipm/serialize.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kFailed = 1, kUsage = 2, kRuntime = 3 };

void configure_logging() {
  // Logs go to stderr so stdout stays machine-readable.
  spdlog::set_default_logger(spdlog::stderr_color_mt("oipm"));
  const char* env = std::getenv("OIPM_LOG");
  const std::string level = env ? env : "warn";
  if (level == "error") spdlog::set_level(spdlog::level::err);
  else if (level == "warn") spdlog::set_level(spdlog::level::warn);
  else if (level == "info") spdlog::set_level(spdlog::level::info);
  else if (level == "debug") spdlog::set_level(spdlog::level::debug);
  else {
    spdlog::set_level(spdlog::level::warn);
    spdlog::warn("OIPM_LOG='{}' is not one of error, warn, info, debug", level);
  }
  spdlog::set_pattern("[%l] %v");
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw oipm::Error("cannot write " + path.string());
  out << text;
}

int cmd_run(const std::string& config_path, const std::string& out_override) {
  auto cfg = oipm::load_config(config_path);
  if (!out_override.empty()) cfg.output_dir = out_override;
  spdlog::info("running {} for T = {}", oipm::to_string(cfg.algorithm), cfg.horizon);
  const auto result = oipm::run_experiment(cfg);
  oipm::write_artifacts(result, cfg.output_dir);
  std::cout << oipm::summary_json(result.summary) << "\n";
  return kOk;
}

int cmd_check(const std::string& suite) {
  const auto& suites = oipm::check_suites();
  if (std::find(suites.begin(), suites.end(), suite) == suites.end()) {
    std::cerr << "unknown suite '" << suite << "'; expected one of:";
    for (const auto& s : suites) std::cerr << ' ' << s;
    std::cerr << "\n";
    return kUsage;
  }
  const auto report = oipm::run_check_suite(suite);
  std::cout << report.to_json() << "\n";
  return report.passed() ? kOk : kFailed;
}

int cmd_opf_build(const std::string& case_path, const std::string& out_dir) {
  const auto enc = oipm::opf::build_encoding(oipm::opf::load_case(case_path));
  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "problem.json",
             oipm::problem_to_json(enc.problem, &enc.b0));

  nlohmann::json stats;
  stats["case"] = enc.network.name;
  stats["variables"] = enc.stats.variables;
  stats["balance_rows"] = enc.stats.balance_rows;
  stats["equality_rows"] = enc.stats.equality_rows;
  stats["removed_rows"] = enc.stats.removed_rows;
  stats["affine_terms"] = enc.stats.affine_terms;
  stats["quadratic_terms"] = enc.stats.quadratic_terms;
  stats["cone_terms"] = enc.stats.cone_terms;
  stats["complexity"] = enc.stats.complexity;
  stats["kept_rows"] = enc.kept_rows;
  const auto& L = enc.layout;
  stats["layout"] = {{"s", L.s},        {"p", L.p},       {"q", L.q},
                     {"w_diag", L.w_diag}, {"w_re", L.w_re}, {"w_im", L.w_im}};
  write_file(fs::path(out_dir) / "encoding.json", stats.dump(2) + "\n");
  std::cout << stats.dump(2) << "\n";
  return kOk;
}

int cmd_stream_gen(const std::string& case_path, std::uint64_t seed, int horizon,
                   double scale, bool feasible_only, const std::string& out_path) {
  if (horizon < 0) throw oipm::InvalidArgument("T must be non-negative");
  const auto enc = oipm::opf::build_encoding(oipm::opf::load_case(case_path));
  oipm::opf::LoadRule rule;
  rule.scale = scale;
  std::function<bool(const oipm::Vec&)> predicate;
  if (feasible_only)
    predicate = [&](const oipm::Vec& b) { return oipm::opf::has_interior(enc.problem, b); };
  const auto stream = oipm::opf::generate_stream(enc, seed, horizon, rule, predicate);

  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw oipm::Error("cannot write " + out_path);
  }
  std::ostream& out = out_path.empty() ? std::cout : file;
  out << "t";
  for (const auto& load : enc.network.loads) out << ",dp_mw_bus" << load.bus;
  out << ",b_step\n";
  for (int t = 1; t <= horizon; ++t) {
    out << t;
    for (double v : stream.offsets_mw[static_cast<std::size_t>(t - 1)])
      out << ',' << oipm::format_double(v);
    out << ',' << oipm::format_double((stream.b[t] - stream.b[t - 1]).norm()) << "\n";
  }
  spdlog::info("V_b = {} with {} redraws", stream.b_variation(), stream.redraws);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Online interior-point tracking for time-varying conic programs"};
  app.require_subcommand(1);

  std::string config_path, out_override;
  auto* run = app.add_subcommand("run", "Run an experiment from a JSON config");
  run->add_option("--config", config_path, "Experiment config")->required();
  run->add_option("--out", out_override, "Override the config's output_dir");

  std::string suite;
  auto* check = app.add_subcommand("check", "Run a property-check suite");
  check->add_option("suite", suite, "barriers | newton | lemmas | theorems | opf")->required();

  auto* opf = app.add_subcommand("opf", "OPF relaxation utilities");
  opf->require_subcommand(1);
  std::string case_path, out_dir;
  auto* build = opf->add_subcommand("build", "Encode a case and write problem.json");
  build->add_option("--case", case_path, "Case JSON")->required();
  build->add_option("--out", out_dir, "Output directory")->required();

  auto* stream = app.add_subcommand("stream", "Load streams");
  stream->require_subcommand(1);
  std::string stream_case, stream_out;
  std::uint64_t seed = 1;
  int horizon = 0;
  double scale = 0.01;
  bool feasible_only = false;
  auto* gen = stream->add_subcommand("gen", "Generate a load stream as CSV");
  gen->add_option("--case", stream_case, "Case JSON")->required();
  gen->add_option("--seed", seed, "Stream seed")->required();
  gen->add_option("-T,--horizon", horizon, "Rounds")->required();
  gen->add_option("--scale", scale, "Perturbation scale in MW");
  gen->add_flag("--feasible", feasible_only, "Redraw rounds without a strict interior");
  gen->add_option("--out", stream_out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(config_path, out_override);
    if (*check) return cmd_check(suite);
    if (*build) return cmd_opf_build(case_path, out_dir);
    if (*gen) return cmd_stream_gen(stream_case, seed, horizon, scale, feasible_only, stream_out);
  } catch (const oipm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
