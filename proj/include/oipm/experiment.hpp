#pragma once

#include "oipm/metrics.hpp"
#include "oipm/online.hpp"
#include "oipm/opf.hpp"
#include "oipm/synthetic.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace oipm {

enum class ExperimentAlgorithm { OipmTec, EpsOipmTec, PgdBaseline };

const char* to_string(ExperimentAlgorithm algorithm);

struct SyntheticSource {
  SyntheticSpec spec;
  /// Per-round drift bound scale/√t; 0 picks half the initial drift threshold.
  double drift_scale = 0.0;
};

struct CaseSource {
  std::filesystem::path path;
  opf::LoadRule rule;
  /// Redraw rounds whose oracle solve fails.
  bool redraw_infeasible = true;
};

struct ExperimentConfig {
  ExperimentAlgorithm algorithm = ExperimentAlgorithm::OipmTec;
  double eta0 = 1.0;
  double beta = 0.0;
  double epsilon = 0.015;
  double eta_fixed = 0.0;
  double eta_max = std::numeric_limits<double>::infinity();
  int horizon = 100;
  std::uint64_t seed = 1;
  std::optional<SyntheticSource> synthetic;
  std::optional<CaseSource> network;
  std::filesystem::path output_dir = "out";
  DriftPolicy drift_policy = DriftPolicy::Correct;
  int max_corrections = 5;
  MRefresh m_refresh = MRefresh::EveryRound;
  KktSolver solver = KktSolver::SymmetricIndefinite;
  OracleOptions oracle;
  unsigned oracle_threads = 1;
};

/// Parses a JSON config. Relative paths are resolved against `base_dir`.
/// Unknown keys and out-of-range values raise ConfigError.
ExperimentConfig parse_config(const std::string& json_text,
                              const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);

struct ExperimentProblem {
  ConicProblem problem;
  /// b_0 … b_T.
  std::vector<Vec> stream;
  /// x*_0 … x*_T.
  std::vector<Vec> optima;
  std::optional<opf::OpfEncoding> encoding;
  int redraws = 0;
  double drift_scale = 0.0;
};

/// Builds the instance and its stream and solves the per-round optima.
ExperimentProblem prepare(const ExperimentConfig& config);

struct ExperimentSummary {
  std::string algorithm;
  int horizon = 0;
  double complexity = 0.0;
  double eta0 = 0.0;
  double beta = 0.0;
  double epsilon = 0.0;
  double final_eta = 0.0;
  LedgerTotals totals;
  std::optional<BoundReport> bounds;
  int drift_violations = 0;
  int corrections = 0;
  int damped_rounds = 0;
  int uncertified_rounds = 0;
  int surrogate_rounds = 0;
  int redraws = 0;
};

struct ExperimentResult {
  ExperimentSummary summary;
  std::vector<RoundRecord> records;
  std::vector<RoundTrace> traces;
  MetricsLedger ledger;
};

/// Runs the configured algorithm over a prepared instance.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const ExperimentProblem& instance);
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Writes ledger.csv, summary.json, series/cumulative.csv and series/trace.csv.
void write_artifacts(const ExperimentResult& result,
                     const std::filesystem::path& dir);

std::string summary_json(const ExperimentSummary& summary);

}  // namespace oipm
