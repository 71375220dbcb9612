#include "oipm/experiment.hpp"

#include "oipm/errors.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace oipm {

const char* to_string(ExperimentAlgorithm algorithm) {
  switch (algorithm) {
    case ExperimentAlgorithm::OipmTec:
      return "oipm_tec";
    case ExperimentAlgorithm::EpsOipmTec:
      return "eps_oipm_tec";
    case ExperimentAlgorithm::PgdBaseline:
      return "pgd_baseline";
  }
  return "unknown";
}

namespace {

using json = nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key))
      throw ConfigError("unknown key '" + key + "' in " + where);
}

double get_number(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  const double d = v.get<double>();
  if (std::isnan(d)) throw ConfigError(std::string("'") + key + "' is NaN");
  return d;
}

long long get_integer(const json& obj, const char* key, long long fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer())
    throw ConfigError(std::string("'") + key + "' must be an integer");
  return v.get<long long>();
}

std::string get_string(const json& obj, const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

bool get_bool(const json& obj, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError(std::string("'") + key + "' must be a boolean");
  return v.get<bool>();
}

json check_json(const BoundCheck& check) {
  return {{"applicable", check.applicable}, {"lhs", check.lhs}, {"rhs", check.rhs},
          {"margin", check.margin}, {"passed", check.passed}};
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text,
                              const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  reject_unknown(doc,
                 {"algorithm", "eta0", "beta", "epsilon", "eta_fixed", "eta_max", "T",
                  "seed", "problem", "output_dir", "drift_policy", "max_corrections",
                  "m_refresh", "kkt_solver", "oracle"},
                 "config");
  ExperimentConfig cfg;

  const std::string algorithm = get_string(doc, "algorithm", "oipm_tec");
  if (algorithm == "oipm_tec") cfg.algorithm = ExperimentAlgorithm::OipmTec;
  else if (algorithm == "eps_oipm_tec") cfg.algorithm = ExperimentAlgorithm::EpsOipmTec;
  else if (algorithm == "pgd_baseline") cfg.algorithm = ExperimentAlgorithm::PgdBaseline;
  else throw ConfigError("config: unknown algorithm '" + algorithm + "'");

  cfg.eta0 = get_number(doc, "eta0", cfg.eta0);
  cfg.beta = get_number(doc, "beta", cfg.beta);
  cfg.epsilon = get_number(doc, "epsilon", cfg.epsilon);
  cfg.eta_fixed = get_number(doc, "eta_fixed", cfg.eta_fixed);
  cfg.eta_max = get_number(doc, "eta_max", cfg.eta_max);
  const long long horizon = get_integer(doc, "T", cfg.horizon);
  const long long seed = get_integer(doc, "seed", 1);
  cfg.max_corrections = static_cast<int>(get_integer(doc, "max_corrections", 5));
  if (!(cfg.eta0 > 0.0)) throw ConfigError("config: eta0 must be > 0");
  if (cfg.beta != 0.0 && !(cfg.beta > 1.0)) throw ConfigError("config: beta must be > 1");
  if (!(cfg.epsilon > 0.0)) throw ConfigError("config: epsilon must be > 0");
  if (cfg.eta_fixed < 0.0) throw ConfigError("config: eta_fixed must be >= 0");
  if (!(cfg.eta_max >= cfg.eta0)) throw ConfigError("config: eta_max must be >= eta0");
  if (horizon < 0 || horizon > 10'000'000) throw ConfigError("config: T out of range");
  if (seed < 0) throw ConfigError("config: seed must be >= 0");
  if (cfg.max_corrections < 0) throw ConfigError("config: max_corrections must be >= 0");
  cfg.horizon = static_cast<int>(horizon);
  cfg.seed = static_cast<std::uint64_t>(seed);

  const std::string policy = get_string(doc, "drift_policy", "correct");
  if (policy == "correct") cfg.drift_policy = DriftPolicy::Correct;
  else if (policy == "warn") cfg.drift_policy = DriftPolicy::WarnAndProceed;
  else if (policy == "fail") cfg.drift_policy = DriftPolicy::Fail;
  else throw ConfigError("config: unknown drift_policy '" + policy + "'");

  const std::string refresh = get_string(doc, "m_refresh", "every_round");
  if (refresh == "every_round") cfg.m_refresh = MRefresh::EveryRound;
  else if (refresh == "initial") cfg.m_refresh = MRefresh::Initial;
  else throw ConfigError("config: unknown m_refresh '" + refresh + "'");

  const std::string solver = get_string(doc, "kkt_solver", "ldlt");
  if (solver == "ldlt") cfg.solver = KktSolver::SymmetricIndefinite;
  else if (solver == "block") cfg.solver = KktSolver::BlockElimination;
  else throw ConfigError("config: unknown kkt_solver '" + solver + "'");
  cfg.oracle.solver = cfg.solver;

  const std::string out = get_string(doc, "output_dir", "out");
  cfg.output_dir = std::filesystem::path(out).is_absolute() ? std::filesystem::path(out)
                                                            : base_dir / out;

  if (doc.contains("oracle")) {
    const auto& o = doc.at("oracle");
    reject_unknown(o, {"tol", "growth", "threads", "stall_iterations"}, "oracle");
    cfg.oracle.tol = get_number(o, "tol", cfg.oracle.tol);
    cfg.oracle.growth = get_number(o, "growth", cfg.oracle.growth);
    cfg.oracle.stall_iterations =
        static_cast<int>(get_integer(o, "stall_iterations", cfg.oracle.stall_iterations));
    const long long threads = get_integer(o, "threads", 1);
    if (!(cfg.oracle.tol > 0.0)) throw ConfigError("oracle: tol must be > 0");
    if (threads < 0 || threads > 1024) throw ConfigError("oracle: threads out of range");
    cfg.oracle_threads = static_cast<unsigned>(threads);
  }

  if (!doc.contains("problem")) throw ConfigError("config: missing 'problem'");
  const auto& prob = doc.at("problem");
  const std::string type = prob.is_object() ? get_string(prob, "type", "") : "";
  if (type == "synthetic") {
    reject_unknown(prob, {"type", "kind", "n", "p", "cones", "drift_scale"}, "problem");
    SyntheticSource src;
    src.spec.kind = get_string(prob, "kind", src.spec.kind);
    src.spec.n = static_cast<int>(get_integer(prob, "n", src.spec.n));
    src.spec.p = static_cast<int>(get_integer(prob, "p", src.spec.p));
    src.spec.cones = static_cast<int>(get_integer(prob, "cones", src.spec.cones));
    src.spec.seed = cfg.seed;
    src.drift_scale = get_number(prob, "drift_scale", 0.0);
    if (src.spec.n < 1 || src.spec.p < 0 || src.spec.p >= src.spec.n)
      throw ConfigError("problem: need 0 <= p < n");
    if (src.spec.cones < 0) throw ConfigError("problem: cones must be >= 0");
    if (src.drift_scale < 0.0) throw ConfigError("problem: drift_scale must be >= 0");
    if (src.spec.kind != "lp" && src.spec.kind != "socp" && src.spec.kind != "mixed")
      throw ConfigError("problem: unknown kind '" + src.spec.kind + "'");
    cfg.synthetic = src;
  } else if (type == "case") {
    reject_unknown(prob, {"type", "path", "load_scale", "redraw_infeasible"}, "problem");
    CaseSource src;
    const std::string path = get_string(prob, "path", "");
    if (path.empty()) throw ConfigError("problem: case needs 'path'");
    src.path = std::filesystem::path(path).is_absolute() ? std::filesystem::path(path)
                                                         : base_dir / path;
    src.rule.scale = get_number(prob, "load_scale", src.rule.scale);
    src.redraw_infeasible = get_bool(prob, "redraw_infeasible", true);
    if (src.rule.scale < 0.0) throw ConfigError("problem: load_scale must be >= 0");
    cfg.network = src;
  } else {
    throw ConfigError("problem: 'type' must be \"synthetic\" or \"case\"");
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

namespace {

SolverOptions solver_options(const ExperimentConfig& cfg, Algorithm algorithm) {
  SolverOptions opts;
  opts.algorithm = algorithm;
  opts.eta0 = cfg.eta0;
  opts.beta = cfg.beta;
  opts.epsilon = cfg.epsilon;
  opts.eta_fixed = cfg.eta_fixed;
  opts.eta_max = cfg.eta_max;
  opts.drift_policy = cfg.drift_policy;
  opts.max_corrections = cfg.max_corrections;
  opts.m_refresh = cfg.m_refresh;
  opts.solver = cfg.solver;
  return opts;
}

}  // namespace

ExperimentProblem prepare(const ExperimentConfig& cfg) {
  ExperimentProblem out;
  if (cfg.synthetic) {
    auto inst = make_synthetic(cfg.synthetic->spec);
    out.problem = inst.problem;
    double scale = cfg.synthetic->drift_scale;
    if (scale == 0.0) {
      // Half the smaller initial drift threshold of the two online solvers, so
      // either one runs under the drift bound on the same stream.
      double m = std::numeric_limits<double>::infinity();
      for (auto algorithm : {Algorithm::OipmTec, Algorithm::EpsOipmTec}) {
        const auto state = initialize(out.problem, inst.b0, solver_options(cfg, algorithm));
        m = std::min(m, state.m_estimate);
      }
      scale = 0.5 * drift_threshold(m);
    }
    out.drift_scale = scale;
    Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    out.stream = drift_stream(inst.b0, cfg.horizon, scale, rng);
    out.optima = batch_optima(out.problem, out.stream, cfg.oracle, cfg.oracle_threads);
    return out;
  }
  if (!cfg.network) throw ConfigError("config: no problem source");

  auto enc = opf::build_encoding(opf::load_case(cfg.network->path.string()));
  out.problem = enc.problem;
  std::optional<OracleResult> last = offline_center(enc.problem, enc.b0, cfg.oracle);
  out.optima.push_back(last->y.x);
  out.drift_scale = cfg.network->rule.scale;
  if (cfg.horizon > 0) {
    // The oracle solve doubles as the feasibility test for a drawn round.
    auto solve = [&](const Vec& b) {
      try {
        last = recenter(enc.problem, b, *last, cfg.oracle);
        out.optima.push_back(last->y.x);
        return true;
      } catch (const InfeasibleStart&) {
        return false;
      } catch (const NonConvergent&) {
        return false;
      }
    };
    const auto stream =
        opf::generate_stream(enc, cfg.seed, cfg.horizon, cfg.network->rule,
                             cfg.network->redraw_infeasible
                                 ? std::function<bool(const Vec&)>(solve)
                                 : std::function<bool(const Vec&)>{});
    out.stream = stream.b;
    out.redraws = stream.redraws;
    if (!cfg.network->redraw_infeasible) {
      std::vector<Vec> rest(stream.b.begin() + 1, stream.b.end());
      for (const auto& b : rest) {
        last = recenter(enc.problem, b, *last, cfg.oracle);
        out.optima.push_back(last->y.x);
      }
    }
  } else {
    out.stream = {enc.b0};
  }
  out.encoding = std::move(enc);
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const ExperimentProblem& inst) {
  const auto& problem = inst.problem;
  const int horizon = static_cast<int>(inst.stream.size()) - 1;
  if (inst.optima.size() != inst.stream.size())
    throw DimensionMismatch("experiment: one optimum per right-hand side expected");

  ExperimentResult result{{}, {}, {},
                          MetricsLedger(problem, cfg.epsilon, inst.stream.front(),
                                        inst.optima.front())};
  auto& summary = result.summary;
  summary.algorithm = to_string(cfg.algorithm);
  summary.horizon = horizon;
  summary.complexity = problem.complexity();
  summary.epsilon = cfg.epsilon;
  summary.redraws = inst.redraws;

  if (cfg.algorithm == ExperimentAlgorithm::PgdBaseline) {
    opf::BaselineOptions opts;
    opts.projection = cfg.oracle;
    const auto decisions =
        horizon > 0 ? opf::projected_gradient_baseline(problem, inst.stream,
                                                       inst.optima.front(), opts)
                    : std::vector<Vec>{};
    for (int t = 1; t <= horizon; ++t) {
      const auto k = static_cast<std::size_t>(t);
      result.ledger.record_round(t, decisions[k - 1], inst.stream[k], inst.optima[k]);
    }
  } else {
    const Algorithm algorithm = cfg.algorithm == ExperimentAlgorithm::OipmTec
                                    ? Algorithm::OipmTec
                                    : Algorithm::EpsOipmTec;
    const auto opts = solver_options(cfg, algorithm);
    // Start from the offline optimum for b_0, re-centered at the solver's η.
    OracleOptions anchor_opts = cfg.oracle;
    anchor_opts.eta_target = 1.0;
    const auto anchor = offline_center(problem, inst.stream.front(), anchor_opts);
    auto state = initialize(problem, inst.stream.front(), opts, anchor.y);
    summary.eta0 = state.eta0;
    summary.beta = state.beta;
    for (int t = 1; t <= horizon; ++t) {
      const auto k = static_cast<std::size_t>(t);
      RoundResult round;
      try {
        round = run_round(problem, state, inst.stream[k], opts);
      } catch (const Error& e) {
        throw Error("round " + std::to_string(t) + ": " + e.what());
      }
      const auto& tr = round.trace;
      result.ledger.record_round(t, round.decision, inst.stream[k], inst.optima[k],
                                 tr.final_decrement, tr.eta);
      summary.drift_violations += tr.drift_violation ? 1 : 0;
      summary.corrections += tr.corrections;
      summary.damped_rounds += tr.damped ? 1 : 0;
      summary.uncertified_rounds += tr.certified ? 0 : 1;
      result.traces.push_back(tr);
    }
    summary.final_eta = state.eta;
    summary.bounds =
        bound_check(result.ledger, algorithm, state.eta0, state.beta, cfg.eta_max);
  }
  result.records = result.ledger.records();
  summary.totals = result.ledger.totals();
  for (const auto& rec : result.records) summary.surrogate_rounds += rec.ineq_surrogate;
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  return run_experiment(config, prepare(config));
}

std::string summary_json(const ExperimentSummary& s) {
  json doc;
  doc["algorithm"] = s.algorithm;
  doc["T"] = s.horizon;
  doc["v_f"] = s.complexity;
  doc["eta0"] = s.eta0;
  doc["beta"] = s.beta;
  doc["epsilon"] = s.epsilon;
  doc["final_eta"] = s.final_eta;
  doc["R_d"] = s.totals.regret;
  doc["R_eps"] = s.totals.eps_regret;
  doc["Vio"] = s.totals.violation;
  doc["V_T"] = s.totals.opt_variation;
  doc["V_b"] = s.totals.b_variation;
  if (s.bounds) {
    doc["bounds"] = {{"dynamic_regret", check_json(s.bounds->regret)},
                     {"eps_regret", check_json(s.bounds->eps_regret)},
                     {"violation", check_json(s.bounds->violation)},
                     {"passed", s.bounds->passed()}};
  } else {
    doc["bounds"] = nullptr;
  }
  doc["rounds"] = {{"drift_violations", s.drift_violations},
                   {"corrections", s.corrections},
                   {"damped", s.damped_rounds},
                   {"uncertified", s.uncertified_rounds},
                   {"surrogate_distance", s.surrogate_rounds},
                   {"stream_redraws", s.redraws}};
  return doc.dump(2);
}

void write_artifacts(const ExperimentResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "series");
  auto open = [](const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write '" + p.string() + "'");
    return out;
  };
  {
    auto out = open(dir / "ledger.csv");
    result.ledger.write_csv(out);
  }
  {
    auto out = open(dir / "series" / "cumulative.csv");
    result.ledger.write_series_csv(out);
  }
  {
    auto out = open(dir / "series" / "trace.csv");
    out << "t,drift,drift_threshold,before_t_step,after_t_step,after_eta_growth,"
           "final_decrement,corrections,eta\n";
    for (const auto& tr : result.traces)
      out << tr.t << ',' << format_double(tr.drift) << ','
          << format_double(tr.drift_threshold) << ','
          << format_double(tr.before_t_step) << ','
          << format_double(tr.after_t_step) << ','
          << format_double(tr.after_eta_growth) << ','
          << format_double(tr.final_decrement) << ',' << tr.corrections << ','
          << format_double(tr.eta) << '\n';
  }
  {
    auto out = open(dir / "summary.json");
    out << summary_json(result.summary) << '\n';
  }
}

}  // namespace oipm
