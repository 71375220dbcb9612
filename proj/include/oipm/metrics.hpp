#pragma once

#include "oipm/centering.hpp"
#include "oipm/online.hpp"

#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace oipm {

struct OracleOptions {
  /// Stop once the duality-gap proxy v_f/η is at most tol.
  double tol = 1e-8;
  /// Stop at exactly this η instead (overrides tol).
  std::optional<double> eta_target;
  /// Path growth per stage; ≤ 1 selects 1 + 1/(8√v_f).
  double growth = 0.0;
  double final_decrement = kCertifiedDecrement;
  int max_newton_iterations = 1000000;
  KktSolver solver = KktSolver::SymmetricIndefinite;
  /// Centering stops on a round-off floor after this many non-improving
  /// iterations (0 disables and keeps pushing to final_decrement).
  int stall_iterations = 30;
};

struct OracleResult {
  PrimalDualPoint y;
  double eta = 0.0;
  /// v_f / η at the returned point.
  double gap_bound = 0.0;
  int newton_iterations = 0;
  double decrement = 0.0;
  /// The final centering hit the round-off floor above final_decrement.
  bool stalled = false;
  /// The point centered at the start of the path (η = 1); a warm start for
  /// nearby right-hand sides.
  PrimalDualPoint anchor;
};

/// Offline path following on min η cᵀx + φ(x) s.t. Ax = b from a phase-one
/// start. Used as the per-round optimum oracle (x* := x^η).
/// Throws InfeasibleStart for instances without a strict interior.
OracleResult offline_center(const ConicProblem& problem, const Vec& b,
                            const OracleOptions& options = {});

/// offline_center for a nearby b, starting from previous.anchor instead of a
/// phase-one point. Falls back to a cold solve if that start fails.
OracleResult recenter(const ConicProblem& problem, const Vec& b,
                      const OracleResult& previous,
                      const OracleOptions& options = {});

/// x* for a sequence of right-hand sides, each warm-started from the last.
std::vector<Vec> sequential_optima(const ConicProblem& problem,
                                   const std::vector<Vec>& rhs,
                                   const OracleOptions& options = {});

/// x* for every right-hand side; solves run concurrently on up to `threads`
/// workers (0 picks the hardware concurrency). Results are in input order.
std::vector<Vec> batch_optima(const ConicProblem& problem,
                              const std::vector<Vec>& rhs,
                              const OracleOptions& options = {},
                              unsigned threads = 0);

struct ConeDistance {
  double distance = 0.0;
  /// True when max(0, g(x)) stands in for the exact set distance.
  bool surrogate = false;
};

/// Distance from x to {x : g(x) ⪯ 0}. Exact for affine rows and for cones whose
/// stacked map [U; wᵀ] has orthonormal rows; a flagged surrogate otherwise.
ConeDistance cone_distance(const BarrierTerm& term, const Vec& x);

struct RoundRecord {
  int t = 0;
  double obj = 0.0;
  double obj_opt = 0.0;
  double regret_inc = 0.0;
  double eps_regret_inc = 0.0;
  double eq_viol = 0.0;
  double ineq_viol = 0.0;
  bool ineq_surrogate = false;
  double decrement = 0.0;
  double eta = 0.0;
  /// ‖b_t − b_{t−1}‖.
  double b_variation = 0.0;
  /// ‖x*_{t−1} − x*_t‖ (0 when x*_{t−1} is unknown).
  double opt_variation = 0.0;
};

struct LedgerTotals {
  double regret = 0.0;      // R_d
  double eps_regret = 0.0;  // R_ε
  double violation = 0.0;   // Vio
  double opt_variation = 0.0;  // V_T
  double b_variation = 0.0;    // V_b
};

/// Per-round regret, violation and variation accounting.
class MetricsLedger {
 public:
  using Oracle = std::function<Vec(int t, const Vec& b)>;

  /// `x_opt0` is x*_0, the optimum for b_0; V_T starts from it when given.
  MetricsLedger(ConicProblem problem, double epsilon, Vec b0,
                std::optional<Vec> x_opt0 = std::nullopt);

  /// Used by record_round when no optimum is supplied.
  void set_lazy_oracle(Oracle oracle) { oracle_ = std::move(oracle); }

  /// Scores decision x_t against b_t. Throws MissingOracle if x_opt is empty
  /// and no lazy oracle is set.
  void record_round(int t, const Vec& x_t, const Vec& b_t,
                    std::optional<Vec> x_opt = std::nullopt,
                    double decrement = 0.0, double eta = 0.0);

  const std::vector<RoundRecord>& records() const { return records_; }
  const LedgerTotals& totals() const { return totals_; }
  /// Totals rebuilt from the per-round records alone.
  static LedgerTotals sum_records(const std::vector<RoundRecord>& records);
  double epsilon() const { return epsilon_; }
  const ConicProblem& problem() const { return problem_; }

  /// Columns: t, obj, obj_opt, regret_inc, eps_regret_inc, eq_viol,
  /// ineq_viol, decrement, eta (17 significant digits).
  void write_csv(std::ostream& out) const;
  /// Cumulative curves: t, R_d, R_eps, Vio, V_T, V_b.
  void write_series_csv(std::ostream& out) const;

 private:
  ConicProblem problem_;
  double epsilon_;
  Vec b_prev_;
  std::optional<Vec> x_opt_prev_;
  Oracle oracle_;
  std::vector<RoundRecord> records_;
  LedgerTotals totals_;
};

struct BoundCheck {
  std::string name;
  bool applicable = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs − lhs
  bool passed = true;
};

struct BoundReport {
  BoundCheck regret;      // R_d ≤ 11 v_f β / (5 η₀ (β−1)) + ‖c‖ V_T
  BoundCheck eps_regret;  // R_ε ≤ ‖c‖ V_T
  BoundCheck violation;   // Vio ≤ V_b
  bool passed() const {
    return regret.passed && eps_regret.passed && violation.passed;
  }
};

/// Evaluates the regret and violation bounds that apply to `algorithm`. With a
/// finite eta_max the regret bound gains 11 v_f/(5 eta_max) per capped round.
BoundReport bound_check(const MetricsLedger& ledger, Algorithm algorithm,
                        double eta0, double beta,
                        double eta_max = std::numeric_limits<double>::infinity());

/// Formats a double with 17 significant digits.
std::string format_double(double value);

}  // namespace oipm
