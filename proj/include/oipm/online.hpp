#pragma once

#include "oipm/centering.hpp"

#include <limits>
#include <optional>
#include <string>

namespace oipm {

enum class Algorithm { OipmTec, EpsOipmTec };

const char* to_string(Algorithm algorithm);

/// What a round does when ‖b_t − b_{t−1}‖ exceeds √(3m/160).
enum class DriftPolicy {
  /// Log a warning and run the round unchanged.
  WarnAndProceed,
  /// Run up to `max_corrections` extra damped Newton steps so the round still
  /// ends with decrement ≤ 1/9.
  Correct,
  /// Throw DriftTooLarge.
  Fail,
};

enum class MRefresh {
  /// Re-estimate m from the t-step factorization every round.
  EveryRound,
  /// Keep the estimate taken at the initial centered point.
  Initial,
};

struct SolverOptions {
  Algorithm algorithm = Algorithm::OipmTec;
  double eta0 = 1.0;
  /// Growth factor for OIPM-TEC; ≤ 1 selects min(1.02, 1 + 1/(8√v_f)).
  double beta = 0.0;
  /// Tolerance ε for εOIPM-TEC; its η is max(eta_fixed, 11 v_f / (5ε)).
  double epsilon = 0.015;
  double eta_fixed = 0.0;
  /// Ceiling on the OIPM-TEC schedule η₀βᵗ. Past roughly 1e9 the barrier
  /// Hessian is too ill-conditioned for double precision on typical cases.
  double eta_max = std::numeric_limits<double>::infinity();
  DriftPolicy drift_policy = DriftPolicy::Correct;
  int max_corrections = 5;
  MRefresh m_refresh = MRefresh::EveryRound;
  KktSolver solver = KktSolver::SymmetricIndefinite;
  /// Growth used by the offline initialization when climbing to a large η.
  double init_growth = 2.0;
  int init_max_iterations = 500;
};

/// β default: min(1.02, 1 + 1/(8√v_f)); warns when an explicit β exceeds the cap.
double resolve_beta(double requested, double complexity);

/// η for εOIPM-TEC: max(requested, ⌈11 v_f / (5ε)⌉).
double resolve_eps_eta(double requested, double epsilon, double complexity);

struct SolverState {
  PrimalDualPoint y;
  double eta = 0.0;
  double eta0 = 0.0;
  double beta = 1.0;
  double eta_max = std::numeric_limits<double>::infinity();
  int round = 0;
  double last_decrement = 0.0;
  /// Right-hand side the current point is centered for.
  Vec b_prev;
  /// Smallest singular value of D used for the drift threshold.
  double m_estimate = 0.0;
  Algorithm algorithm = Algorithm::OipmTec;
  int init_iterations = 0;
};

/// Offline start: phase-one interior point (unless a warm start is given),
/// then damped Newton centering to decrement ≤ 1/9 at η₀ (or at the ε-mode η,
/// reached by path following). Throws InfeasibleStart or NonConvergent.
SolverState initialize(const ConicProblem& problem, const Vec& b0,
                       const SolverOptions& options,
                       const std::optional<PrimalDualPoint>& warm_start = {});

/// Decrements observed inside one round.
struct RoundTrace {
  int t = 0;
  double drift = 0.0;
  double drift_threshold = 0.0;
  bool drift_violation = false;
  /// Decrement at (y_{t−1}, η_{t−1}, b_t) before the t-step.
  double before_t_step = 0.0;
  /// After the t-step.
  double after_t_step = 0.0;
  /// At the t-step output with the grown η (OIPM-TEC only).
  double after_eta_growth = 0.0;
  /// Decrement certified at the end of the round.
  double final_decrement = 0.0;
  int corrections = 0;
  bool damped = false;
  bool certified = false;
  double eta = 0.0;
};

struct RoundResult {
  /// The decision implemented in this round (computed before b_t was seen).
  Vec decision;
  RoundTrace trace;
};

/// One OIPM-TEC round: implement x_t, observe b_t, t-step, η ← η₀β^t, η-step.
RoundResult oipm_tec_round(const ConicProblem& problem, SolverState& state,
                           const Vec& b_t, const SolverOptions& options);

/// One εOIPM-TEC round: implement x_t, observe b_t, single t-step at fixed η.
RoundResult epsilon_oipm_tec_round(const ConicProblem& problem,
                                   SolverState& state, const Vec& b_t,
                                   const SolverOptions& options);

/// Dispatches on state.algorithm.
RoundResult run_round(const ConicProblem& problem, SolverState& state,
                      const Vec& b_t, const SolverOptions& options);

/// Decrement at (y, η, b_t) for the current state. Never throws on a large
/// value; only DomainViolation when y left the domain.
double certify(const ConicProblem& problem, const SolverState& state,
               const Vec& b_t);

}  // namespace oipm
