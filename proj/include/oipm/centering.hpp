#pragma once

#include "oipm/kkt.hpp"

#include <functional>

namespace oipm {

/// Standing certificate used throughout: decrement ≤ 1/9.
inline constexpr double kCertifiedDecrement = 1.0 / 9.0;
/// Decrement below which a unit Newton step is taken.
inline constexpr double kFullStepDecrement = 0.25;

struct CenteringOptions {
  double target_decrement = kCertifiedDecrement;
  int max_iterations = 500;
  /// Relative equality tolerance: ‖Ax − b‖ ≤ tol·(1 + ‖b‖).
  double feasibility_tol = 1e-10;
  KktSolver solver = KktSolver::SymmetricIndefinite;
  /// When > 0, give up on the target once the decrement is below 1 and has
  /// not improved by 10% in this many iterations (round-off floor). The
  /// result is then flagged as stalled instead of throwing. With no progress
  /// for 10x this many iterations, NonConvergent is thrown early.
  int stall_iterations = 0;
};

struct CenteringResult {
  PrimalDualPoint y;
  double decrement = 0.0;
  int iterations = 0;
  bool stalled = false;
};

/// Step length used by every damped Newton loop: 1 when λ ≤ 1/4, else
/// 1/(1 + λ).
double damped_step_length(double decrement);

/// Takes y + α·Δy, halving α until the result is strictly interior.
/// Returns the step length actually used.
double take_interior_step(const ConicProblem& problem, PrimalDualPoint& y,
                          const NewtonStepResult& step, double alpha);

/// Damped Newton on η cᵀx + φ(x) subject to Ax = b from a strictly interior
/// (possibly equality-infeasible) start, until the decrement reaches the target
/// and Ax = b. Throws NonConvergent past the iteration cap.
CenteringResult center(const ConicProblem& problem, PrimalDualPoint y,
                       double eta, const Vec& b,
                       const CenteringOptions& options = {});

/// Safe short-step growth factor 1 + 1/(8√v_f).
double short_step_growth(double complexity);

struct PathOptions {
  double eta_start = 1.0;
  double eta_final = 1.0;
  /// Barrier growth per stage; ≤ 1 selects short_step_growth(v_f).
  double growth = 0.0;
  /// Decrement the iterate is re-centered to after every growth.
  double stage_decrement = kCertifiedDecrement;
  /// Decrement required at eta_final.
  double final_decrement = kCertifiedDecrement;
  int max_newton_iterations = 1000000;
  KktSolver solver = KktSolver::SymmetricIndefinite;
  /// Forwarded to every centering (see CenteringOptions). When > 0, a stage
  /// that cannot be centered ends the run at the last completed stage
  /// (stopped_early and stalled set) instead of throwing.
  int stall_iterations = 0;
};

struct PathResult {
  PrimalDualPoint y;
  double eta = 0.0;
  double decrement = 0.0;
  int newton_iterations = 0;
  bool stopped_early = false;
  /// Some stage ended on the round-off floor instead of its target.
  bool stalled = false;
};

/// Follows the central path from a point centered at eta_start to eta_final.
/// `stop` is consulted after each stage; returning true ends the run early.
PathResult path_follow(
    const ConicProblem& problem, PrimalDualPoint y, const Vec& b,
    const PathOptions& options,
    const std::function<bool(const PrimalDualPoint&, double)>& stop = {});

/// A strictly interior x with Ax = b, found by minimizing an auxiliary slack s
/// with barriers on g_i(x) ≤ s until s < 0. The search is confined to a ball
/// of radius 1e4·(1 + ‖x0‖) around the least-norm solution x0 of Ax = b.
/// Throws InfeasibleStart when no strictly interior point exists there.
Vec phase_one(const ConicProblem& problem, const Vec& b,
              int max_iterations = 5000);

}  // namespace oipm
