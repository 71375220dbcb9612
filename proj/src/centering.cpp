#include "oipm/centering.hpp"

#include "oipm/errors.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace oipm {

double damped_step_length(double decrement) {
  return decrement <= kFullStepDecrement ? 1.0 : 1.0 / (1.0 + decrement);
}

double take_interior_step(const ConicProblem& problem, PrimalDualPoint& y,
                          const NewtonStepResult& step, double alpha) {
  for (int halvings = 0; halvings < 60; ++halvings) {
    PrimalDualPoint trial = apply_step(y, step, alpha);
    if (problem.barrier().is_interior(trial.x)) {
      y = std::move(trial);
      return alpha;
    }
    alpha *= 0.5;
  }
  throw DomainViolation(-1, "no interior point along the Newton direction");
}

CenteringResult center(const ConicProblem& problem, PrimalDualPoint y,
                       double eta, const Vec& b,
                       const CenteringOptions& options) {
  if (!problem.barrier().is_interior(y.x))
    throw DomainViolation(problem.barrier().first_violated(y.x).value_or(-1),
                          "centering must start from a strictly interior point");
  if (y.nu.size() != problem.p()) y.nu = Vec::Zero(problem.p());
  StepOptions step_options;
  step_options.solver = options.solver;
  const double feas_tol = options.feasibility_tol * (1.0 + b.norm());
  CenteringResult result;
  double best = std::numeric_limits<double>::infinity();
  int since_best = 0;
  // Idle rounds: no drop in decrement, merit η cᵀx + φ(x) or equality residual.
  // Damped steps keep the decrement flat while the merit falls, so the
  // decrement alone cannot tell slow progress from none.
  double best_merit = std::numeric_limits<double>::infinity();
  double best_residual = std::numeric_limits<double>::infinity();
  int idle = 0;
  for (int it = 0;; ++it) {
    const auto step = newton_step(problem, y, eta, b, step_options);
    result.decrement = step.decrement;
    const bool feasible = step.equality_residual_norm <= feas_tol;
    if (step.decrement <= options.target_decrement && feasible) {
      result.y = std::move(y);
      result.iterations = it;
      return result;
    }
    if (step.decrement < 0.9 * best) {
      best = step.decrement;
      since_best = 0;
    } else if (options.stall_iterations > 0 && ++since_best >= options.stall_iterations &&
               best < 1.0 && feasible) {
      spdlog::debug("centering stalled at decrement {} (target {}) for eta = {}",
                    step.decrement, options.target_decrement, eta);
      result.y = std::move(y);
      result.iterations = it;
      result.stalled = true;
      return result;
    }
    const double merit = eta * problem.objective(y.x) + problem.barrier().value(y.x);
    bool moved = since_best == 0;
    if (merit < best_merit - 1e-3) moved = true;
    if (step.equality_residual_norm < 0.9 * best_residual) moved = true;
    best_merit = std::min(best_merit, merit);
    best_residual = std::min(best_residual, step.equality_residual_norm);
    idle = moved ? 0 : idle + 1;
    // No progress at all for much longer: the barrier is past what double
    // precision can resolve.
    if (options.stall_iterations > 0 && idle >= 10 * options.stall_iterations)
      throw NonConvergent("centering made no progress in " + std::to_string(idle) +
                          " iterations (decrement " + std::to_string(step.decrement) + ")");
    if (it >= options.max_iterations)
      throw NonConvergent("centering did not reach decrement " +
                          std::to_string(options.target_decrement) + " in " +
                          std::to_string(options.max_iterations) +
                          " iterations (last " +
                          std::to_string(step.decrement) + ")");
    take_interior_step(problem, y, step, damped_step_length(step.decrement));
  }
}

double short_step_growth(double complexity) {
  return 1.0 + 1.0 / (8.0 * std::sqrt(std::max(complexity, 1.0)));
}

PathResult path_follow(
    const ConicProblem& problem, PrimalDualPoint y, const Vec& b,
    const PathOptions& options,
    const std::function<bool(const PrimalDualPoint&, double)>& stop) {
  const double growth = options.growth > 1.0
                            ? options.growth
                            : short_step_growth(problem.complexity());
  PathResult result;
  double eta = options.eta_start;
  CenteringOptions stage;
  stage.solver = options.solver;
  stage.target_decrement = options.stage_decrement;
  stage.stall_iterations = options.stall_iterations;
  auto remaining = [&] {
    return options.max_newton_iterations - result.newton_iterations;
  };
  // With stall handling on, a stage that cannot be centered ends the path at
  // the last completed stage instead of failing.
  auto give_up = [&](const NonConvergent& e, double reached) {
    if (options.stall_iterations <= 0) return false;
    spdlog::debug("path following stopped at eta = {}: {}", reached, e.what());
    result.stopped_early = true;
    result.stalled = true;
    return true;
  };
  while (eta < options.eta_final) {
    const double previous = eta;
    eta = std::min(eta * growth, options.eta_final);
    stage.max_iterations = remaining();
    CenteringResult centered;
    try {
      centered = center(problem, y, eta, b, stage);
    } catch (const NonConvergent& e) {
      if (!give_up(e, previous)) throw;
      eta = previous;
      break;
    }
    y = std::move(centered.y);
    result.newton_iterations += centered.iterations;
    result.decrement = centered.decrement;
    result.stalled = result.stalled || centered.stalled;
    if (stop && stop(y, eta)) {
      result.stopped_early = true;
      break;
    }
  }
  if (!result.stopped_early) {
    stage.target_decrement = options.final_decrement;
    stage.max_iterations = std::max(remaining(), 50);
    try {
      auto centered = center(problem, y, eta, b, stage);
      y = std::move(centered.y);
      result.newton_iterations += centered.iterations;
      result.decrement = centered.decrement;
      result.stalled = result.stalled || centered.stalled;
    } catch (const NonConvergent& e) {
      if (!give_up(e, eta)) throw;
    }
  }
  result.y = std::move(y);
  result.eta = eta;
  return result;
}

Vec phase_one(const ConicProblem& problem, const Vec& b, int max_iterations) {
  const Index n = problem.n();
  const Index p = problem.p();
  if (b.size() != p) throw DimensionMismatch("phase one: b has wrong size");

  Vec x0 = Vec::Zero(n);
  if (p > 0) {
    const Mat& A = problem.A();
    x0 = A.transpose() * (A * A.transpose()).llt().solve(b);
  }
  if (problem.barrier().is_interior(x0)) return x0;

  // Lifted problem over z = [x; s]: min s  s.t. g_i(x) ≤ s, s > −1, Ax = b.
  std::vector<BarrierTerm> lifted;
  double worst = -1.0;
  for (const auto& term : problem.barrier().terms()) {
    lifted.push_back(term.with_slack());
    worst = std::max(worst, term.constraint_value(x0));
  }
  Vec floor_row = Vec::Zero(n + 1);
  floor_row(n) = -1.0;
  lifted.push_back(BarrierTerm::affine(floor_row, 1.0));
  // A wide ball around x0 keeps the lifted problem bounded when the feasible
  // set is not (epigraph variables, free directions).
  const double radius = 1e4 * (1.0 + x0.norm());
  Mat ball_Q = Mat::Identity(n + 1, n + 1);
  ball_Q(n, n) = 0.0;
  Vec ball_q = Vec::Zero(n + 1);
  ball_q.head(n) = -x0;
  lifted.push_back(BarrierTerm::quadratic(
      ball_Q, ball_q, 0.5 * x0.squaredNorm() - 0.5 * radius * radius));
  Mat A1 = Mat::Zero(p, n + 1);
  if (p > 0) A1.leftCols(n) = problem.A();
  Vec c1 = Vec::Zero(n + 1);
  c1(n) = 1.0;
  const ConicProblem aux(c1, A1, BarrierAggregate(n + 1, std::move(lifted)));

  PrimalDualPoint z{Vec(n + 1), Vec::Zero(p)};
  z.x << x0, worst + 1.0;

  const double vf = aux.complexity();
  CenteringOptions first;
  first.max_iterations = max_iterations;
  first.target_decrement = kFullStepDecrement;
  auto centered = center(aux, z, 1.0, b, first);

  bool infeasible = false;
  auto found = [&](const PrimalDualPoint& pt, double eta) {
    const double s = pt.x(n);
    if (s < 0.0 && problem.barrier().is_interior(pt.x.head(n))) return true;
    // Near-centered points are within 2·v_f/η of the optimal slack.
    if (s - 2.0 * vf / eta > 0.0 || vf / eta < 1e-12) {
      infeasible = true;
      return true;
    }
    return false;
  };
  if (found(centered.y, 1.0) && !infeasible) return centered.y.x.head(n);
  if (infeasible)
    throw InfeasibleStart("phase one: no strictly interior feasible point");

  PathOptions path;
  path.eta_start = 1.0;
  path.eta_final = 1e14;
  path.growth = 4.0;
  path.stage_decrement = kFullStepDecrement;
  path.final_decrement = kFullStepDecrement;
  path.max_newton_iterations = max_iterations;
  PathResult run;
  try {
    run = path_follow(aux, centered.y, b, path, found);
  } catch (const NonConvergent& e) {
    throw InfeasibleStart(std::string("phase one did not converge: ") +
                          e.what());
  }
  if (infeasible || !run.stopped_early)
    throw InfeasibleStart("phase one: no strictly interior feasible point");
  spdlog::debug("phase one: interior point after {} Newton iterations",
                run.newton_iterations + centered.iterations);
  return run.y.x.head(n);
}

}  // namespace oipm
