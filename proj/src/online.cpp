#include "oipm/online.hpp"

#include "oipm/errors.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <string>

namespace oipm {

const char* to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::OipmTec:
      return "oipm_tec";
    case Algorithm::EpsOipmTec:
      return "eps_oipm_tec";
  }
  return "unknown";
}

double resolve_beta(double requested, double complexity) {
  const double cap = short_step_growth(complexity);
  if (requested <= 1.0) return std::min(1.02, cap);
  if (requested > cap)
    spdlog::warn("beta = {} exceeds the safe growth cap 1 + 1/(8 sqrt(v_f)) = {} "
                 "for v_f = {}; the 1/9 certificate is no longer guaranteed",
                 requested, cap, complexity);
  return requested;
}

double resolve_eps_eta(double requested, double epsilon, double complexity) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  const double required = std::ceil(11.0 * complexity / (5.0 * epsilon));
  if (requested > 0.0 && requested < required)
    spdlog::warn("eta = {} is below 11 v_f/(5 eps) = {} for v_f = {}; using the "
                 "latter",
                 requested, required, complexity);
  return std::max(requested, required);
}

SolverState initialize(const ConicProblem& problem, const Vec& b0,
                       const SolverOptions& options,
                       const std::optional<PrimalDualPoint>& warm_start) {
  if (b0.size() != problem.p()) throw DimensionMismatch("initialize: b0 has wrong size");
  if (!(options.eta0 > 0.0)) throw InvalidArgument("eta0 must be positive");
  const double vf = problem.complexity();

  SolverState state;
  state.algorithm = options.algorithm;
  state.b_prev = b0;
  if (options.algorithm == Algorithm::OipmTec) {
    state.beta = resolve_beta(options.beta, vf);
    if (!(state.beta > 1.0)) throw InvalidArgument("beta must exceed 1");
    state.eta0 = options.eta0;
    if (!(options.eta_max >= options.eta0))
      throw InvalidArgument("eta_max must be at least eta0");
    state.eta_max = options.eta_max;
  } else {
    state.beta = 1.0;
    state.eta0 = resolve_eps_eta(options.eta_fixed, options.epsilon, vf);
  }
  state.eta = state.eta0;

  CenteringOptions centering;
  centering.solver = options.solver;
  centering.max_iterations = options.init_max_iterations;

  PrimalDualPoint y;
  if (warm_start && warm_start->x.size() == problem.n() &&
      problem.barrier().is_interior(warm_start->x)) {
    y = *warm_start;
  } else {
    y = {phase_one(problem, b0), Vec::Zero(problem.p())};
  }
  const double eta_start = std::min(state.eta, 1.0);
  auto first = center(problem, std::move(y), eta_start, b0, centering);
  state.init_iterations = first.iterations;
  if (eta_start < state.eta) {
    PathOptions path;
    path.eta_start = eta_start;
    path.eta_final = state.eta;
    path.growth = options.init_growth;
    path.stage_decrement = kFullStepDecrement;
    path.final_decrement = kCertifiedDecrement;
    path.max_newton_iterations =
        options.init_max_iterations - state.init_iterations;
    path.solver = options.solver;
    auto run = path_follow(problem, std::move(first.y), b0, path);
    state.y = std::move(run.y);
    state.init_iterations += run.newton_iterations;
  } else {
    state.y = std::move(first.y);
  }
  StepOptions step_options;
  step_options.solver = options.solver;
  step_options.estimate_min_singular_value = true;
  const auto probe = newton_step(problem, state.y, state.eta, b0, step_options);
  state.last_decrement = probe.decrement;
  state.m_estimate = *probe.min_singular_value;
  spdlog::info("initialized {} at eta = {} after {} Newton iterations "
               "(decrement {}, m = {})",
               to_string(state.algorithm), state.eta, state.init_iterations,
               state.last_decrement, state.m_estimate);
  return state;
}

namespace {

double feasibility_tolerance(const Vec& b) { return 1e-10 * (1.0 + b.norm()); }

/// Applies `step` (unit when λ < 1, else 1/(1+λ)); returns true if damped.
bool advance(const ConicProblem& problem, PrimalDualPoint& y,
             const NewtonStepResult& step) {
  const double alpha = step.decrement < 1.0 ? 1.0 : 1.0 / (1.0 + step.decrement);
  const double used = take_interior_step(problem, y, step, alpha);
  return used < 1.0;
}

/// Runs the t-step for `b_t` and fills the drift part of the trace.
void t_step(const ConicProblem& problem, SolverState& state, const Vec& b_t,
            const SolverOptions& options, RoundTrace& trace) {
  StepOptions step_options;
  step_options.solver = options.solver;
  step_options.estimate_min_singular_value =
      options.m_refresh == MRefresh::EveryRound && problem.p() > 0;
  auto step = newton_step(problem, state.y, state.eta, b_t, step_options);
  if (step.min_singular_value) state.m_estimate = *step.min_singular_value;

  trace.drift = problem.p() > 0 ? (b_t - state.b_prev).norm() : 0.0;
  trace.drift_threshold = drift_threshold(state.m_estimate);
  trace.drift_violation = trace.drift > trace.drift_threshold;
  trace.before_t_step = step.decrement;
  if (trace.drift_violation) {
    if (options.drift_policy == DriftPolicy::Fail)
      throw DriftTooLarge("round " + std::to_string(trace.t) + ": drift " +
                          std::to_string(trace.drift) + " exceeds threshold " +
                          std::to_string(trace.drift_threshold));
    spdlog::warn("round {}: drift {} exceeds threshold {} (decrement {})",
                 trace.t, trace.drift, trace.drift_threshold, step.decrement);
    if (options.drift_policy == DriftPolicy::Correct) {
      step_options.estimate_min_singular_value = false;
      while (step.decrement > kFullStepDecrement &&
             trace.corrections < options.max_corrections) {
        take_interior_step(problem, state.y, step,
                           damped_step_length(step.decrement));
        ++trace.corrections;
        trace.damped = true;
        step = newton_step(problem, state.y, state.eta, b_t, step_options);
      }
    }
  }
  trace.damped = advance(problem, state.y, step) || trace.damped;
}

/// Extra damped Newton steps at (η, b_t) until the 1/9 certificate and
/// Ax = b_t both hold, bounded by the remaining correction budget.
void finish_round(const ConicProblem& problem, SolverState& state,
                  const Vec& b_t, const SolverOptions& options,
                  RoundTrace& trace) {
  StepOptions step_options;
  step_options.solver = options.solver;
  auto step = newton_step(problem, state.y, state.eta, b_t, step_options);
  const double feas = feasibility_tolerance(b_t);
  auto done = [&] {
    return step.decrement <= kCertifiedDecrement &&
           step.equality_residual_norm <= feas;
  };
  if (options.drift_policy == DriftPolicy::Correct) {
    while (!done() && trace.corrections < options.max_corrections) {
      take_interior_step(problem, state.y, step,
                         damped_step_length(step.decrement));
      ++trace.corrections;
      step = newton_step(problem, state.y, state.eta, b_t, step_options);
    }
  }
  trace.final_decrement = step.decrement;
  trace.certified = done();
  if (!trace.certified)
    spdlog::warn("round {}: certificate lost (decrement {}, ‖Ax-b‖ {})",
                 trace.t, step.decrement, step.equality_residual_norm);
  state.last_decrement = step.decrement;
  state.b_prev = b_t;
  trace.eta = state.eta;
}

}  // namespace

RoundResult oipm_tec_round(const ConicProblem& problem, SolverState& state,
                           const Vec& b_t, const SolverOptions& options) {
  if (b_t.size() != problem.p()) throw DimensionMismatch("round: b_t has wrong size");
  RoundResult out;
  out.decision = state.y.x;
  out.trace.t = state.round + 1;

  t_step(problem, state, b_t, options, out.trace);
  StepOptions step_options;
  step_options.solver = options.solver;
  out.trace.after_t_step =
      newton_step(problem, state.y, state.eta, b_t, step_options).decrement;

  ++state.round;
  state.eta =
      std::min(state.eta0 * std::pow(state.beta, state.round), state.eta_max);
  const auto growth_step = eta_step(problem, state.y, state.eta, step_options);
  out.trace.after_eta_growth = growth_step.decrement;
  out.trace.damped = advance(problem, state.y, growth_step) || out.trace.damped;

  finish_round(problem, state, b_t, options, out.trace);
  return out;
}

RoundResult epsilon_oipm_tec_round(const ConicProblem& problem,
                                   SolverState& state, const Vec& b_t,
                                   const SolverOptions& options) {
  if (b_t.size() != problem.p()) throw DimensionMismatch("round: b_t has wrong size");
  RoundResult out;
  out.decision = state.y.x;
  out.trace.t = state.round + 1;
  t_step(problem, state, b_t, options, out.trace);
  ++state.round;
  finish_round(problem, state, b_t, options, out.trace);
  out.trace.after_t_step = out.trace.final_decrement;
  return out;
}

RoundResult run_round(const ConicProblem& problem, SolverState& state,
                      const Vec& b_t, const SolverOptions& options) {
  return state.algorithm == Algorithm::OipmTec
             ? oipm_tec_round(problem, state, b_t, options)
             : epsilon_oipm_tec_round(problem, state, b_t, options);
}

double certify(const ConicProblem& problem, const SolverState& state,
               const Vec& b_t) {
  return newton_decrement(problem, state.y, state.eta, b_t);
}

}  // namespace oipm
