#pragma once

#include "oipm/problem.hpp"

#include <optional>
#include <vector>

namespace oipm {

/// y = [x; ν].
struct PrimalDualPoint {
  Vec x;
  Vec nu;

  Vec stacked() const;
  static PrimalDualPoint from_stacked(const Vec& y, Index n);
};

enum class KktSolver {
  /// Bunch–Kaufman factorization of the assembled saddle matrix.
  SymmetricIndefinite,
  /// Cholesky of ∇²φ followed by the Schur complement A∇²φ⁻¹Aᵀ.
  BlockElimination,
};

/// Factorized D = [[H, Aᵀ], [A, 0]].
class KktFactorization {
 public:
  /// Throws SingularKkt when the factorization breaks down.
  KktFactorization(const Mat& hessian, const Mat& A,
                   KktSolver solver = KktSolver::SymmetricIndefinite);

  Index n() const { return n_; }
  Index p() const { return p_; }
  const Mat& matrix() const { return D_; }

  /// Solves D z = rhs with one step of iterative refinement.
  Vec solve(const Vec& rhs) const;

  /// Smallest singular value of D by inverse power iteration.
  double min_singular_value(int max_iterations = 20, double tol = 1e-6) const;

 private:
  Vec solve_once(const Vec& rhs) const;

  Index n_;
  Index p_;
  KktSolver solver_;
  Mat D_;
  // Symmetric indefinite path: equilibrated copy, factor and pivots.
  Vec scale_;
  Mat factor_;
  std::vector<int> pivots_;
  // Block elimination path.
  Eigen::LLT<Mat> hess_llt_;
  Eigen::LLT<Mat> schur_llt_;
  Mat A_;
};

struct NewtonStepResult {
  /// Δy solving D(y) Δy = −r.
  Vec delta_y;
  /// Newton decrement ‖Δx‖_{∇²φ(x)}. On equality-feasible points this equals
  /// √(rᵀD⁻¹r) = ‖Δy‖_D.
  double decrement = 0.0;
  /// −rᵀΔy = rᵀD⁻¹r; can be negative when Ax ≠ b because D is indefinite.
  double kkt_quadratic = 0.0;
  /// ‖Ax − b‖ at the point the step was computed from.
  double equality_residual_norm = 0.0;
  /// ‖D Δy + r‖, the linear-solve residual.
  double solve_residual_norm = 0.0;
  /// Norm of the residual r.
  double residual_norm = 0.0;
  /// Smallest singular value of D(y), when requested.
  std::optional<double> min_singular_value;

  Vec dx(Index n) const { return delta_y.head(n); }
  Vec dnu(Index n) const { return delta_y.tail(delta_y.size() - n); }
};

struct StepOptions {
  KktSolver solver = KktSolver::SymmetricIndefinite;
  bool estimate_min_singular_value = false;
  int power_iterations = 20;
  double power_tol = 1e-6;
};

/// r_t(y, η) = [ηc + ∇φ(x) + Aᵀν; Ax − b].
Vec residual(const ConicProblem& problem, const PrimalDualPoint& y, double eta,
             const Vec& b);

/// Infeasible Newton step on the barrier Lagrangian.
NewtonStepResult newton_step(const ConicProblem& problem,
                             const PrimalDualPoint& y, double eta, const Vec& b,
                             const StepOptions& options = {});

/// Newton step for a new barrier parameter with a zero equality block; keeps
/// Ax unchanged.
NewtonStepResult eta_step(const ConicProblem& problem, const PrimalDualPoint& y,
                          double eta_plus, const StepOptions& options = {});

/// y + α·Δy.
PrimalDualPoint apply_step(const PrimalDualPoint& y,
                           const NewtonStepResult& step, double alpha = 1.0);

/// Decrement at (y, η, b) without keeping the step.
double newton_decrement(const ConicProblem& problem, const PrimalDualPoint& y,
                        double eta, const Vec& b,
                        KktSolver solver = KktSolver::SymmetricIndefinite);

struct DecrementReductionReport {
  double lambda = 0.0;       // decrement before the unit step
  double lambda_plus = 0.0;  // decrement after the unit step
  double bound = 0.0;        // λ² / (1 − λ)²
  bool hypothesis_holds = false;  // λ ≤ 1
  bool passed = false;
};

/// Takes one unit Newton step and compares the new decrement with the
/// quadratic-convergence bound λ²/(1−λ)².
DecrementReductionReport decrement_reduction_check(
    const ConicProblem& problem, const PrimalDualPoint& y, double eta,
    const Vec& b, double slack = 1e-8);

/// ‖h(y)‖_D with h(y) = D⁻¹[∇φ(x) + Aᵀν; 0]; bounded by √v_f.
double dual_witness(const ConicProblem& problem, const PrimalDualPoint& y);

/// Smallest singular value of D at x (inverse power iteration).
double estimate_min_singular_value(const ConicProblem& problem, const Vec& x,
                                   int max_iterations = 20, double tol = 1e-6);

/// Largest right-hand-side change that keeps a 1/9-certified point within
/// decrement 1/4: √(3m/160).
double drift_threshold(double m);

/// ‖v‖_M = √(vᵀMv) for a positive semidefinite M.
double local_norm(const Mat& M, const Vec& v);

}  // namespace oipm
