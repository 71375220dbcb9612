#include "oipm/kkt.hpp"

#include "oipm/errors.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace oipm {

Vec PrimalDualPoint::stacked() const {
  Vec y(x.size() + nu.size());
  y << x, nu;
  return y;
}

PrimalDualPoint PrimalDualPoint::from_stacked(const Vec& y, Index n) {
  return {y.head(n), y.tail(y.size() - n)};
}

KktFactorization::KktFactorization(const Mat& hessian, const Mat& A,
                                   KktSolver solver)
    : n_(hessian.rows()), p_(A.rows()), solver_(solver) {
  if (hessian.cols() != n_ || (p_ > 0 && A.cols() != n_))
    throw DimensionMismatch("KKT: Hessian/A dimensions are inconsistent");
  const Index m = n_ + p_;
  D_ = Mat::Zero(m, m);
  D_.topLeftCorner(n_, n_) = hessian;
  if (p_ > 0) {
    D_.topRightCorner(n_, p_) = A.transpose();
    D_.bottomLeftCorner(p_, n_) = A;
  }
  if (!D_.allFinite())
    throw SingularKkt("KKT matrix has non-finite entries",
                      std::numeric_limits<double>::infinity());

  if (solver_ == KktSolver::BlockElimination) {
    hess_llt_.compute(hessian);
    if (hess_llt_.info() != Eigen::Success)
      throw SingularKkt("block elimination: barrier Hessian is not positive "
                        "definite",
                        std::numeric_limits<double>::infinity());
    if (p_ > 0) {
      A_ = A;
      const Mat HinvAt = hess_llt_.solve(A.transpose());
      schur_llt_.compute(A * HinvAt);
      if (schur_llt_.info() != Eigen::Success)
        throw SingularKkt("block elimination: Schur complement is singular",
                          std::numeric_limits<double>::infinity());
    }
    return;
  }

  // Symmetric equilibration: scale_i = 1/√(max_j |D_ij|).
  scale_.resize(m);
  for (Index i = 0; i < m; ++i) {
    const double rowmax = D_.row(i).cwiseAbs().maxCoeff();
    if (!(rowmax > 0.0))
      throw SingularKkt("KKT matrix has an all-zero row",
                        std::numeric_limits<double>::infinity());
    scale_(i) = 1.0 / std::sqrt(rowmax);
  }
  factor_ = scale_.asDiagonal() * D_ * scale_.asDiagonal();
  const double anorm = factor_.cwiseAbs().colwise().sum().maxCoeff();
  pivots_.assign(static_cast<std::size_t>(m), 0);
  const lapack_int info =
      LAPACKE_dsytrf(LAPACK_COL_MAJOR, 'L', static_cast<lapack_int>(m),
                     factor_.data(), static_cast<lapack_int>(m),
                     pivots_.data());
  if (info != 0) {
    throw SingularKkt("KKT factorization failed (dsytrf info " +
                          std::to_string(info) + ")",
                      std::numeric_limits<double>::infinity());
  }
  double rcond = 0.0;
  LAPACKE_dsycon(LAPACK_COL_MAJOR, 'L', static_cast<lapack_int>(m),
                 factor_.data(), static_cast<lapack_int>(m), pivots_.data(),
                 anorm, &rcond);
  if (!(rcond > std::numeric_limits<double>::min()))
    throw SingularKkt("KKT matrix is numerically singular",
                      rcond > 0.0 ? 1.0 / rcond
                                  : std::numeric_limits<double>::infinity());
}

Vec KktFactorization::solve_once(const Vec& rhs) const {
  if (solver_ == KktSolver::BlockElimination) {
    const Vec r1 = rhs.head(n_);
    if (p_ == 0) return hess_llt_.solve(r1);
    const Vec r2 = rhs.tail(p_);
    const Vec dnu = schur_llt_.solve(A_ * hess_llt_.solve(r1) - r2);
    Vec out(n_ + p_);
    out << hess_llt_.solve(r1 - A_.transpose() * dnu), dnu;
    return out;
  }
  Vec z = scale_.cwiseProduct(rhs);
  const lapack_int m = static_cast<lapack_int>(n_ + p_);
  LAPACKE_dsytrs(LAPACK_COL_MAJOR, 'L', m, 1, factor_.data(), m,
                 pivots_.data(), z.data(), m);
  return scale_.cwiseProduct(z);
}

Vec KktFactorization::solve(const Vec& rhs) const {
  if (rhs.size() != n_ + p_) throw DimensionMismatch("KKT: rhs has wrong size");
  Vec z = solve_once(rhs);
  const Vec correction = solve_once(rhs - D_ * z);
  if (correction.allFinite()) z += correction;
  if (!z.allFinite())
    throw SingularKkt("KKT solve produced non-finite values",
                      std::numeric_limits<double>::infinity());
  return z;
}

double KktFactorization::min_singular_value(int max_iterations,
                                            double tol) const {
  const Index m = n_ + p_;
  Vec v(m);
  for (Index i = 0; i < m; ++i) v(i) = 1.0 + 0.1 * std::sin(double(i + 1));
  v.normalize();
  double estimate = 0.0;
  for (int k = 0; k < max_iterations; ++k) {
    Vec w = solve_once(v);
    const double grow = w.norm();
    if (!(grow > 0.0) || !std::isfinite(grow))
      throw SingularKkt("inverse iteration broke down",
                        std::numeric_limits<double>::infinity());
    const double next = 1.0 / grow;
    v = w / grow;
    if (k > 0 && std::abs(next - estimate) <= tol * next) {
      estimate = next;
      break;
    }
    estimate = next;
  }
  return estimate;
}

namespace {

struct Linearization {
  Vec grad;
  Mat hess;
};

Linearization linearize(const ConicProblem& problem, const Vec& x) {
  Linearization lin;
  problem.barrier().derivatives(x, lin.grad, lin.hess);
  return lin;
}

void check_point(const ConicProblem& problem, const PrimalDualPoint& y) {
  if (y.x.size() != problem.n() || y.nu.size() != problem.p())
    throw DimensionMismatch("primal-dual point does not match the problem");
}

NewtonStepResult solve_step(const ConicProblem& problem, const Mat& hess, const Vec& r, double eq_residual,
                            const StepOptions& options) {
  const KktFactorization kkt(hess, problem.A(), options.solver);
  NewtonStepResult out;
  out.delta_y = kkt.solve(-r);
  out.residual_norm = r.norm();
  out.solve_residual_norm = (kkt.matrix() * out.delta_y + r).norm();
  out.kkt_quadratic = -r.dot(out.delta_y);
  const Vec dx = out.delta_y.head(problem.n());
  out.decrement = local_norm(hess, dx);
  out.equality_residual_norm = eq_residual;
  if (options.estimate_min_singular_value)
    out.min_singular_value =
        kkt.min_singular_value(options.power_iterations, options.power_tol);
  return out;
}

}  // namespace

Vec residual(const ConicProblem& problem, const PrimalDualPoint& y, double eta,
             const Vec& b) {
  check_point(problem, y);
  if (b.size() != problem.p()) throw DimensionMismatch("residual: b has wrong size");
  const Index n = problem.n();
  Vec r(n + problem.p());
  r.head(n) = eta * problem.c() + problem.barrier().gradient(y.x);
  if (problem.p() > 0) {
    r.head(n) += problem.A().transpose() * y.nu;
    r.tail(problem.p()) = problem.A() * y.x - b;
  }
  return r;
}

NewtonStepResult newton_step(const ConicProblem& problem,
                             const PrimalDualPoint& y, double eta, const Vec& b,
                             const StepOptions& options) {
  check_point(problem, y);
  if (b.size() != problem.p())
    throw DimensionMismatch("newton_step: b has wrong size");
  const Index n = problem.n();
  const auto lin = linearize(problem, y.x);
  Vec r(n + problem.p());
  r.head(n) = eta * problem.c() + lin.grad;
  if (problem.p() > 0) {
    r.head(n) += problem.A().transpose() * y.nu;
    r.tail(problem.p()) = problem.A() * y.x - b;
  }
  const double eq = problem.p() > 0 ? r.tail(problem.p()).norm() : 0.0;
  return solve_step(problem, lin.hess, r, eq, options);
}

NewtonStepResult eta_step(const ConicProblem& problem, const PrimalDualPoint& y,
                          double eta_plus, const StepOptions& options) {
  check_point(problem, y);
  const Index n = problem.n();
  const auto lin = linearize(problem, y.x);
  Vec r = Vec::Zero(n + problem.p());
  r.head(n) = eta_plus * problem.c() + lin.grad;
  if (problem.p() > 0) r.head(n) += problem.A().transpose() * y.nu;
  return solve_step(problem, lin.hess, r, 0.0, options);
}

PrimalDualPoint apply_step(const PrimalDualPoint& y,
                           const NewtonStepResult& step, double alpha) {
  const Index n = y.x.size();
  return {y.x + alpha * step.delta_y.head(n),
          y.nu + alpha * step.delta_y.tail(y.nu.size())};
}

double newton_decrement(const ConicProblem& problem, const PrimalDualPoint& y,
                        double eta, const Vec& b, KktSolver solver) {
  StepOptions options;
  options.solver = solver;
  return newton_step(problem, y, eta, b, options).decrement;
}

DecrementReductionReport decrement_reduction_check(
    const ConicProblem& problem, const PrimalDualPoint& y, double eta,
    const Vec& b, double slack) {
  const auto step = newton_step(problem, y, eta, b);
  DecrementReductionReport report;
  report.lambda = step.decrement;
  report.hypothesis_holds = report.lambda <= 1.0;
  if (!report.hypothesis_holds) return report;
  report.bound = report.lambda * report.lambda /
                 ((1.0 - report.lambda) * (1.0 - report.lambda));
  const auto next = apply_step(y, step);
  report.lambda_plus = newton_decrement(problem, next, eta, b);
  report.passed = report.lambda_plus <= report.bound + slack;
  return report;
}

double dual_witness(const ConicProblem& problem, const PrimalDualPoint& y) {
  check_point(problem, y);
  const Index n = problem.n();
  const auto lin = linearize(problem, y.x);
  const KktFactorization kkt(lin.hess, problem.A());
  Vec g = Vec::Zero(n + problem.p());
  g.head(n) = lin.grad;
  if (problem.p() > 0) g.head(n) += problem.A().transpose() * y.nu;
  const Vec h = kkt.solve(g);
  // hᵀDh = gᵀD⁻¹g; only the x-block of D⁻¹ enters, which is PSD.
  return std::sqrt(std::max(0.0, g.dot(h)));
}

double estimate_min_singular_value(const ConicProblem& problem, const Vec& x,
                                   int max_iterations, double tol) {
  const Mat hess = problem.barrier().hessian(x);
  const KktFactorization kkt(hess, problem.A());
  return kkt.min_singular_value(max_iterations, tol);
}

double drift_threshold(double m) { return std::sqrt(3.0 * m / 160.0); }

double local_norm(const Mat& M, const Vec& v) {
  return std::sqrt(std::max(0.0, v.dot(M * v)));
}

}  // namespace oipm
