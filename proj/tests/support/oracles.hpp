#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the library's barrier, KKT or oracle code.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

// Closed-form barrier values.
inline double affine_barrier(const Vec& a, double offset, const Vec& x) {
  const double slack = offset - a.dot(x);
  return slack > 0 ? -std::log(slack) : std::numeric_limits<double>::infinity();
}

inline double quadratic_barrier(const Mat& Q, const Vec& q, double r, const Vec& x) {
  const double g = 0.5 * x.dot(Q * x) + q.dot(x) + r;
  return g < 0 ? -std::log(-g) : std::numeric_limits<double>::infinity();
}

inline double soc_barrier(const Mat& U, const Vec& u0, const Vec& w, double w0,
                          const Vec& x) {
  const Vec u = U * x + u0;
  const double t = w.dot(x) + w0;
  const double gap = t * t - u.squaredNorm();
  return (t > 0 && gap > 0) ? -std::log(gap) : std::numeric_limits<double>::infinity();
}

// Central-difference derivatives of a scalar function.
inline Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
  Vec g(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    Vec e = Vec::Zero(x.size());
    e(i) = h;
    g(i) = (f(x + e) - f(x - e)) / (2 * h);
  }
  return g;
}

inline Mat fd_hessian(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
  const Index n = x.size();
  Mat H(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      Vec ei = Vec::Zero(n), ej = Vec::Zero(n);
      ei(i) = h;
      ej(j) = h;
      H(i, j) = (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) /
                (4 * h * h);
    }
  return 0.5 * (H + H.transpose());
}

// Richardson extrapolation of fd_hessian over h and h/2; error O(h⁴).
inline Mat fd_hessian_extrapolated(const std::function<double(const Vec&)>& f, const Vec& x,
                                   double h) {
  return (4.0 * fd_hessian(f, x, 0.5 * h) - fd_hessian(f, x, h)) / 3.0;
}

// Smallest step along ±eᵢ that leaves the domain of f (where f is finite),
// found by bisection. Capped at `cap`.
inline double boundary_distance(const std::function<double(const Vec&)>& f, const Vec& x,
                                double cap = 10.0) {
  double best = cap;
  for (Index i = 0; i < x.size(); ++i)
    for (double sign : {-1.0, 1.0}) {
      Vec e = Vec::Zero(x.size());
      e(i) = sign;
      if (std::isfinite(f(x + cap * e))) continue;
      double lo = 0.0, hi = cap;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (std::isfinite(f(x + mid * e)) ? lo : hi) = mid;
      }
      best = std::min(best, lo);
    }
  return best;
}

// Saddle system [[H, Aᵀ], [A, 0]] assembled and solved with a full-pivot LU.
inline Mat saddle(const Mat& H, const Mat& A) {
  const Index n = H.rows(), p = A.rows();
  Mat D = Mat::Zero(n + p, n + p);
  D.topLeftCorner(n, n) = H;
  D.topRightCorner(n, p) = A.transpose();
  D.bottomLeftCorner(p, n) = A;
  return D;
}

inline Vec dense_solve(const Mat& D, const Vec& rhs) { return D.fullPivLu().solve(rhs); }

inline double smallest_singular_value(const Mat& D) {
  return Eigen::JacobiSVD<Mat>(D).singularValues().minCoeff();
}

// min cᵀx over {x ∈ R² : Gx ≤ h} by enumerating all pairwise intersections.
// Returns nullopt when no vertex is feasible.
inline std::optional<double> lp2_vertex_min(const Vec& c, const Mat& G, const Vec& h,
                                            double tol = 1e-9) {
  std::optional<double> best;
  for (Index i = 0; i < G.rows(); ++i)
    for (Index j = i + 1; j < G.rows(); ++j) {
      Mat M(2, 2);
      M << G.row(i), G.row(j);
      if (std::abs(M.determinant()) < 1e-12) continue;
      const Vec v = M.partialPivLu().solve(Vec((Vec(2) << h(i), h(j)).finished()));
      if (((G * v - h).array() > tol).any()) continue;
      const double val = c.dot(v);
      if (!best || val < *best) best = val;
    }
  return best;
}

// min f over a uniform grid on [lo, hi]² restricted to feasible points, then
// refined by repeated zooming around the incumbent.
inline std::optional<double> grid_min_2d(const std::function<double(double, double)>& f,
                                         const std::function<bool(double, double)>& feasible,
                                         double lo0, double hi0, double lo1, double hi1,
                                         int steps = 400, int zooms = 6) {
  std::optional<double> best;
  double bx = 0, by = 0;
  for (int z = 0; z <= zooms; ++z) {
    const double dx = (hi0 - lo0) / steps, dy = (hi1 - lo1) / steps;
    for (int i = 0; i <= steps; ++i)
      for (int j = 0; j <= steps; ++j) {
        const double x = lo0 + i * dx, y = lo1 + j * dy;
        if (!feasible(x, y)) continue;
        const double v = f(x, y);
        if (!best || v < *best) {
          best = v;
          bx = x;
          by = y;
        }
      }
    if (!best) return best;
    lo0 = bx - 4 * dx;
    hi0 = bx + 4 * dx;
    lo1 = by - 4 * dy;
    hi1 = by + 4 * dy;
  }
  return best;
}

// Optimal costs of the shipped cases from tests/oracles/opf_reference.py
// (an independent conic formulation solved with cvxpy and SCS).
inline constexpr double kTwoBusCost = 527.977043347;
inline constexpr double kFiveBusCost = 2364.82116577;
inline constexpr double kCase33Cost = 78.3139029979;

}  // namespace oracle
