#pragma once

#include "oipm/barrier.hpp"

#include <vector>

namespace oipm {

/// min cᵀx  s.t.  g_i(x) ⪯ 0 (through the barrier),  Ax = b.
///
/// c, A and the barrier are fixed for the lifetime of the problem; only the
/// right-hand side b changes between rounds. A has full row rank (checked at
/// construction). A square A pins x to a single point.
class ConicProblem {
 public:
  ConicProblem() = default;
  /// Throws DimensionMismatch on inconsistent sizes and RankDeficient when A
  /// does not have full row rank.
  ConicProblem(Vec c, Mat A, BarrierAggregate barrier);

  Index n() const { return c_.size(); }
  Index p() const { return A_.rows(); }
  const Vec& c() const { return c_; }
  const Mat& A() const { return A_; }
  const BarrierAggregate& barrier() const { return barrier_; }
  double complexity() const { return barrier_.total_complexity(); }

  double objective(const Vec& x) const { return c_.dot(x); }
  double equality_residual(const Vec& x, const Vec& b) const;

 private:
  Vec c_;
  Mat A_;
  BarrierAggregate barrier_;
};

/// Numerical rank of a matrix from a column-pivoted QR with relative
/// threshold `tol`.
Index numerical_rank(const Mat& M, double tol = 1e-10);

/// A problem together with its stream of right-hand sides b_0, …, b_T.
struct TimeVaryingProblem {
  ConicProblem problem;
  std::vector<Vec> b_stream;

  int horizon() const { return static_cast<int>(b_stream.size()) - 1; }
};

}  // namespace oipm
