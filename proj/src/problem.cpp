#include "oipm/problem.hpp"

#include "oipm/errors.hpp"

#include <string>

namespace oipm {

Index numerical_rank(const Mat& M, double tol) {
  if (M.rows() == 0 || M.cols() == 0) return 0;
  Eigen::ColPivHouseholderQR<Mat> qr(M);
  qr.setThreshold(tol);
  return qr.rank();
}

ConicProblem::ConicProblem(Vec c, Mat A, BarrierAggregate barrier)
    : c_(std::move(c)), A_(std::move(A)), barrier_(std::move(barrier)) {
  const Index n = c_.size();
  if (n == 0) throw DimensionMismatch("problem: empty decision vector");
  if (A_.rows() > 0 && A_.cols() != n)
    throw DimensionMismatch("problem: A has " + std::to_string(A_.cols()) +
                            " columns, expected " + std::to_string(n));
  if (A_.rows() == 0) A_.resize(0, n);
  if (barrier_.dim() != n)
    throw DimensionMismatch("problem: barrier dimension " +
                            std::to_string(barrier_.dim()) + " != " +
                            std::to_string(n));
  if (A_.rows() > n)
    throw DimensionMismatch("problem: more equality rows than variables");
  if (!c_.allFinite() || !A_.allFinite())
    throw InvalidArgument("problem: c and A must be finite");
  if (numerical_rank(A_) < A_.rows())
    throw RankDeficient("problem: A (" + std::to_string(A_.rows()) + "×" +
                        std::to_string(n) + ") is not full row rank");
}

double ConicProblem::equality_residual(const Vec& x, const Vec& b) const {
  if (b.size() != p()) throw DimensionMismatch("problem: b has wrong size");
  if (p() == 0) return 0.0;
  return (A_ * x - b).norm();
}

}  // namespace oipm
