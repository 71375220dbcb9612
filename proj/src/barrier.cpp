#include "oipm/barrier.hpp"

#include "oipm/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace oipm {

const char* to_string(TermKind kind) {
  switch (kind) {
    case TermKind::AffineIneq:
      return "affine";
    case TermKind::ConvexQuadIneq:
      return "quadratic";
    case TermKind::SecondOrderCone:
      return "soc";
  }
  return "unknown";
}

BarrierTerm::BarrierTerm(TermKind kind, Mat mat, Vec vec0, Vec vec1,
                         double scalar)
    : kind_(kind),
      mat_(std::move(mat)),
      vec0_(std::move(vec0)),
      vec1_(std::move(vec1)),
      scalar_(scalar) {
  const Index n = vec0_.size();
  for (Index j = 0; j < n; ++j) {
    const bool used = vec0_(j) != 0.0 ||
                      (mat_.size() > 0 && mat_.col(j).cwiseAbs().maxCoeff() != 0.0);
    if (used) support_.push_back(j);
  }
  sub_vec0_ = vec0_(support_);
  if (kind_ == TermKind::ConvexQuadIneq)
    sub_mat_ = mat_(support_, support_);
  else if (kind_ == TermKind::SecondOrderCone)
    sub_mat_ = mat_(Eigen::all, support_);
}

Vec BarrierTerm::gather(const Vec& x) const { return x(support_); }

BarrierTerm BarrierTerm::affine(Vec a, double offset) {
  if (a.size() == 0) throw InvalidArgument("affine term needs a non-empty row");
  if (!a.allFinite() || !std::isfinite(offset))
    throw InvalidArgument("affine term coefficients must be finite");
  return BarrierTerm(TermKind::AffineIneq, Mat(), std::move(a), Vec(), offset);
}

BarrierTerm BarrierTerm::quadratic(Mat Q, Vec q, double r) {
  const Index n = q.size();
  if (n == 0 || Q.rows() != n || Q.cols() != n)
    throw DimensionMismatch("quadratic term: Q must be square and match q");
  if (!Q.allFinite() || !q.allFinite() || !std::isfinite(r))
    throw InvalidArgument("quadratic term coefficients must be finite");
  const double scale = 1.0 + Q.cwiseAbs().maxCoeff();
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw InvalidArgument("quadratic term: Q is not symmetric");
  Eigen::LDLT<Mat> ldlt(Q);
  if (ldlt.info() != Eigen::Success ||
      ldlt.vectorD().minCoeff() < -1e-12 * scale)
    throw InvalidArgument("quadratic term: Q is not positive semidefinite");
  return BarrierTerm(TermKind::ConvexQuadIneq, std::move(Q), std::move(q),
                     Vec(), r);
}

BarrierTerm BarrierTerm::soc(Mat U, Vec u0, Vec w, double w0) {
  const Index n = w.size();
  if (n == 0 || U.cols() != n || U.rows() != u0.size() || U.rows() == 0)
    throw DimensionMismatch("cone term: U must be k×N with u0 ∈ R^k, w ∈ R^N");
  if (!U.allFinite() || !u0.allFinite() || !w.allFinite() ||
      !std::isfinite(w0))
    throw InvalidArgument("cone term coefficients must be finite");
  return BarrierTerm(TermKind::SecondOrderCone, std::move(U), std::move(w),
                     std::move(u0), w0);
}

Index BarrierTerm::dim() const { return vec0_.size(); }

double BarrierTerm::complexity() const {
  return kind_ == TermKind::SecondOrderCone ? 2.0 : 1.0;
}

double BarrierTerm::constraint_value(const Vec& x) const {
  const Vec xs = gather(x);
  switch (kind_) {
    case TermKind::AffineIneq:
      return sub_vec0_.dot(xs) - scalar_;
    case TermKind::ConvexQuadIneq:
      return 0.5 * xs.dot(sub_mat_ * xs) + sub_vec0_.dot(xs) + scalar_;
    case TermKind::SecondOrderCone:
      return (sub_mat_ * xs + vec1_).norm() - (sub_vec0_.dot(xs) + scalar_);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

bool BarrierTerm::is_interior(const Vec& x) const {
  const double g = constraint_value(x);
  return std::isfinite(g) && g < 0.0;
}

double BarrierTerm::value(const Vec& x) const {
  if (x.size() != dim()) throw DimensionMismatch("barrier term: wrong x size");
  if (kind_ == TermKind::SecondOrderCone) {
    const Vec xs = gather(x);
    const Vec u = sub_mat_ * xs + vec1_;
    const double t = sub_vec0_.dot(xs) + scalar_;
    const double unorm = u.norm();
    if (!(t - unorm > 0.0))
      throw DomainViolation(-1, "cone term evaluated outside its interior");
    // t² − ‖u‖² factored to keep precision near the boundary.
    return -std::log((t - unorm) * (t + unorm));
  }
  const double g = constraint_value(x);
  if (!(g < 0.0))
    throw DomainViolation(-1, std::string(to_string(kind_)) +
                                  " term evaluated outside its interior");
  return -std::log(-g);
}

void BarrierTerm::accumulate(const Vec& x, Vec* grad, Mat* hess) const {
  if (x.size() != dim()) throw DimensionMismatch("barrier term: wrong x size");
  // Work on the support and scatter back.
  const Vec xs = gather(x);
  const Mat& M = sub_mat_;
  const Vec& v = sub_vec0_;
  Vec g;
  Mat h;
  switch (kind_) {
    case TermKind::AffineIneq: {
      const double slack = scalar_ - v.dot(xs);
      if (!(slack > 0.0))
        throw DomainViolation(-1, "affine term evaluated outside its interior");
      if (grad) g = v / slack;
      if (hess) h = v * v.transpose() / (slack * slack);
      break;
    }
    case TermKind::ConvexQuadIneq: {
      const Vec dg = M * xs + v;
      const double slack = -(0.5 * xs.dot(M * xs) + v.dot(xs) + scalar_);
      if (!(slack > 0.0))
        throw DomainViolation(-1,
                              "quadratic term evaluated outside its interior");
      if (grad) g = dg / slack;
      if (hess) h = M / slack + dg * dg.transpose() / (slack * slack);
      break;
    }
    case TermKind::SecondOrderCone: {
      const Vec u = M * xs + vec1_;
      const double t = v.dot(xs) + scalar_;
      const double unorm = u.norm();
      if (!(t - unorm > 0.0))
        throw DomainViolation(-1, "cone term evaluated outside its interior");
      const double psi = (t - unorm) * (t + unorm);
      // ψ = t² − ‖u‖²,  ∇ψ = 2(t w − Uᵀu),  ∇²ψ = 2(wwᵀ − UᵀU)
      const Vec dpsi = 2.0 * (t * v - M.transpose() * u);
      if (grad) g = -dpsi / psi;
      if (hess)
        h = -2.0 * (v * v.transpose() - M.transpose() * M) / psi +
            dpsi * dpsi.transpose() / (psi * psi);
      break;
    }
  }
  if (grad) (*grad)(support_) += g;
  if (hess) (*hess)(support_, support_) += h;
}

BarrierTerm BarrierTerm::with_slack() const {
  const Index n = dim();
  switch (kind_) {
    case TermKind::AffineIneq: {
      Vec a(n + 1);
      a << vec0_, -1.0;
      return affine(std::move(a), scalar_);
    }
    case TermKind::ConvexQuadIneq: {
      Mat Q = Mat::Zero(n + 1, n + 1);
      Q.topLeftCorner(n, n) = mat_;
      Vec q(n + 1);
      q << vec0_, -1.0;
      return quadratic(std::move(Q), std::move(q), scalar_);
    }
    case TermKind::SecondOrderCone: {
      Mat U = Mat::Zero(mat_.rows(), n + 1);
      U.leftCols(n) = mat_;
      Vec w(n + 1);
      w << vec0_, 1.0;
      return soc(std::move(U), vec1_, std::move(w), scalar_);
    }
  }
  throw InvalidArgument("unknown term kind");
}

BarrierTerm BarrierTerm::padded(Index extra) const {
  const Index n = dim();
  Vec v0 = Vec::Zero(n + extra);
  v0.head(n) = vec0_;
  switch (kind_) {
    case TermKind::AffineIneq:
      return affine(std::move(v0), scalar_);
    case TermKind::ConvexQuadIneq: {
      Mat Q = Mat::Zero(n + extra, n + extra);
      Q.topLeftCorner(n, n) = mat_;
      return quadratic(std::move(Q), std::move(v0), scalar_);
    }
    case TermKind::SecondOrderCone: {
      Mat U = Mat::Zero(mat_.rows(), n + extra);
      U.leftCols(n) = mat_;
      return soc(std::move(U), vec1_, std::move(v0), scalar_);
    }
  }
  throw InvalidArgument("unknown term kind");
}

BarrierAggregate::BarrierAggregate(Index dim, std::vector<BarrierTerm> terms)
    : dim_(dim), terms_(std::move(terms)) {
  for (const auto& term : terms_) {
    if (term.dim() != dim_)
      throw DimensionMismatch("barrier aggregate: term dimension " +
                              std::to_string(term.dim()) + " != " +
                              std::to_string(dim_));
    total_complexity_ += term.complexity();
  }
}

bool BarrierAggregate::is_interior(const Vec& x) const {
  return x.size() == dim_ && !first_violated(x).has_value();
}

std::optional<int> BarrierAggregate::first_violated(const Vec& x) const {
  for (std::size_t i = 0; i < terms_.size(); ++i)
    if (!terms_[i].is_interior(x)) return static_cast<int>(i);
  return std::nullopt;
}

void BarrierAggregate::require_interior(const Vec& x) const {
  if (x.size() != dim_)
    throw DimensionMismatch("barrier: x has size " + std::to_string(x.size()) +
                            ", expected " + std::to_string(dim_));
  if (auto bad = first_violated(x))
    throw DomainViolation(*bad, "barrier term " + std::to_string(*bad) + " (" +
                                    to_string(terms_[*bad].kind()) +
                                    ") is not strictly interior");
}

double BarrierAggregate::value(const Vec& x) const {
  require_interior(x);
  double total = 0.0;
  for (const auto& term : terms_) total += term.value(x);
  return total;
}

Vec BarrierAggregate::gradient(const Vec& x) const {
  require_interior(x);
  Vec grad = Vec::Zero(dim_);
  for (const auto& term : terms_) term.accumulate(x, &grad, nullptr);
  return grad;
}

Mat BarrierAggregate::hessian(const Vec& x) const {
  require_interior(x);
  Mat hess = Mat::Zero(dim_, dim_);
  for (const auto& term : terms_) term.accumulate(x, nullptr, &hess);
  return 0.5 * (hess + hess.transpose());
}

void BarrierAggregate::derivatives(const Vec& x, Vec& grad, Mat& hess) const {
  require_interior(x);
  grad = Vec::Zero(dim_);
  hess = Mat::Zero(dim_, dim_);
  for (const auto& term : terms_) term.accumulate(x, &grad, &hess);
  hess = 0.5 * (hess + hess.transpose()).eval();
}

double default_fd_spacing(const Vec& x) { return 1e-4 * (1.0 + x.norm()); }

SelfConcordanceReport check_self_concordance_1d(
    const std::function<double(double)>& second_derivative, double h,
    double tol) {
  if (!(h > 0.0)) throw InvalidArgument("finite-difference spacing must be > 0");
  const double r2 = second_derivative(0.0);
  const double r3 = (second_derivative(h) - second_derivative(-h)) / (2.0 * h);
  SelfConcordanceReport report;
  report.third_derivative = std::abs(r3);
  report.bound = 2.0 * std::pow(std::max(r2, 0.0), 1.5);
  report.passed =
      report.third_derivative <= report.bound + tol * std::max(1.0, report.bound);
  return report;
}

SelfConcordanceReport check_self_concordance(const BarrierAggregate& agg,
                                             const Vec& x, const Vec& dir,
                                             double h, double tol) {
  if (dir.size() != agg.dim() || x.size() != agg.dim())
    throw DimensionMismatch("self-concordance probe: dimension mismatch");
  if (dir.norm() == 0.0) throw InvalidArgument("probe direction must be non-zero");
  if (h <= 0.0) h = default_fd_spacing(x);
  auto r2 = [&](double s) {
    const Vec p = x + s * dir;
    return dir.dot(agg.hessian(p) * dir);
  };
  return check_self_concordance_1d(r2, h, tol);
}

double complexity_witness(const BarrierAggregate& agg, const Vec& x) {
  Vec grad;
  Mat hess;
  agg.derivatives(x, grad, hess);
  Eigen::LLT<Mat> llt(hess);
  if (llt.info() != Eigen::Success)
    throw SingularHessian("barrier Hessian is not positive definite");
  const Vec diag = llt.matrixL().toDenseMatrix().diagonal();
  const double ratio = diag.minCoeff() / diag.maxCoeff();
  if (!(ratio * ratio > 1e-14))
    throw SingularHessian("barrier Hessian is numerically singular");
  return grad.dot(llt.solve(grad));
}

}  // namespace oipm
