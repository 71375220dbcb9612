#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <vector>

namespace oipm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

enum class TermKind { AffineIneq, ConvexQuadIneq, SecondOrderCone };

const char* to_string(TermKind kind);

/// One self-concordant barrier block for a constraint g(x) ⪯ 0.
///
///  - AffineIneq:       g(x) = aᵀx − offset,            barrier −log(−g)
///  - ConvexQuadIneq:   g(x) = ½xᵀQx + qᵀx + r (Q ⪰ 0),  barrier −log(−g)
///  - SecondOrderCone:  ‖Ux + u₀‖ ≤ wᵀx + w₀,          barrier −log(t² − ‖u‖²)
///
/// Terms are immutable once built.
class BarrierTerm {
 public:
  static BarrierTerm affine(Vec a, double offset);
  /// Throws InvalidArgument unless Q is symmetric positive semidefinite.
  static BarrierTerm quadratic(Mat Q, Vec q, double r);
  static BarrierTerm soc(Mat U, Vec u0, Vec w, double w0);

  TermKind kind() const { return kind_; }
  Index dim() const;
  /// 1 for scalar constraints, 2 for the second-order cone.
  double complexity() const;

  /// Scalar constraint value. For the cone this is ‖u(x)‖ − t(x).
  double constraint_value(const Vec& x) const;
  bool is_interior(const Vec& x) const;

  double value(const Vec& x) const;
  /// Adds this term's gradient and Hessian into the outputs (either may be null).
  void accumulate(const Vec& x, Vec* grad, Mat* hess) const;

  /// The same constraint on the lifted variable [x; s] with g(x) − s ⪯ 0
  /// (cone: ‖u(x)‖ ≤ t(x) + s).
  BarrierTerm with_slack() const;
  /// The same constraint on [x; z] where z holds `extra` unused coordinates.
  BarrierTerm padded(Index extra) const;

  // Affine
  const Vec& a() const { return vec0_; }
  double offset() const { return scalar_; }
  // Quadratic
  const Mat& Q() const { return mat_; }
  const Vec& q() const { return vec0_; }
  double r() const { return scalar_; }
  // Cone
  const Mat& U() const { return mat_; }
  const Vec& u0() const { return vec1_; }
  const Vec& w() const { return vec0_; }
  double w0() const { return scalar_; }

 private:
  BarrierTerm(TermKind kind, Mat mat, Vec vec0, Vec vec1, double scalar);

  Vec gather(const Vec& x) const;

  TermKind kind_;
  Mat mat_;
  Vec vec0_;
  Vec vec1_;
  double scalar_;
  // Columns the term depends on, with the coefficients restricted to them.
  std::vector<Index> support_;
  Mat sub_mat_;
  Vec sub_vec0_;
};

/// φ(x) = Σ barrier terms, with total complexity v_f = Σ complexities.
class BarrierAggregate {
 public:
  BarrierAggregate() = default;
  BarrierAggregate(Index dim, std::vector<BarrierTerm> terms);

  Index dim() const { return dim_; }
  const std::vector<BarrierTerm>& terms() const { return terms_; }
  double total_complexity() const { return total_complexity_; }

  bool is_interior(const Vec& x) const;
  /// Index of the first term whose domain does not contain x.
  std::optional<int> first_violated(const Vec& x) const;

  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  Mat hessian(const Vec& x) const;
  /// Gradient and Hessian in one pass over the terms.
  void derivatives(const Vec& x, Vec& grad, Mat& hess) const;

 private:
  void require_interior(const Vec& x) const;

  Index dim_ = 0;
  std::vector<BarrierTerm> terms_;
  double total_complexity_ = 0.0;
};

/// Outcome of the scalar self-concordance probe |r'''(0)| ≤ 2 r''(0)^{3/2}.
struct SelfConcordanceReport {
  double third_derivative = 0.0;  // |r'''| (finite-difference estimate)
  double bound = 0.0;             // 2 r''^{3/2}
  bool passed = false;
};

/// Default finite-difference spacing h = 1e−4·(1 + ‖x‖).
double default_fd_spacing(const Vec& x);

/// Probes a scalar function through its second derivative along a line.
/// r''' is estimated by a central difference of r'' with spacing h, and the
/// test passes when |r'''| ≤ 2 r''^{3/2} + tol·max(1, 2 r''^{3/2}).
SelfConcordanceReport check_self_concordance_1d(
    const std::function<double(double)>& second_derivative, double h,
    double tol = 1e-4);

/// Restricts φ to s ↦ φ(x + s·dir) and runs the scalar probe at s = 0.
/// Passing h ≤ 0 selects default_fd_spacing(x).
SelfConcordanceReport check_self_concordance(const BarrierAggregate& agg,
                                             const Vec& x, const Vec& dir,
                                             double h = 0.0,
                                             double tol = 1e-4);

/// ∇φᵀ(∇²φ)⁻¹∇φ at x; bounded above by the total complexity.
/// Throws SingularHessian when ∇²φ(x) is not numerically positive definite.
double complexity_witness(const BarrierAggregate& agg, const Vec& x);

}  // namespace oipm
