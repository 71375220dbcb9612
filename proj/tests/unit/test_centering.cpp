#include "oracles.hpp"

#include "oipm/centering.hpp"
#include "oipm/errors.hpp"
#include "oipm/synthetic.hpp"

#include <doctest.h>

using namespace oipm;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// min cᵀx over the unit box, no equality rows.
ConicProblem unit_box(const Vec& c) {
  std::vector<BarrierTerm> terms;
  for (Index i = 0; i < c.size(); ++i) {
    Vec e = Vec::Zero(c.size());
    e(i) = 1.0;
    terms.push_back(BarrierTerm::affine(-e, 0.0));
    terms.push_back(BarrierTerm::affine(e, 1.0));
  }
  return ConicProblem(c, Mat(0, c.size()), BarrierAggregate(c.size(), std::move(terms)));
}

// Root in (0, 1) of ηc − 1/x + 1/(1 − x) = 0.
double box_center(double eta_c) {
  if (eta_c == 0.0) return 0.5;
  const double s = eta_c + 2.0;
  return (s - std::sqrt(s * s - 4.0 * eta_c)) / (2.0 * eta_c);
}

}  // namespace

TEST_CASE("box LP reaches its analytic center quickly") {
  const Vec c = vec({1.0, 2.0});
  const auto prob = unit_box(c);
  const auto res = center(prob, {vec({0.9, 0.1}), Vec()}, 1.0, Vec());
  CHECK(res.decrement <= 1.0 / 9.0);
  CHECK(res.iterations < 50);

  CenteringOptions tight;
  tight.target_decrement = 1e-12;
  const auto exact = center(prob, {vec({0.9, 0.1}), Vec()}, 1.0, Vec(), tight);
  CHECK(exact.y.x(0) == doctest::Approx(box_center(1.0)).epsilon(1e-10));
  CHECK(exact.y.x(1) == doctest::Approx(box_center(2.0)).epsilon(1e-10));

  const auto again = center(prob, exact.y, 1.0, Vec());
  CHECK(again.iterations == 0);
}

TEST_CASE("infeasible equality start is repaired") {
  const auto inst = make_synthetic({"mixed", 8, 3, 2, 21});
  const Vec start = inst.x_interior + 1e-2 * Vec::Ones(8);
  const auto res = center(inst.problem, {start, Vec::Zero(3)}, 2.0, inst.b0);
  CHECK(res.decrement <= 1.0 / 9.0);
  CHECK(inst.problem.equality_residual(res.y.x, inst.b0) <= 1e-10 * (1 + inst.b0.norm()));
}

TEST_CASE("iteration cap raises NonConvergent") {
  const auto prob = unit_box(vec({50.0, -50.0}));
  CenteringOptions opts;
  opts.max_iterations = 1;
  CHECK_THROWS_AS(center(prob, {vec({0.5, 0.5}), Vec()}, 1.0, Vec(), opts), NonConvergent);
}

TEST_CASE("step length rule") {
  CHECK(damped_step_length(0.2) == 1.0);
  CHECK(damped_step_length(0.25) == 1.0);
  CHECK(damped_step_length(1.0) == doctest::Approx(0.5));
  CHECK(short_step_growth(64.0) == doctest::Approx(1.0 + 1.0 / 64.0));
}

TEST_CASE("phase one") {
  const auto inst = make_synthetic({"socp", 10, 4, 3, 8});
  const Vec x = phase_one(inst.problem, inst.b0);
  CHECK(inst.problem.barrier().is_interior(x));
  CHECK(inst.problem.equality_residual(x, inst.b0) <= 1e-9 * (1 + inst.b0.norm()));

  // x ∈ [0, 1] with x = 2 has no interior.
  Mat A(1, 1);
  A << 1;
  const ConicProblem pinned(Vec::Ones(1), A,
                            BarrierAggregate(1, {BarrierTerm::affine(Vec::Constant(1, -1), 0.0),
                                                 BarrierTerm::affine(Vec::Constant(1, 1), 1.0)}));
  CHECK_THROWS_AS(phase_one(pinned, Vec::Constant(1, 2.0)), InfeasibleStart);
  CHECK(phase_one(pinned, Vec::Constant(1, 0.3))(0) == doctest::Approx(0.3));
}

TEST_CASE("path following closes the gap to the LP vertex") {
  // min x₁ + 2x₂ on the box: vertex optimum 0.
  const auto prob = unit_box(vec({1.0, 2.0}));
  PathOptions opts;
  opts.eta_final = 1e6;
  opts.growth = 4.0;
  const auto start = center(prob, {vec({0.5, 0.5}), Vec()}, 1.0, Vec());
  const auto res = path_follow(prob, start.y, Vec(), opts);
  CHECK(res.eta == doctest::Approx(1e6));
  Mat G(4, 2);
  G << -1, 0, 1, 0, 0, -1, 0, 1;
  const auto best = oracle::lp2_vertex_min(prob.c(), G, vec({0, 1, 0, 1}));
  REQUIRE(best);
  const double gap = prob.objective(res.y.x) - *best;
  CHECK(gap >= 0.0);
  CHECK(gap <= 1.2 * prob.complexity() / res.eta);
}
