#include "oracles.hpp"

#include "oipm/barrier.hpp"
#include "oipm/errors.hpp"
#include "oipm/synthetic.hpp"

#include <doctest.h>

using namespace oipm;

namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }

BarrierTerm unit_soc() {
  // u(x) = x₂, t(x) = x₁.
  Mat U(1, 2);
  U << 0, 1;
  return BarrierTerm::soc(U, Vec::Zero(1), v2(1, 0), 0.0);
}

}  // namespace

TEST_CASE("barrier values at hand-checked points") {
  const auto neg_x1 = BarrierTerm::affine(v2(-1, 0), 0.0);
  CHECK(neg_x1.value(v2(1, 0)) == doctest::Approx(0.0));
  CHECK(unit_soc().value(v2(1, 0)) == doctest::Approx(0.0));

  const BarrierAggregate two(2, {BarrierTerm::affine(v2(-1, 0), 0.0),
                                 BarrierTerm::affine(v2(0, -1), 0.0)});
  const double e = std::exp(1.0);
  CHECK(two.value(v2(e, e)) == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(two.total_complexity() == 2.0);
}

TEST_CASE("analytic derivatives of the simple terms") {
  const BarrierAggregate x1(1, {BarrierTerm::affine(Vec::Constant(1, -1.0), 0.0)});
  const Vec at2 = Vec::Constant(1, 2.0);
  CHECK(x1.gradient(at2)(0) == doctest::Approx(-0.5));
  CHECK(x1.hessian(at2)(0, 0) == doctest::Approx(0.25));

  const BarrierAggregate cone(2, {unit_soc()});
  const Vec g = cone.gradient(v2(1, 0));
  CHECK(g(0) == doctest::Approx(-2.0));
  CHECK(g(1) == doctest::Approx(0.0));
}

TEST_CASE("random terms match closed-form values and finite differences") {
  Rng rng(42);
  const Index n = 5;
  for (int trial = 0; trial < 20; ++trial) {
    const Mat B = rng.normal_vec(n * n).reshaped(n, n);
    const Mat Q = B.transpose() * B;
    const Vec q = rng.normal_vec(n);
    const Vec x = 0.1 * rng.normal_vec(n);
    // Keep x strictly inside: r chosen so g(x) = −1.
    const double r = -1.0 - (0.5 * x.dot(Q * x) + q.dot(x));
    const auto quad = BarrierTerm::quadratic(Q, q, r);
    auto f = [&](const Vec& z) { return oracle::quadratic_barrier(Q, q, r, z); };
    CHECK(quad.value(x) == doctest::Approx(f(x)).epsilon(1e-12));

    const double h = 1e-4 * (1 + x.norm());
    Vec g = Vec::Zero(n);
    Mat H = Mat::Zero(n, n);
    quad.accumulate(x, &g, &H);
    const Vec g_fd = oracle::fd_gradient(f, x, h);
    CHECK((g - g_fd).norm() / g.norm() <= 1e-6);
    const Mat H_fd = oracle::fd_hessian(f, x, h);
    CHECK((H - H_fd).norm() / H.norm() <= 1e-5);
  }

  for (int trial = 0; trial < 20; ++trial) {
    const Mat U = rng.normal_vec(2 * n).reshaped(2, n);
    const Vec u0 = rng.normal_vec(2);
    const Vec w = rng.normal_vec(n);
    const Vec x = rng.normal_vec(n);
    const double w0 = (U * x + u0).norm() + 1.0 - w.dot(x);
    const auto cone = BarrierTerm::soc(U, u0, w, w0);
    auto f = [&](const Vec& z) { return oracle::soc_barrier(U, u0, w, w0, z); };
    CHECK(cone.value(x) == doctest::Approx(f(x)).epsilon(1e-12));
    Vec g = Vec::Zero(n);
    cone.accumulate(x, &g, nullptr);
    CHECK((g - oracle::fd_gradient(f, x, 1e-5)).norm() / g.norm() <= 1e-6);
  }
}

TEST_CASE("self-concordance probe") {
  SUBCASE("-log(x) attains the bound with equality") {
    const auto rep = check_self_concordance_1d(
        [](double s) { return 1.0 / ((1 + s) * (1 + s)); }, 1e-4);
    CHECK(rep.passed);
    CHECK(rep.third_derivative == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(rep.bound == doctest::Approx(2.0));
  }
  SUBCASE("exp is rejected") {
    // r = exp(x) at x = -5: r''' = r'' = e^{-5} > 2 e^{-7.5}.
    const auto rep =
        check_self_concordance_1d([](double s) { return std::exp(-5.0 + s); }, 1e-4);
    CHECK_FALSE(rep.passed);
  }
  SUBCASE("random cone lines") {
    Rng rng(7);
    const Index n = 4;
    int passed = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const Mat U = rng.normal_vec(3 * n).reshaped(3, n);
      const Vec x = rng.normal_vec(n);
      const Vec w = rng.normal_vec(n);
      const double w0 = (U * x).norm() + 0.5 - w.dot(x);
      const BarrierAggregate agg(n, {BarrierTerm::soc(U, Vec::Zero(3), w, w0)});
      Vec dir = rng.normal_vec(n);
      passed += check_self_concordance(agg, x, dir / dir.norm()).passed;
    }
    CHECK(passed == 100);
  }
}

TEST_CASE("complexity witness") {
  Rng rng(3);
  const BarrierAggregate single(1, {BarrierTerm::affine(Vec::Constant(1, -1.0), 0.0)});
  for (double x1 : {0.01, 1.0, 100.0})
    CHECK(complexity_witness(single, Vec::Constant(1, x1)) == doctest::Approx(1.0));
  // One scalar constraint in two variables leaves the Hessian singular.
  const BarrierAggregate flat(2, {BarrierTerm::affine(v2(-1, 0), 0.0)});
  CHECK_THROWS_AS(complexity_witness(flat, v2(1, 5)), SingularHessian);

  const BarrierAggregate cone(2, {unit_soc()});
  const BarrierAggregate mixed(2, {BarrierTerm::affine(v2(1, 0), 10.0),
                                   BarrierTerm::affine(v2(0, 1), 10.0),
                                   BarrierTerm::affine(v2(0, -1), 10.0), unit_soc()});
  for (int i = 0; i < 200; ++i) {
    const double t = rng.uniform(0.1, 5.0);
    const Vec x = v2(t, rng.uniform(-0.99, 0.99) * t);
    CHECK(complexity_witness(cone, x) <= 2.0 + 1e-9);
    CHECK(complexity_witness(mixed, x) <= 5.0 + 1e-9);
  }
}

TEST_CASE("construction and domain errors") {
  Mat indefinite(2, 2);
  indefinite << 1, 0, 0, -1;
  CHECK_THROWS_AS(BarrierTerm::quadratic(indefinite, Vec::Zero(2), -1.0), InvalidArgument);

  const BarrierAggregate agg(2, {BarrierTerm::affine(v2(-1, 0), 0.0),
                                 BarrierTerm::affine(v2(0, -1), 0.0)});
  CHECK_FALSE(agg.is_interior(v2(1, 0)));
  CHECK(agg.first_violated(v2(1, -1)) == 1);
  CHECK_THROWS_AS(agg.value(v2(1, -1)), DomainViolation);
  try {
    agg.gradient(v2(1, -1));
  } catch (const DomainViolation& e) {
    CHECK(e.term_index() == 1);
  }
}
