#include "oipm/checks.hpp"
#include "oipm/errors.hpp"
#include "oipm/online.hpp"
#include "oipm/synthetic.hpp"

#include <doctest.h>

using namespace oipm;

namespace {

Vec unit_direction(Rng& rng, Index n) {
  Vec d = rng.normal_vec(n);
  return d / d.norm();
}

}  // namespace

TEST_CASE("zero drift round certifies and grows eta by beta") {
  const auto inst = make_synthetic({"lp", 8, 3, 0, 2});
  SolverOptions opts;
  opts.beta = 1.01;
  auto state = initialize(inst.problem, inst.b0, opts);
  const double eta = state.eta;
  const auto round = oipm_tec_round(inst.problem, state, inst.b0, opts);
  CHECK(round.trace.certified);
  CHECK(round.trace.final_decrement <= 1.0 / 9.0);
  CHECK(state.eta == doctest::Approx(eta * 1.01).epsilon(1e-15));
  CHECK(certify(inst.problem, state, inst.b0) <= 1.0 / 9.0);
}

TEST_CASE("drift at 0.9 of the threshold keeps every round certified") {
  for (const char* kind : {"lp", "socp"}) {
    const auto inst = make_synthetic({kind, 10, 4, 2, 31});
    SolverOptions opts;
    opts.drift_policy = DriftPolicy::Fail;
    auto state = initialize(inst.problem, inst.b0, opts);
    Rng rng(5);
    Vec b = inst.b0;
    int certified = 0;
    double worst = 0.0;
    for (int t = 1; t <= 200; ++t) {
      const double m = estimate_min_singular_value(inst.problem, state.y.x);
      b += 0.9 * drift_threshold(m) * unit_direction(rng, inst.problem.p());
      const auto round = oipm_tec_round(inst.problem, state, b, opts);
      certified += round.trace.certified;
      worst = std::max(worst, round.trace.final_decrement);
      CHECK_FALSE(round.trace.drift_violation);
    }
    CHECK(certified == 200);
    CHECK(worst <= 1.0 / 9.0);
  }
}

TEST_CASE("epsilon mode") {
  CHECK(resolve_eps_eta(1e4, 0.015, 199.0) == 29187.0);
  CHECK(resolve_eps_eta(1e6, 0.015, 199.0) == 1e6);
  CHECK(resolve_eps_eta(0.0, 0.5, 10.0) == 44.0);
  CHECK_THROWS_AS(resolve_eps_eta(1.0, 0.0, 1.0), InvalidArgument);

  SUBCASE("zero drift leaves the decision unchanged") {
    const auto inst = make_synthetic({"socp", 8, 3, 2, 6});
    SolverOptions opts;
    opts.algorithm = Algorithm::EpsOipmTec;
    opts.epsilon = 1.0;
    auto state = initialize(inst.problem, inst.b0, opts);
    // Tighten the start so the zero-drift step is round-off sized.
    state.y = central_point(inst.problem, inst.b0, state.eta, 1e-13);
    const Vec before = state.y.x;
    epsilon_oipm_tec_round(inst.problem, state, inst.b0, opts);
    CHECK((state.y.x - before).norm() <= 1e-10 * (1 + before.norm()));
  }

  SUBCASE("200 drifting SOCP rounds stay certified") {
    const auto inst = make_synthetic({"socp", 10, 3, 3, 14});
    SolverOptions opts;
    opts.algorithm = Algorithm::EpsOipmTec;
    opts.epsilon = 0.5;
    auto state = initialize(inst.problem, inst.b0, opts);
    CHECK(state.eta == resolve_eps_eta(0.0, 0.5, inst.problem.complexity()));
    Rng rng(9);
    Vec b = inst.b0;
    for (int t = 1; t <= 200; ++t) {
      const double m = estimate_min_singular_value(inst.problem, state.y.x);
      b += 0.9 * drift_threshold(m) * unit_direction(rng, inst.problem.p());
      const auto round = epsilon_oipm_tec_round(inst.problem, state, b, opts);
      REQUIRE(round.trace.final_decrement <= 1.0 / 9.0);
    }
  }
}

TEST_CASE("certify reports without throwing") {
  const auto inst = make_synthetic({"lp", 6, 2, 0, 3});
  SolverOptions opts;
  auto state = initialize(inst.problem, inst.b0, opts);
  run_round(inst.problem, state, inst.b0, opts);
  CHECK(certify(inst.problem, state, inst.b0) <= 1.0 / 9.0);
  // Push x most of the way to the boundary along a null-space direction of A.
  const Mat N = Eigen::FullPivLU<Mat>(inst.problem.A()).kernel();
  const Vec d = N.col(0) / N.col(0).norm();
  double lo = 0.0, hi = 1e3;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (inst.problem.barrier().is_interior(state.y.x + mid * d) ? lo : hi) = mid;
  }
  state.y.x += 0.95 * lo * d;
  double value = 0.0;
  CHECK_NOTHROW(value = certify(inst.problem, state, inst.b0));
  CHECK(value > 1.0 / 9.0);
}

TEST_CASE("drift policies") {
  const auto inst = make_synthetic({"lp", 6, 2, 0, 4});
  const Vec jump = inst.b0 + 0.5 * Vec::Ones(inst.problem.p());
  SolverOptions fail;
  fail.drift_policy = DriftPolicy::Fail;
  auto state = initialize(inst.problem, inst.b0, fail);
  CHECK_THROWS_AS(oipm_tec_round(inst.problem, state, jump, fail), DriftTooLarge);

  SolverOptions correct;
  correct.max_corrections = 50;
  auto fixed = initialize(inst.problem, inst.b0, correct);
  const auto round = oipm_tec_round(inst.problem, fixed, jump, correct);
  CHECK(round.trace.drift_violation);
  CHECK(round.trace.certified);
  CHECK(round.trace.corrections > 0);
}

TEST_CASE("beta resolution and eta ceiling") {
  CHECK(resolve_beta(0.0, 1.0) == doctest::Approx(1.02));
  CHECK(resolve_beta(0.0, 100.0) == doctest::Approx(1.0125));
  CHECK(resolve_beta(1.02, 199.0) == 1.02);

  const auto inst = make_synthetic({"lp", 6, 2, 0, 5});
  SolverOptions opts;
  opts.beta = 1.5;
  opts.eta_max = 3.0;
  opts.max_corrections = 50;
  auto state = initialize(inst.problem, inst.b0, opts);
  for (int t = 0; t < 6; ++t) run_round(inst.problem, state, inst.b0, opts);
  CHECK(state.eta == 3.0);

  SolverOptions bad;
  bad.eta0 = 2.0;
  bad.eta_max = 1.0;
  CHECK_THROWS_AS(initialize(inst.problem, inst.b0, bad), InvalidArgument);
}
