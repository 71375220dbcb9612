#include "oipm/checks.hpp"

#include "oipm/errors.hpp"
#include "oipm/experiment.hpp"
#include "oipm/metrics.hpp"
#include "oipm/opf.hpp"
#include "oipm/synthetic.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace oipm {

bool CheckReport::passed() const {
  return std::all_of(items.begin(), items.end(),
                     [](const CheckItem& item) { return item.passed; });
}

std::string CheckReport::to_json() const {
  nlohmann::json doc;
  doc["suite"] = suite;
  doc["passed"] = passed();
  doc["items"] = nlohmann::json::array();
  for (const auto& item : items)
    doc["items"].push_back({{"name", item.name}, {"passed", item.passed},
                            {"value", item.value}, {"limit", item.limit},
                            {"trials", item.trials}});
  return doc.dump(2);
}

const std::vector<std::string>& check_suites() {
  static const std::vector<std::string> names{"barriers", "newton", "lemmas",
                                              "theorems", "opf"};
  return names;
}

PrimalDualPoint central_point(const ConicProblem& problem, const Vec& b, double eta,
                              double tol) {
  OracleOptions opts;
  opts.eta_target = eta;
  opts.growth = 4.0;
  opts.final_decrement = tol;
  return offline_center(problem, b, opts).y;
}

double eta_for_decrement(const ConicProblem& problem, const PrimalDualPoint& y,
                         double eta, const Vec& b, double target) {
  auto lambda = [&](double e) { return newton_decrement(problem, y, e, b); };
  double lo = eta, hi = 2.0 * eta;
  while (lambda(hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12 * eta) throw NonConvergent("eta_for_decrement: target out of reach");
  }
  for (int it = 0; it < 80 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (lambda(mid) < target ? lo : hi) = mid;
  }
  return lo;
}

namespace {

// Keeps the worst case of a scalar comparison.
struct Tracker {
  CheckItem item;
  Tracker(std::string name, double limit) {
    item.name = std::move(name);
    item.limit = limit;
    item.passed = true;
  }
  void add(double value) {
    item.value = item.trials == 0 ? value : std::max(item.value, value);
    ++item.trials;
    if (!(value <= item.limit)) item.passed = false;
  }
};

Vec random_direction(Rng& rng, Index n) {
  Vec d = rng.normal_vec(n);
  return d / d.norm();
}

// Interior points of a mixed synthetic instance near its known interior point.
std::vector<Vec> interior_samples(const SyntheticInstance& inst, Rng& rng, int count) {
  std::vector<Vec> points;
  const Index n = inst.problem.n();
  while (static_cast<int>(points.size()) < count) {
    const Vec x = inst.x_interior + 0.1 * rng.normal_vec(n);
    if (inst.problem.barrier().is_interior(x)) points.push_back(x);
  }
  return points;
}

CheckReport barriers_suite() {
  CheckReport report{"barriers", {}};
  Rng rng(11);
  SyntheticSpec spec;
  spec.kind = "mixed";
  spec.n = 6;
  spec.p = 2;
  spec.seed = 3;
  const auto inst = make_synthetic(spec);
  const auto points = interior_samples(inst, rng, 100);

  for (auto kind : {TermKind::AffineIneq, TermKind::ConvexQuadIneq,
                    TermKind::SecondOrderCone}) {
    Tracker grad(std::string("gradient_fd_") + to_string(kind), 1e-6);
    Tracker hess(std::string("hessian_fd_") + to_string(kind), 1e-6);
    Tracker sc(std::string("self_concordance_") + to_string(kind), 0.0);
    for (const auto& term : inst.problem.barrier().terms()) {
      if (term.kind() != kind) continue;
      const BarrierAggregate single(term.dim(), {term});
      for (const auto& x : points) {
        const Index n = x.size();
        const double h = 1e-5 * (1.0 + x.norm());
        Vec g = Vec::Zero(n);
        Mat H = Mat::Zero(n, n);
        term.accumulate(x, &g, &H);
        Vec g_fd(n);
        Mat H_fd(n, n);
        for (Index i = 0; i < n; ++i) {
          Vec e = Vec::Zero(n);
          e(i) = h;
          g_fd(i) = (term.value(x + e) - term.value(x - e)) / (2.0 * h);
          Vec gp = Vec::Zero(n), gm = Vec::Zero(n);
          term.accumulate(x + e, &gp, nullptr);
          term.accumulate(x - e, &gm, nullptr);
          H_fd.col(i) = (gp - gm) / (2.0 * h);
        }
        grad.add((g - g_fd).norm() / std::max(1.0, g.norm()));
        hess.add((H - H_fd).norm() / std::max(1.0, H.norm()));
        const auto probe = check_self_concordance(single, x, random_direction(rng, n));
        sc.add(probe.passed ? 0.0 : 1.0);
      }
    }
    report.items.push_back(grad.item);
    report.items.push_back(hess.item);
    report.items.push_back(sc.item);
  }

  // −log(x) attains the self-concordance bound with equality.
  Tracker boundary("log_barrier_equality", 1e-3);
  for (double x0 : {0.1, 1.0, 10.0}) {
    const double h = 1e-4 * x0;
    const auto probe = check_self_concordance_1d(
        [x0](double s) { return 1.0 / ((x0 + s) * (x0 + s)); }, h);
    boundary.add(std::abs(probe.third_derivative - probe.bound) / probe.bound);
  }
  report.items.push_back(boundary.item);

  Tracker witness("complexity_witness", 0.0);
  for (const auto& x : points)
    witness.add(complexity_witness(inst.problem.barrier(), x) -
                inst.problem.complexity() * (1.0 + 1e-9));
  report.items.push_back(witness.item);
  return report;
}

CheckReport newton_suite() {
  CheckReport report{"newton", {}};
  Tracker solvers("ldlt_vs_block_rel_diff", 1e-8);
  Tracker feasibility("unit_step_restores_Ax_eq_b", 1e-9);
  Tracker identity("decrement_eq_sqrt_rDr", 1e-8);
  Tracker witness("dual_witness_le_sqrt_vf", 0.0);
  Rng rng(5);
  for (int k = 0; k < 30; ++k) {
    SyntheticSpec spec;
    spec.kind = k % 3 == 0 ? "lp" : (k % 3 == 1 ? "socp" : "mixed");
    spec.n = 5 + k % 5;
    spec.p = 1 + k % 3;
    spec.seed = 100 + static_cast<std::uint64_t>(k);
    const auto inst = make_synthetic(spec);
    const auto& problem = inst.problem;
    const double eta = rng.uniform(0.5, 20.0);
    const PrimalDualPoint y{inst.x_interior, Vec::Zero(problem.p())};
    const Vec b = inst.b0 + 0.01 * rng.normal_vec(problem.p());

    StepOptions ldlt, block;
    block.solver = KktSolver::BlockElimination;
    const auto s1 = newton_step(problem, y, eta, b, ldlt);
    const auto s2 = newton_step(problem, y, eta, b, block);
    solvers.add((s1.delta_y - s2.delta_y).norm() / std::max(1.0, s1.delta_y.norm()));

    const auto next = apply_step(y, s1);
    feasibility.add(problem.equality_residual(next.x, b) / (1.0 + b.norm()));

    // With Ax = b the decrement equals √(rᵀD⁻¹r).
    const auto s0 = newton_step(problem, y, eta, inst.b0, ldlt);
    identity.add(std::abs(s0.decrement - std::sqrt(std::max(0.0, s0.kkt_quadratic))) /
                 std::max(1.0, s0.decrement));

    witness.add(dual_witness(problem, y) - std::sqrt(problem.complexity()) * (1.0 + 1e-9));
  }
  report.items = {solvers.item, feasibility.item, identity.item, witness.item};
  return report;
}

std::vector<SyntheticInstance> battery_instances(int count) {
  std::vector<SyntheticInstance> out;
  for (int k = 0; k < count; ++k) {
    SyntheticSpec spec;
    spec.kind = k % 3 == 0 ? "lp" : (k % 3 == 1 ? "socp" : "mixed");
    spec.n = 4 + k % 6;
    spec.p = 1 + k % 3;
    spec.seed = 1000 + static_cast<std::uint64_t>(k);
    out.push_back(make_synthetic(spec));
  }
  return out;
}

CheckReport lemmas_suite() {
  CheckReport report{"lemmas", {}};
  Tracker contraction("newton_contraction_excess", 1e-8);
  Tracker quarter("contraction_from_quarter_excess_over_1_9", 1e-8);
  Tracker growth("eta_growth_excess_over_1_4", 1e-8);
  Tracker drift("drift_excess_over_1_4", 1e-6);
  Rng rng(21);
  const auto instances = battery_instances(200);
  for (const auto& inst : instances) {
    const auto& problem = inst.problem;
    const double eta = rng.uniform(0.5, 20.0);
    const auto y = central_point(problem, inst.b0, eta);

    // Contraction at a random λ ≤ 1/4 and at λ = 1/4.
    for (double target : {rng.uniform(0.01, 0.25), 0.25}) {
      const double eta_t = eta_for_decrement(problem, y, eta, inst.b0, target);
      const auto rep = decrement_reduction_check(problem, y, eta_t, inst.b0);
      contraction.add(rep.lambda_plus - rep.bound);
      if (target == 0.25) quarter.add(rep.lambda_plus - 1.0 / 9.0);
    }

    // η growth: from λ = 1/9, scale η by β = 1 + 1/(8√v_f).
    const double eta9 = eta_for_decrement(problem, y, eta, inst.b0, 1.0 / 9.0);
    const double beta = short_step_growth(problem.complexity());
    growth.add(newton_decrement(problem, y, eta9 * beta, inst.b0) - 0.25);
    growth.add(newton_decrement(problem, y, eta9 / beta, inst.b0) - 0.25);

    // Drift: from λ = 1/9, move b by 0.99·√(3m/160).
    const double m = estimate_min_singular_value(problem, y.x);
    const Vec db = 0.99 * drift_threshold(m) * random_direction(rng, problem.p());
    drift.add(newton_decrement(problem, y, eta9, inst.b0 + db) - 0.25);
  }
  report.items = {contraction.item, quarter.item, growth.item, drift.item};
  return report;
}

CheckReport theorems_suite() {
  CheckReport report{"theorems", {}};
  ExperimentConfig cfg;
  cfg.horizon = 500;
  cfg.seed = 7;
  SyntheticSource src;
  src.spec.kind = "lp";
  src.spec.n = 10;
  src.spec.p = 4;
  src.spec.seed = 7;
  cfg.synthetic = src;
  cfg.oracle.growth = 4.0;
  const auto inst = prepare(cfg);

  const auto oipm = run_experiment(cfg, inst);
  const auto& t1 = oipm.summary;
  Tracker vio("violation_eq_vb_rel_err", 1e-8);
  vio.add(std::abs(t1.totals.violation - t1.totals.b_variation) /
          std::max(1e-300, t1.totals.b_variation));
  Tracker ineq("inequality_violation", 0.0);
  for (const auto& rec : oipm.records) ineq.add(rec.ineq_viol);
  Tracker regret("regret_minus_bound", 0.0);
  regret.add(t1.bounds->regret.lhs - t1.bounds->regret.rhs);
  Tracker drift("drift_violations", 0.0);
  drift.add(t1.drift_violations);

  cfg.algorithm = ExperimentAlgorithm::EpsOipmTec;
  const auto eps = run_experiment(cfg, inst);
  Tracker eps_bound("eps_regret_minus_bound", 0.0);
  eps_bound.add(eps.summary.bounds->eps_regret.lhs - eps.summary.bounds->eps_regret.rhs);

  ExperimentProblem still = inst;
  still.stream.assign(101, inst.stream.front());
  still.optima.assign(101, inst.optima.front());
  const auto eps_static = run_experiment(cfg, still);
  Tracker eps_zero("static_eps_regret", 0.0);
  eps_zero.add(eps_static.summary.totals.eps_regret);

  report.items = {vio.item, ineq.item, regret.item, drift.item, eps_bound.item,
                  eps_zero.item};
  return report;
}

CheckReport opf_suite() {
  CheckReport report{"opf", {}};
  Tracker constraints("decoded_constraint_violation", 1e-6);
  Tracker tight("relaxation_gap_two_bus", 1e-5);
  for (const auto& network : {opf::two_bus_case(), opf::five_bus_radial_case()}) {
    const auto enc = opf::build_encoding(network);
    OracleOptions opts;
    opts.growth = 4.0;
    const auto x = offline_center(enc.problem, enc.b0, opts).y.x;
    const auto rep = opf::check_constraints(enc, x, enc.b0);
    constraints.add(rep.worst());
    if (network.buses.size() == 2) tight.add(rep.relaxation_gap);
  }

  Tracker disconnected("disconnected_network_rejected", 0.0);
  auto broken = opf::five_bus_radial_case();
  broken.lines.clear();
  try {
    opf::build_encoding(broken);
    disconnected.add(1.0);
  } catch (const DisconnectedNetwork&) {
    disconnected.add(0.0);
  }

  Tracker determinism("stream_replay_max_diff", 0.0);
  const auto enc = opf::build_encoding(opf::five_bus_radial_case());
  const auto s1 = opf::generate_stream(enc, 42, 50);
  const auto s2 = opf::generate_stream(enc, 42, 50);
  double diff = 0.0;
  for (std::size_t t = 0; t < s1.b.size(); ++t)
    diff = std::max(diff, (s1.b[t] - s2.b[t]).cwiseAbs().maxCoeff());
  determinism.add(diff);

  Tracker growth("stream_vb_ratio_2000_over_500_minus_2", 0.2);
  const auto long_stream = opf::generate_stream(enc, 9, 2000);
  double vb500 = 0.0, vb2000 = 0.0;
  for (std::size_t t = 1; t < long_stream.b.size(); ++t) {
    const double d = (long_stream.b[t] - long_stream.b[t - 1]).norm();
    vb2000 += d;
    if (t <= 500) vb500 += d;
  }
  growth.add(std::abs(vb2000 / vb500 - 2.0));

  report.items = {constraints.item, tight.item, disconnected.item, determinism.item,
                  growth.item};
  return report;
}

}  // namespace

CheckReport run_check_suite(const std::string& suite) {
  if (suite == "barriers") return barriers_suite();
  if (suite == "newton") return newton_suite();
  if (suite == "lemmas") return lemmas_suite();
  if (suite == "theorems") return theorems_suite();
  if (suite == "opf") return opf_suite();
  throw InvalidArgument("unknown check suite '" + suite + "'");
}

}  // namespace oipm
