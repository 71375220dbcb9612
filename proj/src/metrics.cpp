#include "oipm/metrics.hpp"

#include "oipm/errors.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

namespace oipm {

namespace {

double oracle_eta(const ConicProblem& problem, const OracleOptions& options) {
  const double eta_final = options.eta_target
                               ? *options.eta_target
                               : problem.complexity() / options.tol;
  if (!(eta_final > 0.0)) throw InvalidArgument("oracle: target eta must be > 0");
  return eta_final;
}

// Centers y at the start of the path and follows it to the target η.
OracleResult follow_from(const ConicProblem& problem, PrimalDualPoint y,
                         const Vec& b, const OracleOptions& options,
                         int max_start_iterations) {
  const double eta_final = oracle_eta(problem, options);
  const double eta_start = std::min(1.0, eta_final);
  CenteringOptions first;
  first.solver = options.solver;
  first.max_iterations = std::min(options.max_newton_iterations, max_start_iterations);
  first.target_decrement =
      eta_start < eta_final ? kCertifiedDecrement : options.final_decrement;
  first.stall_iterations = options.stall_iterations;
  auto centered = center(problem, std::move(y), eta_start, b, first);

  OracleResult out;
  out.anchor = centered.y;
  PathOptions path;
  path.eta_start = eta_start;
  path.eta_final = eta_final;
  path.growth = options.growth;
  path.final_decrement = options.final_decrement;
  path.max_newton_iterations =
      options.max_newton_iterations - centered.iterations;
  path.solver = options.solver;
  path.stall_iterations = options.stall_iterations;
  auto run = path_follow(problem, std::move(centered.y), b, path);

  out.y = std::move(run.y);
  out.eta = run.eta;
  out.gap_bound = problem.complexity() / run.eta;
  out.newton_iterations = centered.iterations + run.newton_iterations;
  out.decrement = run.decrement;
  out.stalled = run.stalled || centered.stalled;
  if (out.stalled)
    spdlog::debug("oracle: stalled at eta = {} with decrement {}", out.eta,
                  out.decrement);
  return out;
}

}  // namespace

OracleResult offline_center(const ConicProblem& problem, const Vec& b,
                            const OracleOptions& options) {
  oracle_eta(problem, options);
  PrimalDualPoint y{phase_one(problem, b), Vec::Zero(problem.p())};
  return follow_from(problem, std::move(y), b, options, 5000);
}

OracleResult recenter(const ConicProblem& problem, const Vec& b,
                      const OracleResult& previous, const OracleOptions& options) {
  if (previous.anchor.x.size() == problem.n()) {
    try {
      return follow_from(problem, previous.anchor, b, options, 100);
    } catch (const Error& e) {
      spdlog::debug("oracle: warm start failed ({}), solving from scratch", e.what());
    }
  }
  return offline_center(problem, b, options);
}

std::vector<Vec> sequential_optima(const ConicProblem& problem,
                                   const std::vector<Vec>& rhs,
                                   const OracleOptions& options) {
  std::vector<Vec> out;
  out.reserve(rhs.size());
  std::optional<OracleResult> last;
  for (const auto& b : rhs) {
    last = last ? recenter(problem, b, *last, options)
                : offline_center(problem, b, options);
    out.push_back(last->y.x);
  }
  return out;
}

std::vector<Vec> batch_optima(const ConicProblem& problem,
                              const std::vector<Vec>& rhs,
                              const OracleOptions& options, unsigned threads) {
  std::vector<Vec> out(rhs.size());
  if (rhs.empty()) return out;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(rhs.size()));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < rhs.size(); i = next++) {
      try {
        out[i] = offline_center(problem, rhs[i], options).y.x;
      } catch (const std::exception& e) {
        std::lock_guard lock(failure_mutex);
        if (!failure)
          failure = std::make_exception_ptr(
              Error("oracle failed for right-hand side " + std::to_string(i) +
                    ": " + e.what()));
        next = rhs.size();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

ConeDistance cone_distance(const BarrierTerm& term, const Vec& x) {
  switch (term.kind()) {
    case TermKind::AffineIneq: {
      const double g = term.constraint_value(x);
      return {std::max(0.0, g) / term.a().norm(), false};
    }
    case TermKind::ConvexQuadIneq:
      return {std::max(0.0, term.constraint_value(x)), true};
    case TermKind::SecondOrderCone: {
      const Index k = term.U().rows();
      Mat M(k + 1, term.dim());
      M.topRows(k) = term.U();
      M.row(k) = term.w().transpose();
      const bool orthonormal =
          (M * M.transpose() - Mat::Identity(k + 1, k + 1)).cwiseAbs().maxCoeff() <=
          1e-12;
      if (!orthonormal)
        return {std::max(0.0, term.constraint_value(x)), true};
      const double unorm = (term.U() * x + term.u0()).norm();
      const double t = term.w().dot(x) + term.w0();
      if (unorm <= t) return {0.0, false};
      if (unorm <= -t) return {std::hypot(t, unorm), false};
      return {(unorm - t) / std::sqrt(2.0), false};
    }
  }
  return {0.0, true};
}

MetricsLedger::MetricsLedger(ConicProblem problem, double epsilon, Vec b0,
                             std::optional<Vec> x_opt0)
    : problem_(std::move(problem)),
      epsilon_(epsilon),
      b_prev_(std::move(b0)),
      x_opt_prev_(std::move(x_opt0)) {
  if (!(epsilon_ >= 0.0)) throw InvalidArgument("ledger: epsilon must be >= 0");
  if (b_prev_.size() != problem_.p())
    throw DimensionMismatch("ledger: b0 has wrong size");
}

void MetricsLedger::record_round(int t, const Vec& x_t, const Vec& b_t,
                                 std::optional<Vec> x_opt, double decrement,
                                 double eta) {
  if (x_t.size() != problem_.n() || b_t.size() != problem_.p())
    throw DimensionMismatch("ledger: decision or b_t has wrong size");
  if (!x_opt) {
    if (!oracle_)
      throw MissingOracle("ledger: no optimum for round " + std::to_string(t));
    x_opt = oracle_(t, b_t);
  }
  RoundRecord rec;
  rec.t = t;
  rec.obj = problem_.objective(x_t);
  rec.obj_opt = problem_.objective(*x_opt);
  rec.regret_inc = rec.obj - rec.obj_opt;
  rec.eps_regret_inc = std::max(0.0, rec.regret_inc - epsilon_);
  rec.eq_viol = problem_.equality_residual(x_t, b_t);
  for (const auto& term : problem_.barrier().terms()) {
    const auto d = cone_distance(term, x_t);
    rec.ineq_viol += d.distance;
    rec.ineq_surrogate = rec.ineq_surrogate || (d.surrogate && d.distance > 0.0);
  }
  rec.decrement = decrement;
  rec.eta = eta;
  rec.b_variation = problem_.p() > 0 ? (b_t - b_prev_).norm() : 0.0;
  rec.opt_variation = x_opt_prev_ ? (*x_opt_prev_ - *x_opt).norm() : 0.0;

  totals_.regret += rec.regret_inc;
  totals_.eps_regret += rec.eps_regret_inc;
  totals_.violation += rec.ineq_viol + rec.eq_viol;
  totals_.b_variation += rec.b_variation;
  totals_.opt_variation += rec.opt_variation;

  records_.push_back(rec);
  b_prev_ = b_t;
  x_opt_prev_ = std::move(x_opt);
}

LedgerTotals MetricsLedger::sum_records(const std::vector<RoundRecord>& records) {
  LedgerTotals totals;
  for (const auto& rec : records) {
    totals.regret += rec.regret_inc;
    totals.eps_regret += rec.eps_regret_inc;
    totals.violation += rec.ineq_viol + rec.eq_viol;
    totals.b_variation += rec.b_variation;
    totals.opt_variation += rec.opt_variation;
  }
  return totals;
}

std::string format_double(double value) { return fmt::format("{:.17g}", value); }

void MetricsLedger::write_csv(std::ostream& out) const {
  out << "t,obj,obj_opt,regret_inc,eps_regret_inc,eq_viol,ineq_viol,decrement,"
         "eta\n";
  for (const auto& r : records_) {
    out << r.t << ',' << format_double(r.obj) << ',' << format_double(r.obj_opt)
        << ',' << format_double(r.regret_inc) << ','
        << format_double(r.eps_regret_inc) << ',' << format_double(r.eq_viol)
        << ',' << format_double(r.ineq_viol) << ','
        << format_double(r.decrement) << ',' << format_double(r.eta) << '\n';
  }
}

void MetricsLedger::write_series_csv(std::ostream& out) const {
  out << "t,R_d,R_eps,Vio,V_T,V_b\n";
  LedgerTotals running;
  for (const auto& r : records_) {
    running.regret += r.regret_inc;
    running.eps_regret += r.eps_regret_inc;
    running.violation += r.ineq_viol + r.eq_viol;
    running.opt_variation += r.opt_variation;
    running.b_variation += r.b_variation;
    out << r.t << ',' << format_double(running.regret) << ','
        << format_double(running.eps_regret) << ','
        << format_double(running.violation) << ','
        << format_double(running.opt_variation) << ','
        << format_double(running.b_variation) << '\n';
  }
}

BoundReport bound_check(const MetricsLedger& ledger, Algorithm algorithm,
                        double eta0, double beta, double eta_max) {
  const auto& totals = ledger.totals();
  const double vf = ledger.problem().complexity();
  const double cnorm = ledger.problem().c().norm();
  BoundReport report;

  report.violation.name = "violation";
  report.violation.applicable = true;
  report.violation.lhs = totals.violation;
  report.violation.rhs = totals.b_variation;
  report.violation.margin = report.violation.rhs - report.violation.lhs;
  report.violation.passed =
      report.violation.lhs <= report.violation.rhs * (1.0 + 1e-9) + 1e-12;

  report.regret.name = "dynamic_regret";
  report.regret.lhs = totals.regret;
  report.eps_regret.name = "eps_regret";
  report.eps_regret.lhs = totals.eps_regret;
  report.eps_regret.rhs = cnorm * totals.opt_variation;
  report.eps_regret.margin = report.eps_regret.rhs - report.eps_regret.lhs;

  if (algorithm == Algorithm::OipmTec) {
    if (!(beta > 1.0) || !(eta0 > 0.0))
      throw InvalidArgument("bound_check: need beta > 1 and eta0 > 0");
    report.regret.applicable = true;
    int capped = 0;
    if (std::isfinite(eta_max))
      for (const auto& rec : ledger.records())
        if (rec.eta >= eta_max) ++capped;
    report.regret.rhs = 11.0 * vf * beta / (5.0 * eta0 * (beta - 1.0)) +
                        cnorm * totals.opt_variation +
                        (capped > 0 ? 11.0 * vf * capped / (5.0 * eta_max) : 0.0);
    report.regret.margin = report.regret.rhs - report.regret.lhs;
    report.regret.passed = report.regret.lhs <= report.regret.rhs;
  } else {
    report.eps_regret.applicable = true;
    report.eps_regret.passed = report.eps_regret.lhs <= report.eps_regret.rhs;
  }
  return report;
}

}  // namespace oipm
