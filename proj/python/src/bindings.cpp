#include "oipm/checks.hpp"
#include "oipm/errors.hpp"
#include "oipm/experiment.hpp"
#include "oipm/metrics.hpp"
#include "oipm/online.hpp"
#include "oipm/opf.hpp"
#include "oipm/serialize.hpp"
#include "oipm/synthetic.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>

namespace py = pybind11;
using namespace oipm;

namespace {

py::object json_loads(const std::string& text) {
  return py::module_::import("json").attr("loads")(text);
}

void set_log_level(const std::string& level) {
  if (level == "error") spdlog::set_level(spdlog::level::err);
  else if (level == "warn") spdlog::set_level(spdlog::level::warn);
  else if (level == "info") spdlog::set_level(spdlog::level::info);
  else if (level == "debug") spdlog::set_level(spdlog::level::debug);
  else throw InvalidArgument("log level must be error, warn, info or debug");
}

KktSolver parse_solver(const std::string& name) {
  if (name == "ldlt") return KktSolver::SymmetricIndefinite;
  if (name == "block") return KktSolver::BlockElimination;
  throw InvalidArgument("solver must be 'ldlt' or 'block'");
}

// Stateful wrapper around initialize / run_round.
class OnlineSolver {
 public:
  OnlineSolver(ConicProblem problem, const Vec& b0, const std::string& algorithm,
               double eta0, double beta, double epsilon, double eta_fixed, double eta_max)
      : problem_(std::move(problem)) {
    if (algorithm == "oipm_tec") options_.algorithm = Algorithm::OipmTec;
    else if (algorithm == "eps_oipm_tec") options_.algorithm = Algorithm::EpsOipmTec;
    else throw InvalidArgument("algorithm must be 'oipm_tec' or 'eps_oipm_tec'");
    options_.eta0 = eta0;
    options_.beta = beta;
    options_.epsilon = epsilon;
    options_.eta_fixed = eta_fixed;
    options_.eta_max = eta_max;
    state_ = initialize(problem_, b0, options_);
  }

  // Returns the decision implemented this round (chosen before b_t is seen).
  py::dict step(const Vec& b_t) {
    const auto round = run_round(problem_, state_, b_t, options_);
    py::dict out;
    out["decision"] = round.decision;
    out["t"] = round.trace.t;
    out["drift"] = round.trace.drift;
    out["drift_threshold"] = round.trace.drift_threshold;
    out["decrement"] = round.trace.final_decrement;
    out["certified"] = round.trace.certified;
    out["eta"] = round.trace.eta;
    return out;
  }

  Vec x() const { return state_.y.x; }
  double eta() const { return state_.eta; }
  int round() const { return state_.round; }
  double beta() const { return state_.beta; }
  double decrement() const { return state_.last_decrement; }

 private:
  ConicProblem problem_;
  SolverOptions options_;
  SolverState state_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Online interior-point tracking for time-varying conic programs";

  spdlog::set_default_logger(spdlog::stderr_color_mt("oipm"));
  const char* env_level = std::getenv("OIPM_LOG");
  spdlog::set_level(spdlog::level::warn);
  if (env_level) {
    try {
      set_log_level(env_level);
    } catch (const InvalidArgument&) {
    }
  }
  m.def("set_log_level", &set_log_level, py::arg("level"));

  static py::exception<Error> base_error(m, "OipmError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base_error.ptr());
  py::register_exception<InfeasibleStart>(m, "InfeasibleStart", base_error.ptr());
  py::register_exception<DomainViolation>(m, "DomainViolation", base_error.ptr());
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", base_error.ptr());
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base_error.ptr());
  py::register_exception<DisconnectedNetwork>(m, "DisconnectedNetwork", base_error.ptr());

  py::class_<BarrierTerm>(m, "BarrierTerm")
      .def_static("affine", &BarrierTerm::affine, py::arg("a"), py::arg("offset"))
      .def_static("quadratic", &BarrierTerm::quadratic, py::arg("Q"), py::arg("q"),
                  py::arg("r"))
      .def_static("soc", &BarrierTerm::soc, py::arg("U"), py::arg("u0"), py::arg("w"),
                  py::arg("w0"))
      .def_property_readonly("kind", [](const BarrierTerm& t) { return to_string(t.kind()); })
      .def_property_readonly("dim", &BarrierTerm::dim)
      .def_property_readonly("complexity", &BarrierTerm::complexity)
      .def("constraint_value", &BarrierTerm::constraint_value)
      .def("is_interior", &BarrierTerm::is_interior)
      .def("value", &BarrierTerm::value)
      .def("gradient",
           [](const BarrierTerm& t, const Vec& x) {
             Vec g = Vec::Zero(x.size());
             t.accumulate(x, &g, nullptr);
             return g;
           })
      .def("hessian", [](const BarrierTerm& t, const Vec& x) {
        Mat H = Mat::Zero(x.size(), x.size());
        t.accumulate(x, nullptr, &H);
        return H;
      });

  py::class_<ConicProblem>(m, "ConicProblem")
      .def(py::init([](const Vec& c, const Mat& A, std::vector<BarrierTerm> terms) {
             return ConicProblem(c, A, BarrierAggregate(c.size(), std::move(terms)));
           }),
           py::arg("c"), py::arg("A"), py::arg("terms"))
      .def_property_readonly("n", &ConicProblem::n)
      .def_property_readonly("p", &ConicProblem::p)
      .def_property_readonly("c", &ConicProblem::c)
      .def_property_readonly("A", &ConicProblem::A)
      .def_property_readonly("complexity", &ConicProblem::complexity)
      .def_property_readonly("terms",
                             [](const ConicProblem& p) { return p.barrier().terms(); })
      .def("objective", &ConicProblem::objective)
      .def("equality_residual", &ConicProblem::equality_residual)
      .def("is_interior",
           [](const ConicProblem& p, const Vec& x) { return p.barrier().is_interior(x); })
      .def("barrier_value",
           [](const ConicProblem& p, const Vec& x) { return p.barrier().value(x); })
      .def("barrier_gradient",
           [](const ConicProblem& p, const Vec& x) { return p.barrier().gradient(x); })
      .def("barrier_hessian",
           [](const ConicProblem& p, const Vec& x) { return p.barrier().hessian(x); });

  m.def("problem_to_json",
        [](const ConicProblem& p, std::optional<Vec> b) {
          return problem_to_json(p, b ? &*b : nullptr);
        },
        py::arg("problem"), py::arg("b") = py::none());
  m.def("parse_problem",
        [](const std::string& text) {
          auto parsed = parse_problem(text);
          return py::make_tuple(parsed.problem, parsed.b);
        },
        "Returns (problem, b); b is empty when the document has none.");

  m.def("make_synthetic",
        [](const std::string& kind, int n, int p, int cones, std::uint64_t seed) {
          SyntheticSpec spec{kind, n, p, cones, seed};
          auto inst = make_synthetic(spec);
          return py::make_tuple(inst.problem, inst.x_interior, inst.b0);
        },
        py::arg("kind") = "lp", py::arg("n") = 8, py::arg("p") = 3, py::arg("cones") = 2,
        py::arg("seed") = 1, "Returns (problem, x_interior, b0).");

  m.def("newton_step",
        [](const ConicProblem& p, const Vec& x, const Vec& nu, double eta, const Vec& b,
           const std::string& solver) {
          StepOptions opts;
          opts.solver = parse_solver(solver);
          const auto s = newton_step(p, {x, nu}, eta, b, opts);
          py::dict out;
          out["dx"] = s.dx(p.n());
          out["dnu"] = s.dnu(p.n());
          out["decrement"] = s.decrement;
          out["equality_residual"] = s.equality_residual_norm;
          return out;
        },
        py::arg("problem"), py::arg("x"), py::arg("nu"), py::arg("eta"), py::arg("b"),
        py::arg("solver") = "ldlt");
  m.def("newton_decrement",
        [](const ConicProblem& p, const Vec& x, const Vec& nu, double eta, const Vec& b) {
          return newton_decrement(p, {x, nu}, eta, b);
        },
        py::arg("problem"), py::arg("x"), py::arg("nu"), py::arg("eta"), py::arg("b"));
  m.def("estimate_min_singular_value",
        [](const ConicProblem& p, const Vec& x) { return estimate_min_singular_value(p, x); });
  m.def("drift_threshold", &drift_threshold, py::arg("m"));

  m.def("offline_center",
        [](const ConicProblem& p, const Vec& b, double tol, std::optional<double> eta_target,
           double growth) {
          OracleOptions opts;
          opts.tol = tol;
          opts.eta_target = eta_target;
          opts.growth = growth;
          const auto r = offline_center(p, b, opts);
          py::dict out;
          out["x"] = r.y.x;
          out["nu"] = r.y.nu;
          out["eta"] = r.eta;
          out["gap_bound"] = r.gap_bound;
          out["objective"] = p.objective(r.y.x);
          out["decrement"] = r.decrement;
          return out;
        },
        py::arg("problem"), py::arg("b"), py::arg("tol") = 1e-8,
        py::arg("eta_target") = py::none(), py::arg("growth") = 4.0);

  py::class_<OnlineSolver>(m, "OnlineSolver")
      .def(py::init<ConicProblem, const Vec&, const std::string&, double, double, double,
                    double, double>(),
           py::arg("problem"), py::arg("b0"), py::arg("algorithm") = "oipm_tec",
           py::arg("eta0") = 1.0, py::arg("beta") = 0.0, py::arg("epsilon") = 0.015,
           py::arg("eta_fixed") = 0.0,
           py::arg("eta_max") = std::numeric_limits<double>::infinity())
      .def("step", &OnlineSolver::step, py::arg("b_t"))
      .def_property_readonly("x", &OnlineSolver::x)
      .def_property_readonly("eta", &OnlineSolver::eta)
      .def_property_readonly("beta", &OnlineSolver::beta)
      .def_property_readonly("round", &OnlineSolver::round)
      .def_property_readonly("decrement", &OnlineSolver::decrement);

  py::class_<opf::NetworkCase>(m, "NetworkCase")
      .def_readonly("name", &opf::NetworkCase::name)
      .def_readonly("buses", &opf::NetworkCase::buses)
      .def("to_json", [](const opf::NetworkCase& c) { return opf::case_to_json(c); });
  m.def("load_case", &opf::load_case, py::arg("path"));
  m.def("parse_case", &opf::parse_case, py::arg("json_text"));

  py::class_<opf::OpfEncoding>(m, "OpfEncoding")
      .def_readonly("network", &opf::OpfEncoding::network)
      .def_readonly("problem", &opf::OpfEncoding::problem)
      .def_readonly("b0", &opf::OpfEncoding::b0)
      .def("rhs_for", &opf::OpfEncoding::rhs_for, py::arg("load_p_offsets_mw"))
      .def("decode",
           [](const opf::OpfEncoding& enc, const Vec& x) {
             const auto sol = opf::decode(enc, x);
             py::dict out;
             out["p_mw"] = sol.p_mw;
             out["q_mvar"] = sol.q_mvar;
             out["w_diag"] = sol.w_diag;
             out["cost"] = sol.cost;
             return out;
           })
      .def("check_constraints", [](const opf::OpfEncoding& enc, const Vec& x, const Vec& b) {
        const auto r = opf::check_constraints(enc, x, b);
        py::dict out;
        out["balance"] = r.balance;
        out["generation"] = r.generation;
        out["voltage"] = r.voltage;
        out["line_flow"] = r.line_flow;
        out["relaxation_cone"] = r.relaxation_cone;
        out["cost_epigraph"] = r.cost_epigraph;
        out["relaxation_gap"] = r.relaxation_gap;
        out["worst"] = r.worst();
        return out;
      });
  m.def("build_encoding", &opf::build_encoding, py::arg("network"));

  m.def("check_suites", &check_suites);
  m.def("run_check",
        [](const std::string& suite) {
          std::string text;
          {
            py::gil_scoped_release release;
            text = run_check_suite(suite).to_json();
          }
          return json_loads(text);
        },
        py::arg("suite"), "Runs a property-check suite and returns its report as a dict.");

  m.def("run_experiment",
        [](const std::string& config_json, const std::string& base_dir,
           std::optional<std::string> output_dir) {
          std::optional<ExperimentResult> holder;
          {
            py::gil_scoped_release release;
            const auto cfg = parse_config(config_json, base_dir);
            holder.emplace(run_experiment(cfg));
            if (output_dir) write_artifacts(*holder, *output_dir);
          }
          const ExperimentResult& result = *holder;
          py::dict out;
          out["summary"] = json_loads(summary_json(result.summary));
          std::vector<double> obj, obj_opt, regret, eq, ineq, eta;
          for (const auto& r : result.records) {
            obj.push_back(r.obj);
            obj_opt.push_back(r.obj_opt);
            regret.push_back(r.regret_inc);
            eq.push_back(r.eq_viol);
            ineq.push_back(r.ineq_viol);
            eta.push_back(r.eta);
          }
          out["obj"] = obj;
          out["obj_opt"] = obj_opt;
          out["regret_inc"] = regret;
          out["eq_viol"] = eq;
          out["ineq_viol"] = ineq;
          out["eta"] = eta;
          return out;
        },
        py::arg("config_json"), py::arg("base_dir") = ".",
        py::arg("output_dir") = py::none());
}
