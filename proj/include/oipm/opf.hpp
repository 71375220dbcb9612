#pragma once

#include "oipm/metrics.hpp"
#include "oipm/synthetic.hpp"

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace oipm::opf {

struct Generator {
  int bus = 0;
  double a = 0.0;  // cost / MW²
  double b = 0.0;  // cost / MW
  double pmin = 0.0, pmax = 0.0;  // MW
  double qmin = 0.0, qmax = 0.0;  // MVAr
};

struct Line {
  int from = 0;
  int to = 0;
  double g = 0.0;              // series conductance
  double b_susceptance = 0.0;  // series susceptance
  double k_max = 0.0;          // apparent-power limit, MVA
};

struct Load {
  int bus = 0;
  double p = 0.0;  // MW
  double q = 0.0;  // MVAr
};

/// Network data. Powers are in MW/MVAr and converted with base_mva. Line
/// admittances are per unit unless base_kv is set, in which case they are in
/// siemens.
struct NetworkCase {
  std::string name;
  std::vector<int> buses;
  std::vector<Generator> generators;
  std::vector<Line> lines;
  std::vector<Load> loads;
  double vmin = 0.95;
  double vmax = 1.05;
  double base_mva = 100.0;
  std::optional<double> base_kv;

  /// Throws InvalidArgument for malformed data and DisconnectedNetwork when
  /// the line graph does not reach every bus.
  void validate() const;
  /// Admittance of a line in per unit.
  std::complex<double> admittance_pu(const Line& line) const;
};

/// Parses the case JSON schema. Throws ConfigError on missing or malformed
/// keys; the returned case is validated.
NetworkCase parse_case(const std::string& json_text);
NetworkCase load_case(const std::string& path);
std::string case_to_json(const NetworkCase& network);

/// Reference networks, identical (to 1e-9) to data/cases/two_bus.json and
/// data/cases/five_bus_radial.json.
NetworkCase two_bus_case();
NetworkCase five_bus_radial_case();

/// Index map of the decision vector
/// x = [s, p_g…, q_g…, W_ii…, (Re W_ij, Im W_ij) per line].
struct Layout {
  Index s = 0;
  std::vector<Index> p;
  std::vector<Index> q;
  std::vector<Index> w_diag;
  std::vector<Index> w_re;
  std::vector<Index> w_im;
  Index size = 0;
};

struct EncodingStats {
  Index variables = 0;
  Index balance_rows = 0;
  Index equality_rows = 0;
  std::vector<Index> removed_rows;
  std::size_t affine_terms = 0;
  std::size_t quadratic_terms = 0;
  std::size_t cone_terms = 0;
  double complexity = 0.0;
};

/// The second-order-cone relaxation as a ConicProblem.
///
/// Balance rows come in (real, imaginary) pairs per bus: for bus i,
///   Σ_g p_g − Σ_lines Re[(W_ii − W_ij) γ*_ij] = p^d_i  (and the same for q),
/// so only b carries the loads. Rows found to be redundant are dropped.
struct OpfEncoding {
  NetworkCase network;
  Layout layout;
  ConicProblem problem;
  /// Rows of the full balance system kept in A (in order).
  std::vector<Index> kept_rows;
  Vec b0;
  EncodingStats stats;

  /// Full balance right-hand side (2|B| entries, p.u.) for per-bus loads in MW.
  Vec full_rhs(const std::vector<double>& p_mw, const std::vector<double>& q_mw) const;
  /// Reduced right-hand side for the kept rows.
  Vec reduce(const Vec& full) const;
  /// b for the case's loads with active-power offsets (one per load, MW).
  Vec rhs_for(const std::vector<double>& load_p_offsets_mw) const;
};

/// Throws DisconnectedNetwork, InvalidArgument or RankDeficient.
OpfEncoding build_encoding(const NetworkCase& network);

struct OpfSolution {
  double s = 0.0;
  std::vector<double> p_mw;
  std::vector<double> q_mvar;
  std::vector<double> w_diag;
  std::vector<std::complex<double>> w_line;
  double cost = 0.0;  // Σ a p² + b p
};

OpfSolution decode(const OpfEncoding& encoding, const Vec& x);

/// Largest violation of each constraint family (p.u.; 0 when satisfied).
struct ConstraintReport {
  double balance = 0.0;
  double generation = 0.0;
  double voltage = 0.0;
  double line_flow = 0.0;
  double relaxation_cone = 0.0;
  double cost_epigraph = 0.0;
  /// Max |‖(2W_ij; W_ii − W_jj)‖ − (W_ii + W_jj)| over lines: 0 when the
  /// relaxation is tight.
  double relaxation_gap = 0.0;

  double worst() const;
};

/// Checks x against the relaxation with loads given by the reduced b.
ConstraintReport check_constraints(const OpfEncoding& encoding, const Vec& x,
                                   const Vec& b);

struct LoadRule {
  /// Δp_{d,t} = scale·ζ/√t, ζ ~ U[0, 1].
  double scale = 0.01;
  /// Replaces every draw with zero (constant stream).
  bool zero = false;
  int max_redraws = 100;
};

struct LoadStream {
  std::uint64_t seed = 0;
  int horizon = 0;
  /// ζ per round (rows t = 1..T) and load.
  std::vector<std::vector<double>> zeta;
  /// Active-power offsets Δp_{d,t} per round and load, MW.
  std::vector<std::vector<double>> offsets_mw;
  /// b_0 … b_T.
  std::vector<Vec> b;
  int redraws = 0;

  double b_variation() const;
};

/// Load perturbation around the base case: p_{d,t} = p_d + Δp_{d,t}. When a
/// feasibility predicate is given, rounds whose b fails it are redrawn (up to
/// rule.max_redraws, then PersistentInfeasibility).
LoadStream generate_stream(const OpfEncoding& encoding, std::uint64_t seed,
                           int horizon, const LoadRule& rule = {},
                           const std::function<bool(const Vec&)>& feasible = {});

/// True when a strictly interior point exists for b.
bool has_interior(const ConicProblem& problem, const Vec& b);

struct BaselineOptions {
  /// Step α_t; defaults to t^{−1/3}.
  std::function<double(int)> step = {};
  OracleOptions projection;
};

/// α_t = t^{−1/3}.
double default_step(int t);

/// Euclidean projection onto {x : g_i(x) ⪯ 0, Ax = b}, computed with the
/// offline oracle on the epigraph of ½‖x − z‖².
///
/// `warm`, when given, holds a strictly interior x (Ax need not equal b) used
/// instead of a phase-one start, and is overwritten with the solve's η = 1
/// anchor for the next call.
Vec project(const ConicProblem& problem, const Vec& z, const Vec& b,
            const OracleOptions& options = {}, Vec* warm = nullptr);

/// Online projected gradient: x_{t+1} = Π_{X_t}(x_t − α_t c). Returns the
/// implemented decisions x_1 … x_T (x_1 = x0).
std::vector<Vec> projected_gradient_baseline(const ConicProblem& problem,
                                             const std::vector<Vec>& b_stream,
                                             const Vec& x0,
                                             const BaselineOptions& options = {});

}  // namespace oipm::opf
