#include "oipm/opf.hpp"

#include "oipm/errors.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace oipm::opf {

namespace {

using json = nlohmann::json;

double number(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key))
    throw ConfigError(where + ": missing key '" + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + ": '" + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(where + ": '" + key + "' must be finite");
  return d;
}

int integer(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key))
    throw ConfigError(where + ": missing key '" + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_number_integer())
    throw ConfigError(where + ": '" + key + "' must be an integer");
  return v.get<int>();
}

void only_keys(const json& obj, std::initializer_list<const char*> allowed,
               const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || item.key() == k;
    if (!known) throw ConfigError(where + ": unknown key '" + item.key() + "'");
  }
}

const json& array(const json& obj, const char* key) {
  if (!obj.contains(key) || !obj.at(key).is_array())
    throw ConfigError(std::string("case: '") + key + "' must be an array");
  return obj.at(key);
}

std::map<int, Index> bus_positions(const NetworkCase& network) {
  std::map<int, Index> pos;
  for (std::size_t k = 0; k < network.buses.size(); ++k)
    pos[network.buses[k]] = static_cast<Index>(k);
  return pos;
}

}  // namespace

void NetworkCase::validate() const {
  if (buses.empty()) throw InvalidArgument("case: no buses");
  const auto pos = bus_positions(*this);
  if (pos.size() != buses.size()) throw InvalidArgument("case: duplicate bus id");
  auto check_bus = [&](int id, const std::string& what) {
    if (!pos.count(id))
      throw InvalidArgument("case: " + what + " refers to unknown bus " +
                            std::to_string(id));
  };
  if (generators.empty()) throw InvalidArgument("case: no generators");
  for (const auto& g : generators) {
    check_bus(g.bus, "generator");
    if (g.a < 0.0) throw InvalidArgument("case: generator cost a must be >= 0");
    if (!(g.pmin < g.pmax) || !(g.qmin < g.qmax))
      throw InvalidArgument("case: generator limits must satisfy min < max");
  }
  for (const auto& l : loads) check_bus(l.bus, "load");
  if (!(vmin > 0.0) || !(vmin < vmax))
    throw InvalidArgument("case: need 0 < vmin < vmax");
  if (!(base_mva > 0.0)) throw InvalidArgument("case: base_mva must be > 0");
  if (base_kv && !(*base_kv > 0.0)) throw InvalidArgument("case: base_kv must be > 0");
  for (const auto& l : lines) {
    check_bus(l.from, "line");
    check_bus(l.to, "line");
    if (l.from == l.to) throw InvalidArgument("case: line with equal endpoints");
    if (l.g == 0.0 && l.b_susceptance == 0.0)
      throw InvalidArgument("case: line admittance is zero");
    if (!(l.k_max > 0.0)) throw InvalidArgument("case: line k_max must be > 0");
  }

  // Breadth-first reachability over the line graph.
  std::vector<std::vector<Index>> adj(buses.size());
  for (const auto& l : lines) {
    adj[static_cast<std::size_t>(pos.at(l.from))].push_back(pos.at(l.to));
    adj[static_cast<std::size_t>(pos.at(l.to))].push_back(pos.at(l.from));
  }
  std::vector<bool> seen(buses.size(), false);
  std::vector<Index> frontier{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const Index k = frontier.back();
    frontier.pop_back();
    for (Index nb : adj[static_cast<std::size_t>(k)]) {
      if (seen[static_cast<std::size_t>(nb)]) continue;
      seen[static_cast<std::size_t>(nb)] = true;
      ++reached;
      frontier.push_back(nb);
    }
  }
  if (reached != buses.size())
    throw DisconnectedNetwork("case: " + std::to_string(buses.size() - reached) +
                              " of " + std::to_string(buses.size()) +
                              " buses are not connected to bus " +
                              std::to_string(buses.front()));
}

std::complex<double> NetworkCase::admittance_pu(const Line& line) const {
  const std::complex<double> y(line.g, line.b_susceptance);
  if (!base_kv) return y;
  return y * (*base_kv * *base_kv / base_mva);
}

NetworkCase parse_case(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("case: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("case: top level must be an object");

  only_keys(doc, {"name", "base_mva", "base_kv", "buses", "generators", "lines", "voltage",
                  "loads"},
            "case");
  NetworkCase out;
  if (doc.contains("name")) {
    if (!doc.at("name").is_string()) throw ConfigError("case: 'name' must be a string");
    out.name = doc.at("name").get<std::string>();
  }
  if (doc.contains("base_mva")) out.base_mva = number(doc, "base_mva", "case");
  if (doc.contains("base_kv")) out.base_kv = number(doc, "base_kv", "case");
  for (const auto& b : array(doc, "buses")) {
    only_keys(b, {"id"}, "bus");
    out.buses.push_back(integer(b, "id", "bus"));
  }
  for (const auto& g : array(doc, "generators")) {
    only_keys(g, {"bus", "a", "b", "pmin", "pmax", "qmin", "qmax"}, "generator");
    out.generators.push_back({integer(g, "bus", "generator"),
                              number(g, "a", "generator"), number(g, "b", "generator"),
                              number(g, "pmin", "generator"),
                              number(g, "pmax", "generator"),
                              number(g, "qmin", "generator"),
                              number(g, "qmax", "generator")});
  }
  for (const auto& l : array(doc, "lines")) {
    only_keys(l, {"from", "to", "g", "b_susceptance", "k_max"}, "line");
    out.lines.push_back({integer(l, "from", "line"), integer(l, "to", "line"),
                         number(l, "g", "line"), number(l, "b_susceptance", "line"),
                         number(l, "k_max", "line")});
  }
  if (!doc.contains("voltage")) throw ConfigError("case: missing key 'voltage'");
  only_keys(doc.at("voltage"), {"vmin", "vmax"}, "voltage");
  out.vmin = number(doc.at("voltage"), "vmin", "voltage");
  out.vmax = number(doc.at("voltage"), "vmax", "voltage");
  for (const auto& l : array(doc, "loads")) {
    only_keys(l, {"bus", "p", "q"}, "load");
    out.loads.push_back({integer(l, "bus", "load"), number(l, "p", "load"),
                         number(l, "q", "load")});
  }
  out.validate();
  return out;
}

NetworkCase load_case(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("case: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_case(ss.str());
}

std::string case_to_json(const NetworkCase& network) {
  json doc;
  if (!network.name.empty()) doc["name"] = network.name;
  doc["base_mva"] = network.base_mva;
  if (network.base_kv) doc["base_kv"] = *network.base_kv;
  doc["buses"] = json::array();
  for (int id : network.buses) doc["buses"].push_back({{"id", id}});
  doc["generators"] = json::array();
  for (const auto& g : network.generators)
    doc["generators"].push_back({{"bus", g.bus}, {"a", g.a}, {"b", g.b},
                                 {"pmin", g.pmin}, {"pmax", g.pmax},
                                 {"qmin", g.qmin}, {"qmax", g.qmax}});
  doc["lines"] = json::array();
  for (const auto& l : network.lines)
    doc["lines"].push_back({{"from", l.from}, {"to", l.to}, {"g", l.g},
                            {"b_susceptance", l.b_susceptance}, {"k_max", l.k_max}});
  doc["voltage"] = {{"vmin", network.vmin}, {"vmax", network.vmax}};
  doc["loads"] = json::array();
  for (const auto& l : network.loads)
    doc["loads"].push_back({{"bus", l.bus}, {"p", l.p}, {"q", l.q}});
  return doc.dump(2);
}

namespace {

Line series_line(int from, int to, double r, double x, double k_max) {
  const std::complex<double> y = 1.0 / std::complex<double>(r, x);
  return {from, to, y.real(), y.imag(), k_max};
}

}  // namespace

NetworkCase two_bus_case() {
  NetworkCase c;
  c.name = "two_bus";
  c.buses = {1, 2};
  c.generators = {{1, 0.01, 10.0, 0.0, 200.0, -100.0, 100.0}};
  c.lines = {series_line(1, 2, 0.01, 0.05, 150.0)};
  c.loads = {{2, 50.0, 20.0}};
  c.vmin = 0.95;
  c.vmax = 1.05;
  return c;
}

NetworkCase five_bus_radial_case() {
  NetworkCase c;
  c.name = "five_bus_radial";
  c.buses = {1, 2, 3, 4, 5};
  c.generators = {{1, 0.02, 12.0, 0.0, 250.0, -150.0, 150.0},
                  {4, 0.05, 18.0, 0.0, 60.0, -40.0, 40.0}};
  c.lines = {series_line(1, 2, 0.02, 0.06, 200.0), series_line(2, 3, 0.03, 0.08, 200.0),
             series_line(3, 4, 0.02, 0.05, 200.0), series_line(2, 5, 0.04, 0.10, 200.0)};
  c.loads = {{2, 40.0, 15.0}, {3, 55.0, 20.0}, {4, 30.0, 10.0}, {5, 25.0, 8.0}};
  c.vmin = 0.94;
  c.vmax = 1.06;
  return c;
}

namespace {

// Coefficients of one end of a line's flow (W_ii − W_ij)γ* in terms of
// (W_ii, Re W_ij, Im W_ij). At the to-end W_ji = conj(W_ij) flips Im.
struct FlowRow {
  double re_diag, re_wr, re_wi;
  double im_diag, im_wr, im_wi;
};

FlowRow flow_coefficients(std::complex<double> y, bool from_side) {
  const double g = y.real(), b = y.imag();
  const double s = from_side ? -1.0 : 1.0;  // sign of Im W in W_ii − W_ij
  // (x + j·s·wi)(g − jb) with x = W_ii − wr.
  return {g, -g, s * b, -b, b, s * g};
}

Vec unit(Index n, Index i) {
  Vec e = Vec::Zero(n);
  e(i) = 1.0;
  return e;
}

}  // namespace

Vec OpfEncoding::full_rhs(const std::vector<double>& p_mw,
                          const std::vector<double>& q_mw) const {
  const Index nb = static_cast<Index>(network.buses.size());
  Vec full(2 * nb);
  for (Index k = 0; k < nb; ++k) {
    full(2 * k) = p_mw[static_cast<std::size_t>(k)] / network.base_mva;
    full(2 * k + 1) = q_mw[static_cast<std::size_t>(k)] / network.base_mva;
  }
  return full;
}

Vec OpfEncoding::reduce(const Vec& full) const {
  Vec out(static_cast<Index>(kept_rows.size()));
  for (std::size_t r = 0; r < kept_rows.size(); ++r)
    out(static_cast<Index>(r)) = full(kept_rows[r]);
  return out;
}

Vec OpfEncoding::rhs_for(const std::vector<double>& load_p_offsets_mw) const {
  if (!load_p_offsets_mw.empty() && load_p_offsets_mw.size() != network.loads.size())
    throw DimensionMismatch("opf: one offset per load expected");
  const auto pos = bus_positions(network);
  std::vector<double> p(network.buses.size(), 0.0), q(network.buses.size(), 0.0);
  for (std::size_t l = 0; l < network.loads.size(); ++l) {
    const auto k = static_cast<std::size_t>(pos.at(network.loads[l].bus));
    p[k] += network.loads[l].p +
            (load_p_offsets_mw.empty() ? 0.0 : load_p_offsets_mw[l]);
    q[k] += network.loads[l].q;
  }
  return reduce(full_rhs(p, q));
}

OpfEncoding build_encoding(const NetworkCase& network) {
  network.validate();
  const auto pos = bus_positions(network);
  const Index ng = static_cast<Index>(network.generators.size());
  const Index nb = static_cast<Index>(network.buses.size());
  const Index nl = static_cast<Index>(network.lines.size());
  const double base = network.base_mva;

  Layout lay;
  Index next = 0;
  lay.s = next++;
  for (Index g = 0; g < ng; ++g) lay.p.push_back(next++);
  for (Index g = 0; g < ng; ++g) lay.q.push_back(next++);
  for (Index k = 0; k < nb; ++k) lay.w_diag.push_back(next++);
  for (Index l = 0; l < nl; ++l) {
    lay.w_re.push_back(next++);
    lay.w_im.push_back(next++);
  }
  lay.size = next;
  const Index n = lay.size;

  std::vector<BarrierTerm> terms;
  EncodingStats stats;

  // Cost epigraph Σ a p² + b p − s ≤ 0 with p in per unit.
  {
    Mat Q = Mat::Zero(n, n);
    Vec q = Vec::Zero(n);
    for (Index g = 0; g < ng; ++g) {
      const auto& gen = network.generators[static_cast<std::size_t>(g)];
      Q(lay.p[g], lay.p[g]) = 2.0 * gen.a * base * base;
      q(lay.p[g]) = gen.b * base;
    }
    q(lay.s) = -1.0;
    terms.push_back(BarrierTerm::quadratic(Q, q, 0.0));
    ++stats.quadratic_terms;
  }
  auto box = [&](Index i, double lo, double hi) {
    terms.push_back(BarrierTerm::affine(-unit(n, i), -lo));
    terms.push_back(BarrierTerm::affine(unit(n, i), hi));
    stats.affine_terms += 2;
  };
  for (Index g = 0; g < ng; ++g) {
    const auto& gen = network.generators[static_cast<std::size_t>(g)];
    box(lay.p[g], gen.pmin / base, gen.pmax / base);
    box(lay.q[g], gen.qmin / base, gen.qmax / base);
  }
  for (Index k = 0; k < nb; ++k)
    box(lay.w_diag[k], network.vmin * network.vmin, network.vmax * network.vmax);

  Mat A_full = Mat::Zero(2 * nb, n);
  for (Index g = 0; g < ng; ++g) {
    const Index k = pos.at(network.generators[static_cast<std::size_t>(g)].bus);
    A_full(2 * k, lay.p[g]) += 1.0;
    A_full(2 * k + 1, lay.q[g]) += 1.0;
  }
  for (Index l = 0; l < nl; ++l) {
    const auto& line = network.lines[static_cast<std::size_t>(l)];
    const auto y = network.admittance_pu(line);
    const Index i = pos.at(line.from), j = pos.at(line.to);
    const Index wii = lay.w_diag[i], wjj = lay.w_diag[j];
    const Index wr = lay.w_re[l], wi = lay.w_im[l];
    for (const auto& [bus, diag, from] : {std::tuple{i, wii, true}, std::tuple{j, wjj, false}}) {
      const FlowRow f = flow_coefficients(y, from);
      A_full(2 * bus, diag) -= f.re_diag;
      A_full(2 * bus, wr) -= f.re_wr;
      A_full(2 * bus, wi) -= f.re_wi;
      A_full(2 * bus + 1, diag) -= f.im_diag;
      A_full(2 * bus + 1, wr) -= f.im_wr;
      A_full(2 * bus + 1, wi) -= f.im_wi;
    }

    // Relaxation cone ‖(2 Re W_ij, 2 Im W_ij, W_ii − W_jj)‖ ≤ W_ii + W_jj.
    Mat U = Mat::Zero(3, n);
    U(0, wr) = 2.0;
    U(1, wi) = 2.0;
    U(2, wii) = 1.0;
    U(2, wjj) = -1.0;
    Vec w = Vec::Zero(n);
    w(wii) = 1.0;
    w(wjj) = 1.0;
    terms.push_back(BarrierTerm::soc(U, Vec::Zero(3), w, 0.0));

    // Line flow ‖(W_ii − W_ij)γ*‖ ≤ k̄ (from side).
    const FlowRow f = flow_coefficients(y, true);
    Mat F = Mat::Zero(2, n);
    F(0, wii) = f.re_diag;
    F(0, wr) = f.re_wr;
    F(0, wi) = f.re_wi;
    F(1, wii) = f.im_diag;
    F(1, wr) = f.im_wr;
    F(1, wi) = f.im_wi;
    terms.push_back(BarrierTerm::soc(F, Vec::Zero(2), Vec::Zero(n), line.k_max / base));
    stats.cone_terms += 2;
  }

  // Keep a maximal independent set of balance rows.
  Eigen::ColPivHouseholderQR<Mat> qr(A_full.transpose());
  qr.setThreshold(1e-10);
  const Index rank = qr.rank();
  std::vector<Index> kept;
  for (Index r = 0; r < rank; ++r) kept.push_back(qr.colsPermutation().indices()(r));
  std::sort(kept.begin(), kept.end());
  std::vector<Index> removed;
  for (Index r = 0; r < 2 * nb; ++r)
    if (!std::binary_search(kept.begin(), kept.end(), r)) removed.push_back(r);

  Mat A(static_cast<Index>(kept.size()), n);
  for (std::size_t r = 0; r < kept.size(); ++r)
    A.row(static_cast<Index>(r)) = A_full.row(kept[r]);

  OpfEncoding enc{network, lay, ConicProblem{}, kept, Vec{}, {}};
  stats.variables = n;
  stats.balance_rows = 2 * nb;
  stats.equality_rows = static_cast<Index>(kept.size());
  stats.removed_rows = removed;

  // A removed row must be implied by the kept rows for the base loads.
  std::vector<double> p0(static_cast<std::size_t>(nb), 0.0), q0 = p0;
  for (const auto& l : network.loads) {
    p0[static_cast<std::size_t>(pos.at(l.bus))] += l.p;
    q0[static_cast<std::size_t>(pos.at(l.bus))] += l.q;
  }
  const Vec full0 = enc.full_rhs(p0, q0);
  if (!removed.empty()) {
    spdlog::info("opf: removed {} redundant balance row(s)", removed.size());
    const Eigen::ColPivHouseholderQR<Mat> kept_qr(A.transpose());
    for (Index r : removed) {
      const Vec lambda = kept_qr.solve(Vec(A_full.row(r).transpose()));
      const double implied = lambda.dot(enc.reduce(full0));
      if (std::abs(implied - full0(r)) > 1e-9 * (1.0 + std::abs(full0(r))))
        throw RankDeficient("opf: balance row " + std::to_string(r) + " (bus " +
                            std::to_string(network.buses[static_cast<std::size_t>(r / 2)]) +
                            ", " + (r % 2 == 0 ? "real" : "imaginary") +
                            ") is dependent on the others but its load is inconsistent");
    }
  }

  Vec c = unit(n, lay.s);
  enc.problem = ConicProblem(c, std::move(A), BarrierAggregate(n, std::move(terms)));
  enc.b0 = enc.reduce(full0);
  stats.complexity = enc.problem.complexity();
  enc.stats = std::move(stats);
  return enc;
}

OpfSolution decode(const OpfEncoding& enc, const Vec& x) {
  if (x.size() != enc.layout.size) throw DimensionMismatch("opf: x has wrong size");
  const auto& net = enc.network;
  OpfSolution out;
  out.s = x(enc.layout.s);
  for (std::size_t g = 0; g < net.generators.size(); ++g) {
    const double p = x(enc.layout.p[g]) * net.base_mva;
    out.p_mw.push_back(p);
    out.q_mvar.push_back(x(enc.layout.q[g]) * net.base_mva);
    out.cost += net.generators[g].a * p * p + net.generators[g].b * p;
  }
  for (Index i : enc.layout.w_diag) out.w_diag.push_back(x(i));
  for (std::size_t l = 0; l < net.lines.size(); ++l)
    out.w_line.emplace_back(x(enc.layout.w_re[l]), x(enc.layout.w_im[l]));
  return out;
}

double ConstraintReport::worst() const {
  return std::max({balance, generation, voltage, line_flow, relaxation_cone,
                   cost_epigraph});
}

ConstraintReport check_constraints(const OpfEncoding& enc, const Vec& x,
                                   const Vec& b) {
  const auto& net = enc.network;
  const auto& lay = enc.layout;
  const auto pos = bus_positions(net);
  const double base = net.base_mva;
  ConstraintReport rep;
  rep.balance = enc.problem.p() > 0
                    ? (enc.problem.A() * x - b).cwiseAbs().maxCoeff()
                    : 0.0;
  const auto sol = decode(enc, x);
  for (std::size_t g = 0; g < net.generators.size(); ++g) {
    const auto& gen = net.generators[g];
    const double p = x(lay.p[g]), q = x(lay.q[g]);
    rep.generation = std::max({rep.generation, gen.pmin / base - p, p - gen.pmax / base,
                               gen.qmin / base - q, q - gen.qmax / base});
  }
  const double lo = net.vmin * net.vmin, hi = net.vmax * net.vmax;
  for (Index i : lay.w_diag)
    rep.voltage = std::max({rep.voltage, lo - x(i), x(i) - hi});
  for (std::size_t l = 0; l < net.lines.size(); ++l) {
    const auto& line = net.lines[l];
    const double wii = x(lay.w_diag[pos.at(line.from)]);
    const double wjj = x(lay.w_diag[pos.at(line.to)]);
    const std::complex<double> wij(x(lay.w_re[l]), x(lay.w_im[l]));
    const double lhs = std::hypot(2.0 * std::abs(wij), wii - wjj);
    rep.relaxation_cone = std::max(rep.relaxation_cone, lhs - (wii + wjj));
    rep.relaxation_gap = std::max(rep.relaxation_gap, std::abs(lhs - (wii + wjj)));
    const double flow = std::abs((wii - wij) * std::conj(net.admittance_pu(line)));
    rep.line_flow = std::max(rep.line_flow, flow - line.k_max / base);
  }
  rep.cost_epigraph = std::max(0.0, sol.cost - sol.s);
  return rep;
}

double LoadStream::b_variation() const {
  double total = 0.0;
  for (std::size_t t = 1; t < b.size(); ++t) total += (b[t] - b[t - 1]).norm();
  return total;
}

LoadStream generate_stream(const OpfEncoding& enc, std::uint64_t seed, int horizon,
                           const LoadRule& rule,
                           const std::function<bool(const Vec&)>& feasible) {
  if (horizon < 1) throw InvalidArgument("stream: horizon must be >= 1");
  if (rule.max_redraws < 0) throw InvalidArgument("stream: max_redraws must be >= 0");
  const std::size_t nloads = enc.network.loads.size();
  LoadStream out;
  out.seed = seed;
  out.horizon = horizon;
  out.b.push_back(enc.b0);
  Rng rng(seed);
  for (int t = 1; t <= horizon; ++t) {
    const double step = rule.scale / std::sqrt(double(t));
    for (int attempt = 0;; ++attempt) {
      std::vector<double> zeta(nloads);
      for (auto& z : zeta) z = rule.zero ? 0.0 : rng.uniform();
      std::vector<double> offsets(nloads);
      for (std::size_t l = 0; l < nloads; ++l) offsets[l] = step * zeta[l];
      Vec b = enc.rhs_for(offsets);
      if (!feasible || feasible(b)) {
        out.zeta.push_back(std::move(zeta));
        out.offsets_mw.push_back(std::move(offsets));
        out.b.push_back(std::move(b));
        break;
      }
      if (attempt >= rule.max_redraws)
        throw PersistentInfeasibility("stream: round " + std::to_string(t) +
                                      " infeasible after " +
                                      std::to_string(rule.max_redraws) + " redraws");
      ++out.redraws;
      spdlog::debug("stream: round {} infeasible, redrawing", t);
    }
  }
  return out;
}

bool has_interior(const ConicProblem& problem, const Vec& b) {
  try {
    phase_one(problem, b);
    return true;
  } catch (const InfeasibleStart&) {
    return false;
  } catch (const NonConvergent&) {
    return false;
  }
}

double default_step(int t) {
  if (t < 1) throw InvalidArgument("step: t must be >= 1");
  return std::pow(double(t), -1.0 / 3.0);
}

Vec project(const ConicProblem& problem, const Vec& z, const Vec& b,
            const OracleOptions& options, Vec* warm) {
  const Index n = problem.n();
  if (z.size() != n) throw DimensionMismatch("project: z has wrong size");
  // min τ  s.t.  ½‖x − z‖² ≤ τ, g_i(x) ⪯ 0, Ax = b  over [x; τ].
  std::vector<BarrierTerm> terms;
  Mat Q = Mat::Zero(n + 1, n + 1);
  Q.topLeftCorner(n, n).setIdentity();
  Vec q(n + 1);
  q << -z, -1.0;
  terms.push_back(BarrierTerm::quadratic(Q, q, 0.5 * z.squaredNorm()));
  for (const auto& term : problem.barrier().terms()) terms.push_back(term.padded(1));
  Mat A = Mat::Zero(problem.p(), n + 1);
  A.leftCols(n) = problem.A();
  Vec c = Vec::Zero(n + 1);
  c(n) = 1.0;
  const ConicProblem lifted(c, A, BarrierAggregate(n + 1, std::move(terms)));
  // Phase one on the lifted problem (τ is unbounded above) lands far out and
  // the first centering crawls. A centered point of the original problem with
  // τ just above ½‖x − z‖² is a deep interior start instead.
  Vec x_start;
  if (warm && warm->size() == n && problem.barrier().is_interior(*warm)) {
    x_start = *warm;
  } else {
    OracleOptions anchor = options;
    anchor.eta_target = 1.0;
    x_start = offline_center(problem, b, anchor).anchor.x;
  }
  OracleResult previous;
  previous.anchor.x.resize(n + 1);
  previous.anchor.x << x_start, 0.5 * (x_start - z).squaredNorm() + 1.0;
  previous.anchor.nu = Vec::Zero(problem.p());
  const OracleResult solved = recenter(lifted, b, previous, options);
  if (warm) *warm = solved.anchor.x.head(n);
  return solved.y.x.head(n);
}

std::vector<Vec> projected_gradient_baseline(const ConicProblem& problem,
                                             const std::vector<Vec>& b_stream,
                                             const Vec& x0,
                                             const BaselineOptions& options) {
  if (b_stream.empty()) throw InvalidArgument("baseline: empty stream");
  if (x0.size() != problem.n()) throw DimensionMismatch("baseline: x0 has wrong size");
  const auto step = options.step ? options.step : default_step;
  const int horizon = static_cast<int>(b_stream.size()) - 1;
  std::vector<Vec> decisions;
  decisions.reserve(static_cast<std::size_t>(horizon));
  Vec x = x0;
  Vec warm;  // filled by the first projection
  for (int t = 1; t <= horizon; ++t) {
    decisions.push_back(x);
    if (t == horizon) break;
    x = project(problem, x - step(t) * problem.c(),
                b_stream[static_cast<std::size_t>(t)], options.projection, &warm);
  }
  return decisions;
}

}  // namespace oipm::opf
