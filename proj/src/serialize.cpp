#include "oipm/serialize.hpp"

#include "oipm/errors.hpp"

#include <nlohmann/json.hpp>

#include <set>

namespace oipm {

namespace {

using json = nlohmann::json;

json vec_json(const Vec& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json mat_json(const Mat& M) {
  json out = json::array();
  for (Index i = 0; i < M.rows(); ++i) out.push_back(vec_json(M.row(i).transpose()));
  return out;
}

const json& field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key))
    throw ConfigError(std::string("problem: missing key '") + key + "'");
  return obj.at(key);
}

double number(const json& v, const char* what) {
  if (!v.is_number()) throw ConfigError(std::string("problem: '") + what + "' must be a number");
  return v.get<double>();
}

Vec parse_vec(const json& v, const char* what) {
  if (!v.is_array()) throw ConfigError(std::string("problem: '") + what + "' must be an array");
  Vec out(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Index>(i)) = number(v[i], what);
  return out;
}

Mat parse_mat(const json& v, Index cols, const char* what) {
  if (!v.is_array()) throw ConfigError(std::string("problem: '") + what + "' must be an array");
  Mat out(static_cast<Index>(v.size()), cols);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec row = parse_vec(v[i], what);
    if (row.size() != cols)
      throw ConfigError(std::string("problem: row length mismatch in '") + what + "'");
    out.row(static_cast<Index>(i)) = row.transpose();
  }
  return out;
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed) {
  for (const auto& item : obj.items())
    if (!allowed.count(item.key()))
      throw ConfigError("problem: unknown key '" + item.key() + "'");
}

}  // namespace

std::string problem_to_json(const ConicProblem& problem, const Vec* b) {
  json doc;
  doc["n"] = problem.n();
  doc["c"] = vec_json(problem.c());
  doc["A"] = mat_json(problem.A());
  if (b) doc["b"] = vec_json(*b);
  doc["terms"] = json::array();
  for (const auto& term : problem.barrier().terms()) {
    switch (term.kind()) {
      case TermKind::AffineIneq:
        doc["terms"].push_back(
            {{"kind", "affine"}, {"a", vec_json(term.a())}, {"offset", term.offset()}});
        break;
      case TermKind::ConvexQuadIneq:
        doc["terms"].push_back({{"kind", "quadratic"},
                                {"Q", mat_json(term.Q())},
                                {"q", vec_json(term.q())},
                                {"r", term.r()}});
        break;
      case TermKind::SecondOrderCone:
        doc["terms"].push_back({{"kind", "soc"},
                                {"U", mat_json(term.U())},
                                {"u0", vec_json(term.u0())},
                                {"w", vec_json(term.w())},
                                {"w0", term.w0()}});
        break;
    }
  }
  // nlohmann writes doubles with round-trip precision.
  return doc.dump(1);
}

ParsedProblem parse_problem(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("problem: ") + e.what());
  }
  reject_unknown(doc, {"n", "c", "A", "b", "terms"});
  const json& n_field = field(doc, "n");
  if (!n_field.is_number_integer() || n_field.get<long long>() <= 0)
    throw ConfigError("problem: 'n' must be a positive integer");
  const Index n = n_field.get<Index>();

  Vec c = parse_vec(field(doc, "c"), "c");
  Mat A = parse_mat(field(doc, "A"), n, "A");
  std::vector<BarrierTerm> terms;
  for (const auto& t : field(doc, "terms")) {
    const std::string kind = field(t, "kind").is_string() ? t["kind"].get<std::string>() : "";
    if (kind == "affine") {
      reject_unknown(t, {"kind", "a", "offset"});
      terms.push_back(BarrierTerm::affine(parse_vec(field(t, "a"), "a"),
                                          number(field(t, "offset"), "offset")));
    } else if (kind == "quadratic") {
      reject_unknown(t, {"kind", "Q", "q", "r"});
      terms.push_back(BarrierTerm::quadratic(parse_mat(field(t, "Q"), n, "Q"),
                                             parse_vec(field(t, "q"), "q"),
                                             number(field(t, "r"), "r")));
    } else if (kind == "soc") {
      reject_unknown(t, {"kind", "U", "u0", "w", "w0"});
      terms.push_back(BarrierTerm::soc(parse_mat(field(t, "U"), n, "U"),
                                       parse_vec(field(t, "u0"), "u0"),
                                       parse_vec(field(t, "w"), "w"),
                                       number(field(t, "w0"), "w0")));
    } else {
      throw ConfigError("problem: unknown term kind '" + kind + "'");
    }
  }
  ParsedProblem out{ConicProblem(std::move(c), std::move(A), BarrierAggregate(n, std::move(terms))),
                    Vec()};
  if (doc.contains("b")) out.b = parse_vec(doc["b"], "b");
  if (out.b.size() != 0 && out.b.size() != out.problem.p())
    throw DimensionMismatch("problem: 'b' length differs from the rows of A");
  return out;
}

}  // namespace oipm
