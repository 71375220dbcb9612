#pragma once

#include "oipm/problem.hpp"

#include <string>

namespace oipm {

/// JSON problem schema:
///   {"n": N, "c": [...], "A": [[...], ...], "b": [...],
///    "terms": [{"kind": "affine", "a": [...], "offset": β}
///              | {"kind": "quadratic", "Q": [[...]], "q": [...], "r": r}
///              | {"kind": "soc", "U": [[...]], "u0": [...], "w": [...], "w0": w0}]}
/// "b" is optional on input. Doubles are written with 17 significant digits.
std::string problem_to_json(const ConicProblem& problem, const Vec* b = nullptr);

struct ParsedProblem {
  ConicProblem problem;
  Vec b;  // empty when the document has no "b"
};

/// Throws ConfigError on malformed documents, plus whatever ConicProblem and
/// BarrierTerm construction raise.
ParsedProblem parse_problem(const std::string& json_text);

}  // namespace oipm
