#pragma once

#include "oipm/kkt.hpp"

#include <string>
#include <vector>

namespace oipm {

struct CheckItem {
  std::string name;
  bool passed = false;
  /// Worst observed value and the limit it was held to.
  double value = 0.0;
  double limit = 0.0;
  int trials = 0;
};

struct CheckReport {
  std::string suite;
  std::vector<CheckItem> items;

  bool passed() const;
  std::string to_json() const;
};

/// Suite names accepted by run_check_suite.
const std::vector<std::string>& check_suites();

/// Runs one property battery with fixed seeds. Throws InvalidArgument for an
/// unknown suite.
CheckReport run_check_suite(const std::string& suite);

/// Point on the central path for (η, b), centered to decrement ≤ tol.
PrimalDualPoint central_point(const ConicProblem& problem, const Vec& b, double eta,
                              double tol = 1e-10);

/// η' ≥ η at which the decrement of y for (η', b) equals `target`, by
/// bisection. y must be centered for (η, b) with a smaller decrement.
double eta_for_decrement(const ConicProblem& problem, const PrimalDualPoint& y,
                         double eta, const Vec& b, double target);

}  // namespace oipm
