#pragma once

#include "oipm/problem.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace oipm {

/// Seeded generator with portable uniform and normal draws (the standard
/// distributions are implementation-defined, this is not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  Vec uniform_vec(Index n, double lo, double hi);
  Vec normal_vec(Index n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct SyntheticSpec {
  /// "lp": box constraints only; "socp": boxes plus ball cones;
  /// "mixed": boxes, cones and one convex quadratic.
  std::string kind = "lp";
  int n = 8;
  int p = 3;
  int cones = 2;
  std::uint64_t seed = 1;
};

struct SyntheticInstance {
  ConicProblem problem;
  /// A strictly interior point with A x = b0.
  Vec x_interior;
  Vec b0;
};

/// Random bounded instance with a known strictly feasible point.
SyntheticInstance make_synthetic(const SyntheticSpec& spec);

/// b_t = b_{t−1} + (scale/√t)·ζ_t/√P with ζ_t uniform on [−1, 1]^P, so
/// ‖b_t − b_{t−1}‖ ≤ scale/√t. Returns b_0 … b_T.
std::vector<Vec> drift_stream(const Vec& b0, int horizon, double scale,
                              Rng& rng);

}  // namespace oipm
