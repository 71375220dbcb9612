#include "oipm/synthetic.hpp"

#include "oipm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace oipm {

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Marsaglia polar method.
  double u, v, s;
  do {
    u = uniform(-1.0, 1.0);
    v = uniform(-1.0, 1.0);
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

Vec Rng::uniform_vec(Index n, double lo, double hi) {
  Vec v(n);
  for (Index i = 0; i < n; ++i) v(i) = uniform(lo, hi);
  return v;
}

Vec Rng::normal_vec(Index n) {
  Vec v(n);
  for (Index i = 0; i < n; ++i) v(i) = normal();
  return v;
}

SyntheticInstance make_synthetic(const SyntheticSpec& spec) {
  if (spec.n < 1 || spec.p < 0 || spec.p >= spec.n)
    throw InvalidArgument("synthetic: need 0 <= p < n");
  if (spec.kind != "lp" && spec.kind != "socp" && spec.kind != "mixed")
    throw InvalidArgument("synthetic: unknown kind '" + spec.kind + "'");
  const Index n = spec.n;
  Rng rng(spec.seed);

  const Vec upper = rng.uniform_vec(n, 1.0, 3.0);
  Vec x_int = upper / 2.0 + rng.uniform_vec(n, -0.1, 0.1);
  std::vector<BarrierTerm> terms;
  for (Index i = 0; i < n; ++i) {
    Vec e = Vec::Zero(n);
    e(i) = 1.0;
    terms.push_back(BarrierTerm::affine(-e, 0.0));       // x_i > 0
    terms.push_back(BarrierTerm::affine(e, upper(i)));   // x_i < u_i
  }
  if (spec.kind != "lp") {
    const Index k = std::min<Index>(3, n);
    for (int j = 0; j < spec.cones; ++j) {
      std::vector<Index> idx(static_cast<std::size_t>(n));
      std::iota(idx.begin(), idx.end(), 0);
      for (Index i = n - 1; i > 0; --i)
        std::swap(idx[static_cast<std::size_t>(i)],
                  idx[static_cast<std::size_t>(rng.next() % (i + 1))]);
      Mat U = Mat::Zero(k, n);
      Vec center(k);
      for (Index r = 0; r < k; ++r) {
        const Index col = idx[static_cast<std::size_t>(r)];
        U(r, col) = 1.0;
        center(r) = x_int(col) + rng.uniform(-0.05, 0.05);
      }
      const double radius = 0.4 * upper.minCoeff();
      terms.push_back(BarrierTerm::soc(U, -center, Vec::Zero(n), radius));
    }
  }
  if (spec.kind == "mixed") {
    const Mat G = rng.normal_vec(n * n).reshaped(n, n) / std::sqrt(double(n));
    Mat Q = G.transpose() * G;
    Q = 0.5 * (Q + Q.transpose()).eval();
    const Vec q = -Q * x_int;
    const double at_int = 0.5 * x_int.dot(Q * x_int) + q.dot(x_int);
    terms.push_back(BarrierTerm::quadratic(Q, q, -at_int - 1.0));
  }

  Mat A = rng.normal_vec(spec.p * n).reshaped(spec.p, n) / std::sqrt(double(n));
  const Vec c = rng.normal_vec(n);
  Vec b0 = A * x_int;
  SyntheticInstance out{ConicProblem(c, A, BarrierAggregate(n, std::move(terms))),
                        x_int, b0};
  return out;
}

std::vector<Vec> drift_stream(const Vec& b0, int horizon, double scale,
                              Rng& rng) {
  if (horizon < 0) throw InvalidArgument("drift_stream: negative horizon");
  std::vector<Vec> stream;
  stream.reserve(static_cast<std::size_t>(horizon) + 1);
  stream.push_back(b0);
  const double norm = b0.size() > 0 ? std::sqrt(double(b0.size())) : 1.0;
  for (int t = 1; t <= horizon; ++t) {
    const Vec zeta = rng.uniform_vec(b0.size(), -1.0, 1.0);
    stream.push_back(stream.back() + (scale / std::sqrt(double(t))) * zeta / norm);
  }
  return stream;
}

}  // namespace oipm
