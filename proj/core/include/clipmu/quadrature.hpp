#pragma once

#include <functional>
#include <vector>

namespace clipmu {

struct QuadratureRule {
  enum class Kind { kGaussHermite };

  Kind kind = Kind::kGaussHermite;
  int order = 32;
  bool adaptive = true;
  double target_abs_tol = 1e-10;
  /// Doubling stops here (inclusive); must lie in [order, 512].
  int max_order = 256;

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

/// Gauss-Hermite rule for the standard normal weight: sum_i w_i f(t_i)
/// approximates E[f(T)], T ~ N(0, 1). Weights sum to one.
struct GaussHermiteNodes {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached, thread-safe; order in [1, 512].
[[nodiscard]] const GaussHermiteNodes& gauss_hermite(int order);

struct Expectation {
  double value = 0.0;
  int order = 0;
  bool converged = true;
};

/// E[f(X)], X ~ N(mean, sigma^2). Summation order over nodes is fixed.
[[nodiscard]] Expectation gaussian_expectation(const std::function<double(double)>& f,
                                               double mean, double sigma,
                                               const QuadratureRule& rule);

}  // namespace clipmu
