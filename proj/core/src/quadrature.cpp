#include "clipmu/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace clipmu {
namespace {

constexpr int kMaxOrder = 512;

// Newton iteration on orthonormal Hermite functions psi_j(t) = p_j(t) e^{-t^2/2}
// (weight e^{-t^2}), started from the usual asymptotic guesses for the
// largest roots. Extended precision keeps the tail weights accurate.
GaussHermiteNodes compute_rule(int n) {
  using real = long double;
  const real pi_m4 = 0.7511255444649424828587030047762276930510L;  // pi^{-1/4}
  std::vector<real> roots(static_cast<std::size_t>(n));
  std::vector<real> w(static_cast<std::size_t>(n));
  const int m = (n + 1) / 2;
  real z = 0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(static_cast<real>(2 * n + 1)) -
          1.85575L * std::pow(static_cast<real>(2 * n + 1), -1.0L / 6.0L);
    } else if (i == 1) {
      z -= 1.14L * std::pow(static_cast<real>(n), 0.426L) / z;
    } else if (i == 2) {
      z = 1.86L * z - 0.86L * roots[0];
    } else if (i == 3) {
      z = 1.91L * z - 0.91L * roots[1];
    } else {
      z = 2.0L * z - roots[static_cast<std::size_t>(i - 2)];
    }
    real psi_prev = 0;
    real deriv = 1;
    for (int it = 0; it < 100; ++it) {
      real p1 = pi_m4 * std::exp(-z * z / 2);
      real p2 = 0;
      for (int j = 1; j <= n; ++j) {
        const real p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0L / j) * p2 - std::sqrt(static_cast<real>(j - 1) / j) * p3;
      }
      psi_prev = p2;
      deriv = std::sqrt(static_cast<real>(2 * n)) * p2 - z * p1;
      const real step = p1 / deriv;
      z -= step;
      if (std::abs(step) <= 1e-17L * (1 + std::abs(z))) break;
    }
    roots[static_cast<std::size_t>(i)] = z;
    roots[static_cast<std::size_t>(n - 1 - i)] = -z;
    // w = 2 / (sqrt(2n) p_{n-1}(z))^2 for weight e^{-t^2}, then / sqrt(pi).
    const real weight = std::exp(-z * z) / (static_cast<real>(n) * psi_prev * psi_prev) /
                        std::sqrt(std::numbers::pi_v<real>);
    w[static_cast<std::size_t>(i)] = weight;
    w[static_cast<std::size_t>(n - 1 - i)] = weight;
  }

  GaussHermiteNodes rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  // Ascending nodes; weight-e^{-t^2} root r maps to standard-normal node sqrt(2) r.
  for (int i = 0; i < n; ++i) {
    const auto src = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[static_cast<std::size_t>(i)] =
        static_cast<double>(std::numbers::sqrt2_v<real> * roots[src]);
    rule.weights[static_cast<std::size_t>(i)] = static_cast<double>(w[src]);
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

}  // namespace

void QuadratureRule::validate() const {
  if (order < 1 || order > kMaxOrder) {
    throw std::invalid_argument("quadrature order must lie in [1, 512], got " +
                                std::to_string(order));
  }
  if (adaptive && (max_order < order || max_order > kMaxOrder)) {
    throw std::invalid_argument("quadrature max_order must lie in [order, 512]");
  }
  if (!(target_abs_tol > 0.0)) {
    throw std::invalid_argument("quadrature target_abs_tol must be positive");
  }
}

const GaussHermiteNodes& gauss_hermite(int order) {
  if (order < 1 || order > kMaxOrder) {
    throw std::invalid_argument("gauss_hermite: order must lie in [1, 512]");
  }
  static std::mutex mu;
  static std::map<int, std::unique_ptr<const GaussHermiteNodes>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<const GaussHermiteNodes>(compute_rule(order));
  return *slot;
}

Expectation gaussian_expectation(const std::function<double(double)>& f, double mean,
                                 double sigma, const QuadratureRule& rule) {
  rule.validate();
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("gaussian_expectation: sigma must be positive");
  }
  auto apply = [&](int order) {
    const GaussHermiteNodes& gh = gauss_hermite(order);
    double acc = 0.0;
    for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
      if (gh.weights[i] == 0.0) continue;
      acc += gh.weights[i] * f(mean + sigma * gh.nodes[i]);
    }
    return acc;
  };

  int order = rule.order;
  double estimate = apply(order);
  if (!rule.adaptive) return {estimate, order, true};
  while (true) {
    const int next = std::min(2 * order, rule.max_order);
    if (next <= order) return {estimate, order, false};
    const double refined = apply(next);
    if (std::abs(refined - estimate) <= rule.target_abs_tol) return {refined, next, true};
    estimate = refined;
    order = next;
  }
}

}  // namespace clipmu
