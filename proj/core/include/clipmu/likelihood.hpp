#pragma once

#include <array>
#include <span>

#include "clipmu/model.hpp"
#include "clipmu/special_functions.hpp"

namespace clipmu {

/// Which clipped moment is being evaluated: over the joint law of (y, x),
/// over y given x, or over the prior of x.
enum class Family { kJoint, kConditional, kPrior };

[[nodiscard]] const char* to_string(Family f) noexcept;

/// Re{a^H b}
[[nodiscard]] double re_inner(std::span<const Complex> a, std::span<const Complex> b);
[[nodiscard]] double squared_norm(std::span<const Complex> a);

/// d(x, h) = g(x + h) - g(x)
[[nodiscard]] ComplexVector diff(const ProblemSpec& spec, double x, double h);

/// ||d||^2 / sigma_v^2 + x h / sigma_x^2 + h^2 / (2 sigma_x^2)
[[nodiscard]] double b_joint(const ProblemSpec& spec, double x, double h);
/// ||d||^2 / sigma_v^2
[[nodiscard]] double b_cond(const ProblemSpec& spec, double x, double h);
/// x h / sigma_x^2 + h^2 / (2 sigma_x^2)
[[nodiscard]] double b_prior(const ProblemSpec& spec, double x, double h);

/// A likelihood ratio carried in the log domain. `value` is +inf with
/// `overflow` set when exp(log_value) is not representable.
struct LikelihoodRatio {
  double log_value = 0.0;
  double value = 1.0;
  bool overflow = false;

  static LikelihoodRatio from_log(double log_value);
};

/// L(y, x+h, x) with y = g(x) + v.
[[nodiscard]] LikelihoodRatio ratio_joint(const ProblemSpec& spec, std::span<const Complex> v,
                                          double x, double h);
/// L1(y, x+h, x) with y = g(x) + v.
[[nodiscard]] LikelihoodRatio ratio_cond(const ProblemSpec& spec, std::span<const Complex> v,
                                         double x, double h);
/// L2(x+h, x).
[[nodiscard]] LikelihoodRatio ratio_prior(const ProblemSpec& spec, double x, double h);

/// Squared norms and real cross product of d(x,h1), d(x,h2).
struct PairGeometry {
  ComplexVector d1;
  ComplexVector d2;
  double nd1sq = 0.0;
  double nd2sq = 0.0;
  double cross = 0.0;
};

[[nodiscard]] PairGeometry pair_geometry(const ProblemSpec& spec, double x, double h1, double h2);

/// Quadrant roles. V1: both factors clipped at one. V2: only the second
/// factor below one. V3: only the first. V4: both.
enum class Quadrant { kV1 = 0, kV2 = 1, kV3 = 2, kV4 = 3 };

/// One addend exp(log_amp) * Phi2(gauss). For the joint family the addend is
/// further averaged over x ~ N(outer_mean, sigma_x^2).
struct QuadrantTerm {
  Quadrant which = Quadrant::kV1;
  double log_amp = 0.0;
  GaussianPairSpec gauss;
  double outer_mean = 0.0;
};

using QuadrantTerms = std::array<QuadrantTerm, 4>;

/// Integrand terms of the joint moment at state x. A negative s_i flips the
/// orientation of coordinate i (its clipped half-space is then a_i <= t_i),
/// so for s_i < 0 the V1/V4 covariance carries the Gamma-bar sign pattern.
[[nodiscard]] QuadrantTerms quadrant_terms_joint(const ProblemSpec& spec, double x,
                                                 const TestPoint& tp);
[[nodiscard]] QuadrantTerms quadrant_terms_cond(const ProblemSpec& spec, double x,
                                                const TestPoint& tp);
[[nodiscard]] QuadrantTerms quadrant_terms_prior(const ProblemSpec& spec, const TestPoint& tp);

/// Same terms built from a precomputed geometry (used inside quadrature loops).
[[nodiscard]] QuadrantTerms quadrant_terms_joint(const ProblemSpec& spec, double x,
                                                 const TestPoint& tp, const PairGeometry& geo);

}  // namespace clipmu
