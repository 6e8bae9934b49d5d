#pragma once

#include <array>

namespace clipmu {

struct ErfFamily {
  double erf;
  double erfc;
  double scaled_erfc;  // exp(z^2) * erfc(z)
};

[[nodiscard]] ErfFamily erf_family(double z);

/// exp(z^2) * erfc(z). Finite for every z >= 0; may overflow for z < -26.
[[nodiscard]] double erfcx(double z);

/// Standard normal CDF and its logarithm. log_ndtr is accurate deep into the
/// lower tail (continued-fraction Mills ratio below -8).
[[nodiscard]] double ndtr(double z);
[[nodiscard]] double log_ndtr(double z);

/// Standard normal quantile (Wichura AS241), p in (0, 1).
[[nodiscard]] double ndtri(double p);

/// P(X <= xi) for X ~ N(mean, var). A zero variance gives the step
/// 1[xi >= mean].
[[nodiscard]] double phi1(double xi, double mean, double var);

/// P(X < xi). Identical to phi1 unless var == 0, where the step is 1[xi > mean].
[[nodiscard]] double phi1_strict(double xi, double mean, double var);

/// log P(X <= xi) (or log P(X < xi) when `strict`); -inf for an empty step.
[[nodiscard]] double log_phi1(double xi, double mean, double var, bool strict = false);

/// exp(log_amp) * phi1(xi, mean, var) without forming exp(log_amp) on its own.
[[nodiscard]] double stable_exp_phi1(double log_amp, double xi, double mean, double var);

/// As stable_exp_phi1 but with the strict-inequality step for var == 0.
[[nodiscard]] double stable_exp_phi1_strict(double log_amp, double xi, double mean, double var);

/// One bivariate normal CDF request: P(a1 <= upper1, a2 <= upper2) for
/// a ~ N(mean, cov). `strict[i]` turns coordinate i into a strict inequality;
/// it only matters when that coordinate has zero variance.
struct GaussianPairSpec {
  std::array<double, 2> upper{};
  std::array<double, 2> mean{};
  std::array<std::array<double, 2>, 2> cov{};
  std::array<bool, 2> strict{false, false};
};

struct Phi2Tolerances {
  /// 1 - |rho| at or below which the exact line-mass reductions are used.
  double rho_degenerate = 1e-14;
  /// A row with var <= var_degenerate * (upper - mean)^2 is treated as a step.
  double var_degenerate = 1e-14;
  /// Allowed excess of |cov01| over sqrt(cov00 * cov11), relative to max(1, that root).
  double psd_slack = 1e-9;
};

[[nodiscard]] double phi2(const GaussianPairSpec& spec, const Phi2Tolerances& tol = {});

/// log of phi2, keeping relative accuracy for tail probabilities far below
/// the absolute accuracy of phi2.
[[nodiscard]] double log_phi2(const GaussianPairSpec& spec, const Phi2Tolerances& tol = {});

/// exp(log_amp) * phi2(spec), finite whenever the product is representable.
[[nodiscard]] double stable_exp_phi2(double log_amp, const GaussianPairSpec& spec,
                                     const Phi2Tolerances& tol = {});

/// P(X <= z1, Y <= z2) for standard normals with correlation rho, |rho| <= 1.
/// Genz's Gauss-Legendre evaluation of the Drezner-Wesolowsky correlation
/// integral, 6/12/20 nodes by |rho| band.
[[nodiscard]] double bvn_lower(double z1, double z2, double rho);

}  // namespace clipmu
