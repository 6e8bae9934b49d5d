#pragma once

// Reference implementations used only by the tests. Each one is computed by
// a route that shares no code with the library.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "clipmu/model.hpp"

namespace oracle {

using ld = long double;

/// erf by its Maclaurin series in extended precision; accurate for |z| <= 3.
/// 1 - erf_series(z) cancels badly near z = 3, so use long double erfc for tails.
inline ld erf_series(ld z) {
  ld term = z;
  ld sum = z;
  for (int n = 1; n < 200; ++n) {
    term *= -z * z / n;
    const ld add = term / (2 * n + 1);
    sum += add;
    if (std::abs(add) < 1e-30L * std::abs(sum)) break;
  }
  return 2.0L / std::sqrt(std::numbers::pi_v<ld>) * sum;
}

inline ld ndtr(ld z) { return 0.5L * std::erfc(-z / std::numbers::sqrt2_v<ld>); }

/// log Phi(z) from the asymptotic Mills series, usable for z <= -30.
inline double log_ndtr_asymptotic(double z) {
  const ld t = -static_cast<ld>(z);
  const ld u = 1.0L / (t * t);
  const ld series = 1.0L - u * (1.0L - 3.0L * u * (1.0L - 5.0L * u * (1.0L - 7.0L * u * (1.0L - 9.0L * u))));
  return static_cast<double>(-0.5L * t * t - std::log(t) -
                             0.5L * std::log(2.0L * std::numbers::pi_v<ld>) + std::log(series));
}

/// P(X <= z1, Y <= z2) for standard normals with correlation rho, |rho| < 1,
/// by composite Simpson over the conditional representation.
inline double phi2_simpson(double z1, double z2, double rho, int panels = 40000) {
  const ld s = std::sqrt(1.0L - static_cast<ld>(rho) * rho);
  const ld lo = -12.0L;
  const ld hi = std::min<ld>(z1, 12.0L);
  if (hi <= lo) return 0.0;
  const ld h = (hi - lo) / panels;
  auto f = [&](ld u) {
    return std::exp(-0.5L * u * u) / std::sqrt(2.0L * std::numbers::pi_v<ld>) *
           ndtr((static_cast<ld>(z2) - rho * u) / s);
  };
  ld acc = f(lo) + f(hi);
  for (int i = 1; i < panels; ++i) acc += f(lo + i * h) * (i % 2 == 1 ? 4.0L : 2.0L);
  return static_cast<double>(acc * h / 3.0L);
}

/// Orthant probability P(X <= 0, Y <= 0) = 1/4 + asin(rho) / (2 pi).
inline double orthant(double rho) { return 0.25 + std::asin(rho) / (2.0 * std::numbers::pi); }

/// Log densities written out from their textbook forms.
inline ld log_normal_pdf(ld x, ld mean, ld var) {
  return -0.5L * std::log(2.0L * std::numbers::pi_v<ld> * var) - (x - mean) * (x - mean) / (2 * var);
}

inline ld log_cn_pdf(const clipmu::ComplexVector& y, const clipmu::ComplexVector& mean, ld var) {
  ld q = 0.0L;
  for (std::size_t k = 0; k < y.size(); ++k) {
    const ld re = static_cast<ld>(y[k].real()) - mean[k].real();
    const ld im = static_cast<ld>(y[k].imag()) - mean[k].imag();
    q += re * re + im * im;
  }
  return -static_cast<ld>(y.size()) * std::log(std::numbers::pi_v<ld> * var) - q / var;
}

/// Equal-covariance Gaussian affinity 1 - erf(delta / (2 sqrt 2)).
inline double affinity(double delta) {
  return static_cast<double>(1.0L - erf_series(static_cast<ld>(delta) / (2.0L * std::numbers::sqrt2_v<ld>)));
}

/// Random observation models of all three kinds, kept to moderate SNR.
inline clipmu::ObservationModel random_model(std::mt19937_64& rng, int kind) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> dim(1, 3);
  const int n = dim(rng);
  switch (kind % 3) {
    case 0: {
      std::vector<double> c(n);
      for (double& v : c) v = 1.5 * u(rng);
      return clipmu::ObservationModel::linear(c);
    }
    case 1: {
      std::vector<double> omega(n);
      std::vector<std::complex<double>> alpha(n);
      for (int k = 0; k < n; ++k) {
        omega[k] = 2.5 * u(rng);
        alpha[k] = {u(rng), u(rng)};
      }
      return clipmu::ObservationModel::complex_exponential(omega, alpha);
    }
    default: {
      std::vector<std::vector<std::complex<double>>> rows(n);
      for (auto& row : rows) {
        row.resize(3);
        row[0] = {u(rng), u(rng)};
        row[1] = {u(rng), u(rng)};
        row[2] = {0.15 * u(rng), 0.15 * u(rng)};
      }
      return clipmu::ObservationModel::polynomial(rows);
    }
  }
}

inline clipmu::ProblemSpec random_spec(std::mt19937_64& rng, int kind) {
  std::uniform_real_distribution<double> sigma(0.4, 1.8);
  const double sx = sigma(rng);
  const double sv = sigma(rng);
  return clipmu::ProblemSpec(sx, sv, random_model(rng, kind));
}

}  // namespace oracle
