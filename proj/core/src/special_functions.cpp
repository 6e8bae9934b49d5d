#include "clipmu/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "clipmu/model.hpp"

namespace clipmu {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2*pi))

// Mills ratio Q(t)/phi(t) for t >= ~5 by the Laplace continued fraction
// t + 1/(t + 2/(t + 3/(t + ...))), evaluated with modified Lentz.
double mills_ratio_cf(double t) {
  constexpr double tiny = 1e-300;
  double f = t;
  double c = f;
  double d = 0.0;
  for (int n = 1; n < 5000; ++n) {
    d = t + n * d;
    if (d == 0.0) d = tiny;
    c = t + n / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return 1.0 / f;
}

// exp(x^2) with the rounding error of x*x folded back in.
double exp_square(double x) {
  const double xx = x * x;
  const double err = std::fma(x, x, -xx);
  return std::exp(xx) * (1.0 + err);
}

void check_variance(double var) {
  if (!(var >= 0.0)) throw DomainError("normal CDF: variance must be non-negative");
}

}  // namespace

double erfcx(double z) {
  if (std::isnan(z)) return z;
  if (z < 0.0) {
    if (z < -26.7) return kInf;
    return 2.0 * exp_square(z) - erfcx(-z);
  }
  if (z < 5.0) return exp_square(z) * std::erfc(z);
  return std::sqrt(2.0 / std::numbers::pi) * mills_ratio_cf(std::numbers::sqrt2 * z);
}

ErfFamily erf_family(double z) { return {std::erf(z), std::erfc(z), erfcx(z)}; }

double ndtr(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double log_ndtr(double z) {
  if (std::isnan(z)) return z;
  if (z == -kInf) return -kInf;
  if (z > 0.0) return std::log1p(-0.5 * std::erfc(z / std::numbers::sqrt2));
  if (z < -8.0) {
    const double t = -z;
    const double tt = t * t;
    const double err = std::fma(t, t, -tt);
    return -0.5 * tt - 0.5 * err - kLogSqrt2Pi + std::log(mills_ratio_cf(t));
  }
  const double u = -z / std::numbers::sqrt2;
  const double uu = u * u;
  const double err = std::fma(u, u, -uu);
  return std::log(0.5 * erfcx(u)) - uu - err;
}

double ndtri(double p) {
  if (std::isnan(p) || p < 0.0 || p > 1.0) return std::numeric_limits<double>::quiet_NaN();
  if (p == 0.0) return -kInf;
  if (p == 1.0) return kInf;

  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
              3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
            4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
            2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
            5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

double phi1(double xi, double mean, double var) {
  check_variance(var);
  if (var == 0.0) return xi >= mean ? 1.0 : 0.0;
  return ndtr((xi - mean) / std::sqrt(var));
}

double phi1_strict(double xi, double mean, double var) {
  check_variance(var);
  if (var == 0.0) return xi > mean ? 1.0 : 0.0;
  return ndtr((xi - mean) / std::sqrt(var));
}

double log_phi1(double xi, double mean, double var, bool strict) {
  check_variance(var);
  if (var == 0.0) {
    const bool inside = strict ? xi > mean : xi >= mean;
    return inside ? 0.0 : -kInf;
  }
  return log_ndtr((xi - mean) / std::sqrt(var));
}

double stable_exp_phi1(double log_amp, double xi, double mean, double var) {
  const double lp = log_phi1(xi, mean, var, false);
  if (lp == -kInf) return 0.0;
  return std::exp(log_amp + lp);
}

double stable_exp_phi1_strict(double log_amp, double xi, double mean, double var) {
  const double lp = log_phi1(xi, mean, var, true);
  if (lp == -kInf) return 0.0;
  return std::exp(log_amp + lp);
}

}  // namespace clipmu
