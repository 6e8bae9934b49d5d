// Bivariate normal CDF.
//
// The non-degenerate core follows Genz (2004), "Numerical computation of
// rectangular bivariate and trivariate normal and t probabilities": a
// Gauss-Legendre rule over the Drezner-Wesolowsky correlation integral for
// |rho| < 0.925 and an asymptotic expansion plus a correction integral above.
// Its error is absolute (~1e-15), so tail probabilities that get multiplied by
// a large amplitude go through log_bvn_lower_tail instead, which integrates a
// strictly positive one-dimensional representation in log scale.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "clipmu/model.hpp"
#include "clipmu/special_functions.hpp"

namespace clipmu {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// Half of the symmetric Gauss-Legendre rules on [-1, 1] (positive nodes).
constexpr std::array<double, 3> kW6 = {0.1713244923791705, 0.3607615730481384,
                                       0.4679139345726904};
constexpr std::array<double, 3> kX6 = {0.9324695142031522, 0.6612093864662647,
                                       0.2386191860831970};
constexpr std::array<double, 6> kW12 = {0.04717533638651177, 0.1069393259953183,
                                        0.1600783285433464,  0.2031674267230659,
                                        0.2334925365383547,  0.2491470458134029};
constexpr std::array<double, 6> kX12 = {0.9815606342467191, 0.9041172563704750,
                                        0.7699026741943050, 0.5873179542866171,
                                        0.3678314989981802, 0.1252334085114692};
constexpr std::array<double, 10> kW20 = {
    0.01761400713915212, 0.04060142980038694, 0.06267204833410906, 0.08327674157670475,
    0.1019301198172404,  0.1181945319615184,  0.1316886384491766,  0.1420961093183821,
    0.1491729864726037,  0.1527533871307259};
constexpr std::array<double, 10> kX20 = {
    0.9931285991850949, 0.9639719272779138, 0.9122344282513259, 0.8391169718222188,
    0.7463319064601508, 0.6360536807265150, 0.5108670019508271, 0.3737060887154196,
    0.2277858511416451, 0.07652652113349733};

// P(lo < Z < hi) for standard normal Z, without cancellation in either tail.
double interval_prob(double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  if (lo >= 0.0) return std::max(0.0, ndtr(-lo) - ndtr(-hi));
  if (hi <= 0.0) return std::max(0.0, ndtr(hi) - ndtr(lo));
  return std::max(0.0, 1.0 - ndtr(lo) - ndtr(-hi));
}

double log_interval_prob(double lo, double hi) {
  if (!(hi > lo)) return -kInf;
  if (lo >= 0.0) {
    const double a = log_ndtr(-lo);
    const double b = log_ndtr(-hi);
    return a + std::log1p(-std::exp(b - a));
  }
  if (hi <= 0.0) {
    const double a = log_ndtr(hi);
    const double b = log_ndtr(lo);
    return a + std::log1p(-std::exp(b - a));
  }
  return std::log(interval_prob(lo, hi));
}

// P(X > h, Y > k), standard bivariate normal with correlation r.
double bvn_upper(double h, double k, double r) {
  if (h == kInf || k == kInf) return 0.0;
  if (h == -kInf) return k == -kInf ? 1.0 : ndtr(-k);
  if (k == -kInf) return ndtr(-h);

  std::span<const double> w;
  std::span<const double> x;
  const double ar = std::abs(r);
  if (ar < 0.3) {
    w = kW6;
    x = kX6;
  } else if (ar < 0.75) {
    w = kW12;
    x = kX12;
  } else {
    w = kW20;
    x = kX20;
  }

  double hk = h * k;
  double bvn = 0.0;
  if (ar < 0.925) {
    const double hs = 0.5 * (h * h + k * k);
    const double asr = std::asin(r);
    for (std::size_t i = 0; i < w.size(); ++i) {
      for (double sgn : {-1.0, 1.0}) {
        const double sn = std::sin(asr * (sgn * x[i] + 1.0) / 2.0);
        bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
      }
    }
    bvn = bvn * asr / (2.0 * kTwoPi) + ndtr(-h) * ndtr(-k);
    return std::clamp(bvn, 0.0, 1.0);
  }

  if (r < 0.0) {
    k = -k;
    hk = -hk;
  }
  if (ar < 1.0) {
    const double as = (1.0 - r) * (1.0 + r);
    double a = std::sqrt(as);
    const double bs = (h - k) * (h - k);
    const double c = (4.0 - hk) / 8.0;
    const double d = (12.0 - hk) / 16.0;
    const double asr0 = -(bs / as + hk) / 2.0;
    if (asr0 > -100.0) {
      bvn = a * std::exp(asr0) *
            (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
    }
    if (hk > -160.0) {
      const double b = std::sqrt(bs);
      bvn -= std::exp(-hk / 2.0) * std::sqrt(kTwoPi) * ndtr(-b / a) * b *
             (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
    }
    a /= 2.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      for (double sgn : {-1.0, 1.0}) {
        const double t = a * (sgn * x[i] + 1.0);
        const double xs = t * t;
        const double asr = -(bs / xs + hk) / 2.0;
        if (asr > -100.0) {
          const double rs = std::sqrt(1.0 - xs);
          const double ep = std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs;
          bvn += a * w[i] * std::exp(asr) * (ep - (1.0 + c * xs * (1.0 + d * xs)));
        }
      }
    }
    bvn = -bvn / kTwoPi;
  }
  if (r > 0.0) {
    bvn += ndtr(-std::max(h, k));
  } else {
    bvn = -bvn + interval_prob(h, k);
  }
  return std::clamp(bvn, 0.0, 1.0);
}

// Gauss-Kronrod over [c, d] after mapping onto [0, 1]. Boost 1.74 compares
// the error of the [-1, 1] rule against the rescaled estimate, so on short
// intervals its termination test never passes and it recurses to max depth.
template <class F>
double integrate_unit(F f, double c, double d, unsigned depth, double tol) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double len = d - c;
  auto g = [&](double xi) { return f(c + len * xi); };
  return len * (tol > 0.0 ? Rule::integrate(g, 0.0, 1.0, depth, tol) : Rule::integrate(g, 0.0, 1.0, depth));
}

// log P(X <= z1, Y <= z2) for |rho| < 1 as
//   log int_{-inf}^{a} phi(u) Phi((b - rho u) / s) du,   a = min(z1, z2).
// The log-integrand is concave with curvature <= -1, so after locating its
// maximum a window of +-10 around it holds all but exp(-50) of the mass.
// Sharp peaks are narrowed further below.
double log_bvn_lower_tail(double z1, double z2, double rho) {
  const double a = std::min(z1, z2);
  const double b = std::max(z1, z2);
  const double s = std::sqrt((1.0 - rho) * (1.0 + rho));

  auto log_f = [&](double u) {
    return -0.5 * u * u - kLogSqrt2Pi + log_ndtr((b - rho * u) / s);
  };
  auto slope = [&](double u) {
    const double wv = (b - rho * u) / s;
    const double inv_mills = std::exp(-0.5 * wv * wv - kLogSqrt2Pi - log_ndtr(wv));
    return -u - (rho / s) * inv_mills;
  };

  double peak = a;
  if (slope(a) < 0.0) {
    double lo = a - 1.0;
    double step = 1.0;
    while (slope(lo) < 0.0) {
      step *= 2.0;
      lo = a - step;
    }
    double hi = a;
    for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + std::abs(hi)); ++it) {
      const double mid = 0.5 * (lo + hi);
      (slope(mid) < 0.0 ? hi : lo) = mid;
    }
    peak = 0.5 * (lo + hi);
  }
  const double log_peak = log_f(peak);

  // Integrate in t = u - peak. Forming b - rho u at |u| ~ 10 with s ~ 1e-2
  // jitters the integrand by ~1e-13, enough to stall a 1e-12 Kronrod target;
  // with the constants hoisted the local integrand is smooth to rounding.
  const double w0 = (b - rho * peak) / s;
  const double log_tail0 = log_ndtr(w0);
  const double mills0 = erfcx(-w0 / std::numbers::sqrt2);
  // log Phi(w0 + dw) - log Phi(w0). Deep in the lower tail both logs are huge,
  // so take the Gaussian part exactly and the Mills-ratio part as a ratio.
  auto log_tail_shift = [&](double dw) {
    const double w = w0 + dw;
    if (w0 < -5.0 && w < -5.0) {
      return -0.5 * dw * (2.0 * w0 + dw) + std::log(erfcx(-w / std::numbers::sqrt2) / mills0);
    }
    return log_ndtr(w) - log_tail0;
  };
  auto log_scaled = [&](double t) { return -t * (peak + 0.5 * t) + log_tail_shift(-(rho / s) * t); };
  auto scaled = [&](double t) { return std::exp(log_scaled(t)); };

  // Walk outward from the peak on a geometric grid until the log-integrand has
  // dropped by kDrop. By concavity the chord from the peak bounds log_f beyond
  // that point, so the rest weighs under exp(-kDrop) |t| / kDrop of the peak.
  // The walk points double as breakpoints that resolve sharp peaks.
  constexpr double kDrop = 45.0;
  const double width = rho != 0.0 ? s / std::abs(rho) : kInf;
  const double edge_slope = peak == a ? std::abs(slope(a)) : 0.0;
  const double step0 =
      std::max(std::min({0.5, width, 1.0 / std::max(edge_slope, 1e-300)}), 1e-12 * (1.0 + std::abs(peak)));
  const double hi = std::min(a - peak, 10.0);
  std::vector<double> cuts{0.0};
  auto walk = [&](double dir, double limit) {
    for (double t = step0; t < limit; t *= 2.0) {
      cuts.push_back(dir * t);
      if (log_scaled(dir * t) < -kDrop) return;
    }
    cuts.push_back(dir * limit);
  };
  walk(-1.0, 10.0);
  if (hi > 0.0) walk(1.0, hi);
  const auto [first, last] = std::minmax_element(cuts.begin(), cuts.end());
  const double leftmost = *first;
  const double rightmost = *last;
  if (rho != 0.0 && width < 0.5) {
    // Phi(w) switches over |t| ~ width around w = 0.
    const double centre = w0 * s / rho;
    for (double m : {-8.0, -2.0, 0.0, 2.0, 8.0}) {
      const double c = centre + m * width;
      if (c > leftmost && c < rightmost) cuts.push_back(c);
    }
  }
  std::sort(cuts.begin(), cuts.end());

  // log_f is concave, so away from the peak a segment's maximum sits at the
  // endpoint nearer the peak. That bound lets negligible segments be skipped
  // and sets each segment's tolerance relative to the whole integral rather
  // than to itself (a relative target on an e^-80 sliver never converges).
  const std::size_t n_seg = cuts.size() - 1;
  std::vector<double> bound(n_seg, 0.0);
  double rough = 0.0;
  for (std::size_t i = 0; i < n_seg; ++i) {
    const double c = cuts[i];
    const double d = cuts[i + 1];
    if (d <= c) continue;
    const double top = c > 0.0 ? scaled(c) : d < 0.0 ? scaled(d) : 1.0;
    bound[i] = (d - c) * top;
    rough += integrate_unit(scaled, c, d, 0, 0.0);
  }
  const double floor = 1e-13 * std::max(rough, std::numeric_limits<double>::min());
  double total = 0.0;
  for (std::size_t i = 0; i < n_seg; ++i) {
    if (bound[i] <= floor * 1e-3) continue;
    const double tol = std::clamp(floor / bound[i], 1e-12, 1e-2);
    total += integrate_unit(scaled, cuts[i], cuts[i + 1], 15, tol);
  }
  if (!(total > 0.0)) return -kInf;
  return log_peak + std::log(total);
}

enum class Shape { kEmpty, kCertain, kUnivariate, kBivariate };

struct Reduced {
  Shape shape = Shape::kEmpty;
  double z = 0.0;  // kUnivariate
  double z1 = 0.0, z2 = 0.0, rho = 0.0;  // kBivariate
};

Reduced reduce(const GaussianPairSpec& spec, const Phi2Tolerances& tol) {
  const auto& c = spec.cov;
  for (int i = 0; i < 2; ++i) {
    if (std::isnan(spec.upper[i]) || !std::isfinite(spec.mean[i])) {
      throw DomainError("phi2: limits must not be NaN and means must be finite");
    }
    if (!(c[i][i] >= 0.0) || !std::isfinite(c[i][i])) {
      throw DomainError("phi2: covariance diagonal must be finite and non-negative");
    }
  }
  const double root = std::sqrt(c[0][0] * c[1][1]);
  const double slack = tol.psd_slack * std::max(1.0, root);
  if (std::abs(c[0][1] - c[1][0]) > slack) {
    throw DomainError("phi2: covariance is not symmetric");
  }
  const double cross = 0.5 * (c[0][1] + c[1][0]);
  if (std::abs(cross) > root + slack) {
    std::ostringstream msg;
    msg << "phi2: covariance is not positive semidefinite (|cov01|=" << std::abs(cross)
        << " > sqrt(cov00*cov11)=" << root << ")";
    throw DomainError(msg.str());
  }

  std::array<bool, 2> free{};
  int n_free = 0;
  for (int i = 0; i < 2; ++i) {
    const double u = spec.upper[i];
    const double m = spec.mean[i];
    const double v = c[i][i];
    if (u == kInf) continue;
    if (u == -kInf) return {Shape::kEmpty};
    const double dev = u - m;
    if (v == 0.0 || v <= tol.var_degenerate * dev * dev) {
      const bool inside = spec.strict[i] ? u > m : u >= m;
      if (!inside) return {Shape::kEmpty};
      continue;
    }
    free[i] = true;
    ++n_free;
  }

  Reduced r;
  if (n_free == 0) {
    r.shape = Shape::kCertain;
  } else if (n_free == 1) {
    const int i = free[0] ? 0 : 1;
    r.shape = Shape::kUnivariate;
    r.z = (spec.upper[i] - spec.mean[i]) / std::sqrt(c[i][i]);
  } else {
    r.shape = Shape::kBivariate;
    r.z1 = (spec.upper[0] - spec.mean[0]) / std::sqrt(c[0][0]);
    r.z2 = (spec.upper[1] - spec.mean[1]) / std::sqrt(c[1][1]);
    r.rho = std::clamp(cross / root, -1.0, 1.0);
  }
  return r;
}

}  // namespace

double bvn_lower(double z1, double z2, double rho) {
  return bvn_upper(-z1, -z2, std::clamp(rho, -1.0, 1.0));
}

double phi2(const GaussianPairSpec& spec, const Phi2Tolerances& tol) {
  const Reduced r = reduce(spec, tol);
  switch (r.shape) {
    case Shape::kEmpty:
      return 0.0;
    case Shape::kCertain:
      return 1.0;
    case Shape::kUnivariate:
      return ndtr(r.z);
    case Shape::kBivariate:
      break;
  }
  if (1.0 - r.rho <= tol.rho_degenerate) return ndtr(std::min(r.z1, r.z2));
  if (1.0 + r.rho <= tol.rho_degenerate) return interval_prob(-r.z2, r.z1);
  return bvn_lower(r.z1, r.z2, r.rho);
}

double log_phi2(const GaussianPairSpec& spec, const Phi2Tolerances& tol) {
  const Reduced r = reduce(spec, tol);
  switch (r.shape) {
    case Shape::kEmpty:
      return -kInf;
    case Shape::kCertain:
      return 0.0;
    case Shape::kUnivariate:
      return log_ndtr(r.z);
    case Shape::kBivariate:
      break;
  }
  if (1.0 - r.rho <= tol.rho_degenerate) return log_ndtr(std::min(r.z1, r.z2));
  if (1.0 + r.rho <= tol.rho_degenerate) return log_interval_prob(-r.z2, r.z1);
  const double p = bvn_lower(r.z1, r.z2, r.rho);
  if (p > 1e-3) return std::log(p);
  return log_bvn_lower_tail(r.z1, r.z2, r.rho);
}

double stable_exp_phi2(double log_amp, const GaussianPairSpec& spec, const Phi2Tolerances& tol) {
  if (log_amp <= 0.0) return std::exp(log_amp) * phi2(spec, tol);
  const double lp = log_phi2(spec, tol);
  if (lp == -kInf) return 0.0;
  return std::exp(log_amp + lp);
}

}  // namespace clipmu
