#include "clipmu/likelihood.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace clipmu {
namespace {

// Active factors per quadrant, indexed by Quadrant.
constexpr std::array<std::array<bool, 2>, 4> kActive = {
    {{false, false}, {false, true}, {true, false}, {true, true}}};

constexpr double kMaxLog = 709.782712893384;  // log(DBL_MAX)

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string(what) + " must be finite");
}

// Terms for the noise-driven families. Statistic a_i = Re{v^H d_i} with
// threshold t_i; the first factor is clipped on a_i >= t_i when s_i >= 0.
QuadrantTerms noise_terms(const ProblemSpec& spec, const TestPoint& tp, double nd1, double nd2,
                          double cross, std::array<double, 2> thresholds, bool joint) {
  const double var_v = spec.var_v();
  const double var_x = spec.var_x();
  const std::array<double, 2> s = {static_cast<double>(tp.s1), static_cast<double>(tp.s2)};
  const std::array<double, 2> h = {tp.h1, tp.h2};
  const std::array<std::array<double, 2>, 2> gram = {{{nd1, cross}, {cross, nd2}}};

  QuadrantTerms out;
  for (int q = 0; q < 4; ++q) {
    const auto& active = kActive[q];
    QuadrantTerm& term = out[q];
    term.which = static_cast<Quadrant>(q);

    std::array<double, 2> e{};
    for (int i = 0; i < 2; ++i) e[i] = (active[i] != (s[i] < 0.0)) ? 1.0 : -1.0;

    for (int j = 0; j < 2; ++j) {
      double shift = 0.0;
      for (int i = 0; i < 2; ++i) {
        if (active[i]) shift += s[i] * gram[i][j];
      }
      term.gauss.upper[j] = e[j] * thresholds[j];
      term.gauss.mean[j] = e[j] * shift;
      term.gauss.strict[j] = active[j];
      for (int i = 0; i < 2; ++i) term.gauss.cov[i][j] = 0.5 * var_v * e[i] * e[j] * gram[i][j];
    }

    double noise_amp = 0.0;
    for (int i = 0; i < 2; ++i) {
      if (active[i]) noise_amp += (s[i] * s[i] - s[i]) * gram[i][i];
    }
    if (active[0] && active[1]) noise_amp += 2.0 * s[0] * s[1] * cross;
    term.log_amp = noise_amp / var_v;

    if (joint) {
      double tilt = 0.0;
      double lin = 0.0;
      for (int i = 0; i < 2; ++i) {
        if (active[i]) {
          tilt += s[i] * h[i];
          lin += s[i] * h[i] * h[i];
        }
      }
      term.log_amp += (tilt * tilt - lin) / (2.0 * var_x);
      term.outer_mean = -tilt;
    }
  }
  return out;
}

}  // namespace

const char* to_string(Family f) noexcept {
  switch (f) {
    case Family::kJoint:
      return "joint";
    case Family::kConditional:
      return "conditional";
    case Family::kPrior:
      return "prior";
  }
  return "?";
}

double re_inner(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) throw std::invalid_argument("re_inner: size mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    acc += a[k].real() * b[k].real() + a[k].imag() * b[k].imag();
  }
  return acc;
}

double squared_norm(std::span<const Complex> a) { return re_inner(a, a); }

ComplexVector diff(const ProblemSpec& spec, double x, double h) {
  require_finite(x, "x");
  require_finite(h, "h");
  ComplexVector gx = spec.model().evaluate(x);
  ComplexVector out = spec.model().evaluate(x + h);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] -= gx[k];
  return out;
}

double b_cond(const ProblemSpec& spec, double x, double h) {
  return squared_norm(diff(spec, x, h)) / spec.var_v();
}

double b_prior(const ProblemSpec& spec, double x, double h) {
  require_finite(x, "x");
  require_finite(h, "h");
  return x * h / spec.var_x() + h * h / (2.0 * spec.var_x());
}

double b_joint(const ProblemSpec& spec, double x, double h) {
  return b_cond(spec, x, h) + b_prior(spec, x, h);
}

LikelihoodRatio LikelihoodRatio::from_log(double log_value) {
  if (log_value > kMaxLog) {
    return {log_value, std::numeric_limits<double>::infinity(), true};
  }
  return {log_value, std::exp(log_value), false};
}

LikelihoodRatio ratio_cond(const ProblemSpec& spec, std::span<const Complex> v, double x,
                           double h) {
  const ComplexVector d = diff(spec, x, h);
  if (v.size() != d.size()) throw std::invalid_argument("ratio_cond: noise dimension mismatch");
  const double log_l = 2.0 / spec.var_v() * re_inner(v, d) - squared_norm(d) / spec.var_v();
  return LikelihoodRatio::from_log(log_l);
}

LikelihoodRatio ratio_prior(const ProblemSpec& spec, double x, double h) {
  return LikelihoodRatio::from_log(-b_prior(spec, x, h));
}

LikelihoodRatio ratio_joint(const ProblemSpec& spec, std::span<const Complex> v, double x,
                            double h) {
  const LikelihoodRatio l1 = ratio_cond(spec, v, x, h);
  return LikelihoodRatio::from_log(l1.log_value - b_prior(spec, x, h));
}

PairGeometry pair_geometry(const ProblemSpec& spec, double x, double h1, double h2) {
  PairGeometry geo;
  geo.d1 = diff(spec, x, h1);
  geo.d2 = diff(spec, x, h2);
  geo.nd1sq = squared_norm(geo.d1);
  geo.nd2sq = squared_norm(geo.d2);
  geo.cross = re_inner(geo.d1, geo.d2);
  return geo;
}

QuadrantTerms quadrant_terms_joint(const ProblemSpec& spec, double x, const TestPoint& tp,
                                   const PairGeometry& geo) {
  const double var_v = spec.var_v();
  const std::array<double, 2> t = {
      0.5 * var_v * (geo.nd1sq / var_v + b_prior(spec, x, tp.h1)),
      0.5 * var_v * (geo.nd2sq / var_v + b_prior(spec, x, tp.h2))};
  return noise_terms(spec, tp, geo.nd1sq, geo.nd2sq, geo.cross, t, true);
}

QuadrantTerms quadrant_terms_joint(const ProblemSpec& spec, double x, const TestPoint& tp) {
  return quadrant_terms_joint(spec, x, tp, pair_geometry(spec, x, tp.h1, tp.h2));
}

QuadrantTerms quadrant_terms_cond(const ProblemSpec& spec, double x, const TestPoint& tp) {
  const PairGeometry geo = pair_geometry(spec, x, tp.h1, tp.h2);
  const std::array<double, 2> t = {0.5 * geo.nd1sq, 0.5 * geo.nd2sq};
  return noise_terms(spec, tp, geo.nd1sq, geo.nd2sq, geo.cross, t, false);
}

QuadrantTerms quadrant_terms_prior(const ProblemSpec& spec, const TestPoint& tp) {
  require_finite(tp.h1, "h1");
  require_finite(tp.h2, "h2");
  const double var_x = spec.var_x();
  const std::array<double, 2> s = {static_cast<double>(tp.s1), static_cast<double>(tp.s2)};
  const std::array<double, 2> h = {tp.h1, tp.h2};
  const std::array<std::array<double, 2>, 2> lambda = {
      {{h[0] * h[0], h[0] * h[1]}, {h[0] * h[1], h[1] * h[1]}}};

  QuadrantTerms out;
  for (int q = 0; q < 4; ++q) {
    const auto& active = kActive[q];
    QuadrantTerm& term = out[q];
    term.which = static_cast<Quadrant>(q);

    // Statistic a_i = b2(x, h_i); factor i is clipped on a_i <= 0 when s_i >= 0.
    std::array<double, 2> e{};
    for (int i = 0; i < 2; ++i) e[i] = (active[i] != (s[i] < 0.0)) ? -1.0 : 1.0;

    double tilt = 0.0;
    double lin = 0.0;
    for (int i = 0; i < 2; ++i) {
      if (active[i]) {
        tilt += s[i] * h[i];
        lin += s[i] * h[i] * h[i];
      }
    }
    for (int j = 0; j < 2; ++j) {
      term.gauss.upper[j] = 0.0;
      term.gauss.mean[j] = e[j] * (h[j] * h[j] - 2.0 * tilt * h[j]) / (2.0 * var_x);
      term.gauss.strict[j] = active[j];
      for (int i = 0; i < 2; ++i) term.gauss.cov[i][j] = e[i] * e[j] * lambda[i][j] / var_x;
    }
    term.log_amp = (tilt * tilt - lin) / (2.0 * var_x);
  }
  return out;
}

}  // namespace clipmu
