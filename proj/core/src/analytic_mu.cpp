#include "clipmu/analytic_mu.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "clipmu/special_functions.hpp"

namespace clipmu {
namespace {

void require_finite_point(const TestPoint& tp) {
  if (!std::isfinite(tp.h1) || !std::isfinite(tp.h2)) {
    throw DomainError("test point offsets must be finite");
  }
}

double require_x(const TestPoint& tp) {
  if (!tp.x_cond) throw std::invalid_argument("conditional moment needs x_cond");
  if (!std::isfinite(*tp.x_cond)) throw DomainError("x_cond must be finite");
  return *tp.x_cond;
}

void require_special(SPair s) {
  if (s != SPair{1, 1} && s != SPair{1, 0}) {
    throw std::invalid_argument("reduced form exists only for s = (1,1) or (1,0), got (" +
                                std::to_string(s.first) + "," + std::to_string(s.second) + ")");
  }
}

MuResult finish(MuResult r) {
  double sum = 0.0;
  for (double t : r.diagnostics.terms) sum += t;
  r.diagnostics.pre_clamp = sum;
  r.value = std::clamp(sum, 0.0, 1.0);
  r.diagnostics.clamped = r.value != sum;
  return r;
}

MuResult sum_terms(const QuadrantTerms& terms, MuMethod method) {
  MuResult r;
  r.method = method;
  for (std::size_t q = 0; q < terms.size(); ++q) {
    r.diagnostics.terms[q] = stable_exp_phi2(terms[q].log_amp, terms[q].gauss);
  }
  return finish(r);
}

void absorb(MuDiagnostics& diag, const Expectation& e) {
  diag.converged = diag.converged && e.converged;
  diag.quadrature_order = std::max(diag.quadrature_order, e.order);
}

}  // namespace

const char* to_string(MuMethod m) noexcept {
  switch (m) {
    case MuMethod::kAnalyticGeneral:
      return "analytic_general";
    case MuMethod::kAnalyticSpecial:
      return "analytic_special";
    case MuMethod::kMc:
      return "mc";
  }
  return "?";
}

MuResult mu_x_general(const ProblemSpec& spec, const TestPoint& tp) {
  require_finite_point(tp);
  return sum_terms(quadrant_terms_prior(spec, tp), MuMethod::kAnalyticGeneral);
}

MuResult mu_y_given_x_general(const ProblemSpec& spec, const TestPoint& tp) {
  require_finite_point(tp);
  const double x = require_x(tp);
  return sum_terms(quadrant_terms_cond(spec, x, tp), MuMethod::kAnalyticGeneral);
}

MuResult mu_yx_general(const ProblemSpec& spec, const TestPoint& tp, const QuadratureRule& rule) {
  require_finite_point(tp);
  rule.validate();
  MuResult r;
  r.method = MuMethod::kAnalyticGeneral;
  // The outer mean of each term does not depend on x, so read it off any node.
  const QuadrantTerms probe = quadrant_terms_joint(spec, 0.0, tp);
  for (std::size_t q = 0; q < 4; ++q) {
    auto integrand = [&](double x) {
      const QuadrantTerm t = quadrant_terms_joint(spec, x, tp)[q];
      return stable_exp_phi2(t.log_amp, t.gauss);
    };
    const Expectation e =
        gaussian_expectation(integrand, probe[q].outer_mean, spec.sigma_x(), rule);
    r.diagnostics.terms[q] = e.value;
    absorb(r.diagnostics, e);
  }
  return finish(r);
}

MuResult mu_yx_special(const ProblemSpec& spec, SPair s_pair, double h,
                       const QuadratureRule& rule) {
  require_special(s_pair);
  if (!std::isfinite(h)) throw DomainError("h must be finite");
  rule.validate();
  const double var_v = spec.var_v();
  const double var_x = spec.var_x();
  MuResult r;
  r.method = MuMethod::kAnalyticSpecial;

  // Both factors clipped: P(Re{v^H d} >= sigma_v^2 b / 2).
  auto clipped = [&](double x) {
    const double nd = squared_norm(diff(spec, x, h));
    return phi1(-0.5 * var_v * b_joint(spec, x, h), 0.0, 0.5 * var_v * nd);
  };
  const Expectation e1 = gaussian_expectation(clipped, 0.0, spec.sigma_x(), rule);
  r.diagnostics.terms[static_cast<int>(Quadrant::kV1)] = e1.value;
  absorb(r.diagnostics, e1);

  const bool both = s_pair.second == 1;
  const double shift = both ? 2.0 : 1.0;
  auto active = [&](double x) {
    const double nd = squared_norm(diff(spec, x, h));
    const double log_amp = both ? 2.0 * nd / var_v + h * h / var_x : 0.0;
    return stable_exp_phi1_strict(log_amp, 0.5 * var_v * b_joint(spec, x, h), shift * nd,
                                  0.5 * var_v * nd);
  };
  const Expectation e2 = gaussian_expectation(active, -shift * h, spec.sigma_x(), rule);
  r.diagnostics.terms[static_cast<int>(both ? Quadrant::kV4 : Quadrant::kV3)] = e2.value;
  absorb(r.diagnostics, e2);
  return finish(r);
}

MuResult mu_y_given_x_special(const ProblemSpec& spec, SPair s_pair, double h, double x) {
  require_special(s_pair);
  const double nd = squared_norm(diff(spec, x, h));
  MuResult r;
  r.method = MuMethod::kAnalyticSpecial;
  if (s_pair.second == 0) {
    r.diagnostics.terms[static_cast<int>(Quadrant::kV1)] =
        std::erfc(std::sqrt(nd) / (2.0 * spec.sigma_v()));
    return finish(r);
  }
  const double var_v = spec.var_v();
  r.diagnostics.terms[static_cast<int>(Quadrant::kV1)] = phi1(-0.5 * nd, 0.0, 0.5 * var_v * nd);
  r.diagnostics.terms[static_cast<int>(Quadrant::kV4)] =
      stable_exp_phi1_strict(2.0 * nd / var_v, 0.5 * nd, 2.0 * nd, 0.5 * var_v * nd);
  return finish(r);
}

MuResult mu_x_special(const ProblemSpec& spec, SPair s_pair, double h) {
  require_special(s_pair);
  if (!std::isfinite(h)) throw DomainError("h must be finite");
  MuResult r;
  r.method = MuMethod::kAnalyticSpecial;
  if (s_pair.second == 0) {
    r.diagnostics.terms[static_cast<int>(Quadrant::kV1)] =
        std::erfc(std::abs(h) / (2.0 * std::numbers::sqrt2 * spec.sigma_x()));
    return finish(r);
  }
  const double q = h * h / spec.var_x();
  r.diagnostics.terms[static_cast<int>(Quadrant::kV1)] = phi1(0.0, 0.5 * q, q);
  r.diagnostics.terms[static_cast<int>(Quadrant::kV4)] =
      stable_exp_phi1_strict(q, 0.0, 1.5 * q, q);
  return finish(r);
}

bool has_special_form(const TestPoint& tp) noexcept {
  const SPair s{tp.s1, tp.s2};
  return tp.h1 == tp.h2 && (s == SPair{1, 1} || s == SPair{1, 0} || s == SPair{0, 1});
}

MuResult mu_dispatch(const ProblemSpec& spec, Family which, const TestPoint& tp,
                     const QuadratureRule& rule) {
  if (has_special_form(tp)) {
    const SPair s = tp.s1 == 0 ? SPair{1, 0} : SPair{tp.s1, tp.s2};
    switch (which) {
      case Family::kJoint:
        return mu_yx_special(spec, s, tp.h1, rule);
      case Family::kConditional:
        return mu_y_given_x_special(spec, s, tp.h1, require_x(tp));
      case Family::kPrior:
        return mu_x_special(spec, s, tp.h1);
    }
  }
  switch (which) {
    case Family::kJoint:
      return mu_yx_general(spec, tp, rule);
    case Family::kConditional:
      return mu_y_given_x_general(spec, tp);
    case Family::kPrior:
      return mu_x_general(spec, tp);
  }
  throw std::invalid_argument("unknown family");
}

}  // namespace clipmu
