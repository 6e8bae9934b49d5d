#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "clipmu/likelihood.hpp"
#include "oracles.hpp"

using namespace clipmu;

namespace {

ProblemSpec unit_linear(double c = 1.0, double sx = 1.0, double sv = 1.0) {
  return ProblemSpec(sx, sv, ObservationModel::linear({c}));
}

}  // namespace

TEST(Diff, Examples) {
  const ProblemSpec lin = unit_linear();
  for (double x : {-2.0, 0.0, 3.3}) EXPECT_EQ(diff(lin, x, 1.0)[0], Complex(1.0, 0.0));
  EXPECT_EQ(diff(lin, 0.4, 0.0)[0], Complex(0.0, 0.0));
  const ProblemSpec ce(1.0, 1.0,
                       ObservationModel::complex_exponential({std::numbers::pi}, {Complex(1.0)}));
  const Complex d = diff(ce, 0.0, 1.0)[0];
  EXPECT_NEAR(d.real(), -2.0, 1e-15);
  EXPECT_NEAR(d.imag(), 0.0, 1e-15);
}

TEST(Exponents, Examples) {
  const ProblemSpec lin = unit_linear();
  EXPECT_EQ(b_joint(lin, 0.3, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(b_joint(lin, 0.0, 1.0), 1.5);
  EXPECT_DOUBLE_EQ(b_joint(lin, -1.0, 1.0), 0.5);
  EXPECT_EQ(b_cond(lin, 0.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(b_cond(lin, 5.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(b_cond(unit_linear(2.0, 1.0, 2.0), 0.0, 1.0), 1.0);
  EXPECT_EQ(b_prior(lin, 0.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(b_prior(lin, 0.0, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(b_prior(lin, -0.5, 1.0), 0.0);
}

TEST(Ratios, Examples) {
  const ProblemSpec lin = unit_linear();
  const ComplexVector zero(1);
  EXPECT_EQ(ratio_joint(lin, zero, 0.7, 0.0).value, 1.0);
  EXPECT_NEAR(ratio_joint(lin, zero, 0.0, 1.0).value, 0.2231302, 5e-8);
  EXPECT_NEAR(ratio_cond(lin, zero, 0.0, 1.0).value, 0.3678794, 5e-8);
  EXPECT_NEAR(ratio_prior(lin, 0.0, 1.0).value, 0.6065307, 5e-8);
  EXPECT_EQ(ratio_cond(lin, zero, 0.3, 0.0).value, 1.0);
  EXPECT_EQ(ratio_prior(lin, 0.3, 0.0).value, 1.0);
}

TEST(Ratios, OverflowSentinel) {
  const ProblemSpec lin = unit_linear(1.0, 1.0, 0.01);
  const ComplexVector v = {Complex(100.0, 0.0)};
  const LikelihoodRatio r = ratio_cond(lin, v, 0.0, 1.0);
  EXPECT_TRUE(r.overflow);
  EXPECT_TRUE(std::isinf(r.value));
  EXPECT_GT(r.log_value, 709.0);
  EXPECT_FALSE(ratio_cond(lin, ComplexVector{Complex(0.0)}, 0.0, 1.0).overflow);
}

TEST(Ratios, DirectDensityOracle) {
  std::mt19937_64 rng(29);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const ProblemSpec spec = oracle::random_spec(rng, i);
    const double x = spec.sigma_x() * n(rng);
    const double h = n(rng);
    ComplexVector v(spec.n_y());
    for (auto& c : v) c = {spec.sigma_v() * n(rng) / std::sqrt(2.0), spec.sigma_v() * n(rng) / std::sqrt(2.0)};
    ComplexVector y = spec.model().evaluate(x);
    for (std::size_t k = 0; k < y.size(); ++k) y[k] += v[k];
    const oracle::ld var_v = spec.var_v();
    const oracle::ld log_ref =
        oracle::log_cn_pdf(y, spec.model().evaluate(x + h), var_v) -
        oracle::log_cn_pdf(y, spec.model().evaluate(x), var_v) +
        oracle::log_normal_pdf(x + h, 0, spec.var_x()) - oracle::log_normal_pdf(x, 0, spec.var_x());
    const double ref = static_cast<double>(std::exp(log_ref));
    const LikelihoodRatio r = ratio_joint(spec, v, x, h);
    EXPECT_NEAR(r.value, ref, 1e-10 * ref) << i;
  }
}

TEST(Ratios, JointFactorizesInLogDomain) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> n(0.0, 1.5);
  for (int i = 0; i < 1000; ++i) {
    const ProblemSpec spec = oracle::random_spec(rng, i);
    const double x = n(rng), h = n(rng);
    ComplexVector v(spec.n_y());
    for (auto& c : v) c = {n(rng), n(rng)};
    const double lhs = ratio_joint(spec, v, x, h).log_value;
    const double rhs = ratio_cond(spec, v, x, h).log_value + ratio_prior(spec, x, h).log_value;
    EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST(PairGeometry, CauchySchwarz) {
  std::mt19937_64 rng(37);
  std::normal_distribution<double> n(0.0, 2.0);
  for (int i = 0; i < 1000; ++i) {
    const ProblemSpec spec = oracle::random_spec(rng, i);
    const PairGeometry g = pair_geometry(spec, n(rng), n(rng), n(rng));
    EXPECT_GE(g.nd1sq, 0.0);
    EXPECT_GE(g.nd2sq, 0.0);
    EXPECT_LE(g.cross * g.cross, g.nd1sq * g.nd2sq + 1e-9 * std::max(1.0, g.nd1sq * g.nd2sq));
  }
}

TEST(QuadrantTerms, ZeroExponentsKillAmplitudes) {
  const ProblemSpec spec(0.8, 1.2, ObservationModel::complex_exponential({0.5, 1.5}, {Complex(1, 1), Complex(0.2)}));
  const TestPoint tp{0, 0, 0.6, -1.1, std::nullopt};
  for (const QuadrantTerms& terms :
       {quadrant_terms_joint(spec, 0.3, tp), quadrant_terms_cond(spec, 0.3, tp), quadrant_terms_prior(spec, tp)}) {
    // No tilt: every quadrant shares the untilted means up to orientation.
    for (const QuadrantTerm& t : terms) {
      EXPECT_EQ(t.log_amp, 0.0);
      EXPECT_EQ(std::abs(t.gauss.mean[0]), std::abs(terms[0].gauss.mean[0]));
      EXPECT_EQ(std::abs(t.gauss.mean[1]), std::abs(terms[0].gauss.mean[1]));
      EXPECT_EQ(t.outer_mean, 0.0);
    }
  }
}

TEST(QuadrantTerms, JointMeansForEqualOffsets) {
  const ProblemSpec spec(1.1, 0.7, ObservationModel::complex_exponential({1.3}, {Complex(0.6, -0.2)}));
  const double x = 0.25, h = 0.8;
  const double nd = squared_norm(diff(spec, x, h));
  const QuadrantTerms t = quadrant_terms_joint(spec, x, {1, 1, h, h, std::nullopt});
  const double lim = 0.5 * spec.var_v() * b_joint(spec, x, h);
  const std::array<std::array<double, 2>, 4> means = {
      {{0.0, 0.0}, {-nd, nd}, {nd, -nd}, {2 * nd, 2 * nd}}};
  const std::array<std::array<double, 2>, 4> limits = {
      {{-lim, -lim}, {-lim, lim}, {lim, -lim}, {lim, lim}}};
  for (int q = 0; q < 4; ++q) {
    EXPECT_EQ(t[q].which, static_cast<Quadrant>(q));
    for (int j = 0; j < 2; ++j) {
      EXPECT_NEAR(t[q].gauss.mean[j], means[q][j], 1e-14) << q;
      EXPECT_NEAR(t[q].gauss.upper[j], limits[q][j], 1e-14) << q;
    }
  }
  EXPECT_NEAR(t[3].log_amp, 2 * nd / spec.var_v() + h * h / spec.var_x(), 1e-14);
  EXPECT_NEAR(t[3].outer_mean, -2 * h, 1e-15);
  EXPECT_EQ(t[0].outer_mean, 0.0);
}

TEST(QuadrantTerms, CovarianceSignPattern) {
  const ProblemSpec spec(1.0, 0.9, ObservationModel::linear({1.0, -0.4}));
  const TestPoint tp{2, 1, 0.7, -0.3, std::nullopt};
  const PairGeometry g = pair_geometry(spec, 0.1, tp.h1, tp.h2);
  const double half = 0.5 * spec.var_v();
  const QuadrantTerms t = quadrant_terms_joint(spec, 0.1, tp);
  for (int q = 0; q < 4; ++q) {
    const double sign = (q == 0 || q == 3) ? 1.0 : -1.0;
    EXPECT_NEAR(t[q].gauss.cov[0][0], half * g.nd1sq, 1e-15);
    EXPECT_NEAR(t[q].gauss.cov[1][1], half * g.nd2sq, 1e-15);
    EXPECT_NEAR(t[q].gauss.cov[0][1], sign * half * g.cross, 1e-15);
    EXPECT_EQ(t[q].gauss.cov[0][1], t[q].gauss.cov[1][0]);
  }
}

TEST(QuadrantTerms, ConditionalDropsPriorTerms) {
  const ProblemSpec spec(0.3, 1.0, ObservationModel::linear({1.0}));
  const TestPoint tp{2, 1, 0.5, 0.9, 0.4};
  const QuadrantTerms c = quadrant_terms_cond(spec, 0.4, tp);
  const PairGeometry g = pair_geometry(spec, 0.4, tp.h1, tp.h2);
  EXPECT_NEAR(c[3].log_amp, (2.0 * g.nd1sq + 2.0 * 2.0 * g.cross) / spec.var_v(), 1e-14);
  EXPECT_NEAR(c[2].log_amp, 2.0 * g.nd1sq / spec.var_v(), 1e-14);
  EXPECT_EQ(c[1].log_amp, 0.0);
  EXPECT_NEAR(c[0].gauss.upper[0], -0.5 * g.nd1sq, 1e-15);
}

TEST(QuadrantTerms, ConditionalUnitOffsetIsZero) {
  const ProblemSpec spec(1.0, 1.0, ObservationModel::linear({1.0}));
  for (const QuadrantTerm& t : quadrant_terms_cond(spec, 0.2, {1, 1, 0.0, 0.0, 0.2})) {
    EXPECT_EQ(t.gauss.upper[0], 0.0);
    EXPECT_EQ(t.gauss.upper[1], 0.0);
    EXPECT_EQ(t.gauss.cov[0][0], 0.0);
    EXPECT_EQ(t.gauss.cov[0][1], 0.0);
  }
}

TEST(QuadrantTerms, PriorMeansForEqualOffsets) {
  const double sx = 1.3, h = 0.9;
  const ProblemSpec spec(sx, 1.0, ObservationModel::linear({1.0}));
  const double k = h * h / (2 * sx * sx);
  const QuadrantTerms t = quadrant_terms_prior(spec, {1, 1, h, h, std::nullopt});
  // The third pair is the coordinate swap of the second.
  const std::array<std::array<double, 2>, 4> means = {{{k, k}, {-k, k}, {k, -k}, {3 * k, 3 * k}}};
  for (int q = 0; q < 4; ++q) {
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(t[q].gauss.mean[j], means[q][j], 1e-15) << q;
    EXPECT_EQ(t[q].gauss.upper[0], 0.0);
  }
  const QuadrantTerms t10 = quadrant_terms_prior(spec, {1, 0, h, h, std::nullopt});
  EXPECT_NEAR(t10[3].gauss.mean[0], k, 1e-15);
  EXPECT_NEAR(t10[3].gauss.mean[1], k, 1e-15);
}

TEST(QuadrantTerms, PriorCovarianceAndAmplitudes) {
  const double sx = 0.7;
  const ProblemSpec spec(sx, 1.0, ObservationModel::linear({1.0}));
  const TestPoint tp{2, -1, 0.4, -1.2, std::nullopt};
  const QuadrantTerms t = quadrant_terms_prior(spec, tp);
  const double vx = sx * sx;
  EXPECT_NEAR(t[3].log_amp,
              (2.0 * 0.16 + 2.0 * 1.44 + 2.0 * 2.0 * -1.0 * 0.4 * -1.2) / (2 * vx), 1e-13);
  for (const QuadrantTerm& q : t) {
    EXPECT_NEAR(q.gauss.cov[0][0], 0.16 / vx, 1e-15);
    EXPECT_NEAR(q.gauss.cov[1][1], 1.44 / vx, 1e-15);
    EXPECT_NEAR(std::abs(q.gauss.cov[0][1]), 0.48 / vx, 1e-15);
  }
}

TEST(QuadrantTerms, SwapSymmetry) {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_int_distribution<int> s(-1, 2);
  for (int i = 0; i < 200; ++i) {
    const ProblemSpec spec = oracle::random_spec(rng, i);
    const TestPoint tp{s(rng), s(rng), n(rng), n(rng), n(rng)};
    const double x = *tp.x_cond;
    const QuadrantTerms a = quadrant_terms_joint(spec, x, tp);
    const QuadrantTerms b = quadrant_terms_joint(spec, x, tp.swapped());
    constexpr int kMirror[4] = {0, 2, 1, 3};
    for (int q = 0; q < 4; ++q) {
      const QuadrantTerm& p = a[q];
      const QuadrantTerm& r = b[kMirror[q]];
      const double tol = 1e-12 * (1.0 + std::abs(p.log_amp));
      EXPECT_NEAR(p.log_amp, r.log_amp, tol);
      EXPECT_NEAR(p.outer_mean, r.outer_mean, 1e-12);
      for (int j = 0; j < 2; ++j) {
        EXPECT_NEAR(p.gauss.upper[j], r.gauss.upper[1 - j], 1e-12 * (1 + std::abs(p.gauss.upper[j])));
        EXPECT_NEAR(p.gauss.mean[j], r.gauss.mean[1 - j], 1e-12 * (1 + std::abs(p.gauss.mean[j])));
        EXPECT_EQ(p.gauss.strict[j], r.gauss.strict[1 - j]);
      }
      EXPECT_NEAR(p.gauss.cov[0][1], r.gauss.cov[1][0], 1e-12 * (1 + std::abs(p.gauss.cov[0][1])));
      EXPECT_NEAR(p.gauss.cov[0][0], r.gauss.cov[1][1], 1e-12 * (1 + p.gauss.cov[0][0]));
    }
  }
}
