#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <random>

#include "clipmu/likelihood.hpp"
#include "clipmu/model.hpp"

using namespace clipmu;

TEST(Model, LinearIdentity) {
  ProblemSpec spec(1.0, 1.0, ObservationModel::linear({1.0}));
  const ComplexVector y = evaluate_model(spec, 2.0);
  ASSERT_EQ(y.size(), 1u);
  EXPECT_EQ(y[0], Complex(2.0, 0.0));
}

TEST(Model, ComplexExponentialHalfTurn) {
  ProblemSpec spec(1.0, 1.0,
                   ObservationModel::complex_exponential({std::numbers::pi}, {Complex(1.0, 0.0)}));
  const ComplexVector y = evaluate_model(spec, 1.0);
  EXPECT_NEAR(y[0].real(), -1.0, 1e-15);
  EXPECT_NEAR(y[0].imag(), 0.0, 1e-15);
}

TEST(Model, PolynomialSubstitution) {
  ProblemSpec spec(1.0, 1.0, ObservationModel::polynomial({{1.0, 0.0, 1.0}}));
  EXPECT_EQ(evaluate_model(spec, 3.0)[0], Complex(10.0, 0.0));
}

TEST(Model, OutputDimensionMatchesModel) {
  ProblemSpec spec(0.5, 2.0, ObservationModel::linear({1.0, -2.0, 0.5}));
  EXPECT_EQ(spec.n_y(), 3u);
  for (double x : {-3.0, 0.0, 7.5}) EXPECT_EQ(evaluate_model(spec, x).size(), 3u);
}

TEST(Model, OverflowNamesComponent) {
  ProblemSpec spec(1.0, 1.0, ObservationModel::polynomial({{1.0}, {0.0, 0.0, 0.0, 1e300}}));
  try {
    (void)evaluate_model(spec, 1e10);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("component 1"), std::string::npos) << e.what();
  }
}

TEST(Model, RejectsNonFiniteInput) {
  ProblemSpec spec(1.0, 1.0, ObservationModel::linear({1.0}));
  EXPECT_THROW((void)evaluate_model(spec, std::nan("")), DomainError);
  EXPECT_THROW((void)evaluate_model(spec, INFINITY), DomainError);
}

TEST(Model, RejectsBadParameters) {
  EXPECT_THROW(ProblemSpec(0.0, 1.0, ObservationModel::linear({1.0})), DomainError);
  EXPECT_THROW(ProblemSpec(1.0, -1.0, ObservationModel::linear({1.0})), DomainError);
  EXPECT_THROW(ObservationModel::linear({}), DomainError);
  EXPECT_THROW(ObservationModel::complex_exponential({1.0, 2.0}, {Complex(1.0)}), DomainError);
  EXPECT_THROW(ObservationModel::polynomial({{}}), DomainError);
}

TEST(Model, KindNames) {
  EXPECT_EQ(ObservationModel::linear({1.0}).kind(), "linear");
  EXPECT_EQ(ObservationModel::complex_exponential({1.0}, {Complex(1.0)}).kind(),
            "complex_exponential");
  EXPECT_EQ(ObservationModel::polynomial({{1.0}}).kind(), "polynomial");
}

TEST(Model, EvaluationIsPure) {
  ProblemSpec spec(1.0, 1.0,
                   ObservationModel::complex_exponential({0.3, 1.7}, {Complex(1.0, 2.0), Complex(-0.5, 0.1)}));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const double x = n(rng);
    const ComplexVector a = evaluate_model(spec, x);
    const ComplexVector b = evaluate_model(spec, x);
    for (std::size_t k = 0; k < a.size(); ++k) {
      EXPECT_EQ(std::memcmp(&a[k], &b[k], sizeof(Complex)), 0);
    }
  }
}

TEST(Model, LinearDifferenceIsStateIndependent) {
  ProblemSpec spec(1.0, 1.0, ObservationModel::linear({0.7, -1.3}));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 200; ++i) {
    const double x = u(rng);
    const double h = u(rng);
    const ComplexVector d = diff(spec, x, h);
    EXPECT_NEAR(d[0].real(), 0.7 * h, 1e-12);
    EXPECT_NEAR(d[1].real(), -1.3 * h, 1e-12);
    EXPECT_EQ(d[0].imag(), 0.0);
  }
}
