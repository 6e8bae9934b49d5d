#pragma once

#include <complex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace clipmu {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Raised when an input or an intermediate value leaves the mathematical
/// domain of an operation (non-finite model output, non-PSD covariance...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// g(x) = c * x
struct LinearModel {
  std::vector<double> c;
};

/// g(x)_k = alpha_k * exp(i * omega_k * x)
struct ComplexExponentialModel {
  std::vector<double> omega;
  std::vector<Complex> alpha;
};

/// g(x)_k = sum_j coeffs[k][j] * x^j
struct PolynomialModel {
  std::vector<std::vector<Complex>> coeffs;
};

/// Deterministic complex-valued observation function of a scalar state.
class ObservationModel {
 public:
  using Variant = std::variant<LinearModel, ComplexExponentialModel, PolynomialModel>;

  explicit ObservationModel(Variant v);

  static ObservationModel linear(std::vector<double> c);
  static ObservationModel complex_exponential(std::vector<double> omega,
                                              std::vector<Complex> alpha);
  static ObservationModel polynomial(std::vector<std::vector<Complex>> coeffs);

  [[nodiscard]] std::size_t output_dim() const noexcept { return dim_; }
  [[nodiscard]] const Variant& variant() const noexcept { return v_; }
  [[nodiscard]] std::string kind() const;

  /// Writes g(x) into `out` (size must equal output_dim()). Throws
  /// DomainError naming the first non-finite component.
  void evaluate_into(double x, std::span<Complex> out) const;
  [[nodiscard]] ComplexVector evaluate(double x) const;

 private:
  Variant v_;
  std::size_t dim_;
};

/// Prior N(0, sigma_x^2) on the state, noise CN(0, sigma_v^2 I_{n_y}).
class ProblemSpec {
 public:
  ProblemSpec(double sigma_x, double sigma_v, ObservationModel model);

  [[nodiscard]] double sigma_x() const noexcept { return sigma_x_; }
  [[nodiscard]] double sigma_v() const noexcept { return sigma_v_; }
  [[nodiscard]] double var_x() const noexcept { return sigma_x_ * sigma_x_; }
  [[nodiscard]] double var_v() const noexcept { return sigma_v_ * sigma_v_; }
  [[nodiscard]] std::size_t n_y() const noexcept { return model_.output_dim(); }
  [[nodiscard]] const ObservationModel& model() const noexcept { return model_; }

 private:
  double sigma_x_;
  double sigma_v_;
  ObservationModel model_;
};

/// Arguments (s1, s2, h1, h2) of the clipped moments, plus the conditioning
/// state used only by the conditional family.
struct TestPoint {
  int s1 = 0;
  int s2 = 0;
  double h1 = 0.0;
  double h2 = 0.0;
  std::optional<double> x_cond;

  /// (s1,h1) <-> (s2,h2); x_cond is kept.
  [[nodiscard]] TestPoint swapped() const { return {s2, s1, h2, h1, x_cond}; }
};

[[nodiscard]] ComplexVector evaluate_model(const ProblemSpec& spec, double x);

}  // namespace clipmu
