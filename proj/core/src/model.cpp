#include "clipmu/model.hpp"

#include <cmath>
#include <sstream>

namespace clipmu {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::size_t validate(const ObservationModel::Variant& v) {
  return std::visit(
      Overloaded{
          [](const LinearModel& m) {
            if (m.c.empty()) throw DomainError("linear model: c must be non-empty");
            for (double c : m.c) {
              if (!std::isfinite(c)) throw DomainError("linear model: non-finite coefficient");
            }
            return m.c.size();
          },
          [](const ComplexExponentialModel& m) {
            if (m.omega.empty()) {
              throw DomainError("complex exponential model: omega must be non-empty");
            }
            if (m.alpha.size() != m.omega.size()) {
              throw DomainError("complex exponential model: omega and alpha differ in length");
            }
            for (std::size_t k = 0; k < m.omega.size(); ++k) {
              if (!std::isfinite(m.omega[k]) || !std::isfinite(m.alpha[k].real()) ||
                  !std::isfinite(m.alpha[k].imag())) {
                throw DomainError("complex exponential model: non-finite parameter");
              }
            }
            return m.omega.size();
          },
          [](const PolynomialModel& m) {
            if (m.coeffs.empty()) throw DomainError("polynomial model: coeffs must be non-empty");
            for (const auto& row : m.coeffs) {
              if (row.empty()) throw DomainError("polynomial model: empty coefficient row");
              for (const Complex& c : row) {
                if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
                  throw DomainError("polynomial model: non-finite coefficient");
                }
              }
            }
            return m.coeffs.size();
          },
      },
      v);
}

}  // namespace

ObservationModel::ObservationModel(Variant v) : v_(std::move(v)), dim_(validate(v_)) {}

ObservationModel ObservationModel::linear(std::vector<double> c) {
  return ObservationModel(LinearModel{std::move(c)});
}

ObservationModel ObservationModel::complex_exponential(std::vector<double> omega,
                                                       std::vector<Complex> alpha) {
  return ObservationModel(ComplexExponentialModel{std::move(omega), std::move(alpha)});
}

ObservationModel ObservationModel::polynomial(std::vector<std::vector<Complex>> coeffs) {
  return ObservationModel(PolynomialModel{std::move(coeffs)});
}

std::string ObservationModel::kind() const {
  return std::visit(Overloaded{
                        [](const LinearModel&) { return std::string("linear"); },
                        [](const ComplexExponentialModel&) {
                          return std::string("complex_exponential");
                        },
                        [](const PolynomialModel&) { return std::string("polynomial"); },
                    },
                    v_);
}

void ObservationModel::evaluate_into(double x, std::span<Complex> out) const {
  if (out.size() != dim_) throw std::invalid_argument("evaluate_into: output size mismatch");
  std::visit(Overloaded{
                 [&](const LinearModel& m) {
                   for (std::size_t k = 0; k < dim_; ++k) out[k] = Complex(m.c[k] * x, 0.0);
                 },
                 [&](const ComplexExponentialModel& m) {
                   for (std::size_t k = 0; k < dim_; ++k) {
                     const double phase = m.omega[k] * x;
                     out[k] = m.alpha[k] * Complex(std::cos(phase), std::sin(phase));
                   }
                 },
                 [&](const PolynomialModel& m) {
                   for (std::size_t k = 0; k < dim_; ++k) {
                     const auto& row = m.coeffs[k];
                     Complex acc = row.back();
                     for (std::size_t j = row.size() - 1; j-- > 0;) acc = acc * x + row[j];
                     out[k] = acc;
                   }
                 },
             },
             v_);
  for (std::size_t k = 0; k < dim_; ++k) {
    if (!std::isfinite(out[k].real()) || !std::isfinite(out[k].imag())) {
      std::ostringstream msg;
      msg << kind() << " model: non-finite output component " << k << " at x=" << x;
      throw DomainError(msg.str());
    }
  }
}

ComplexVector ObservationModel::evaluate(double x) const {
  ComplexVector out(dim_);
  evaluate_into(x, out);
  return out;
}

ProblemSpec::ProblemSpec(double sigma_x, double sigma_v, ObservationModel model)
    : sigma_x_(sigma_x), sigma_v_(sigma_v), model_(std::move(model)) {
  if (!(sigma_x > 0.0) || !std::isfinite(sigma_x)) {
    throw DomainError("sigma_x must be positive and finite");
  }
  if (!(sigma_v > 0.0) || !std::isfinite(sigma_v)) {
    throw DomainError("sigma_v must be positive and finite");
  }
}

ComplexVector evaluate_model(const ProblemSpec& spec, double x) {
  if (!std::isfinite(x)) throw DomainError("evaluate_model: x must be finite");
  return spec.model().evaluate(x);
}

}  // namespace clipmu
