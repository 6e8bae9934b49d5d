#pragma once

#include <array>
#include <utility>

#include "clipmu/likelihood.hpp"
#include "clipmu/model.hpp"
#include "clipmu/quadrature.hpp"

namespace clipmu {

enum class MuMethod { kAnalyticGeneral, kAnalyticSpecial, kMc };

[[nodiscard]] const char* to_string(MuMethod m) noexcept;

struct MuDiagnostics {
  /// Addends indexed by Quadrant. The special paths only fill the slots they use.
  std::array<double, 4> terms{};
  double pre_clamp = 0.0;
  bool clamped = false;
  /// False when an adaptive outer expectation hit its order cap.
  bool converged = true;
  /// Largest Gauss-Hermite order used, 0 if no quadrature was involved.
  int quadrature_order = 0;
};

struct MuResult {
  double value = 0.0;
  MuMethod method = MuMethod::kAnalyticGeneral;
  double err = 0.0;
  MuDiagnostics diagnostics;
};

using SPair = std::pair<int, int>;

[[nodiscard]] MuResult mu_x_general(const ProblemSpec& spec, const TestPoint& tp);
/// Requires tp.x_cond.
[[nodiscard]] MuResult mu_y_given_x_general(const ProblemSpec& spec, const TestPoint& tp);
[[nodiscard]] MuResult mu_yx_general(const ProblemSpec& spec, const TestPoint& tp,
                                     const QuadratureRule& rule = {});

/// Reduced forms for h1 = h2 = h; s_pair must be (1,1) or (1,0).
[[nodiscard]] MuResult mu_yx_special(const ProblemSpec& spec, SPair s_pair, double h,
                                     const QuadratureRule& rule = {});
[[nodiscard]] MuResult mu_y_given_x_special(const ProblemSpec& spec, SPair s_pair, double h,
                                            double x);
[[nodiscard]] MuResult mu_x_special(const ProblemSpec& spec, SPair s_pair, double h);

/// True when the reduced forms apply: (1,1), (1,0) or (0,1) with h1 == h2.
[[nodiscard]] bool has_special_form(const TestPoint& tp) noexcept;

[[nodiscard]] MuResult mu_dispatch(const ProblemSpec& spec, Family which, const TestPoint& tp,
                                   const QuadratureRule& rule = {});

}  // namespace clipmu
