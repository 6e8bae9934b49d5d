#pragma once

#include <array>
#include <cstdint>

#include "clipmu/likelihood.hpp"
#include "clipmu/model.hpp"

namespace clipmu {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32-10 block function (Salmon et al., SC'11).
[[nodiscard]] PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key) noexcept;

struct McConfig {
  std::uint64_t seed = 0;
  /// Number of independent draws; with `antithetic` each draw is a (z, -z) pair.
  std::uint64_t n_samples = 1'000'000;
  bool antithetic = false;
  /// Worker threads, 0 for hardware concurrency. Never changes the result.
  unsigned threads = 0;

  void validate() const;
};

struct McEstimate {
  double mean = 0.0;
  double std_err = 0.0;
  std::uint64_t n = 0;
};

/// x ~ N(0, sigma_x^2), a pure function of (seed, i).
[[nodiscard]] double sample_state(const ProblemSpec& spec, const McConfig& mc, std::uint64_t i);

/// v ~ CN(0, sigma_v^2 I), a pure function of (seed, i).
[[nodiscard]] ComplexVector sample_noise(const ProblemSpec& spec, const McConfig& mc,
                                         std::uint64_t i);

/// Sample mean of min(L^s1, 1) min(L^s2, 1). The log ratio is formed from
/// the Gaussian log densities directly, not from the closed-form exponents.
[[nodiscard]] McEstimate estimate_mu(const ProblemSpec& spec, Family which, const TestPoint& tp,
                                     const McConfig& mc);

/// Frequencies of v in the four regions cut by Re{v^H d_i} >= sigma_v^2 b(x, h_i) / 2,
/// indexed by Quadrant (V1: both inequalities hold, V4: neither).
struct QuadrantEstimate {
  std::array<std::uint64_t, 4> counts{};
  std::array<McEstimate, 4> freq{};
};

[[nodiscard]] QuadrantEstimate estimate_quadrants(const ProblemSpec& spec, double x,
                                                  const TestPoint& tp, const McConfig& mc);

}  // namespace clipmu
