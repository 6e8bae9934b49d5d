#include "clipmu/mc_oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <vector>

#include "clipmu/special_functions.hpp"

namespace clipmu {
namespace {

constexpr std::uint32_t kStateStream = 0;
constexpr std::uint32_t kNoiseStream = 1;
constexpr std::uint64_t kChunk = 65536;

struct Welford {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v) {
    ++n;
    const double delta = v - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (v - mean);
  }

  void merge(const Welford& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double total = static_cast<double>(n + o.n);
    const double delta = o.mean - mean;
    mean += delta * static_cast<double>(o.n) / total;
    m2 += o.m2 + delta * delta * static_cast<double>(n) * static_cast<double>(o.n) / total;
    n += o.n;
  }

  McEstimate estimate() const {
    McEstimate e;
    e.mean = mean;
    e.n = n;
    e.std_err = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
    return e;
  }
};

double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

// Two standard normals from block `block` of stream `stream` at sample i.
std::array<double, 2> normal_pair(std::uint64_t seed, std::uint64_t i, std::uint32_t stream,
                                  std::uint32_t block) {
  const PhiloxCounter ctr = {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32),
                             stream, block};
  const PhiloxKey key = {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  const PhiloxCounter w = philox4x32(ctr, key);
  return {ndtri(to_unit(w[0], w[1])), ndtri(to_unit(w[2], w[3]))};
}

void fill_noise(const ProblemSpec& spec, std::uint64_t seed, std::uint64_t i,
                std::span<Complex> out) {
  const double scale = spec.sigma_v() / std::numbers::sqrt2;
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto z = normal_pair(seed, i, kNoiseStream, static_cast<std::uint32_t>(k));
    out[k] = {scale * z[0], scale * z[1]};
  }
}

double dist2(std::span<const Complex> a, std::span<const Complex> b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += std::norm(a[k] - b[k]);
  return acc;
}

unsigned worker_count(const McConfig& mc, std::uint64_t n_chunks) {
  unsigned t = mc.threads != 0 ? mc.threads : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::uint64_t>(t, n_chunks));
}

// Runs body(chunk_index, begin, end) over fixed-size chunks; results land in
// chunk order so the reduction never depends on scheduling.
template <class Result, class Body>
std::vector<Result> run_chunks(const McConfig& mc, Body body) {
  const std::uint64_t n_chunks = (mc.n_samples + kChunk - 1) / kChunk;
  std::vector<Result> results(n_chunks);
  std::atomic<std::uint64_t> next{0};
  auto work = [&] {
    for (std::uint64_t c = next++; c < n_chunks; c = next++) {
      const std::uint64_t begin = c * kChunk;
      results[c] = body(begin, std::min(begin + kChunk, mc.n_samples));
    }
  };
  const unsigned n_workers = worker_count(mc, n_chunks);
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < n_workers; ++t) pool.emplace_back(work);
  work();
  return results;
}

}  // namespace

PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key) noexcept {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
  }
  return ctr;
}

void McConfig::validate() const {
  if (n_samples < 2) throw std::invalid_argument("mc n_samples must be at least 2");
}

double sample_state(const ProblemSpec& spec, const McConfig& mc, std::uint64_t i) {
  return spec.sigma_x() * normal_pair(mc.seed, i, kStateStream, 0)[0];
}

ComplexVector sample_noise(const ProblemSpec& spec, const McConfig& mc, std::uint64_t i) {
  ComplexVector v(spec.n_y());
  fill_noise(spec, mc.seed, i, v);
  return v;
}

McEstimate estimate_mu(const ProblemSpec& spec, Family which, const TestPoint& tp,
                       const McConfig& mc) {
  mc.validate();
  if (!std::isfinite(tp.h1) || !std::isfinite(tp.h2)) {
    throw DomainError("test point offsets must be finite");
  }
  if (which == Family::kConditional && !tp.x_cond) {
    throw std::invalid_argument("conditional moment needs x_cond");
  }
  const double s1 = tp.s1;
  const double s2 = tp.s2;
  const double var_x = spec.var_x();
  const double var_v = spec.var_v();
  const std::size_t n_y = spec.n_y();
  const bool draw_x = which != Family::kConditional;
  const bool draw_v = which != Family::kPrior;

  auto chunk = [&](std::uint64_t begin, std::uint64_t end) {
    ComplexVector v(n_y), y(n_y), g0(n_y), g1(n_y), g2(n_y);
    auto integrand = [&](double x, double sign) {
      double l1 = 0.0;
      double l2 = 0.0;
      if (which != Family::kConditional) {
        l1 += (x * x - (x + tp.h1) * (x + tp.h1)) / (2.0 * var_x);
        l2 += (x * x - (x + tp.h2) * (x + tp.h2)) / (2.0 * var_x);
      }
      if (draw_v) {
        const ObservationModel& g = spec.model();
        g.evaluate_into(x, g0);
        g.evaluate_into(x + tp.h1, g1);
        g.evaluate_into(x + tp.h2, g2);
        for (std::size_t k = 0; k < n_y; ++k) y[k] = g0[k] + sign * v[k];
        const double r0 = dist2(y, g0);
        l1 += (r0 - dist2(y, g1)) / var_v;
        l2 += (r0 - dist2(y, g2)) / var_v;
      }
      return std::exp(std::min(s1 * l1, 0.0) + std::min(s2 * l2, 0.0));
    };
    Welford acc;
    for (std::uint64_t i = begin; i < end; ++i) {
      const double x = draw_x ? sample_state(spec, mc, i) : *tp.x_cond;
      if (draw_v) fill_noise(spec, mc.seed, i, v);
      double f = integrand(x, 1.0);
      if (mc.antithetic) f = 0.5 * (f + integrand(draw_x ? -x : x, -1.0));
      acc.add(f);
    }
    return acc;
  };

  Welford total;
  for (const Welford& w : run_chunks<Welford>(mc, chunk)) total.merge(w);
  return total.estimate();
}

QuadrantEstimate estimate_quadrants(const ProblemSpec& spec, double x, const TestPoint& tp,
                                    const McConfig& mc) {
  mc.validate();
  const PairGeometry geo = pair_geometry(spec, x, tp.h1, tp.h2);
  const double t1 = 0.5 * spec.var_v() * b_joint(spec, x, tp.h1);
  const double t2 = 0.5 * spec.var_v() * b_joint(spec, x, tp.h2);

  using Counts = std::array<std::uint64_t, 4>;
  auto chunk = [&](std::uint64_t begin, std::uint64_t end) {
    ComplexVector v(spec.n_y());
    Counts c{};
    for (std::uint64_t i = begin; i < end; ++i) {
      fill_noise(spec, mc.seed, i, v);
      const bool clip1 = re_inner(v, geo.d1) >= t1;
      const bool clip2 = re_inner(v, geo.d2) >= t2;
      // Quadrant index: bit 1 set when factor 1 is active, bit 0 for factor 2.
      ++c[(clip1 ? 0 : 2) + (clip2 ? 0 : 1)];
    }
    return c;
  };

  QuadrantEstimate out;
  for (const Counts& c : run_chunks<Counts>(mc, chunk)) {
    for (std::size_t q = 0; q < 4; ++q) out.counts[q] += c[q];
  }
  const double n = static_cast<double>(mc.n_samples);
  for (std::size_t q = 0; q < 4; ++q) {
    const double p = static_cast<double>(out.counts[q]) / n;
    out.freq[q] = {p, std::sqrt(p * (1.0 - p) / (n - 1.0)), mc.n_samples};
  }
  return out;
}

}  // namespace clipmu
