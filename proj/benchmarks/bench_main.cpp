#include <benchmark/benchmark.h>

#include "clipmu/analytic_mu.hpp"
#include "clipmu/mc_oracle.hpp"
#include "clipmu/special_functions.hpp"

namespace {

using namespace clipmu;

void BM_Phi2(benchmark::State& state) {
  const double rho = static_cast<double>(state.range(0)) / 100.0;
  GaussianPairSpec g;
  g.upper = {0.3, -0.7};
  g.cov = {{{1.0, rho}, {rho, 1.0}}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(phi2(g));
  }
}
BENCHMARK(BM_Phi2)->Arg(0)->Arg(50)->Arg(90)->Arg(99);

void BM_LogPhi2Tail(benchmark::State& state) {
  GaussianPairSpec g;
  g.upper = {-20.0, -25.0};
  g.cov = {{{1.0, 0.6}, {0.6, 1.0}}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_phi2(g));
  }
}
BENCHMARK(BM_LogPhi2Tail);

const ProblemSpec& exp_spec() {
  static const ProblemSpec spec(1.0, 0.7,
                                ObservationModel::complex_exponential({1.0, 2.5}, {1.0, 0.5}));
  return spec;
}

void BM_MuJointGeneral(benchmark::State& state) {
  const TestPoint tp{2, -1, 0.4, 0.9, std::nullopt};
  for (auto _ : state) {
    benchmark::DoNotOptimize(mu_yx_general(exp_spec(), tp));
  }
}
BENCHMARK(BM_MuJointGeneral)->Unit(benchmark::kMillisecond);

void BM_MuJointSpecial(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(mu_yx_special(exp_spec(), {1, 1}, 0.6));
  }
}
BENCHMARK(BM_MuJointSpecial)->Unit(benchmark::kMillisecond);

void BM_McJoint(benchmark::State& state) {
  const TestPoint tp{1, 1, 0.4, 0.9, std::nullopt};
  McConfig mc;
  mc.n_samples = static_cast<std::uint64_t>(state.range(0));
  mc.threads = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_mu(exp_spec(), Family::kJoint, tp, mc));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_McJoint)->Arg(1 << 16)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
