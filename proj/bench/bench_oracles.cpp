#include <benchmark/benchmark.h>

#include <array>
#include <random>

#include "smax/oracles.hpp"
#include "smax/sampling.hpp"
#include "smax/spec_subdiff.hpp"

using namespace smax;

namespace {

constexpr std::array<double, 3> kRadii = {1e-2, 1e-3, 1e-4};

struct Instance {
  JordanSpec spec;
  CMatrix Y;
};

// Fixed n-by-n radius2 instance with a member subgradient.
Instance instance(int n) {
  static const Generator f = Generator::builtin("radius2");
  std::mt19937_64 rng(1234 + n);
  RandomSpecOptions opt;
  opt.min_n = n;
  opt.max_n = n;
  JordanSpec s = random_spec(f, rng, opt);
  CMatrix Y = regular_sample(s, f, rng);
  return {s, Y};
}

Exec mode(const benchmark::State& state) { return state.range(1) == 0 ? Exec::serial : Exec::parallel; }

void BM_InequalitySuite(benchmark::State& state) {
  static const Generator f = Generator::builtin("radius2");
  Instance in = instance(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto r = subgradient_inequality_suite(in.spec, f, in.Y, 500, kRadii, 7, mode(state));
    benchmark::DoNotOptimize(r.max_violation);
  }
  state.SetItemsProcessed(state.iterations() * 500);
}

void BM_RegularGap(benchmark::State& state) {
  static const Generator f = Generator::builtin("radius2");
  Instance in = instance(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto g = regular_gap(in.spec, f, in.Y, 500, kRadii, 7, mode(state));
    benchmark::DoNotOptimize(g.data());
  }
  state.SetItemsProcessed(state.iterations() * 500);
}

void BM_CrossOracle(benchmark::State& state) {
  static const Generator f = Generator::builtin("radius2");
  Instance in = instance(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto r = cross_oracle_agreement(in.spec, f, 100, 7, mode(state));
    benchmark::DoNotOptimize(r.members);
  }
  state.SetItemsProcessed(state.iterations() * 200);
}

// Second argument: 0 serial, 1 parallel.
void sizes(benchmark::internal::Benchmark* b) {
  for (int n : {3, 5})
    for (int p : {0, 1}) b->Args({n, p});
  b->Unit(benchmark::kMillisecond)->UseRealTime();
}

}  // namespace

BENCHMARK(BM_InequalitySuite)->Apply(sizes);
BENCHMARK(BM_RegularGap)->Apply(sizes);
BENCHMARK(BM_CrossOracle)->Apply(sizes);

BENCHMARK_MAIN();
