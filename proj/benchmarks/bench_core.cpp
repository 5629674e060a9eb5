#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "speeduplab/classifier.hpp"
#include "speeduplab/fitting.hpp"

using namespace speeduplab;

static void BM_Parse(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(parse("a*(2*n^2 - n)/p + b*(n^2 + n)"));
}
BENCHMARK(BM_Parse);

static void BM_Evaluate(benchmark::State& state) {
  const Expr e = parse("a*(2*n^2 - n)/p + b*(n^2 + n)");
  const Constants c{{"a", 1.0}, {"b", 2.0}};
  double p = 2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate(e, Bindings{p, 1000.0, &c}));
    p = p > 1e6 ? 2.0 : p * 1.01;
  }
}
BENCHMARK(BM_Evaluate);

static void BM_Classify(benchmark::State& state) {
  const auto fam = default_family();
  const CostModel m = trapezoid_model();
  for (auto _ : state) benchmark::DoNotOptimize(classify(m, fam).verdict);
}
BENCHMARK(BM_Classify)->Unit(benchmark::kMillisecond);

static void BM_Fit(benchmark::State& state) {
  std::vector<TimingSample> samples;
  const CostModel m = matvec_model();
  for (std::int64_t p = 1; p <= 64; p *= 2) {
    for (std::int64_t n = 10; n <= 10000; n *= 2) {
      samples.push_back({p, n, m.parallel_time(double(p), double(n))});
    }
  }
  const ModelTemplate tmpl = matvec_template();
  for (auto _ : state) benchmark::DoNotOptimize(fit(tmpl, samples).residual_norm);
}
BENCHMARK(BM_Fit)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
