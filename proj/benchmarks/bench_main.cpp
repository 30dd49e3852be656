#include <benchmark/benchmark.h>

#include <vector>

#include "zifit/fisher.hpp"
#include "zifit/goodness_of_fit.hpp"
#include "zifit/mle.hpp"
#include "zifit/special_functions.hpp"

namespace {

using namespace zifit;

void BM_LogGamma(benchmark::State& state) {
  double x = 0.3, acc = 0.0;
  for (auto _ : state) {
    acc += log_gamma(x);
    x = x < 40.0 ? x + 0.37 : 0.3;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_LogGamma);

void BM_Digamma(benchmark::State& state) {
  double x = 0.3, acc = 0.0;
  for (auto _ : state) {
    acc += digamma(x) + trigamma(x);
    x = x < 40.0 ? x + 0.37 : 0.3;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_Digamma);

std::vector<double> draws(const ModelSpec& spec, const ModelParams& p, std::size_t n) {
  Rng rng = make_rng(42);
  return sample_model(spec, p, n, rng);
}

void BM_FitZinb(benchmark::State& state) {
  const ModelSpec spec = ModelSpec::zero_inflated(Family::NegBinomial);
  const auto data = draws(spec, {0.3, ParameterSet::neg_binomial(5.0, 0.2)},
                          static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit(spec, data).loglik);
}
BENCHMARK(BM_FitZinb)->Arg(200)->Arg(5000);

void BM_FitZibnb(benchmark::State& state) {
  const ModelSpec spec = ModelSpec::zero_inflated(Family::BetaNegBinomial);
  const auto data = draws(spec, {0.3, ParameterSet::beta_neg_binomial(3.0, 3.0, 5.0)},
                          static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit(spec, data).loglik);
}
BENCHMARK(BM_FitZibnb)->Arg(200);

void BM_FisherZinb(benchmark::State& state) {
  const ModelSpec spec = ModelSpec::zero_inflated(Family::NegBinomial);
  const ModelParams p{0.3, ParameterSet::neg_binomial(5.0, 0.2)};
  for (auto _ : state) benchmark::DoNotOptimize(fisher_information(spec, p).matrix(0, 0));
}
BENCHMARK(BM_FisherZinb);

void BM_KsStatistic(benchmark::State& state) {
  const ModelSpec spec = ModelSpec::zero_inflated(Family::Poisson);
  const ModelParams p{0.3, ParameterSet::poisson(10.0)};
  const auto data = draws(spec, p, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ks_statistic(data, spec, p));
}
BENCHMARK(BM_KsStatistic)->Arg(200)->Arg(10000);

void BM_KsTestA(benchmark::State& state) {
  const ModelSpec spec = ModelSpec::zero_inflated(Family::Poisson);
  const auto data = draws(spec, {0.3, ParameterSet::poisson(10.0)}, 200);
  BootstrapOptions opts;
  opts.B = 100;
  opts.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(kstest_A(data, spec, opts).p_value);
}
BENCHMARK(BM_KsTestA)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
