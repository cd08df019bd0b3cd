// Copyright 2026 The lolysim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "lolysim/distribution_fit.hpp"
#include "lolysim/error_model.hpp"
#include "lolysim/experiment.hpp"
#include "lolysim/predictors.hpp"
#include "lolysim/simulation.hpp"
#include "lolysim/trace.hpp"

namespace {

using namespace lolysim;

std::vector<double> random_rates(std::size_t n, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> value(1e5, 20e6);
  std::vector<double> x(n);
  for (auto& v : x) v = value(rng);
  return x;
}

ThroughputTrace bench_trace(std::size_t seconds) {
  ThroughputTrace trace;
  trace.id = "bench";
  const auto rates = random_rates(seconds, 1);
  trace.samples.assign(rates.begin(), rates.end());
  for (auto& v : trace.samples) v += 2e6;  // keep well above zero
  return trace;
}

void BM_SmaPredict(benchmark::State& state) {
  const auto history = random_rates(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sma_predict(history, MeanType::kArithmetic));
  }
}
BENCHMARK(BM_SmaPredict)->Arg(1)->Arg(10);

void BM_HoltWintersTuned(benchmark::State& state) {
  const auto history = random_rates(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hw_predict(history));
  }
}
BENCHMARK(BM_HoltWintersTuned)->Arg(5)->Arg(10)->Arg(20);

void BM_SignedEcdfQuery(benchmark::State& state) {
  ErrorHistory history(10, std::nullopt, 3);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> value(-0.9, 3.0);
  for (long long t = 0; t < state.range(0); ++t) history.record(t, 3, value(rng));
  const double now = static_cast<double>(state.range(0));
  double x = -1.0;
  for (auto _ : state) {
    x = x >= 3.0 ? -1.0 : x + 0.01;
    benchmark::DoNotOptimize(history.signed_ecdf(3, now, x));
  }
}
BENCHMARK(BM_SignedEcdfQuery)->Arg(300)->Arg(3000);

void BM_MeasureThroughput(benchmark::State& state) {
  ThroughputMeter meter;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> bits(1e5, 40e6);
  double t = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double end = t + 0.5 + (rng() % 1500) / 1000.0;
    meter.add({t, end, bits(rng)});
    t = end + (rng() % 1000) / 1000.0;
  }
  double t1 = 0.0;
  for (auto _ : state) {
    t1 = t1 + 1.0 > t - 10.0 ? 0.0 : t1 + 1.0;
    benchmark::DoNotOptimize(measure_throughput(meter, t1, t1 + 10.0));
  }
}
BENCHMARK(BM_MeasureThroughput);

void BM_RunSession(benchmark::State& state) {
  const auto trace = bench_trace(340);
  const auto catalog =
      build_synthetic_catalog(default_representation_ladder(), 200, 2.0, 0.1, 6);
  const Timeline timeline{5.0};
  SimConfig config;
  config.algorithm = Algorithm::kLolypop;
  config.lolypop.sigma_star = 0.05;
  config.lolypop.omega_star = 0.1;
  config.session_length_s = 300.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_session(trace, catalog, timeline, config));
  }
}
BENCHMARK(BM_RunSession)->Unit(benchmark::kMillisecond);

void BM_FitLomax(benchmark::State& state) {
  const auto samples = sample_lomax(1.5, 0.4, 5000, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_truncated(samples, ErrorSide::kOver, DistFamily::kLomax));
  }
}
BENCHMARK(BM_FitLomax)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
