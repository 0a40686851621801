// Copyright 2026 The dvq Authors.
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

// Serial reference kernels against their OpenMP counterparts, and the
// Monte-Carlo driver at different thread counts. Arguments are
// (rows, prototypes) for the SOM kernels and jobs for the simulations.

#include <benchmark/benchmark.h>

#include <vector>

#include "dvq/datasets.hpp"
#include "dvq/dvq.hpp"
#include "dvq/kernels.hpp"
#include "dvq/rng.hpp"

namespace {

dvq::Matrix random_rows(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  dvq::Rng rng(seed);
  dvq::Matrix m(rows, cols);
  for (double& v : m.flat()) v = rng.normal();
  return m;
}

constexpr std::size_t kDim = 24;

void BM_BatchEpochReference(benchmark::State& state) {
  const auto data = random_rows(static_cast<std::size_t>(state.range(0)), kDim, 1);
  const auto start = random_rows(static_cast<std::size_t>(state.range(1)), kDim, 2);
  std::vector<std::size_t> bmus(data.rows());
  for (auto _ : state) {
    auto protos = start;
    dvq::reference::batch_epoch(protos, data, 2.0, bmus);
    benchmark::DoNotOptimize(protos.flat().data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BatchEpochParallel(benchmark::State& state) {
  const auto data = random_rows(static_cast<std::size_t>(state.range(0)), kDim, 1);
  const auto start = random_rows(static_cast<std::size_t>(state.range(1)), kDim, 2);
  std::vector<std::size_t> bmus(data.rows());
  for (auto _ : state) {
    auto protos = start;
    dvq::kernels::batch_epoch(protos, data, 2.0, bmus, 0);
    benchmark::DoNotOptimize(protos.flat().data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_QuantizationErrorReference(benchmark::State& state) {
  const auto data = random_rows(static_cast<std::size_t>(state.range(0)), kDim, 3);
  const auto protos = random_rows(static_cast<std::size_t>(state.range(1)), kDim, 4);
  for (auto _ : state) benchmark::DoNotOptimize(dvq::reference::quantization_error(protos, data));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_QuantizationErrorParallel(benchmark::State& state) {
  const auto data = random_rows(static_cast<std::size_t>(state.range(0)), kDim, 3);
  const auto protos = random_rows(static_cast<std::size_t>(state.range(1)), kDim, 4);
  for (auto _ : state) benchmark::DoNotOptimize(dvq::kernels::quantization_error(protos, data, 0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_MonteCarlo(benchmark::State& state) {
  static const auto series = [] {
    auto cfg = dvq::GeneratorConfig::defaults(dvq::GeneratorKind::mackey_glass);
    cfg.length = 3000;
    return dvq::generate(cfg);
  }();
  static const auto model = [] {
    dvq::SomConfig cfg;
    cfg.k = 30;
    cfg.seed = 1;
    return dvq::fit(series, dvq::LagSpec(1, {0, 1, 2, 3, 5, 6}), cfg, cfg).model;
  }();
  const int jobs = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto ens = dvq::monte_carlo(model, series.values(), 100, 1000, 7, jobs);
    benchmark::DoNotOptimize(ens.paths.flat().data());
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}

}  // namespace

BENCHMARK(BM_BatchEpochReference)->Args({4096, 20})->Args({32768, 60})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchEpochParallel)->Args({4096, 20})->Args({32768, 60})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_QuantizationErrorReference)->Args({32768, 60})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_QuantizationErrorParallel)->Args({32768, 60})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarlo)->Arg(1)->Arg(2)->Arg(4)->Arg(0)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
