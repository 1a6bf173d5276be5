// Copyright 2026 The mechlab Authors.
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

#include <benchmark/benchmark.h>

#include "mechlab/construct.hpp"
#include "mechlab/verify.hpp"
#include "test_support.hpp"

namespace {

using namespace mechlab;
using mechlab::testing::s1_space;
using mechlab::testing::s1_spec;
using mechlab::testing::sum_merit;

void BM_BuildMixture(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        build_mixture(s1_spec(), sum_merit(), s1_space(), IncreasingAllocation::linear(1.0, 3.0), n));
  }
}
BENCHMARK(BM_BuildMixture)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_CheckIC(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Mechanism m = as_mechanism(
      s1_spec(), build_mixture(s1_spec(), sum_merit(), s1_space(), IncreasingAllocation::linear(1.0, 3.0), 100));
  const Grid g = make_grid(s1_space(), n, n);
  const std::vector<Bundle> b = m.sample(g);
  const auto threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(check_ic(m.utility(), g, b, 1e-8, ICScope::kAllPairs, threads));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.size() * g.size()));
}
BENCHMARK(BM_CheckIC)->Args({21, 1})->Args({41, 1})->Args({41, 4})->Unit(benchmark::kMillisecond);

void BM_Probe(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Grid g = make_grid(s1_space(), n, n);
  const auto ins = state.range(1) == 0 ? Instrument::kPayments : Instrument::kOrdeals;
  for (auto _ : state) {
    benchmark::DoNotOptimize(probe_single_instrument(s1_spec(), sum_merit(), g, ins, 5));
  }
}
BENCHMARK(BM_Probe)->Args({4, 0})->Args({6, 0})->Args({6, 1})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
