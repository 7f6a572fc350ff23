// Copyright 2026 The qlan Authors
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

// Serial reference against the OpenMP kernels. The Arg selects the execution mode:
// 0 is serial, 1 is parallel.

#include <benchmark/benchmark.h>

#include "qlan/fock_gaussian.hpp"
#include "qlan/lan_channels.hpp"
#include "qlan/risk_bench.hpp"

namespace qlan {
namespace {

Execution mode(const benchmark::State& s) {
    return s.range(0) == 0 ? Execution::serial : Execution::parallel;
}

void BM_PointwiseRisk(benchmark::State& s) {
    const QubitState rho(Eigen::Vector3d(0.01, 0.0, 0.5));
    const EstimatorConfig c;
    for (auto _ : s) {
        benchmark::DoNotOptimize(pointwise_risk(rho, 1000000, LossKind::local, c, 2000, 7, 0, mode(s)));
    }
    s.SetItemsProcessed(s.iterations() * 2000);
}
BENCHMARK(BM_PointwiseRisk)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ApplyT(benchmark::State& s) {
    const ModelParams p{0.8, 200};
    const LocalParam u(1, 1, 1);
    const Grid g = channel_grid(p, u);
    const int dim = auto_fock_dim(p.mu, u);
    for (auto _ : s) {
        benchmark::DoNotOptimize(apply_T(p, u, dim, g, mode(s)));
    }
}
BENCHMARK(BM_ApplyT)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_HybridTraceDistance(benchmark::State& s) {
    const ModelParams p{0.8, 200};
    const LocalParam u(1, 1, 1);
    const Grid g = channel_grid(p, u);
    const int dim = auto_fock_dim(p.mu, u);
    const HybridState a = apply_T(p, u, dim, g);
    const HybridState b = gaussian_limit(p, u, dim, g);
    for (auto _ : s) {
        benchmark::DoNotOptimize(hybrid_trace_distance(a, b, mode(s)));
    }
}
BENCHMARK(BM_HybridTraceDistance)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_HoeffdingCheck(benchmark::State& s) {
    const QubitState rho(Eigen::Vector3d(0.3, -0.2, 0.5));
    for (auto _ : s) {
        benchmark::DoNotOptimize(hoeffding_check(rho, {10000}, {0.2}, 0.1, 5000, 7, mode(s)));
    }
}
BENCHMARK(BM_HoeffdingCheck)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace qlan

BENCHMARK_MAIN();
