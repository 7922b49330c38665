// SPDX-License-Identifier: Apache-2.0
#include "cranspar/analysis.hpp"
#include "cranspar/detection.hpp"
#include "cranspar/optimizer.hpp"

#include <benchmark/benchmark.h>

using namespace cranspar;

namespace {

analysis::BoundInputs inputs(PdfKind kind)
{
    return {NetworkConfig::table1(), {kind, 0.0}, Estimator::LS, PilotKind::Orthogonal};
}

void BM_BoundDisc(benchmark::State& state)
{
    const auto in = inputs(PdfKind::DiscApprox);
    double d0 = 10.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(analysis::fidelity_lower_bound(in, d0));
        d0 = d0 < 4990.0 ? d0 + 7.0 : 10.0;
    }
}
BENCHMARK(BM_BoundDisc);

void BM_BoundIut1(benchmark::State& state)
{
    const auto in = inputs(PdfKind::Iut1);
    double d0 = 10.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(analysis::fidelity_lower_bound(in, d0));
        d0 = d0 < 4990.0 ? d0 + 7.0 : 10.0;
    }
}
BENCHMARK(BM_BoundIut1);

void BM_Dinkelbach(benchmark::State& state)
{
    auto in = inputs(PdfKind::DiscApprox);
    // interior optimum so the bisection actually runs
    in.cfg.error_variance_override = 1e-12;
    for (auto _ : state) {
        benchmark::DoNotOptimize(optimizer::dinkelbach(in, {}).final_d0);
    }
}
BENCHMARK(BM_Dinkelbach);

void BM_GridOracle(benchmark::State& state)
{
    const auto in = inputs(PdfKind::DiscApprox);
    for (auto _ : state) {
        benchmark::DoNotOptimize(optimizer::grid_oracle(in, static_cast<int>(state.range(0))).d0);
    }
}
BENCHMARK(BM_GridOracle)->Arg(1000)->Arg(10000);

void BM_MonteCarloTrial(benchmark::State& state)
{
    MonteCarloRequest req;
    req.cfg = NetworkConfig::desk_scale();
    req.pdf = DistancePdf::disc_approx();
    req.trials = 2;
    const std::vector<double> grid = {1000.0, 5000.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(fidelity_curve(req, grid));
        ++req.seed;
    }
    state.SetItemsProcessed(state.iterations() * req.trials);
}
BENCHMARK(BM_MonteCarloTrial)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
