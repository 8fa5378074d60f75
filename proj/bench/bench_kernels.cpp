// Serial reference against the OpenMP kernels.

#include <benchmark/benchmark.h>

#include "zt/entanglement.hpp"
#include "zt/parallel.hpp"
#include "zt/open_system.hpp"
#include "zt/transfer.hpp"

namespace {

zt::LatticeModel bench_model() {
    zt::DisorderSpec spec;
    spec.n_sites = 6;
    spec.topology = zt::Topology::complete;
    spec.seed = 3;
    return zt::build_graph(spec);
}

void BM_TauScanSerial(benchmark::State& state) {
    const auto m = bench_model();
    const auto grid = zt::eps_tau_grid(10.0, 0.05, 20.0, int(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(zt::tau_scan_serial(m, grid));
}

void BM_TauScanParallel(benchmark::State& state) {
    const auto m = bench_model();
    const auto grid = zt::eps_tau_grid(10.0, 0.05, 20.0, int(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(zt::tau_scan(m, grid));
}

const zt::DephasingSpec& jump_spec() {
    static const zt::DephasingSpec spec{zt::symmetric_trimer(), 5.0, {2}};
    return spec;
}

void BM_EnsembleSerial(benchmark::State& state) {
    const auto rho0 = zt::DensityMatrix::pure_site(3, 2);
    for (auto _ : state)
        benchmark::DoNotOptimize(zt::quantum_jump_ensemble_serial(
            jump_spec(), rho0, {1.0, 5.0, 10.0}, int(state.range(0)), 1, zt::JumpMode::poisson));
}

void BM_EnsembleParallel(benchmark::State& state) {
    const auto rho0 = zt::DensityMatrix::pure_site(3, 2);
    for (auto _ : state)
        benchmark::DoNotOptimize(zt::quantum_jump_ensemble(
            jump_spec(), rho0, {1.0, 5.0, 10.0}, int(state.range(0)), 1, zt::JumpMode::poisson));
}

} // namespace

BENCHMARK(BM_TauScanSerial)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TauScanParallel)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnsembleSerial)->Arg(4096)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnsembleParallel)->Arg(4096)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
    zt::configure_threads();
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
}
