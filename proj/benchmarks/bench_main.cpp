#include "tripod/dynamics.hpp"
#include "tripod/lindblad_kernel.hpp"
#include "tripod/propagation.hpp"
#include "tripod/protocol.hpp"

#include <benchmark/benchmark.h>

using namespace tripod;

namespace {

void kernel_step(benchmark::State& state) {
    const auto variant = state.range(0) ? SchemeVariant::Zeeman8 : SchemeVariant::Tripod4;
    const auto scheme = build_scheme(variant, 6.0, false);
    DriveConfig d;
    d.omega_c = 14.0;
    d.b_field = 0.15;
    const auto h = SparseHamiltonian::from_dense(build_hamiltonian(scheme, d, {0.5, 0.5}));
    const auto jumps = lindblad_dissipators(scheme, 0.01);
    const LindbladKernel k(scheme.size(), jumps);
    const DensityMatrix rho0 = polariton_vacuum(scheme);
    RhoStorage rho{};
    for (int i = 0; i < scheme.size(); ++i)
        for (int j = 0; j < scheme.size(); ++j) rho[i * scheme.size() + j] = rho0(i, j);
    for (auto _ : state) {
        k.rk4_step(rho.data(), h, h, h, 1e-3);
        benchmark::DoNotOptimize(rho.data());
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(kernel_step)->Arg(0)->Arg(1);

void propagate_gauss(benchmark::State& state) {
    const auto scheme = build_scheme(SchemeVariant::Tripod4, 6.0, false);
    DriveConfig d;
    d.omega_c = 7.0;
    const MediumParams m{coupling_density_for_delay(6.0, 7.0, 50.0), 0.0};
    SignalPulse p;
    p.shape = PulseShape::Gauss;
    p.length = 3.0;
    p.amplitude = 0.35;
    const auto sched = signal_schedule(p, {});
    Grid g;
    g.nz = static_cast<int>(state.range(0));
    g.t_max = 20.0;
    g.nt = required_time_steps(scheme, d, sched, g.t_max);
    PropagateOptions o;
    o.threads = static_cast<int>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(propagate(scheme, m, d, sched, g, o));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.nz) * g.nt);
}
BENCHMARK(propagate_gauss)->Args({60, 1})->Args({120, 1})->Args({120, 2})->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
