#include <benchmark/benchmark.h>

#include "vimsim/analysis/linear_model.hpp"
#include "vimsim/dae/integrator.hpp"

namespace {

using namespace vimsim;

dae::Scenario three_bus(dae::ConverterKind kind) {
    dae::Scenario scn;
    scn.buses = {"bus1", "bus2", "bus3"};
    network::BranchParams l12;
    l12.name = "L12";
    l12.from_bus = "bus1";
    l12.to_bus = "bus2";
    l12.r = 0.014;
    l12.l = 0.14;
    l12.c = 0.074;
    network::BranchParams l13 = l12;
    l13.name = "L13";
    l13.to_bus = "bus3";
    scn.branches = {l12, l13};
    scn.loads = {network::RlLoadParams::from_power("load3", "bus3", 0.6, 0.1)};
    scn.grids = {network::StiffGridParams::from_scr("grid", "bus2", 20.0)};
    dae::ConverterSpec c;
    c.name = "vsc1";
    c.bus = "bus1";
    c.kind = kind;
    c.outer.p_set = 0.5;
    c.forming.p_set = 0.5;
    scn.converters = {c};
    return scn;
}

void bm_trapezoid_step(benchmark::State& state) {
    const auto scn = three_bus(dae::ConverterKind::following_vim);
    dae::AssembledSystem sys(scn);
    auto eq = dae::find_equilibrium(sys);
    for (auto _ : state) {
        auto res = dae::simulate(sys, eq.x, eq.y, 0.01, {}, scn.solver);
        benchmark::DoNotOptimize(res.x_final);
    }
    state.SetItemsProcessed(state.iterations() * 100);  // 100 steps per run
}
BENCHMARK(bm_trapezoid_step);

void bm_linearize_and_eigen(benchmark::State& state) {
    const auto scn = three_bus(dae::ConverterKind::following_vim);
    dae::AssembledSystem sys(scn);
    auto eq = dae::find_equilibrium(sys);
    for (auto _ : state) {
        auto model = analysis::linearize(sys, eq.x, eq.y);
        auto modal = analysis::modal_analysis(model);
        benchmark::DoNotOptimize(modal.eigenvalues);
    }
}
BENCHMARK(bm_linearize_and_eigen);

}  // namespace

BENCHMARK_MAIN();
