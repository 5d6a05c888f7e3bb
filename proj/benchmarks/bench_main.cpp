#include <benchmark/benchmark.h>

#include "seaz/metrics.hpp"
#include "seaz/simulate.hpp"

using namespace seaz;

namespace {

model::SeaConfig config(model::Architecture a) {
    model::SeaConfig c;
    c.arch = a;
    c.ff = model::FeedforwardKind::Zero;
    c.imp = {1000.0, 0.1};
    return c;
}

void BM_SpringPortSweep(benchmark::State& state) {
    const auto cfg = config(static_cast<model::Architecture>(state.range(0)));
    const auto z = model::spring_port(cfg).Z_s;
    const double tol = passivity::default_tolerance(cfg.plant);
    for (auto _ : state) benchmark::DoNotOptimize(passivity::positive_real_margin(z, tol));
}
BENCHMARK(BM_SpringPortSweep)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_MaxSafeStiffness(benchmark::State& state) {
    const auto cfg = config(static_cast<model::Architecture>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(metrics::max_safe_stiffness(cfg, metrics::Condition::LoadStrict));
    }
}
BENCHMARK(BM_MaxSafeStiffness)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_ZRegion(benchmark::State& state) {
    const auto cfg = config(model::Architecture::Dobm);
    for (auto _ : state) benchmark::DoNotOptimize(metrics::z_region(cfg));
}
BENCHMARK(BM_ZRegion)->Unit(benchmark::kMillisecond);

void BM_SimulationStep(benchmark::State& state) {
    const auto cfg = config(static_cast<model::Architecture>(state.range(0)));
    const auto env = sim::default_environments(cfg.plant).front();
    const sim::ClosedLoop sys(cfg, env, sim::SimConfig{});
    Eigen::VectorXd x = Eigen::VectorXd::Zero(sys.layout().n);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(sim::kInputs);
    w(sim::kOne) = 1.0;
    w(sim::kThetaD) = 1e-3;
    for (auto _ : state) {
        x = sys.step(x, w, true);
        benchmark::DoNotOptimize(x.data());
    }
}
BENCHMARK(BM_SimulationStep)->Arg(0)->Arg(1)->Arg(2);

void BM_StepScenario(benchmark::State& state) {
    const auto cfg = config(model::Architecture::Dobm);
    const auto env = sim::default_environments(cfg.plant).front();
    const sim::ClosedLoop sys(cfg, env, sim::SimConfig{});
    for (auto _ : state) benchmark::DoNotOptimize(sim::run_scenario(sys, sim::Scenario::step_in_contact(1e-3)));
}
BENCHMARK(BM_StepScenario)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
