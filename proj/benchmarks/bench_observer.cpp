#include <benchmark/benchmark.h>

#include "navobs/config.hpp"
#include "navobs/harness.hpp"
#include "navobs/range.hpp"

using namespace navobs;

namespace {

struct StepFixture {
  RunConfig cfg = load_config("");
  ObserverSetup setup = make_observer_setup(cfg);
  TruthSimulator truth{cfg.scenario};
  ImuSample meas;
  Eigen::VectorXd y;

  explicit StepFixture(double t) {
    while (truth.state().t < t) truth.advance();
    meas = measure_imu(truth.state(), cfg.scenario);
    y = build_y(measure_ranges(truth.state().p, cfg.scenario.anchors), cfg.scenario.anchors);
  }
};

void BM_Exp(benchmark::State& state) {
  Vec3 v(0.3, -0.2, 0.9);
  for (auto _ : state) {
    benchmark::DoNotOptimize(exp_so3(v));
    v.x() += 1e-12;
  }
}
BENCHMARK(BM_Exp);

void BM_ProposedInnovations(benchmark::State& state) {
  StepFixture f(10.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(proposed_innovations(f.meas, f.y, f.setup.initial, f.setup.gains,
                                                  f.setup.sys, f.cfg.scenario.m_I));
  }
}
BENCHMARK(BM_ProposedInnovations);

// Late in the run the step is split into several substeps; compare both regimes.
void BM_ProposedStep(benchmark::State& state) {
  StepFixture f(static_cast<double>(state.range(0)));
  ObserverState st = f.setup.initial;
  const double dt = f.cfg.scenario.dt;
  const StepInputs u = StepInputs::held(f.meas, f.y);
  for (auto _ : state) {
    st = proposed_step(st, u, f.setup.gains, f.setup.sys, f.cfg.scenario.m_I, f.cfg.scenario.g,
                       dt);
    benchmark::DoNotOptimize(st);
  }
}
BENCHMARK(BM_ProposedStep)->Arg(10)->Arg(55);

void BM_AdhocStep(benchmark::State& state) {
  StepFixture f(10.0);
  ObserverState st = f.setup.initial;
  const StepInputs u = StepInputs::held(f.meas, f.y);
  for (auto _ : state) {
    st = adhoc_step(st, u, f.setup.gains, f.setup.sys, f.cfg.scenario.m_I, f.cfg.scenario.g,
                    f.cfg.scenario.dt);
    benchmark::DoNotOptimize(st);
  }
}
BENCHMARK(BM_AdhocStep);

void BM_FullScenario(benchmark::State& state) {
  RunConfig cfg = load_config("");
  cfg.scenario.t_end = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_scenario(cfg).rows.size());
  }
}
BENCHMARK(BM_FullScenario)->Arg(10)->Arg(60)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
