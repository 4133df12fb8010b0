#include <benchmark/benchmark.h>

#include <sstream>

#include "wncs/config.hpp"
#include "wncs/control.hpp"
#include "wncs/dynamics.hpp"
#include "wncs/ips.hpp"
#include "wncs/mpc.hpp"
#include "wncs/sim.hpp"

using namespace wncs;

namespace {

void BM_Discretize(benchmark::State& state) {
  const PlatoonModel model(0.1);
  for (auto _ : state) {
    auto pair = discretize(model.A, model.B, 0.1);
    benchmark::DoNotOptimize(pair);
  }
}
BENCHMARK(BM_Discretize);

void BM_SolveDare(benchmark::State& state) {
  const PlatoonModel model(0.1);
  const LqrConfig lqr = LqrConfig::platoon_default();
  for (auto _ : state) {
    LqrGain gain = solve_dare(model.Ad, model.Bd, lqr.Q, lqr.R);
    benchmark::DoNotOptimize(gain);
  }
}
BENCHMARK(BM_SolveDare);

void BM_MpcSolve(benchmark::State& state) {
  const PlatoonModel model(0.1);
  const LqrConfig lqr = LqrConfig::platoon_default();
  MpcConfig cfg;
  cfg.horizon_steps = 10;
  cfg.Q = lqr.Q;
  cfg.R = lqr.R;
  cfg.terminal_P = solve_dare(model.Ad, model.Bd, lqr.Q, lqr.R).P;
  cfg.qp_max_iters = static_cast<int>(state.range(0));
  const MpcSolver solver(model.Ad, model.Bd, cfg);
  const Eigen::Vector3d x0(1.0, 0.0, 0.0);
  const Eigen::Vector3d x_des(0.1, 0.45, 0.45);
  for (auto _ : state) {
    MpcResult res = solver.solve(x0, x_des);
    benchmark::DoNotOptimize(res);
  }
}
BENCHMARK(BM_MpcSolve)->Arg(100)->Arg(500)->Arg(5000);

void BM_PfUpdate(benchmark::State& state) {
  SimConfig sc;
  const BeaconMap beacons = make_default_beacons(sc);
  const Arena arena{3.0, 2.0};
  PfConfig pf;
  pf.particle_count = static_cast<int>(state.range(0));
  const RssModel rss;
  Rng rng(1);
  ParticleSet set = pf_init(pf, arena, rng);
  std::vector<BeaconDistance> meas;
  for (const auto& b : beacons.beacons) {
    const double d = std::hypot(1.3 - b.x, 0.9 - b.y);
    meas.push_back({b.id, d});
  }
  for (auto _ : state) {
    auto res = pf_update(set, meas, beacons, pf, arena, rng);
    benchmark::DoNotOptimize(res);
  }
}
BENCHMARK(BM_PfUpdate)->Arg(1000)->Arg(10000);

void BM_SimTick(benchmark::State& state) {
  RunConfig cfg;
  cfg.sim.vehicle_count = 4;
  cfg.sim.duration_s = 1e9;  // stepped manually
  cfg.ips.enabled = state.range(0) != 0;
  Simulation sim(cfg);
  TraceWriter null_writer(nullptr);
  for (auto _ : state) sim.tick(null_writer);
}
BENCHMARK(BM_SimTick)->Arg(0)->Arg(1);

void BM_FullRun(benchmark::State& state) {
  RunConfig cfg;
  cfg.sim.vehicle_count = 2;
  cfg.sim.duration_s = 10.0;
  cfg.ips.enabled = false;
  for (auto _ : state) {
    Simulation sim(cfg);
    RunSummary s = sim.run(nullptr);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_FullRun);

}  // namespace

BENCHMARK_MAIN();
