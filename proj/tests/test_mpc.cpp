#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "wncs/control.hpp"
#include "wncs/dynamics.hpp"
#include "wncs/errors.hpp"
#include "wncs/mpc.hpp"
#include "wncs/rng.hpp"

using namespace wncs;

namespace {

MpcConfig platoon_mpc_config(const PlatoonModel& model, double u_bound,
                             int max_iters) {
  const LqrConfig lqr = LqrConfig::platoon_default();
  MpcConfig cfg;
  cfg.horizon_steps = 10;
  cfg.Q = lqr.Q;
  cfg.R = lqr.R;
  cfg.terminal_P = solve_dare(model.Ad, model.Bd, lqr.Q, lqr.R).P;
  cfg.u_min = -u_bound;
  cfg.u_max = u_bound;
  cfg.qp_max_iters = max_iters;
  return cfg;
}

}  // namespace

TEST_CASE("equilibrium start yields the zero sequence") {
  const PlatoonModel model(0.1);
  const MpcConfig cfg = platoon_mpc_config(model, 1.0, 2000);
  const Eigen::Vector3d x_des(0.1, 0.45, 0.45);
  const MpcResult res = mpc_solve(x_des, x_des, model, cfg);
  for (const auto& u : res.sequence.commands)
    CHECK(u.cwiseAbs().maxCoeff() < 1e-9);
  CHECK_FALSE(res.diagnostics.inexact);
}

TEST_CASE("unconstrained solutions match the riccati recursion") {
  const PlatoonModel model(0.1);
  MpcConfig cfg = platoon_mpc_config(model, 1e6, 20000);
  cfg.qp_tolerance = 1e-9;
  const MpcSolver solver(model.Ad, model.Bd, cfg);
  Rng rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    const double v = rng.uniform(0.0, 0.5);
    const Eigen::Vector3d x_des(0.1, v, v);
    const Eigen::Vector3d x0(rng.uniform(0.0, 1.2), rng.uniform(0.0, 0.6),
                             rng.uniform(0.0, 0.6));
    const MpcResult res = solver.solve(x0, x_des);
    const auto ref = oracles::finite_horizon_inputs(
        model.Ad, model.Bd, cfg.Q, cfg.R, cfg.terminal_P, cfg.horizon_steps,
        x0, x_des);
    for (int k = 0; k < cfg.horizon_steps; ++k)
      CHECK((res.sequence.commands[k] - ref[k]).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("tightly constrained two-step problem matches grid search") {
  // scalar double integrator, strongly saturated start
  const double T = 0.1;
  Eigen::MatrixXd Ad(2, 2), Bd(2, 1), Q(2, 2), R(1, 1);
  Ad << 1, T, 0, 1;
  Bd << 0.5 * T * T, T;
  Q = Eigen::MatrixXd::Identity(2, 2);
  R << 1.0;
  const Eigen::MatrixXd P = solve_dare(Ad, Bd, Q, R).P;

  MpcConfig cfg;
  cfg.horizon_steps = 2;
  cfg.Q = Q;
  cfg.R = R;
  cfg.terminal_P = P;
  cfg.u_min = -1.0;
  cfg.u_max = 1.0;
  cfg.qp_max_iters = 20000;
  cfg.qp_tolerance = 1e-10;
  const MpcSolver solver(Ad, Bd, cfg);

  const Eigen::Vector2d x0(1.0, 0.8);
  const Eigen::Vector2d x_des(0.0, 0.0);
  const MpcResult res = solver.solve(x0, x_des);

  // exhaustive 1e-3 grid over (u0, u1), cost evaluated by direct rollout
  const double h = 1e-3;
  double best_cost = std::numeric_limits<double>::infinity();
  double best_u0 = 0, best_u1 = 0;
  for (int i = -1000; i <= 1000; ++i) {
    for (int j = -1000; j <= 1000; ++j) {
      const double u0 = i * h, u1 = j * h;
      const double cost = oracles::rollout_cost(
          Ad, Bd, Q, R, P, x0, x_des,
          {Eigen::VectorXd::Constant(1, u0), Eigen::VectorXd::Constant(1, u1)});
      if (cost < best_cost) {
        best_cost = cost;
        best_u0 = u0;
        best_u1 = u1;
      }
    }
  }
  const double solver_cost = oracles::rollout_cost(
      Ad, Bd, Q, R, P, x0, x_des, res.sequence.commands);
  CHECK(solver_cost <= best_cost + 1e-9);  // at least as good as any grid point
  CHECK(std::abs(res.sequence.commands[0](0) - best_u0) <= h);
  CHECK(std::abs(res.sequence.commands[1](0) - best_u1) <= h);
}

TEST_CASE("every iterate respects the box exactly") {
  const PlatoonModel model(0.1);
  const MpcConfig cfg = platoon_mpc_config(model, 1.0, 200);
  const MpcSolver solver(model.Ad, model.Bd, cfg);
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Vector3d x0(rng.uniform(0.0, 2.0), rng.uniform(0.0, 1.0),
                             rng.uniform(0.0, 1.0));
    const MpcResult res = solver.solve(x0, Eigen::Vector3d(0.1, 0.4, 0.4));
    for (const auto& u : res.sequence.commands) {
      CHECK(u.maxCoeff() <= cfg.u_max);
      CHECK(u.minCoeff() >= cfg.u_min);
    }
    CHECK(static_cast<int>(res.sequence.commands.size()) == cfg.horizon_steps);
  }
}

TEST_CASE("objective is non-increasing across iterations") {
  const PlatoonModel model(0.1);
  const MpcConfig cfg = platoon_mpc_config(model, 1.0, 500);
  const MpcSolver solver(model.Ad, model.Bd, cfg);
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Vector3d x0(rng.uniform(0.0, 2.0), rng.uniform(0.0, 1.0),
                             rng.uniform(0.0, 1.0));
    const MpcResult res = solver.solve(x0, Eigen::Vector3d(0.1, 0.4, 0.4));
    const auto& hist = res.diagnostics.cost_history;
    REQUIRE(hist.size() >= 2);
    for (std::size_t k = 1; k < hist.size(); ++k)
      CHECK(hist[k] <= hist[k - 1] + 1e-9 * std::abs(hist[k - 1]));
  }
}

TEST_CASE("budget exhaustion flags the result inexact") {
  const PlatoonModel model(0.1);
  const MpcConfig cfg = platoon_mpc_config(model, 1.0, 3);
  const MpcResult res =
      mpc_solve(Eigen::Vector3d(1.0, 0, 0), Eigen::Vector3d(0.1, 0.4, 0.4),
                model, cfg);
  CHECK(res.diagnostics.inexact);
  CHECK(res.diagnostics.iterations == 3);
  CHECK(res.diagnostics.residual > cfg.qp_tolerance);
  CHECK(static_cast<int>(res.sequence.commands.size()) == cfg.horizon_steps);
}

TEST_CASE("mpc config validation") {
  const PlatoonModel model(0.1);
  MpcConfig cfg = platoon_mpc_config(model, 1.0, 100);
  cfg.horizon_steps = 0;
  CHECK_THROWS_AS(MpcSolver(model.Ad, model.Bd, cfg), ConfigError);
  cfg = platoon_mpc_config(model, 1.0, 100);
  cfg.u_min = 2.0;
  CHECK_THROWS_AS(MpcSolver(model.Ad, model.Bd, cfg), ConfigError);
}

namespace {

CommandSequence make_seq(std::int64_t tick, std::initializer_list<double> us) {
  CommandSequence seq;
  seq.created_at_tick = tick;
  for (double u : us) seq.commands.push_back(Eigen::VectorXd::Constant(1, u));
  return seq;
}

}  // namespace

TEST_CASE("actuator buffer") {
  SUBCASE("replays a pushed sequence in order") {
    ActuatorBuffer buf(1);
    buf.push(make_seq(1, {0.1, 0.2, 0.3}));
    CHECK(buf.pop()(0) == 0.1);
    CHECK(buf.pop()(0) == 0.2);
    CHECK(buf.pop()(0) == 0.3);
    CHECK(buf.exhausted_count() == 0);
  }
  SUBCASE("stale sequences are dropped and counted") {
    ActuatorBuffer buf(1);
    buf.push(make_seq(7, {0.7, 0.7}));
    buf.push(make_seq(5, {0.5, 0.5}));
    CHECK(buf.stale_count() == 1);
    CHECK(buf.pop()(0) == 0.7);
    buf.push(make_seq(7, {0.9}));  // same tick is stale too
    CHECK(buf.stale_count() == 2);
  }
  SUBCASE("a newer sequence restarts the replay") {
    ActuatorBuffer buf(1);
    buf.push(make_seq(7, {0.1, 0.2, 0.3, 0.4}));
    buf.pop();
    buf.pop();
    buf.pop();
    buf.push(make_seq(8, {0.8, 0.9}));
    CHECK(buf.pop()(0) == 0.8);
    CHECK(buf.pop()(0) == 0.9);
  }
  SUBCASE("hold-last policy repeats the final command") {
    ActuatorBuffer buf(1, ActuatorBuffer::ExhaustedPolicy::kHoldLast);
    buf.push(make_seq(1, {0.1, 0.2}));
    buf.pop();
    buf.pop();
    CHECK(buf.pop()(0) == 0.2);
    CHECK(buf.pop()(0) == 0.2);
    CHECK(buf.exhausted_count() == 2);
  }
  SUBCASE("zero policy emits zeros") {
    ActuatorBuffer buf(1, ActuatorBuffer::ExhaustedPolicy::kZero);
    buf.push(make_seq(1, {0.1, 0.2}));
    buf.pop();
    buf.pop();
    CHECK(buf.pop()(0) == 0.0);
    CHECK(buf.exhausted_count() == 1);
  }
  SUBCASE("popping before any push counts as exhaustion and yields zero") {
    ActuatorBuffer buf(2);
    const Eigen::VectorXd u = buf.pop();
    CHECK(u.size() == 2);
    CHECK(u.cwiseAbs().maxCoeff() == 0.0);
    CHECK(buf.exhausted_count() == 1);
  }
}
