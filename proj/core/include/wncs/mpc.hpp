#pragma once
#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "wncs/dynamics.hpp"

namespace wncs {

struct MpcConfig {
  int horizon_steps = 10;
  Eigen::MatrixXd Q;           // stage state weight
  Eigen::MatrixXd R;           // stage input weight
  Eigen::MatrixXd terminal_P;  // terminal state weight (DARE solution by default)
  double u_min = -1.0;
  double u_max = 1.0;
  double qp_tolerance = 1e-8;
  int qp_max_iters = 500;

  void validate() const;  // throws ConfigError
};

// Horizon of input vectors stamped with the controller tick that produced it.
struct CommandSequence {
  std::int64_t created_at_tick = 0;
  std::vector<Eigen::VectorXd> commands;
};

struct MpcDiagnostics {
  int iterations = 0;
  double residual = 0.0;  // projected-gradient norm at exit
  bool inexact = false;   // budget exhausted before reaching qp_tolerance
  std::vector<double> cost_history;
};

struct MpcResult {
  CommandSequence sequence;
  MpcDiagnostics diagnostics;
};

// Finite-horizon constrained tracking LQR, solved as a condensed QP over the
// stacked input sequence by gradient projection with fixed step 1/L. The
// Hessian and step size depend only on (model, config), so they are built
// once here and reused across solves.
class MpcSolver {
 public:
  MpcSolver(const Eigen::MatrixXd& Ad, const Eigen::MatrixXd& Bd,
            const MpcConfig& cfg);

  MpcResult solve(const Eigen::VectorXd& x0, const Eigen::VectorXd& x_des,
                  std::int64_t tick = 0) const;

  // QP objective for a stacked input vector (diagnostic/testing hook).
  double objective(const Eigen::VectorXd& z, const Eigen::VectorXd& x0,
                   const Eigen::VectorXd& x_des) const;

 private:
  Eigen::VectorXd gradient_offset(const Eigen::VectorXd& x0,
                                  const Eigen::VectorXd& x_des) const;

  MpcConfig cfg_;
  int n_ = 0, m_ = 0, N_ = 0;
  Eigen::MatrixXd Sx_;  // stacked free response,   (N n) x n
  Eigen::MatrixXd Su_;  // stacked input response,  (N n) x (N m)
  Eigen::MatrixXd W_;   // block-diag(Q,...,Q,P),   (N n) x (N n)
  Eigen::MatrixXd H_;   // condensed Hessian
  double step_ = 0.0;   // 1/L, L = lambda_max(H) via power iteration
};

// One-shot convenience wrapper around MpcSolver.
MpcResult mpc_solve(const Eigen::VectorXd& x0, const Eigen::VectorXd& x_des,
                    const PlatoonModel& model, const MpcConfig& cfg,
                    std::int64_t tick = 0);

// Receiver-side store that replays the latest command sequence, one entry
// per actuator tick, to bridge downlink packet loss.
class ActuatorBuffer {
 public:
  enum class ExhaustedPolicy { kHoldLast, kZero };

  explicit ActuatorBuffer(int command_dim,
                          ExhaustedPolicy policy = ExhaustedPolicy::kHoldLast)
      : dim_(command_dim), policy_(policy) {}

  // Accepts only sequences strictly newer than the stored one; stale pushes
  // are dropped and counted.
  void push(const CommandSequence& seq);

  // Next command for this tick. Past the end (or before any push) the output
  // follows the exhausted policy and the event is counted.
  Eigen::VectorXd pop();

  bool has_sequence() const { return !seq_.commands.empty(); }
  int cursor() const { return cursor_; }
  std::int64_t current_tick() const { return seq_.created_at_tick; }
  long stale_count() const { return stale_count_; }
  long exhausted_count() const { return exhausted_count_; }
  ExhaustedPolicy policy() const { return policy_; }

 private:
  int dim_;
  ExhaustedPolicy policy_;
  CommandSequence seq_;
  int cursor_ = 0;
  bool ever_pushed_ = false;
  long stale_count_ = 0;
  long exhausted_count_ = 0;
};

}  // namespace wncs
