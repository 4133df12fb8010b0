#include "wncs/mpc.hpp"

#include <cmath>

#include "wncs/errors.hpp"

namespace wncs {

void MpcConfig::validate() const {
  if (horizon_steps < 1) throw ConfigError("mpc.horizon_steps must be >= 1");
  if (!(u_min < u_max)) throw ConfigError("mpc bounds must satisfy u_min < u_max");
  if (!(qp_tolerance > 0.0)) throw ConfigError("mpc.qp_tolerance must be > 0");
  if (qp_max_iters < 1) throw ConfigError("mpc.qp_max_iters must be >= 1");
}

MpcSolver::MpcSolver(const Eigen::MatrixXd& Ad, const Eigen::MatrixXd& Bd,
                     const MpcConfig& cfg)
    : cfg_(cfg),
      n_(static_cast<int>(Ad.rows())),
      m_(static_cast<int>(Bd.cols())),
      N_(cfg.horizon_steps) {
  cfg_.validate();

  // prediction matrices: stacked [x_1; ...; x_N] = Sx x0 + Su z
  Sx_.resize(N_ * n_, n_);
  Su_.setZero(N_ * n_, N_ * m_);
  std::vector<Eigen::MatrixXd> Apow(N_ + 1);
  Apow[0] = Eigen::MatrixXd::Identity(n_, n_);
  for (int k = 1; k <= N_; ++k) Apow[k] = Ad * Apow[k - 1];
  for (int k = 1; k <= N_; ++k) {
    Sx_.middleRows((k - 1) * n_, n_) = Apow[k];
    for (int j = 0; j < k; ++j)
      Su_.block((k - 1) * n_, j * m_, n_, m_) = Apow[k - 1 - j] * Bd;
  }

  W_.setZero(N_ * n_, N_ * n_);
  for (int k = 0; k < N_ - 1; ++k)
    W_.block(k * n_, k * n_, n_, n_) = cfg_.Q;
  W_.bottomRightCorner(n_, n_) = cfg_.terminal_P;

  H_ = 2.0 * (Su_.transpose() * W_ * Su_);
  for (int k = 0; k < N_; ++k)
    H_.block(k * m_, k * m_, m_, m_) += 2.0 * cfg_.R;

  // L = lambda_max(H) by power iteration; H is symmetric PD (R is PD).
  // Power iteration approaches L from below, so pad it slightly to keep the
  // projected-gradient step inside the guaranteed-descent range.
  Eigen::VectorXd v = Eigen::VectorXd::Ones(N_ * m_);
  v.normalize();
  double lambda = 1.0;
  for (int it = 0; it < 100; ++it) {
    v = H_ * v;
    lambda = v.norm();
    v /= lambda;
  }
  step_ = 1.0 / (1.01 * lambda);
}

Eigen::VectorXd MpcSolver::gradient_offset(const Eigen::VectorXd& x0,
                                           const Eigen::VectorXd& x_des) const {
  Eigen::VectorXd xd_rep(N_ * n_);
  for (int k = 0; k < N_; ++k) xd_rep.segment(k * n_, n_) = x_des;
  return 2.0 * Su_.transpose() * (W_ * (Sx_ * x0 - xd_rep));
}

double MpcSolver::objective(const Eigen::VectorXd& z, const Eigen::VectorXd& x0,
                            const Eigen::VectorXd& x_des) const {
  Eigen::VectorXd xd_rep(N_ * n_);
  for (int k = 0; k < N_; ++k) xd_rep.segment(k * n_, n_) = x_des;
  const Eigen::VectorXd e = Sx_ * x0 + Su_ * z - xd_rep;
  double cost = e.dot(W_ * e);
  for (int k = 0; k < N_; ++k) {
    const Eigen::VectorXd uk = z.segment(k * m_, m_);
    cost += uk.dot(cfg_.R * uk);
  }
  const Eigen::VectorXd e0 = x0 - x_des;
  cost += e0.dot(cfg_.Q * e0);
  return cost;
}

MpcResult MpcSolver::solve(const Eigen::VectorXd& x0,
                           const Eigen::VectorXd& x_des,
                           std::int64_t tick) const {
  const Eigen::VectorXd g0 = gradient_offset(x0, x_des);
  const auto project = [&](Eigen::VectorXd v) {
    return v.cwiseMax(cfg_.u_min).cwiseMin(cfg_.u_max);
  };

  Eigen::VectorXd z = project(Eigen::VectorXd::Zero(N_ * m_));
  MpcDiagnostics diag;
  diag.cost_history.reserve(cfg_.qp_max_iters + 1);
  diag.cost_history.push_back(objective(z, x0, x_des));

  double pg_norm = 0.0;
  int it = 0;
  for (; it < cfg_.qp_max_iters; ++it) {
    const Eigen::VectorXd grad = H_ * z + g0;
    pg_norm = (z - project(z - grad)).norm();
    if (pg_norm <= cfg_.qp_tolerance) break;
    z = project(z - step_ * grad);
    diag.cost_history.push_back(objective(z, x0, x_des));
  }
  diag.iterations = it;
  diag.residual = pg_norm;
  diag.inexact = pg_norm > cfg_.qp_tolerance;

  MpcResult result;
  result.diagnostics = std::move(diag);
  result.sequence.created_at_tick = tick;
  result.sequence.commands.reserve(N_);
  for (int k = 0; k < N_; ++k)
    result.sequence.commands.push_back(z.segment(k * m_, m_));
  return result;
}

MpcResult mpc_solve(const Eigen::VectorXd& x0, const Eigen::VectorXd& x_des,
                    const PlatoonModel& model, const MpcConfig& cfg,
                    std::int64_t tick) {
  return MpcSolver(model.Ad, model.Bd, cfg).solve(x0, x_des, tick);
}

void ActuatorBuffer::push(const CommandSequence& seq) {
  if (seq.commands.empty()) return;
  if (ever_pushed_ && seq.created_at_tick <= seq_.created_at_tick) {
    ++stale_count_;
    return;
  }
  seq_ = seq;
  cursor_ = 0;
  ever_pushed_ = true;
}

Eigen::VectorXd ActuatorBuffer::pop() {
  if (!ever_pushed_) {
    ++exhausted_count_;
    return Eigen::VectorXd::Zero(dim_);
  }
  const int n = static_cast<int>(seq_.commands.size());
  if (cursor_ >= n) {
    ++exhausted_count_;
    if (policy_ == ExhaustedPolicy::kHoldLast) return seq_.commands.back();
    return Eigen::VectorXd::Zero(dim_);
  }
  return seq_.commands[cursor_++];
}

}  // namespace wncs
