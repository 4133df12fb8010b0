#include "wncs/estimation.hpp"

#include <cmath>

#include "wncs/errors.hpp"

namespace wncs {

KfState kf_predict(const KfState& state, const KfModel& model,
                   const Eigen::VectorXd& u) {
  KfState out = state;
  out.x_hat = model.Ad * state.x_hat + model.Bd * u;
  out.P = model.Ad * state.P * model.Ad.transpose() + model.Qn;
  out.step_count = state.step_count + 1;
  return out;
}

KfState kf_update(const KfState& state, const KfModel& model,
                  const std::optional<Eigen::VectorXd>& y) {
  if (!y) {
    KfState out = state;
    out.dropped_count = state.dropped_count + 1;
    return out;
  }
  const Eigen::MatrixXd PCt = state.P * model.C.transpose();
  const Eigen::MatrixXd S = model.C * PCt + model.Rn;
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success)
    throw EstimationFault("kf_update: innovation covariance is singular");
  const Eigen::MatrixXd K = llt.solve(PCt.transpose()).transpose();
  KfState out = state;
  out.x_hat = state.x_hat + K * (*y - model.C * state.x_hat);
  const auto n = state.P.rows();
  Eigen::MatrixXd P =
      (Eigen::MatrixXd::Identity(n, n) - K * model.C) * state.P;
  out.P = 0.5 * (P + P.transpose());
  return out;
}

namespace {

KfModel make_cv_model(const PoseFilterConfig& cfg) {
  const double T = cfg.sample_time_s;
  KfModel m;
  m.Ad = Eigen::MatrixXd::Identity(4, 4);
  m.Ad(0, 2) = T;
  m.Ad(1, 3) = T;
  m.Bd = Eigen::MatrixXd::Zero(4, 1);
  m.C = Eigen::MatrixXd::Zero(2, 4);
  m.C(0, 0) = 1.0;
  m.C(1, 1) = 1.0;
  const double q = cfg.accel_sigma_mps2 * cfg.accel_sigma_mps2;
  m.Qn = Eigen::MatrixXd::Zero(4, 4);
  for (int axis = 0; axis < 2; ++axis) {
    const int p = axis, v = axis + 2;
    m.Qn(p, p) = q * T * T * T * T / 4.0;
    m.Qn(p, v) = m.Qn(v, p) = q * T * T * T / 2.0;
    m.Qn(v, v) = q * T * T;
  }
  m.Rn = cfg.meas_sigma_m * cfg.meas_sigma_m * Eigen::MatrixXd::Identity(2, 2);
  return m;
}

}  // namespace

PoseFilter::PoseFilter(const PoseFilterConfig& cfg, double x0, double y0)
    : cfg_(cfg), model_(make_cv_model(cfg)) {
  state_.x_hat = Eigen::Vector4d(x0, y0, 0.0, 0.0);
  state_.P = Eigen::Matrix4d::Identity();
}

Pose PoseFilter::step(const std::optional<std::pair<double, double>>& ips_xy) {
  state_ = kf_predict(state_, model_, Eigen::VectorXd::Zero(1));
  std::optional<Eigen::VectorXd> y;
  if (ips_xy) y = Eigen::Vector2d(ips_xy->first, ips_xy->second);
  state_ = kf_update(state_, model_, y);
  const double vx = state_.x_hat(2), vy = state_.x_hat(3);
  if (std::hypot(vx, vy) >= cfg_.min_speed_for_heading_mps)
    last_omega_ = wrap_angle(std::atan2(vy, vx));
  return pose();
}

Pose PoseFilter::pose() const {
  return {state_.x_hat(0), state_.x_hat(1), last_omega_};
}

double PoseFilter::speed() const {
  return std::hypot(state_.x_hat(2), state_.x_hat(3));
}

}  // namespace wncs
