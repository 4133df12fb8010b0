#pragma once
#include <Eigen/Dense>
#include <optional>

#include "wncs/world.hpp"

namespace wncs {

// Linear-Gaussian model x' = Ad x + Bd u + w, y = C x + v,
// w ~ N(0, Qn), v ~ N(0, Rn).
struct KfModel {
  Eigen::MatrixXd Ad;
  Eigen::MatrixXd Bd;
  Eigen::MatrixXd C;
  Eigen::MatrixXd Qn;
  Eigen::MatrixXd Rn;
};

struct KfState {
  Eigen::VectorXd x_hat;
  Eigen::MatrixXd P;
  long step_count = 0;
  long dropped_count = 0;
};

KfState kf_predict(const KfState& state, const KfModel& model,
                   const Eigen::VectorXd& u);

// Measurement update. A missing y (lost packet) skips the update entirely:
// the prediction is passed through and only dropped_count changes.
// Throws EstimationFault if the innovation covariance is not PD.
KfState kf_update(const KfState& state, const KfModel& model,
                  const std::optional<Eigen::VectorXd>& y);

struct PoseFilterConfig {
  double sample_time_s = 0.1;
  double accel_sigma_mps2 = 0.2;  // white-acceleration process noise
  double meas_sigma_m = 0.03;     // position fix noise
  double min_speed_for_heading_mps = 0.01;
};

// Constant-velocity smoother over planar position fixes; heading comes from
// the velocity estimate and holds its last value at near-zero speed.
class PoseFilter {
 public:
  explicit PoseFilter(const PoseFilterConfig& cfg, double x0 = 0.0,
                      double y0 = 0.0);

  // One predict/update cycle; nullopt means the fix was lost and the filter
  // dead-reckons on its own prediction.
  Pose step(const std::optional<std::pair<double, double>>& ips_xy);

  const KfState& state() const { return state_; }
  Pose pose() const;
  double speed() const;  // magnitude of the velocity estimate

 private:
  PoseFilterConfig cfg_;
  KfModel model_;
  KfState state_;
  double last_omega_ = 0.0;
};

}  // namespace wncs
