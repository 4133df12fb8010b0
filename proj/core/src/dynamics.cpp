#include "wncs/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "wncs/errors.hpp"

namespace wncs {
namespace {

// exp(M) by scaling-and-squaring with a truncated series. Adequate for the
// small, mildly scaled matrices this simulator produces.
Eigen::MatrixXd expm(const Eigen::MatrixXd& M) {
  const auto n = M.rows();
  int scale = 0;
  double norm = M.cwiseAbs().rowwise().sum().maxCoeff();
  while (norm > 0.5) {
    norm *= 0.5;
    ++scale;
  }
  const Eigen::MatrixXd Ms = M / std::pow(2.0, scale);
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  for (int k = 1; k <= 24; ++k) {
    term = term * Ms / static_cast<double>(k);
    result += term;
  }
  for (int i = 0; i < scale; ++i) result = result * result;
  return result;
}

}  // namespace

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> discretize(
    const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double T) {
  if (!(T > 0.0)) throw SimulationFault("discretize: T must be > 0");
  const auto n = A.rows();
  const auto m = B.cols();
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + m, n + m);
  aug.topLeftCorner(n, n) = A * T;
  aug.topRightCorner(n, m) = B * T;
  const Eigen::MatrixXd e = expm(aug);
  return {e.topLeftCorner(n, n), e.topRightCorner(n, m)};
}

PlatoonModel::PlatoonModel(double sample_time_s) {
  A << 0, 1, -1,
       0, 0, 0,
       0, 0, 0;
  B << 0, 0,
       1, 0,
       0, 1;
  const double T = sample_time_s;
  Ad = Eigen::Matrix3d::Identity() + A * T;
  Bd = (Eigen::Matrix3d::Identity() * T + A * (T * T / 2.0)) * B;
}

VehicleLongState step_vehicle(const VehicleLongState& state, double a,
                              double T, double track_length, double v_max) {
  if (!std::isfinite(a))
    throw SimulationFault("step_vehicle: non-finite acceleration command");
  const double v0 = state.v;
  const double v_raw = v0 + a * T;
  double v1 = std::clamp(v_raw, 0.0, v_max);
  double ds;
  if (v_raw == v1 || a == 0.0) {
    ds = v0 * T + 0.5 * a * T * T;
  } else {
    // saturates mid-tick: integrate up to the hit time, then coast at the bound
    const double bound = (v_raw < 0.0) ? 0.0 : v_max;
    const double t_hit = (bound - v0) / a;
    ds = v0 * t_hit + 0.5 * a * t_hit * t_hit + bound * (T - t_hit);
  }
  VehicleLongState out;
  out.v = v1;
  out.a_cmd = a;
  double s = state.s + ds;
  s = std::fmod(s, track_length);
  if (s < 0.0) s += track_length;
  if (s >= track_length) s = 0.0;
  out.s = s;
  return out;
}

double forward_gap(double leader_s, double follower_s, double track_length) {
  double gap = std::fmod(leader_s - follower_s, track_length);
  if (gap < 0.0) gap += track_length;
  if (gap >= track_length) gap = 0.0;
  return gap;
}

Eigen::Vector3d platoon_state(const VehicleLongState& leader,
                              const VehicleLongState& follower,
                              double track_length) {
  return {forward_gap(leader.s, follower.s, track_length), leader.v,
          follower.v};
}

}  // namespace wncs
