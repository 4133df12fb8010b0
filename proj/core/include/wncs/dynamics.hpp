#pragma once
#include <Eigen/Dense>

namespace wncs {

// Exact zero-order-hold discretization of (A, B) at step T, computed from
// the matrix exponential of the augmented system [[A, B], [0, 0]].
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> discretize(
    const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double T);

// Two-vehicle gap/velocity model: state [p1 - p2, v1, v2], inputs [a1, a2].
// The continuous A is nilpotent (A^2 = 0), so Ad = I + A*T and
// Bd = (I*T + A*T^2/2)*B are exact and used directly.
struct PlatoonModel {
  Eigen::Matrix3d A;
  Eigen::Matrix<double, 3, 2> B;
  Eigen::Matrix3d Ad;
  Eigen::Matrix<double, 3, 2> Bd;

  explicit PlatoonModel(double sample_time_s);
};

// Longitudinal state of one vehicle on the loop track.
struct VehicleLongState {
  double s = 0.0;      // arclength progress [m], wrapped to [0, track length)
  double v = 0.0;      // speed [m/s], clamped to [0, v_max]
  double a_cmd = 0.0;  // last commanded acceleration [m/s^2]
};

// Integrates one tick of clamped longitudinal motion. The velocity profile
// is piecewise linear (it may saturate at 0 or v_max mid-tick); the distance
// advanced is the exact integral of that profile, so sub-stepping at any
// resolution reproduces the same trajectory up to rounding.
// Throws SimulationFault on non-finite acceleration.
VehicleLongState step_vehicle(const VehicleLongState& state, double a,
                              double T, double track_length,
                              double v_max = 1.0);

// Shortest forward arc from follower to leader, in [0, track_length).
double forward_gap(double leader_s, double follower_s, double track_length);

// Gap/velocity state vector [gap, v_leader, v_follower].
Eigen::Vector3d platoon_state(const VehicleLongState& leader,
                              const VehicleLongState& follower,
                              double track_length);

}  // namespace wncs
