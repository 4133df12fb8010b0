#pragma once
#include <Eigen/Dense>

namespace wncs {

struct LqrConfig {
  Eigen::MatrixXd Q;             // state weight, symmetric PSD
  Eigen::MatrixXd R;             // input weight, symmetric PD
  double desired_gap_m = 0.10;
  double desired_speed_mps = 0.0;

  // Q = q_scale*I (3x3), R = r_scale*I (2x2) for the gap/velocity plant.
  static LqrConfig platoon_default(double q_scale = 1000.0,
                                   double r_scale = 1.0);
};

// Infinite-horizon discrete LQR gain. P solves the discrete algebraic
// Riccati equation; F = (R + Bd'PBd)^-1 Bd'PAd.
struct LqrGain {
  Eigen::MatrixXd F;
  Eigen::MatrixXd P;
};

struct DareOptions {
  double rel_tolerance = 1e-12;  // stop when ||dP||_F <= rel_tolerance*||P||_F
  double residual_target = 1e-10;  // then polish until ||f(P)-P||_F <= this
  int max_iterations = 10000;
};

// Fixed-point Riccati iteration from P0 = Q. Throws SynthesisError if the
// iteration budget runs out, std::invalid_argument if R is not PD.
LqrGain solve_dare(const Eigen::MatrixXd& Ad, const Eigen::MatrixXd& Bd,
                   const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                   const DareOptions& opts = {});

// Frobenius norm of f(P) - P for the DARE map (test/diagnostic hook).
double dare_residual(const Eigen::MatrixXd& Ad, const Eigen::MatrixXd& Bd,
                     const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                     const Eigen::MatrixXd& P);

// u = -F (x - x_des), clamped componentwise to [-a_max, a_max].
Eigen::VectorXd lqr_command(const LqrGain& gain, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& x_des, double a_max = 1.0);

// Four-zone spacing policy thresholds.
struct ScenarioConfig {
  double leader_threshold_m = 1.0;
  double lqr_zone_min_m = 0.10;
  double stop_zone_m = 0.06;
  double leader_speed_fraction = 0.9;

  void validate() const;  // throws ConfigError
};

enum class SpeedZone { kLeader, kLqrZone, kLinear, kStop };

// Zone plus the speed set point it implies. speed_mps is meaningful for
// every zone except kLqrZone, which delegates to the LQR/MPC command.
struct SpeedDecision {
  SpeedZone zone = SpeedZone::kStop;
  double speed_mps = 0.0;
};

// Zone ownership: gap > leader_threshold -> leader at
// leader_speed_fraction*full_speed; (lqr_zone_min, leader_threshold] -> LQR;
// (stop_zone, lqr_zone_min] -> linear ramp anchored at lqr_boundary_speed;
// [0, stop_zone] -> stop. Throws std::invalid_argument on negative gap.
SpeedDecision scenario_speed(double gap_m, const ScenarioConfig& cfg,
                             double full_speed_mps,
                             double lqr_boundary_speed_mps);

}  // namespace wncs
