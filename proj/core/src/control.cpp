#include "wncs/control.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "wncs/errors.hpp"

namespace wncs {

LqrConfig LqrConfig::platoon_default(double q_scale, double r_scale) {
  LqrConfig cfg;
  cfg.Q = q_scale * Eigen::MatrixXd::Identity(3, 3);
  cfg.R = r_scale * Eigen::MatrixXd::Identity(2, 2);
  return cfg;
}

namespace {

// Joseph-stabilized Riccati map: algebraically identical to
// A'PA - A'PB (R + B'PB)^-1 B'PA + Q, but a sum of PSD terms whose value is
// first-order insensitive to errors in K; its rounding floor stays orders of
// magnitude below the residual tolerance even for large ||P||.
Eigen::MatrixXd dare_map(const Eigen::MatrixXd& Ad, const Eigen::MatrixXd& Bd,
                         const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                         const Eigen::MatrixXd& P) {
  const Eigen::MatrixXd BtP = Bd.transpose() * P;
  const Eigen::MatrixXd S = R + BtP * Bd;
  const Eigen::MatrixXd K = S.ldlt().solve(BtP * Ad);
  const Eigen::MatrixXd closed = Ad - Bd * K;
  Eigen::MatrixXd next =
      closed.transpose() * P * closed + K.transpose() * R * K + Q;
  return 0.5 * (next + next.transpose());
}

}  // namespace

double dare_residual(const Eigen::MatrixXd& Ad, const Eigen::MatrixXd& Bd,
                     const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                     const Eigen::MatrixXd& P) {
  return (dare_map(Ad, Bd, Q, R, P) - P).norm();
}

LqrGain solve_dare(const Eigen::MatrixXd& Ad, const Eigen::MatrixXd& Bd,
                   const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                   const DareOptions& opts) {
  if (Ad.rows() != Ad.cols() || Bd.rows() != Ad.rows() ||
      Q.rows() != Ad.rows() || Q.rows() != Q.cols() || R.rows() != R.cols() ||
      R.rows() != Bd.cols())
    throw std::invalid_argument("solve_dare: inconsistent dimensions");
  Eigen::LLT<Eigen::MatrixXd> r_llt(R);
  if (r_llt.info() != Eigen::Success)
    throw std::invalid_argument("solve_dare: R must be positive definite");

  Eigen::MatrixXd P = Q;
  bool settled = false;
  int stalled = 0;
  double prev_diff = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opts.max_iterations; ++it) {
    const Eigen::MatrixXd P_next = dare_map(Ad, Bd, Q, R, P);
    const double diff = (P_next - P).norm();
    P = P_next;
    if (!std::isfinite(diff) || !P.allFinite())
      throw SynthesisError("solve_dare: iteration diverged");
    if (!settled) {
      if (diff <= opts.rel_tolerance * P.norm()) settled = true;
    } else {
      // ||P_{k+1} - P_k|| bounds the residual of the returned iterate; keep
      // contracting until it meets the target or hits the rounding floor.
      stalled = (diff >= prev_diff) ? stalled + 1 : 0;
      if (diff <= opts.residual_target || stalled >= 4) {
        LqrGain gain;
        gain.P = 0.5 * (P + P.transpose());
        const Eigen::MatrixXd BtP = Bd.transpose() * gain.P;
        gain.F = (R + BtP * Bd).ldlt().solve(BtP * Ad);
        return gain;
      }
    }
    prev_diff = diff;
  }
  throw SynthesisError("solve_dare: no convergence within iteration budget");
}

Eigen::VectorXd lqr_command(const LqrGain& gain, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& x_des, double a_max) {
  Eigen::VectorXd u = -gain.F * (x - x_des);
  return u.cwiseMax(-a_max).cwiseMin(a_max);
}

void ScenarioConfig::validate() const {
  if (!(stop_zone_m < lqr_zone_min_m && lqr_zone_min_m < leader_threshold_m))
    throw ConfigError(
        "scenario zones must satisfy stop_zone < lqr_zone_min < leader_threshold");
  if (!(leader_speed_fraction > 0.0 && leader_speed_fraction <= 1.0))
    throw ConfigError("scenario.leader_speed_fraction must be in (0, 1]");
}

SpeedDecision scenario_speed(double gap_m, const ScenarioConfig& cfg,
                             double full_speed_mps,
                             double lqr_boundary_speed_mps) {
  if (gap_m < 0.0 || !std::isfinite(gap_m))
    throw std::invalid_argument("scenario_speed: gap must be >= 0");
  if (gap_m > cfg.leader_threshold_m)
    return {SpeedZone::kLeader, cfg.leader_speed_fraction * full_speed_mps};
  if (gap_m > cfg.lqr_zone_min_m) return {SpeedZone::kLqrZone, 0.0};
  if (gap_m > cfg.stop_zone_m) {
    const double t =
        (gap_m - cfg.stop_zone_m) / (cfg.lqr_zone_min_m - cfg.stop_zone_m);
    return {SpeedZone::kLinear, lqr_boundary_speed_mps * t};
  }
  return {SpeedZone::kStop, 0.0};
}

}  // namespace wncs
