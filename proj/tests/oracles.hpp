// Test-only reference implementations, independent of the library code
// paths they check.
#pragma once
#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <utility>
#include <vector>

namespace oracles {

// Plain truncated-series matrix exponential pair: Ad = sum (AT)^k / k!,
// Bd = sum A^k T^(k+1) / (k+1)! * B. Accurate to ~1e-14 for ||A T|| < 0.5.
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> zoh_series(
    const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double T,
    int terms = 20) {
  const auto n = A.rows();
  Eigen::MatrixXd Ad = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd integral = Eigen::MatrixXd::Identity(n, n) * T;
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);  // A^k T^k / k!
  for (int k = 1; k <= terms; ++k) {
    power = power * A * (T / k);
    Ad += power;
    integral += power * (T / (k + 1));
  }
  return {Ad, integral * B};
}

// Scalar DARE by direct fixed-point iteration of the Riccati map.
inline double scalar_dare(double a, double b, double q, double r,
                          int iters = 500) {
  double p = q;
  for (int i = 0; i < iters; ++i)
    p = a * p * a - a * p * b / (r + b * p * b) * b * p * a + q;
  return p;
}

// Backward finite-horizon Riccati recursion; returns the per-step feedback
// gains K_0..K_{N-1} for u_k = -K_k (x_k - x_des).
inline std::vector<Eigen::MatrixXd> finite_horizon_gains(
    const Eigen::MatrixXd& Ad, const Eigen::MatrixXd& Bd,
    const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
    const Eigen::MatrixXd& P_terminal, int N) {
  std::vector<Eigen::MatrixXd> gains(N);
  Eigen::MatrixXd P = P_terminal;
  for (int k = N - 1; k >= 0; --k) {
    const Eigen::MatrixXd BtP = Bd.transpose() * P;
    const Eigen::MatrixXd K = (R + BtP * Bd).ldlt().solve(BtP * Ad);
    gains[k] = K;
    P = Ad.transpose() * P * (Ad - Bd * K) + Q;
  }
  return gains;
}

// Unconstrained finite-horizon LQR input sequence via the gains above.
inline std::vector<Eigen::VectorXd> finite_horizon_inputs(
    const Eigen::MatrixXd& Ad, const Eigen::MatrixXd& Bd,
    const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
    const Eigen::MatrixXd& P_terminal, int N, const Eigen::VectorXd& x0,
    const Eigen::VectorXd& x_des) {
  const auto gains = finite_horizon_gains(Ad, Bd, Q, R, P_terminal, N);
  std::vector<Eigen::VectorXd> us;
  Eigen::VectorXd x = x0;
  for (int k = 0; k < N; ++k) {
    const Eigen::VectorXd u = -gains[k] * (x - x_des);
    us.push_back(u);
    x = Ad * x + Bd * u;
  }
  return us;
}

// Direct rollout cost of an input sequence (stage Q/R, terminal P), with
// the constant x_0 stage term included.
inline double rollout_cost(const Eigen::MatrixXd& Ad, const Eigen::MatrixXd& Bd,
                           const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                           const Eigen::MatrixXd& P_terminal,
                           const Eigen::VectorXd& x0,
                           const Eigen::VectorXd& x_des,
                           const std::vector<Eigen::VectorXd>& us) {
  Eigen::VectorXd x = x0;
  double cost = 0.0;
  for (const auto& u : us) {
    const Eigen::VectorXd e = x - x_des;
    cost += e.dot(Q * e) + u.dot(R * u);
    x = Ad * x + Bd * u;
  }
  const Eigen::VectorXd eN = x - x_des;
  return cost + eN.dot(P_terminal * eN);
}

// Intersection of two circles; returns the candidate consistent with the
// third range (closed-form trilateration).
inline std::pair<double, double> trilaterate(
    const std::array<std::pair<double, double>, 3>& centers,
    const std::array<double, 3>& distances) {
  const auto [x1, y1] = centers[0];
  const auto [x2, y2] = centers[1];
  const double r1 = distances[0], r2 = distances[1];
  const double dx = x2 - x1, dy = y2 - y1;
  const double d = std::hypot(dx, dy);
  const double a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
  const double h = std::sqrt(std::max(0.0, r1 * r1 - a * a));
  const double mx = x1 + a * dx / d, my = y1 + a * dy / d;
  const std::pair<double, double> c1{mx + h * dy / d, my - h * dx / d};
  const std::pair<double, double> c2{mx - h * dy / d, my + h * dx / d};
  const auto err3 = [&](const std::pair<double, double>& c) {
    return std::abs(std::hypot(c.first - centers[2].first,
                               c.second - centers[2].second) -
                    distances[2]);
  };
  return err3(c1) <= err3(c2) ? c1 : c2;
}

// Ordinary least-squares slope fit y ~ a + b t.
inline double ls_slope(const std::vector<double>& t,
                       const std::vector<double>& y) {
  const double n = static_cast<double>(t.size());
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sy += y[i];
    stt += t[i] * t[i];
    sty += t[i] * y[i];
  }
  return (n * sty - st * sy) / (n * stt - st * st);
}

}  // namespace oracles
