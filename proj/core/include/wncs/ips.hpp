#pragma once
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "wncs/rng.hpp"
#include "wncs/world.hpp"

namespace wncs {

// Log-distance path-loss model in the decreasing-with-distance convention:
// RSS(d) = RSS(d0) - 10 n log10(d / d0), optionally with Gaussian shadowing.
struct RssModel {
  double rss_at_d0_dbm = -60.0;
  double d0_m = 1.0;
  double path_loss_exponent_n = 2.0;
  double noise_sigma_db = 2.0;

  void validate() const;  // throws ConfigError
};

// Throws std::invalid_argument when d <= 0. Pass rng = nullptr for the
// noiseless value.
double rss_from_distance(const RssModel& model, double d, Rng* rng = nullptr);

// Closed-form inversion of the path-loss model; total on finite inputs.
double distance_from_rss(const RssModel& model, double rss_dbm);

struct Particle {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
};

struct ParticleSet {
  std::vector<Particle> particles;
  int size() const { return static_cast<int>(particles.size()); }
  double weight_sum() const;
  double effective_sample_size() const;  // 1 / sum(w^2)
};

struct PfConfig {
  int particle_count = 1000;
  double sigma_update_m = 0.10;        // ranging-likelihood sigma
  double step_noise_length_m = 0.02;
  double step_noise_heading_rad = 0.05;
  double resample_neff_fraction = 0.5;

  void validate() const;  // throws ConfigError
};

struct Arena {
  double width_m = 3.0;
  double height_m = 2.0;
};

struct StepDetectorConfig {
  double accel_threshold_mps2 = 0.15;
  int min_interval_ticks = 2;

  void validate() const;  // throws ConfigError
};

// Level trigger with a debounce interval: fires when |accel| reaches the
// threshold and at least min_interval_ticks passed since the last trigger.
class StepDetector {
 public:
  explicit StepDetector(const StepDetectorConfig& cfg) : cfg_(cfg) {}
  bool push(double accel_mps2);
  void reset();

 private:
  StepDetectorConfig cfg_;
  long tick_ = 0;
  long last_trigger_ = std::numeric_limits<long>::min() / 2;
};

// Replays a whole acceleration history; true iff the last sample triggers.
bool detect_step(const std::vector<double>& accel_history,
                 const StepDetectorConfig& cfg);

// N particles uniform over the arena, weights 1/N.
ParticleSet pf_init(const PfConfig& cfg, const Arena& arena, Rng& rng);

// Moves every particle by (step_length + eps_l) along (heading + eps_theta).
// Particles that would leave the arena are clamped to the boundary and their
// weight is scaled by 0.1 (soft map matching). Weights are left unnormalized;
// the update step renormalizes.
ParticleSet pf_predict(const ParticleSet& set, double heading_rad,
                       double step_length_m, const PfConfig& cfg,
                       const Arena& arena, Rng& rng);

struct BeaconDistance {
  int beacon_id = 0;
  double distance_m = 0.0;
};

struct PfUpdateResult {
  ParticleSet set;
  bool diverged = false;  // weights underflowed; set was reinitialized
};

// Multiplies each weight by the product of per-beacon Gaussian ranging
// likelihoods, then normalizes. If every weight underflows to zero the set
// is reinitialized uniformly and flagged.
PfUpdateResult pf_update(const ParticleSet& set,
                         const std::vector<BeaconDistance>& measurements,
                         const BeaconMap& beacons, const PfConfig& cfg,
                         const Arena& arena, Rng& rng);

// Systematic resampling when N_eff drops below resample_neff_fraction * N;
// otherwise returns the set unchanged.
ParticleSet pf_resample(const ParticleSet& set, const PfConfig& cfg, Rng& rng);

// Weighted mean position.
std::pair<double, double> pf_extract(const ParticleSet& set);

// Empirical CDF with nearest-rank percentiles.
struct ErrorCdf {
  std::vector<std::pair<double, double>> points;  // (error_m, cumulative fraction)
  double percentile(double p) const;              // nearest rank, p in (0, 1]
  double max() const { return points.empty() ? 0.0 : points.back().first; }
};

ErrorCdf error_cdf(const std::vector<double>& errors_m);

// One tick of a recorded RSS/IMU log: "tick,accel,(beacon_id:rss_dbm)*".
struct ReplayRecord {
  long tick = 0;
  double accel_mps2 = 0.0;
  std::vector<std::pair<int, double>> beacon_rss;
};

std::vector<ReplayRecord> read_replay_log(const std::string& path);
void write_replay_log(const std::string& path,
                      const std::vector<ReplayRecord>& records);

}  // namespace wncs
