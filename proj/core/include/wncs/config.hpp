#pragma once
#include <string>

#include "wncs/control.hpp"
#include "wncs/estimation.hpp"
#include "wncs/ips.hpp"
#include "wncs/mpc.hpp"
#include "wncs/netsim.hpp"
#include "wncs/world.hpp"

namespace wncs {

enum class ControllerMode { kLqrDirect, kMpcBuffered };

struct ControllerConfig {
  std::string mode = "lqr_direct";  // lqr_direct | mpc_buffered
  double a_max_mps2 = 1.0;
  bool apply_leader_channel = false;  // drive the lead car with the pair law's
                                      // first input channel instead of its own rule
  bool use_ips_feedback = false;      // controller consumes IPS-derived
                                      // gap/speed instead of ultrasonic/encoders

  ControllerMode parsed_mode() const;  // throws ConfigError
};

struct LqrFileConfig {
  double q_scale = 1000.0;
  double r_scale = 1.0;
  double desired_gap_m = 0.10;
};

struct MpcFileConfig {
  int horizon_steps = 10;
  double u_min_mps2 = -1.0;
  double u_max_mps2 = 1.0;
  double qp_tolerance = 1e-8;
  int qp_max_iters = 500;
  bool buffer_enabled = true;  // false transmits length-1 sequences
  std::string exhausted_policy = "hold_last";  // hold_last | zero

  ActuatorBuffer::ExhaustedPolicy parsed_policy() const;  // throws ConfigError
};

struct PlatoonKfConfig {
  double process_noise = 1e-4;
  double ultrasonic_sigma_m = 0.005;
  double encoder_sigma_mps = 0.01;
  double ips_gap_sigma_m = 0.05;      // measurement noise when fed from IPS
  double ips_speed_sigma_mps = 0.05;
};

struct PoseKfFileConfig {
  double accel_sigma_mps2 = 0.2;
  double meas_sigma_m = 0.03;
};

// Raw link settings as they appear in the scenario file; the channel variant
// is materialized by build() (loading the RSS/noise trace when needed).
struct LinkFileConfig {
  std::string channel = "bernoulli";  // bernoulli | gilbert_elliott | trace
  double p_loss = 0.0;
  double p_good_to_bad = 0.05;
  double p_bad_to_good = 0.25;
  double loss_good = 0.0;
  double loss_bad = 0.5;
  std::string trace_path;
  double snr_loss_threshold_db = 3.0;
  int delay_ticks = 1;
  int jitter_ticks = 0;
  int max_packets_per_tick = 0;

  LinkConfig build(std::uint64_t rng_stream, const std::string& base_dir) const;
};

struct SensorConfig {
  double ultrasonic_max_range_m = 2.0;
  double ultrasonic_noise_sigma_m = 0.005;
  double ultrasonic_dropout_prob = 0.01;
  double encoder_sigma_mps = 0.01;
};

struct IpsFileConfig {
  bool enabled = true;
  int beacon_count = 5;
  PfConfig pf;
  StepDetectorConfig step;
  RssModel rss;
};

// Whole scenario: every subsystem's parameters in one file.
struct RunConfig {
  SimConfig sim;
  ControllerConfig controller;
  LqrFileConfig lqr;
  ScenarioConfig scenario;
  MpcFileConfig mpc;
  PlatoonKfConfig kf_platoon;
  PoseKfFileConfig kf_pose;
  LinkFileConfig uplink;
  LinkFileConfig downlink;
  SensorConfig sensor;
  IpsFileConfig ips;
  std::string base_dir;  // directory of the file, for relative trace paths

  void validate() const;  // throws ConfigError
};

// Strict scenario-file syntax: [section] headers, key = value lines, and
// '#' comments. Unknown or duplicate keys are hard errors.
RunConfig parse_config(const std::string& text, const std::string& base_dir = "");
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);  // lossless round trip

// Assigns a numeric field by dotted path ("downlink.p_loss"); throws
// ConfigError for unknown paths or non-numeric fields.
void set_config_value(RunConfig& cfg, const std::string& dotted_path,
                      double value);

}  // namespace wncs
