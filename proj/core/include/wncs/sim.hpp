#pragma once
#include <memory>
#include <optional>
#include <vector>

#include "wncs/config.hpp"
#include "wncs/control.hpp"
#include "wncs/dynamics.hpp"
#include "wncs/estimation.hpp"
#include "wncs/ips.hpp"
#include "wncs/mpc.hpp"
#include "wncs/netsim.hpp"
#include "wncs/trace.hpp"

namespace wncs {

struct UltrasonicSensor {
  double max_range_m = 2.0;
  double noise_sigma_m = 0.005;
  double dropout_prob = 0.01;
};

// Uplink payload: one vehicle's sensor snapshot for this tick.
struct SensorPacketPayload {
  int vehicle = 0;
  double gap_m = 0.0;      // ultrasonic reading, clamped to max range
  bool gap_valid = false;  // false on sensor dropout
  double speed_mps = 0.0;  // encoder
  double ips_x_m = 0.0;    // last on-vehicle IPS fix (degraded-sensing mode)
  double ips_y_m = 0.0;
  double ips_speed_mps = 0.0;
  bool ips_valid = false;
};

// Downlink payload: the command sequence for one vehicle's buffer.
struct CommandPacketPayload {
  int vehicle = 0;
  CommandSequence sequence;  // scalar entries: this vehicle's accel channel
};

// Per-vehicle physical + on-vehicle state.
struct VehicleRuntime {
  VehicleLongState lon;
  Pose pose;
  double realized_accel = 0.0;  // (v' - v)/T over the last tick
  double applied_accel = 0.0;
  double odometer_m = 0.0;
  ActuatorBuffer buffer;
  // on-vehicle positioning
  ParticleSet particles;
  StepDetector stepper;
  double odo_at_last_step_m = 0.0;
  PoseFilter pose_filter;
  double ips_x = 0.0, ips_y = 0.0, ips_speed = 0.0;
  bool ips_valid = false;

  VehicleRuntime(const ActuatorBuffer& buf, const StepDetectorConfig& step,
                 const PoseFilter& pf)
      : buffer(buf), stepper(step), pose_filter(pf) {}
};

// Cloud-side per-vehicle controller state: the gap/velocity pair filter for
// (ahead vehicle, this vehicle) and the command history used to feed the
// filter's prediction input at the actuation lag.
struct CloudVehicle {
  KfState kf;
  std::vector<double> issued_u0;
  SpeedZone zone = SpeedZone::kLeader;
};

// Ordered fleet; index 0 is the leader and each vehicle follows index-1
// (vehicle 0 ranges on the tail around the loop).
struct Fleet {
  std::vector<VehicleRuntime> vehicles;
  int ahead_of(int i) const {
    const int n = static_cast<int>(vehicles.size());
    return (i + n - 1) % n;
  }
};

// Tick-synchronous closed loop: sensors -> uplink -> cloud controller
// (KF + scenario engine + LQR/MPC) -> downlink -> actuator buffer -> plant,
// with the beacon positioning pipeline running on each vehicle.
class Simulation {
 public:
  explicit Simulation(const RunConfig& cfg);

  // Advances one tick, emitting trace events in pipeline order.
  void tick(TraceWriter& trace);

  // Runs duration/sample_time ticks and writes the trace to trace_out
  // (pass nullptr to skip trace output).
  RunSummary run(std::ostream* trace_out);

  std::int64_t current_tick() const { return tick_; }
  std::int64_t planned_ticks() const { return ticks_; }
  const RunConfig& config() const { return cfg_; }
  const Track& track() const { return track_; }
  const BeaconMap& beacons() const { return beacons_; }
  const Fleet& fleet() const { return fleet_; }
  const LqrGain& lqr_gain() const { return gain_; }
  double true_gap(int vehicle) const;
  RunSummary summary() const;  // summary of the ticks run so far

 private:
  struct SensorSample {
    double gap_reading = 0.0;
    bool gap_valid = false;
    double speed_reading = 0.0;
    double accel_imu = 0.0;
    Pose pose_begin;          // pose at sampling time (start of tick)
    double odo_snapshot = 0.0;
    std::vector<double> rss_dbm;  // one entry per beacon
  };

  void stage_sensors(std::vector<SensorSample>& samples);
  void stage_uplink(const std::vector<SensorSample>& samples,
                    TraceWriter& trace);
  void stage_controller(TraceWriter& trace,
                        std::vector<CommandSequence>& out_sequences);
  void stage_downlink(const std::vector<CommandSequence>& sequences,
                      TraceWriter& trace);
  void stage_actuators(TraceWriter& trace);
  void stage_plant(TraceWriter& trace);
  void stage_ips(const std::vector<SensorSample>& samples, TraceWriter& trace);
  void stage_safety(TraceWriter& trace);

  double expected_applied(int vehicle, std::int64_t plant_tick) const;

  RunConfig cfg_;
  ControllerMode mode_;
  std::int64_t ticks_ = 0;
  std::int64_t tick_ = 0;
  Track track_;
  BeaconMap beacons_;
  Arena arena_;
  PlatoonModel model_;
  LqrGain gain_;
  std::unique_ptr<MpcSolver> mpc_;
  MpcConfig mpc_cfg_;
  KfModel pair_kf_model_;
  UltrasonicSensor ultrasonic_;
  Fleet fleet_;
  std::vector<CloudVehicle> cloud_;
  std::vector<Link<SensorPacketPayload>> uplinks_;
  std::vector<Link<CommandPacketPayload>> downlinks_;
  std::vector<Rng> sensor_rngs_;
  std::vector<Rng> ips_rngs_;
  std::vector<Rng> rss_rngs_;
  std::vector<SensorSample> samples_;
  std::vector<std::optional<SensorPacketPayload>> latest_sensor_;
  // accumulators
  std::vector<double> gap_sq_err_sum_;
  std::vector<double> gap_final_;
  std::vector<long> safety_count_;
  std::vector<double> ips_errors_;
  long pf_divergences_ = 0;
  long mpc_inexact_ = 0;
  long safety_total_ = 0;
};

}  // namespace wncs
