#include "wncs/sim.hpp"

#include <algorithm>
#include <cmath>

#include "wncs/errors.hpp"

namespace wncs {

namespace {

constexpr double kGapEstimateInit = 1.0;  // prior variance on the gap state
constexpr double kSpeedEstimateInit = 0.25;

std::string zone_name(SpeedZone z) {
  switch (z) {
    case SpeedZone::kLeader: return "leader";
    case SpeedZone::kLqrZone: return "lqr";
    case SpeedZone::kLinear: return "linear";
    case SpeedZone::kStop: return "stop";
  }
  return "?";
}

// Cloud-side plan for speed-tracking zones: roll the proportional law
// forward so the buffer has a usable horizon under downlink loss.
std::vector<double> rollout_speed_law(double v0, double v_target, int len,
                                      double T, double a_max) {
  std::vector<double> seq(static_cast<std::size_t>(len));
  double v = v0;
  for (int k = 0; k < len; ++k) {
    const double a = std::clamp((v_target - v) / T, -a_max, a_max);
    seq[static_cast<std::size_t>(k)] = a;
    v += a * T;
  }
  return seq;
}

}  // namespace

Simulation::Simulation(const RunConfig& cfg)
    : cfg_(cfg),
      mode_(cfg.controller.parsed_mode()),
      track_(default_rectangle_track(cfg.sim)),
      beacons_(make_default_beacons(cfg.sim, cfg.ips.beacon_count)),
      model_(cfg.sim.sample_time_s) {
  cfg_.validate();
  const int n = cfg_.sim.vehicle_count;
  const double T = cfg_.sim.sample_time_s;
  ticks_ = std::llround(cfg_.sim.duration_s / T);
  arena_ = {cfg_.sim.arena_width_m, cfg_.sim.arena_height_m};

  const LqrConfig lqr = LqrConfig::platoon_default(cfg_.lqr.q_scale,
                                                   cfg_.lqr.r_scale);
  gain_ = solve_dare(model_.Ad, model_.Bd, lqr.Q, lqr.R);

  mpc_cfg_.horizon_steps = cfg_.mpc.horizon_steps;
  mpc_cfg_.Q = lqr.Q;
  mpc_cfg_.R = lqr.R;
  mpc_cfg_.terminal_P = gain_.P;
  mpc_cfg_.u_min = cfg_.mpc.u_min_mps2;
  mpc_cfg_.u_max = cfg_.mpc.u_max_mps2;
  mpc_cfg_.qp_tolerance = cfg_.mpc.qp_tolerance;
  mpc_cfg_.qp_max_iters = cfg_.mpc.qp_max_iters;
  if (mode_ == ControllerMode::kMpcBuffered)
    mpc_ = std::make_unique<MpcSolver>(model_.Ad, model_.Bd, mpc_cfg_);

  pair_kf_model_.Ad = model_.Ad;
  pair_kf_model_.Bd = model_.Bd;
  pair_kf_model_.C = Eigen::MatrixXd::Identity(3, 3);
  pair_kf_model_.Qn =
      cfg_.kf_platoon.process_noise * Eigen::MatrixXd::Identity(3, 3);
  Eigen::Vector3d meas_var;
  if (cfg_.controller.use_ips_feedback) {
    meas_var << cfg_.kf_platoon.ips_gap_sigma_m * cfg_.kf_platoon.ips_gap_sigma_m,
        cfg_.kf_platoon.ips_speed_sigma_mps * cfg_.kf_platoon.ips_speed_sigma_mps,
        cfg_.kf_platoon.ips_speed_sigma_mps * cfg_.kf_platoon.ips_speed_sigma_mps;
  } else {
    meas_var << cfg_.kf_platoon.ultrasonic_sigma_m * cfg_.kf_platoon.ultrasonic_sigma_m,
        cfg_.kf_platoon.encoder_sigma_mps * cfg_.kf_platoon.encoder_sigma_mps,
        cfg_.kf_platoon.encoder_sigma_mps * cfg_.kf_platoon.encoder_sigma_mps;
  }
  pair_kf_model_.Rn = meas_var.asDiagonal();

  ultrasonic_ = {cfg_.sensor.ultrasonic_max_range_m,
                 cfg_.sensor.ultrasonic_noise_sigma_m,
                 cfg_.sensor.ultrasonic_dropout_prob};

  const std::uint64_t seed = cfg_.sim.rng_seed;
  PoseFilterConfig pose_cfg;
  pose_cfg.sample_time_s = T;
  pose_cfg.accel_sigma_mps2 = cfg_.kf_pose.accel_sigma_mps2;
  pose_cfg.meas_sigma_m = cfg_.kf_pose.meas_sigma_m;

  for (int i = 0; i < n; ++i) {
    uplinks_.emplace_back(cfg_.uplink.build(stream_id::uplink_base + i,
                                            cfg_.base_dir),
                          seed);
    downlinks_.emplace_back(cfg_.downlink.build(stream_id::downlink_base + i,
                                                cfg_.base_dir),
                            seed);
    sensor_rngs_.push_back(Rng::substream(seed, stream_id::sensor_base + i));
    ips_rngs_.push_back(Rng::substream(seed, stream_id::ips_base + i));
    rss_rngs_.push_back(Rng::substream(seed, stream_id::rss_base + i));

    ActuatorBuffer buffer(1, cfg_.mpc.parsed_policy());
    PoseFilter pf(pose_cfg, arena_.width_m / 2.0, arena_.height_m / 2.0);
    fleet_.vehicles.emplace_back(buffer, cfg_.ips.step, pf);
    auto& veh = fleet_.vehicles.back();
    // leader at the front of the column, followers spaced behind it
    veh.lon.s = track_.wrap_arclength((n - 1 - i) * cfg_.sim.initial_spacing_m);
    veh.pose = track_pose(track_, veh.lon.s);
    if (cfg_.ips.enabled) veh.particles = pf_init(cfg_.ips.pf, arena_, ips_rngs_[i]);

    CloudVehicle cloud;
    // formation prior: assume the desired gap until a measurement says
    // otherwise, so the first update approaches the zone boundaries from
    // below and cannot pin a vehicle onto the leader-threshold knife edge
    cloud.kf.x_hat = Eigen::Vector3d(cfg_.lqr.desired_gap_m, 0.0, 0.0);
    cloud.kf.P = Eigen::Vector3d(kGapEstimateInit, kSpeedEstimateInit,
                                 kSpeedEstimateInit)
                     .asDiagonal();
    cloud_.push_back(std::move(cloud));
  }
  gap_sq_err_sum_.assign(n, 0.0);
  gap_final_.assign(n, 0.0);
  safety_count_.assign(n, 0);
  latest_sensor_.resize(n);
}

double Simulation::true_gap(int vehicle) const {
  const int n = cfg_.sim.vehicle_count;
  if (n == 1) return track_.total_length();
  const auto& self = fleet_.vehicles[vehicle].lon;
  const auto& ahead = fleet_.vehicles[fleet_.ahead_of(vehicle)].lon;
  return forward_gap(ahead.s, self.s, track_.total_length());
}

void Simulation::stage_sensors(std::vector<SensorSample>& samples) {
  const int n = cfg_.sim.vehicle_count;
  samples.assign(n, SensorSample{});
  for (int i = 0; i < n; ++i) {
    auto& veh = fleet_.vehicles[i];
    auto& rng = sensor_rngs_[i];
    SensorSample& s = samples[i];
    s.pose_begin = veh.pose;
    s.odo_snapshot = veh.odometer_m;
    s.accel_imu = veh.realized_accel;

    const double gap = true_gap(i);
    const bool dropout = rng.uniform() < ultrasonic_.dropout_prob;
    if (n == 1 || gap > ultrasonic_.max_range_m) {
      s.gap_reading = ultrasonic_.max_range_m;  // no echo within range
    } else {
      s.gap_reading = std::clamp(gap + rng.gaussian(0.0, ultrasonic_.noise_sigma_m),
                                 0.0, ultrasonic_.max_range_m);
    }
    s.gap_valid = !dropout;
    s.speed_reading =
        veh.lon.v + rng.gaussian(0.0, cfg_.sensor.encoder_sigma_mps);

    if (cfg_.ips.enabled) {
      s.rss_dbm.reserve(beacons_.beacons.size());
      for (const auto& b : beacons_.beacons) {
        const double d =
            std::max(std::hypot(veh.pose.x - b.x, veh.pose.y - b.y), 1e-9);
        s.rss_dbm.push_back(rss_from_distance(cfg_.ips.rss, d, &rss_rngs_[i]));
      }
    }
  }
}

void Simulation::stage_uplink(const std::vector<SensorSample>& samples,
                              TraceWriter& trace) {
  for (int i = 0; i < cfg_.sim.vehicle_count; ++i) {
    const auto& veh = fleet_.vehicles[i];
    SensorPacketPayload payload;
    payload.vehicle = i;
    payload.gap_m = samples[i].gap_reading;
    payload.gap_valid = samples[i].gap_valid;
    payload.speed_mps = samples[i].speed_reading;
    payload.ips_x_m = veh.ips_x;
    payload.ips_y_m = veh.ips_y;
    payload.ips_speed_mps = veh.ips_speed;
    payload.ips_valid = veh.ips_valid;
    const std::string link = "uplink[" + std::to_string(i) + "]";
    const std::uint64_t seq = uplinks_[i].stats().sent;
    const SendOutcome outcome = uplinks_[i].send(payload, tick_);
    trace.packet_sent(tick_, link, seq);
    if (outcome == SendOutcome::kLostChannel)
      trace.packet_lost(tick_, link, seq, "channel");
    else if (outcome == SendOutcome::kLostCap)
      trace.packet_lost(tick_, link, seq, "cap");
  }
}

// Expected acceleration applied during plant tick j: the head of the
// sequence issued downlink-delay ticks earlier (assumes delivery; losses are
// absorbed as process noise).
double Simulation::expected_applied(int vehicle, std::int64_t j) const {
  const std::int64_t issued_at = j - cfg_.downlink.delay_ticks;
  const auto& hist = cloud_[vehicle].issued_u0;
  if (issued_at < 0 || issued_at >= static_cast<std::int64_t>(hist.size()))
    return 0.0;
  return hist[static_cast<std::size_t>(issued_at)];
}

void Simulation::stage_controller(TraceWriter& trace,
                                  std::vector<CommandSequence>& out_sequences) {
  const int n = cfg_.sim.vehicle_count;
  const double T = cfg_.sim.sample_time_s;
  const double a_max = cfg_.controller.a_max_mps2;
  const bool buffered = mode_ == ControllerMode::kMpcBuffered &&
                        cfg_.mpc.buffer_enabled;
  const int plan_len = buffered ? cfg_.mpc.horizon_steps : 1;

  // Only packets arriving this tick count; a tick with no arrival skips the
  // measurement update rather than reusing stale data.
  std::fill(latest_sensor_.begin(), latest_sensor_.end(), std::nullopt);
  std::vector<std::int64_t> freshest(n, -1);
  for (int i = 0; i < n; ++i) {
    const std::string link = "uplink[" + std::to_string(i) + "]";
    for (auto& pkt : uplinks_[i].poll(tick_)) {
      trace.packet_delivered(tick_, link, pkt.seq, pkt.send_tick);
      if (pkt.send_tick >= freshest[i]) {  // jitter can reorder
        latest_sensor_[i] = pkt.payload;
        freshest[i] = pkt.send_tick;
      }
    }
  }

  struct Plan {
    SpeedZone zone = SpeedZone::kLeader;
    std::vector<double> self_seq;
    std::vector<double> ahead_seq;
    bool has_mpc = false;
    MpcDiagnostics diag;
  };
  std::vector<Plan> plans(n);

  // The filter lives at sensor time: a packet arriving now was sampled
  // uplink-delay ticks ago, so the update aligns with that tick and the
  // controller forward-predicts through both link delays before acting.
  const std::int64_t du = cfg_.uplink.delay_ticks;
  const std::int64_t dd = cfg_.downlink.delay_ticks;
  const std::int64_t meas_tick = tick_ - du;

  for (int i = 0; i < n; ++i) {
    auto& cloud = cloud_[i];
    const int ahead = fleet_.ahead_of(i);

    // the filter state tracks x at the start of tick meas_tick; before any
    // measurement can exist it stays on its prior
    if (meas_tick >= 1) {
      const Eigen::Vector2d u_pred(expected_applied(ahead, meas_tick - 1),
                                   expected_applied(i, meas_tick - 1));
      cloud.kf = kf_predict(cloud.kf, pair_kf_model_, u_pred);
    }

    std::optional<Eigen::VectorXd> y;
    const auto& own = latest_sensor_[i];
    const auto& ahead_pkt = latest_sensor_[ahead];
    const bool aligned = own.has_value() && ahead_pkt.has_value() &&
                         freshest[i] == meas_tick &&
                         freshest[ahead] == meas_tick;
    if (cfg_.controller.use_ips_feedback) {
      if (aligned && own->ips_valid && ahead_pkt->ips_valid) {
        const double s_self = track_.project(own->ips_x_m, own->ips_y_m);
        const double s_ahead =
            track_.project(ahead_pkt->ips_x_m, ahead_pkt->ips_y_m);
        y = Eigen::Vector3d(
            forward_gap(s_ahead, s_self, track_.total_length()),
            ahead_pkt->ips_speed_mps, own->ips_speed_mps);
      }
    } else if (aligned && own->gap_valid) {
      y = Eigen::Vector3d(own->gap_m, ahead_pkt->speed_mps, own->speed_mps);
    }
    cloud.kf = kf_update(cloud.kf, pair_kf_model_, y);

    // belief about the state the command will act on (t + downlink delay)
    Eigen::Vector3d x_fwd = cloud.kf.x_hat;
    for (std::int64_t j = std::max<std::int64_t>(meas_tick, 0);
         j < tick_ + dd; ++j) {
      const Eigen::Vector2d u_j(expected_applied(ahead, j),
                                expected_applied(i, j));
      x_fwd = model_.Ad * x_fwd + model_.Bd * u_j;
    }
    trace.estimate_pair_kf(tick_, i, x_fwd(0), x_fwd(1), x_fwd(2),
                           y.has_value());

    const double gap_hat = std::max(0.0, x_fwd(0));
    const double v_ahead_hat = std::max(0.0, x_fwd(1));
    const double v_self_hat = x_fwd(2);
    const SpeedDecision decision = scenario_speed(
        gap_hat, cfg_.scenario, cfg_.sim.full_speed_mps, v_ahead_hat);
    cloud.zone = decision.zone;

    Plan& plan = plans[i];
    plan.zone = decision.zone;
    if (decision.zone == SpeedZone::kLqrZone) {
      const Eigen::Vector3d x(gap_hat, v_ahead_hat, v_self_hat);
      const Eigen::Vector3d x_des(cfg_.lqr.desired_gap_m, v_ahead_hat,
                                  v_ahead_hat);
      if (mode_ == ControllerMode::kLqrDirect) {
        const Eigen::VectorXd u = lqr_command(gain_, x, x_des, a_max);
        plan.self_seq = {u(1)};
        plan.ahead_seq = {u(0)};
      } else {
        const MpcResult res = mpc_->solve(x, x_des, tick_);
        plan.has_mpc = true;
        plan.diag = res.diagnostics;
        const int len = std::min<int>(plan_len,
                                      static_cast<int>(res.sequence.commands.size()));
        for (int k = 0; k < len; ++k) {
          plan.self_seq.push_back(res.sequence.commands[k](1));
          plan.ahead_seq.push_back(res.sequence.commands[k](0));
        }
      }
    } else {
      plan.self_seq = rollout_speed_law(v_self_hat, decision.speed_mps,
                                        plan_len, T, a_max);
    }
  }

  // Optional second channel: a leader-zone vehicle is driven by its
  // follower's pair law (the model's first input) instead of its own rule.
  std::vector<std::vector<double>> final_seq(n);
  for (int i = 0; i < n; ++i) final_seq[i] = plans[i].self_seq;
  if (cfg_.controller.apply_leader_channel && n > 1) {
    for (int i = 0; i < n; ++i) {
      const int follower = (i + 1) % n;
      if (follower != i && plans[i].zone == SpeedZone::kLeader &&
          plans[follower].zone == SpeedZone::kLqrZone &&
          !plans[follower].ahead_seq.empty()) {
        final_seq[i] = plans[follower].ahead_seq;
      }
    }
  }

  out_sequences.assign(n, CommandSequence{});
  for (int i = 0; i < n; ++i) {
    CommandSequence& seq = out_sequences[i];
    seq.created_at_tick = tick_;
    for (double a : final_seq[i])
      seq.commands.push_back(Eigen::VectorXd::Constant(1, a));
    cloud_[i].issued_u0.push_back(final_seq[i].empty() ? 0.0 : final_seq[i][0]);

    const double u0 = final_seq[i].empty() ? 0.0 : final_seq[i][0];
    const int len = static_cast<int>(final_seq[i].size());
    if (plans[i].has_mpc) {
      trace.command_mpc(tick_, i, zone_name(plans[i].zone), u0, len,
                        plans[i].diag.iterations, plans[i].diag.residual,
                        plans[i].diag.inexact);
      if (plans[i].diag.inexact) {
        ++mpc_inexact_;
        trace.mpc_inexact(tick_, i, plans[i].diag.iterations,
                          plans[i].diag.residual);
      }
    } else {
      trace.command(tick_, i, zone_name(plans[i].zone), u0, len);
    }
  }
}

void Simulation::stage_downlink(const std::vector<CommandSequence>& sequences,
                                TraceWriter& trace) {
  for (int i = 0; i < cfg_.sim.vehicle_count; ++i) {
    const std::string link = "downlink[" + std::to_string(i) + "]";
    const std::uint64_t seq_no = downlinks_[i].stats().sent;
    const SendOutcome outcome =
        downlinks_[i].send(CommandPacketPayload{i, sequences[i]}, tick_);
    trace.packet_sent(tick_, link, seq_no);
    if (outcome == SendOutcome::kLostChannel)
      trace.packet_lost(tick_, link, seq_no, "channel");
    else if (outcome == SendOutcome::kLostCap)
      trace.packet_lost(tick_, link, seq_no, "cap");
  }
}

void Simulation::stage_actuators(TraceWriter& trace) {
  for (int i = 0; i < cfg_.sim.vehicle_count; ++i) {
    auto& veh = fleet_.vehicles[i];
    const std::string link = "downlink[" + std::to_string(i) + "]";
    for (auto& pkt : downlinks_[i].poll(tick_)) {
      trace.packet_delivered(tick_, link, pkt.seq, pkt.send_tick);
      veh.buffer.push(pkt.payload.sequence);
    }
    const long exhausted_before = veh.buffer.exhausted_count();
    const Eigen::VectorXd a = veh.buffer.pop();
    if (veh.buffer.exhausted_count() > exhausted_before) {
      trace.buffer_exhausted(tick_, i,
                             veh.buffer.policy() ==
                                     ActuatorBuffer::ExhaustedPolicy::kHoldLast
                                 ? "hold_last"
                                 : "zero");
    }
    veh.applied_accel = a(0);
  }
}

void Simulation::stage_plant(TraceWriter& trace) {
  const double T = cfg_.sim.sample_time_s;
  const int n = cfg_.sim.vehicle_count;
  for (int i = 0; i < n; ++i) {
    auto& veh = fleet_.vehicles[i];
    const double v_before = veh.lon.v;
    const double s_before = veh.lon.s;
    veh.lon = step_vehicle(veh.lon, veh.applied_accel, T,
                           track_.total_length(), cfg_.sim.v_max_mps);
    veh.realized_accel = (veh.lon.v - v_before) / T;
    double ds = veh.lon.s - s_before;
    if (ds < 0.0) ds += track_.total_length();
    veh.odometer_m += ds;
    veh.pose = track_pose(track_, veh.lon.s);
  }
  for (int i = 0; i < n; ++i) {
    const auto& veh = fleet_.vehicles[i];
    const double gap = true_gap(i);
    trace.state(tick_, i, veh.lon.s, veh.lon.v, veh.applied_accel, veh.pose,
                gap);
    gap_final_[i] = gap;
    if (i >= 1) {
      const double err = gap - cfg_.lqr.desired_gap_m;
      gap_sq_err_sum_[i] += err * err;
    }
  }
}

void Simulation::stage_ips(const std::vector<SensorSample>& samples,
                           TraceWriter& trace) {
  if (!cfg_.ips.enabled) return;
  for (int i = 0; i < cfg_.sim.vehicle_count; ++i) {
    auto& veh = fleet_.vehicles[i];
    auto& rng = ips_rngs_[i];
    const SensorSample& s = samples[i];

    if (veh.stepper.push(s.accel_imu)) {
      const double step_len = s.odo_snapshot - veh.odo_at_last_step_m;
      veh.particles = pf_predict(veh.particles, s.pose_begin.omega, step_len,
                                 cfg_.ips.pf, arena_, rng);
      veh.odo_at_last_step_m = s.odo_snapshot;
    }

    std::vector<BeaconDistance> meas;
    meas.reserve(s.rss_dbm.size());
    for (std::size_t k = 0; k < s.rss_dbm.size(); ++k)
      meas.push_back({beacons_.beacons[k].id,
                      distance_from_rss(cfg_.ips.rss, s.rss_dbm[k])});
    PfUpdateResult upd =
        pf_update(veh.particles, meas, beacons_, cfg_.ips.pf, arena_, rng);
    veh.particles = std::move(upd.set);
    if (upd.diverged) {
      ++pf_divergences_;
      trace.pf_divergence(tick_, i);
    }
    veh.particles = pf_resample(veh.particles, cfg_.ips.pf, rng);

    const auto [x_hat, y_hat] = pf_extract(veh.particles);
    const double err =
        std::hypot(x_hat - s.pose_begin.x, y_hat - s.pose_begin.y);
    ips_errors_.push_back(err);
    trace.estimate_ips(tick_, i, x_hat, y_hat, err);

    const Pose smoothed = veh.pose_filter.step(std::make_pair(x_hat, y_hat));
    trace.estimate_pose_kf(tick_, i, smoothed);
    veh.ips_x = smoothed.x;
    veh.ips_y = smoothed.y;
    veh.ips_speed = veh.pose_filter.speed();
    veh.ips_valid = true;
  }
}

void Simulation::stage_safety(TraceWriter& trace) {
  const int n = cfg_.sim.vehicle_count;
  if (n < 2) return;
  for (int i = 0; i < n; ++i) {
    const double gap = true_gap(i);
    if (gap < cfg_.sim.contact_threshold_m) {
      ++safety_count_[i];
      ++safety_total_;
      trace.safety_violation(tick_, i, gap);
    }
  }
}

void Simulation::tick(TraceWriter& trace) {
  stage_sensors(samples_);
  stage_uplink(samples_, trace);
  std::vector<CommandSequence> sequences;
  stage_controller(trace, sequences);
  stage_downlink(sequences, trace);
  stage_actuators(trace);
  stage_plant(trace);
  stage_ips(samples_, trace);
  stage_safety(trace);
  ++tick_;
}

RunSummary Simulation::run(std::ostream* trace_out) {
  TraceWriter trace(trace_out);
  trace.header(cfg_.sim.rng_seed, cfg_.sim.vehicle_count,
               cfg_.sim.sample_time_s, ticks_);
  while (tick_ < ticks_) {
    try {
      tick(trace);
    } catch (const SimulationFault& e) {
      throw SimulationFault("tick " + std::to_string(tick_) + ": " + e.what());
    }
  }
  return summary();
}

RunSummary Simulation::summary() const {
  RunSummary s;
  s.ticks = tick_;
  s.duration_s = static_cast<double>(tick_) * cfg_.sim.sample_time_s;
  s.sample_time_s = cfg_.sim.sample_time_s;
  s.seed = cfg_.sim.rng_seed;
  const int n = cfg_.sim.vehicle_count;
  for (int i = 0; i < n; ++i) {
    VehicleSummary v;
    v.vehicle = i;
    v.leader = (i == 0);
    v.gap_rms_m = (i >= 1 && tick_ > 0)
                      ? std::sqrt(gap_sq_err_sum_[i] / static_cast<double>(tick_))
                      : 0.0;
    v.gap_final_m = gap_final_[i];
    v.safety_violations = safety_count_[i];
    s.vehicles.push_back(v);
  }
  for (int i = 0; i < n; ++i) {
    const auto& st = uplinks_[i].stats();
    s.links.push_back({"uplink[" + std::to_string(i) + "]", st.sent,
                       st.delivered, st.dropped, st.capped, st.in_flight});
  }
  for (int i = 0; i < n; ++i) {
    const auto& st = downlinks_[i].stats();
    s.links.push_back({"downlink[" + std::to_string(i) + "]", st.sent,
                       st.delivered, st.dropped, st.capped, st.in_flight});
  }
  for (const auto& veh : fleet_.vehicles) {
    s.buffer_exhausted += veh.buffer.exhausted_count();
    s.buffer_stale += veh.buffer.stale_count();
  }
  s.pf_divergences = pf_divergences_;
  s.mpc_inexact = mpc_inexact_;
  s.safety_violations = safety_total_;
  if (!ips_errors_.empty()) {
    const ErrorCdf cdf = error_cdf(ips_errors_);
    s.ips.samples = static_cast<long>(ips_errors_.size());
    s.ips.p50_m = cdf.percentile(0.5);
    s.ips.p90_m = cdf.percentile(0.9);
    s.ips.max_m = cdf.max();
  }
  return s;
}

}  // namespace wncs
