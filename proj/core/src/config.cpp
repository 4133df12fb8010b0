#include "wncs/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <variant>
#include <vector>

#include "wncs/errors.hpp"

namespace wncs {

ControllerMode ControllerConfig::parsed_mode() const {
  if (mode == "lqr_direct") return ControllerMode::kLqrDirect;
  if (mode == "mpc_buffered") return ControllerMode::kMpcBuffered;
  throw ConfigError("controller.mode must be lqr_direct or mpc_buffered, got '" +
                    mode + "'");
}

ActuatorBuffer::ExhaustedPolicy MpcFileConfig::parsed_policy() const {
  if (exhausted_policy == "hold_last")
    return ActuatorBuffer::ExhaustedPolicy::kHoldLast;
  if (exhausted_policy == "zero") return ActuatorBuffer::ExhaustedPolicy::kZero;
  throw ConfigError("mpc.exhausted_policy must be hold_last or zero, got '" +
                    exhausted_policy + "'");
}

LinkConfig LinkFileConfig::build(std::uint64_t rng_stream,
                                 const std::string& base_dir) const {
  LinkConfig link;
  if (channel == "bernoulli") {
    link.channel = BernoulliChannel{p_loss};
  } else if (channel == "gilbert_elliott") {
    GilbertElliottChannel ge;
    ge.p_good_to_bad = p_good_to_bad;
    ge.p_bad_to_good = p_bad_to_good;
    ge.loss_good = loss_good;
    ge.loss_bad = loss_bad;
    link.channel = ge;
  } else if (channel == "trace") {
    if (trace_path.empty())
      throw ConfigError("trace channel requires trace_path");
    std::string path = trace_path;
    if (!base_dir.empty() && path.front() != '/')
      path = base_dir + "/" + path;
    TraceDrivenChannel tr;
    std::tie(tr.rss_dbm, tr.noise_dbm) = load_rss_noise_trace(path);
    tr.snr_loss_threshold_db = snr_loss_threshold_db;
    link.channel = tr;
  } else {
    throw ConfigError(
        "link channel must be bernoulli, gilbert_elliott or trace, got '" +
        channel + "'");
  }
  link.delay_ticks = delay_ticks;
  link.jitter_ticks = jitter_ticks;
  link.max_packets_per_tick = max_packets_per_tick;
  link.rng_stream = rng_stream;
  link.validate();
  return link;
}

void RunConfig::validate() const {
  sim.validate();
  scenario.validate();
  controller.parsed_mode();
  mpc.parsed_policy();
  if (!(controller.a_max_mps2 > 0.0))
    throw ConfigError("controller.a_max_mps2 must be > 0");
  if (!(lqr.q_scale > 0.0) || !(lqr.r_scale > 0.0))
    throw ConfigError("lqr weights must be > 0");
  if (!(lqr.desired_gap_m > 0.0))
    throw ConfigError("lqr.desired_gap_m must be > 0");
  if (mpc.horizon_steps < 1) throw ConfigError("mpc.horizon_steps must be >= 1");
  if (!(mpc.u_min_mps2 < mpc.u_max_mps2))
    throw ConfigError("mpc bounds must satisfy u_min < u_max");
  if (!(mpc.qp_tolerance > 0.0)) throw ConfigError("mpc.qp_tolerance must be > 0");
  if (mpc.qp_max_iters < 1) throw ConfigError("mpc.qp_max_iters must be >= 1");
  if (!(kf_platoon.process_noise >= 0.0))
    throw ConfigError("kf.platoon.process_noise must be >= 0");
  for (double sigma :
       {kf_platoon.ultrasonic_sigma_m, kf_platoon.encoder_sigma_mps,
        kf_platoon.ips_gap_sigma_m, kf_platoon.ips_speed_sigma_mps,
        kf_pose.accel_sigma_mps2, kf_pose.meas_sigma_m})
    if (!(sigma > 0.0)) throw ConfigError("kf noise sigmas must be > 0");
  if (!(sensor.ultrasonic_max_range_m > 0.0))
    throw ConfigError("sensor.ultrasonic_max_range_m must be > 0");
  if (sensor.ultrasonic_noise_sigma_m < 0.0 || sensor.encoder_sigma_mps < 0.0)
    throw ConfigError("sensor noise sigmas must be >= 0");
  if (sensor.ultrasonic_dropout_prob < 0.0 || sensor.ultrasonic_dropout_prob > 1.0)
    throw ConfigError("sensor.ultrasonic_dropout_prob must be in [0, 1]");
  if (ips.beacon_count < 1 || ips.beacon_count > 8)
    throw ConfigError("ips.beacon_count must be in [1, 8]");
  ips.pf.validate();
  ips.step.validate();
  ips.rss.validate();
  // link channel names and probability ranges
  uplink.build(0, base_dir.empty() ? "." : base_dir);
  downlink.build(0, base_dir.empty() ? "." : base_dir);
}

namespace {

using FieldRef =
    std::variant<double*, int*, std::uint64_t*, bool*, std::string*>;

struct Field {
  std::string path;  // "section.key"
  FieldRef ref;
};

// Single source of truth for the file schema: parsing, serialization and
// sweep assignment all walk this list.
std::vector<Field> config_fields(RunConfig& c) {
  std::vector<Field> f;
  const auto add = [&f](const std::string& path, FieldRef ref) {
    f.push_back({path, ref});
  };
  add("sim.sample_time_s", &c.sim.sample_time_s);
  add("sim.duration_s", &c.sim.duration_s);
  add("sim.rng_seed", &c.sim.rng_seed);
  add("sim.vehicle_count", &c.sim.vehicle_count);
  add("sim.full_speed_mps", &c.sim.full_speed_mps);
  add("sim.arena_width_m", &c.sim.arena_width_m);
  add("sim.arena_height_m", &c.sim.arena_height_m);
  add("sim.v_max_mps", &c.sim.v_max_mps);
  add("sim.contact_threshold_m", &c.sim.contact_threshold_m);
  add("sim.initial_spacing_m", &c.sim.initial_spacing_m);

  add("controller.mode", &c.controller.mode);
  add("controller.a_max_mps2", &c.controller.a_max_mps2);
  add("controller.apply_leader_channel", &c.controller.apply_leader_channel);
  add("controller.use_ips_feedback", &c.controller.use_ips_feedback);

  add("lqr.q_scale", &c.lqr.q_scale);
  add("lqr.r_scale", &c.lqr.r_scale);
  add("lqr.desired_gap_m", &c.lqr.desired_gap_m);

  add("scenario.leader_threshold_m", &c.scenario.leader_threshold_m);
  add("scenario.lqr_zone_min_m", &c.scenario.lqr_zone_min_m);
  add("scenario.stop_zone_m", &c.scenario.stop_zone_m);
  add("scenario.leader_speed_fraction", &c.scenario.leader_speed_fraction);

  add("mpc.horizon_steps", &c.mpc.horizon_steps);
  add("mpc.u_min_mps2", &c.mpc.u_min_mps2);
  add("mpc.u_max_mps2", &c.mpc.u_max_mps2);
  add("mpc.qp_tolerance", &c.mpc.qp_tolerance);
  add("mpc.qp_max_iters", &c.mpc.qp_max_iters);
  add("mpc.buffer_enabled", &c.mpc.buffer_enabled);
  add("mpc.exhausted_policy", &c.mpc.exhausted_policy);

  add("kf.platoon.process_noise", &c.kf_platoon.process_noise);
  add("kf.platoon.ultrasonic_sigma_m", &c.kf_platoon.ultrasonic_sigma_m);
  add("kf.platoon.encoder_sigma_mps", &c.kf_platoon.encoder_sigma_mps);
  add("kf.platoon.ips_gap_sigma_m", &c.kf_platoon.ips_gap_sigma_m);
  add("kf.platoon.ips_speed_sigma_mps", &c.kf_platoon.ips_speed_sigma_mps);

  add("kf.pose.accel_sigma_mps2", &c.kf_pose.accel_sigma_mps2);
  add("kf.pose.meas_sigma_m", &c.kf_pose.meas_sigma_m);

  for (auto& [name, link] :
       {std::pair<std::string, LinkFileConfig*>{"uplink", &c.uplink},
        {"downlink", &c.downlink}}) {
    add(name + ".channel", &link->channel);
    add(name + ".p_loss", &link->p_loss);
    add(name + ".p_good_to_bad", &link->p_good_to_bad);
    add(name + ".p_bad_to_good", &link->p_bad_to_good);
    add(name + ".loss_good", &link->loss_good);
    add(name + ".loss_bad", &link->loss_bad);
    add(name + ".trace_path", &link->trace_path);
    add(name + ".snr_loss_threshold_db", &link->snr_loss_threshold_db);
    add(name + ".delay_ticks", &link->delay_ticks);
    add(name + ".jitter_ticks", &link->jitter_ticks);
    add(name + ".max_packets_per_tick", &link->max_packets_per_tick);
  }

  add("sensor.ultrasonic_max_range_m", &c.sensor.ultrasonic_max_range_m);
  add("sensor.ultrasonic_noise_sigma_m", &c.sensor.ultrasonic_noise_sigma_m);
  add("sensor.ultrasonic_dropout_prob", &c.sensor.ultrasonic_dropout_prob);
  add("sensor.encoder_sigma_mps", &c.sensor.encoder_sigma_mps);

  add("ips.enabled", &c.ips.enabled);
  add("ips.beacon_count", &c.ips.beacon_count);
  add("ips.particle_count", &c.ips.pf.particle_count);
  add("ips.sigma_update_m", &c.ips.pf.sigma_update_m);
  add("ips.step_noise_length_m", &c.ips.pf.step_noise_length_m);
  add("ips.step_noise_heading_rad", &c.ips.pf.step_noise_heading_rad);
  add("ips.resample_neff_fraction", &c.ips.pf.resample_neff_fraction);
  add("ips.accel_threshold_mps2", &c.ips.step.accel_threshold_mps2);
  add("ips.min_interval_ticks", &c.ips.step.min_interval_ticks);
  add("ips.rss_at_d0_dbm", &c.ips.rss.rss_at_d0_dbm);
  add("ips.d0_m", &c.ips.rss.d0_m);
  add("ips.path_loss_exponent", &c.ips.rss.path_loss_exponent_n);
  add("ips.rss_noise_sigma_db", &c.ips.rss.noise_sigma_db);
  return f;
}

double parse_double(const std::string& path, const std::string& value) {
  double out = 0.0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end)
    throw ConfigError(path + ": cannot parse '" + value + "' as a number");
  return out;
}

long long parse_integer(const std::string& path, const std::string& value) {
  long long out = 0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end)
    throw ConfigError(path + ": cannot parse '" + value + "' as an integer");
  return out;
}

void assign(const std::string& path, FieldRef ref, const std::string& value) {
  if (auto* d = std::get_if<double*>(&ref)) {
    **d = parse_double(path, value);
  } else if (auto* i = std::get_if<int*>(&ref)) {
    **i = static_cast<int>(parse_integer(path, value));
  } else if (auto* u = std::get_if<std::uint64_t*>(&ref)) {
    unsigned long long out = 0;
    const char* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end)
      throw ConfigError(path + ": cannot parse '" + value +
                        "' as an unsigned integer");
    **u = out;
  } else if (auto* b = std::get_if<bool*>(&ref)) {
    if (value == "true")
      **b = true;
    else if (value == "false")
      **b = false;
    else
      throw ConfigError(path + ": expected true or false, got '" + value + "'");
  } else {
    *std::get<std::string*>(ref) = value;
  }
}

std::string format_value(const FieldRef& ref) {
  char buf[64];
  if (const auto* d = std::get_if<double*>(&ref)) {
    std::snprintf(buf, sizeof buf, "%.17g", **d);
    return buf;
  }
  if (const auto* i = std::get_if<int*>(&ref)) return std::to_string(**i);
  if (const auto* u = std::get_if<std::uint64_t*>(&ref))
    return std::to_string(**u);
  if (const auto* b = std::get_if<bool*>(&ref)) return **b ? "true" : "false";
  return *std::get<std::string*>(ref);
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  std::map<std::string, std::string> entries;
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(line_no) +
                          ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError("line " + std::to_string(line_no) + ": empty section");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    const std::string path = section.empty() ? key : section + "." + key;
    if (!entries.emplace(path, value).second)
      throw ConfigError("duplicate key: " + path);
  }

  RunConfig cfg;
  cfg.base_dir = base_dir;
  for (const auto& field : config_fields(cfg)) {
    const auto it = entries.find(field.path);
    if (it == entries.end()) continue;  // missing keys keep their defaults
    assign(field.path, field.ref, it->second);
    entries.erase(it);
  }
  if (!entries.empty()) {
    std::string msg = "unknown config key(s):";
    for (const auto& [k, v] : entries) msg += " " + k;
    throw ConfigError(msg);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  std::string dir = ".";
  const auto slash = path.find_last_of('/');
  if (slash != std::string::npos) dir = path.substr(0, slash);
  return parse_config(text.str(), dir);
}

std::string serialize_config(const RunConfig& cfg) {
  RunConfig& mutable_cfg = const_cast<RunConfig&>(cfg);
  std::ostringstream out;
  std::string current_section;
  for (const auto& field : config_fields(mutable_cfg)) {
    const auto dot = field.path.find_last_of('.');
    const std::string section = field.path.substr(0, dot);
    const std::string key = field.path.substr(dot + 1);
    if (section != current_section) {
      if (!current_section.empty()) out << '\n';
      out << '[' << section << "]\n";
      current_section = section;
    }
    out << key << " = " << format_value(field.ref) << '\n';
  }
  return out.str();
}

void set_config_value(RunConfig& cfg, const std::string& dotted_path,
                      double value) {
  for (const auto& field : config_fields(cfg)) {
    if (field.path != dotted_path) continue;
    if (auto* d = std::get_if<double*>(&field.ref)) {
      **d = value;
      return;
    }
    if (auto* i = std::get_if<int*>(&field.ref)) {
      **i = static_cast<int>(value);
      return;
    }
    if (auto* u = std::get_if<std::uint64_t*>(&field.ref)) {
      **u = static_cast<std::uint64_t>(value);
      return;
    }
    throw ConfigError("config key is not numeric: " + dotted_path);
  }
  throw ConfigError("unknown config key: " + dotted_path);
}

}  // namespace wncs
