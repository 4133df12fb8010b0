#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wncs/config.hpp"
#include "wncs/errors.hpp"
#include "wncs/ips.hpp"
#include "wncs/rng.hpp"
#include "wncs/sim.hpp"

namespace wncs::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct RunOutput {
  RunSummary summary;
};

RunOutput run_to_dir(const RunConfig& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  std::ofstream trace(out_dir + "/trace.jsonl", std::ios::binary);
  if (!trace) throw ConfigError("cannot write trace file in " + out_dir);
  Simulation sim(cfg);
  RunOutput out;
  out.summary = sim.run(&trace);
  trace.close();
  std::ofstream summary(out_dir + "/summary.json", std::ios::binary);
  if (!summary) throw ConfigError("cannot write summary file in " + out_dir);
  summary << out.summary.to_json() << '\n';
  return out;
}

double worst_follower_gap_rms(const RunSummary& s) {
  double worst = 0.0;
  for (const auto& v : s.vehicles)
    if (!v.leader) worst = std::max(worst, v.gap_rms_m);
  return worst;
}

std::uint64_t total_dropped(const RunSummary& s) {
  std::uint64_t sum = 0;
  for (const auto& l : s.links) sum += l.dropped + l.capped;
  return sum;
}

}  // namespace

int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = load_config(args.config_path);
    if (args.seed_override) cfg.sim.rng_seed = *args.seed_override;
  } catch (const ConfigError& e) {
    err << "config error (" << args.config_path << "): " << e.what() << '\n';
    return 1;
  }
  try {
    const RunOutput result = run_to_dir(cfg, args.out_dir);
    out << result.summary.to_table();
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  } catch (const SimulationFault& e) {
    err << "simulation fault: " << e.what() << '\n';
    return 2;
  }
}

int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
  if (args.values.empty()) {
    err << "sweep: empty value list\n";
    return 1;
  }
  RunConfig base;
  try {
    base = load_config(args.config_path);
    RunConfig probe = base;
    set_config_value(probe, args.param_path, args.values.front());
  } catch (const ConfigError& e) {
    err << "config error (" << args.config_path << "): " << e.what() << '\n';
    return 1;
  }

  std::ostringstream table;
  table << "# param: " << args.param_path << '\n';
  table << "value gap_rms_m ips_p90_m loss_count exhaustion_count\n";
  const std::uint64_t master_seed = base.sim.rng_seed;
  char buf[256];
  try {
    for (std::size_t idx = 0; idx < args.values.size(); ++idx) {
      RunConfig cfg = base;
      set_config_value(cfg, args.param_path, args.values[idx]);
      // one stable sub-seed per value index, so adding sweep points never
      // changes earlier rows
      cfg.sim.rng_seed = derive_seed(master_seed, stream_id::sweep_base + idx);
      cfg.validate();
      std::snprintf(buf, sizeof buf, "%s/sweep_%03zu", args.out_dir.c_str(),
                    idx);
      const RunOutput result = run_to_dir(cfg, buf);
      std::snprintf(buf, sizeof buf, "%.9g %.9g %.9g %llu %ld",
                    args.values[idx], worst_follower_gap_rms(result.summary),
                    result.summary.ips.p90_m,
                    static_cast<unsigned long long>(total_dropped(result.summary)),
                    result.summary.buffer_exhausted);
      table << buf << '\n';
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  } catch (const SimulationFault& e) {
    err << "simulation fault: " << e.what() << '\n';
    return 2;
  }
  fs::create_directories(args.out_dir);
  std::ofstream table_file(args.out_dir + "/sweep.txt", std::ios::binary);
  if (!table_file) {
    err << "cannot write sweep table in " << args.out_dir << '\n';
    return 1;
  }
  table_file << table.str();
  out << table.str();
  return 0;
}

int cmd_cdf(const CdfArgs& args, std::ostream& out, std::ostream& err) {
  std::ifstream in(args.trace_path);
  if (!in) {
    err << "cannot open trace: " << args.trace_path << '\n';
    return 1;
  }
  // ground truth at the estimate's sampling time: an ips estimate at tick t
  // localizes the pose the beacons saw, i.e. the state at the end of t-1
  std::map<std::pair<std::int64_t, int>, std::pair<double, double>> truth;
  std::vector<std::tuple<std::int64_t, int, double, double>> estimates;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("kind")) {
      err << "malformed trace line " << line_no << '\n';
      return 1;
    }
    const std::string kind = j["kind"];
    if (kind == "state") {
      truth[{j["tick"], j["vehicle"]}] = {j["x_m"], j["y_m"]};
    } else if (kind == "estimate" && j["source"] == "ips") {
      estimates.emplace_back(j["tick"], j["vehicle"], j["x_hat_m"],
                             j["y_hat_m"]);
    }
  }
  std::vector<double> errors;
  for (const auto& [tick, vehicle, x, y] : estimates) {
    const auto it = truth.find({tick - 1, vehicle});
    if (it == truth.end()) continue;  // no prior state (first tick)
    errors.push_back(std::hypot(x - it->second.first, y - it->second.second));
  }
  if (errors.empty()) {
    err << "trace has no pairable ips estimate events\n";
    return 1;
  }
  const ErrorCdf cdf = error_cdf(errors);
  std::ofstream cdf_out(args.out_path, std::ios::binary);
  if (!cdf_out) {
    err << "cannot write cdf file: " << args.out_path << '\n';
    return 1;
  }
  char buf[96];
  for (const auto& [e, frac] : cdf.points) {
    std::snprintf(buf, sizeof buf, "%.9g %.9g\n", e, frac);
    cdf_out << buf;
  }
  std::snprintf(buf, sizeof buf, "p50 %.9g\np90 %.9g\nmax %.9g\n",
                cdf.percentile(0.5), cdf.percentile(0.9), cdf.max());
  out << buf;
  return 0;
}

int cmd_validate(const ValidateArgs& args, std::ostream& out,
                 std::ostream& err) {
  try {
    load_config(args.config_path);
  } catch (const ConfigError& e) {
    err << "config error (" << args.config_path << "): " << e.what() << '\n';
    return 1;
  }
  out << "OK " << args.config_path << '\n';
  return 0;
}

}  // namespace wncs::cli
