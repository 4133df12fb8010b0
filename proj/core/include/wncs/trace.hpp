#pragma once
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "wncs/world.hpp"

namespace wncs {

// Newline-delimited structured trace. One self-describing record per line;
// ticks are non-decreasing and events within a tick appear in pipeline
// order: uplink send, uplink delivery, estimate, command, downlink send,
// downlink delivery/buffer, state, ips, safety.
class TraceWriter {
 public:
  explicit TraceWriter(std::ostream* out) : out_(out) {}

  static constexpr int kSchemaVersion = 1;

  void header(std::uint64_t seed, int vehicle_count, double sample_time_s,
              std::int64_t ticks);
  void state(std::int64_t tick, int vehicle, double s, double v, double a,
             const Pose& pose, double gap);
  void estimate_pair_kf(std::int64_t tick, int vehicle, double gap_hat,
                        double v_ahead_hat, double v_hat, bool updated);
  void estimate_ips(std::int64_t tick, int vehicle, double x_hat, double y_hat,
                    double error_m);
  void estimate_pose_kf(std::int64_t tick, int vehicle, const Pose& pose);
  void command(std::int64_t tick, int vehicle, const std::string& zone,
               double u, int seq_len);
  void command_mpc(std::int64_t tick, int vehicle, const std::string& zone,
                   double u, int seq_len, int qp_iters, double qp_residual,
                   bool inexact);
  void mpc_inexact(std::int64_t tick, int vehicle, int iters, double residual);
  void packet_sent(std::int64_t tick, const std::string& link,
                   std::uint64_t seq);
  void packet_lost(std::int64_t tick, const std::string& link,
                   std::uint64_t seq, const std::string& reason);
  void packet_delivered(std::int64_t tick, const std::string& link,
                        std::uint64_t seq, std::int64_t send_tick);
  void buffer_exhausted(std::int64_t tick, int vehicle,
                        const std::string& policy);
  void safety_violation(std::int64_t tick, int vehicle, double gap);
  void pf_divergence(std::int64_t tick, int vehicle);

 private:
  void write(const std::string& line);
  std::ostream* out_;
};

struct VehicleSummary {
  int vehicle = 0;
  bool leader = false;
  double gap_rms_m = 0.0;   // RMS of (gap - desired gap); leaders report 0
  double gap_final_m = 0.0;
  long safety_violations = 0;
};

struct LinkSummary {
  std::string link;
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  std::uint64_t capped = 0;
  std::uint64_t in_flight = 0;
};

struct IpsSummary {
  long samples = 0;
  double p50_m = 0.0;
  double p90_m = 0.0;
  double max_m = 0.0;
};

struct RunSummary {
  int schema_version = TraceWriter::kSchemaVersion;
  std::int64_t ticks = 0;
  double duration_s = 0.0;
  double sample_time_s = 0.0;
  std::uint64_t seed = 0;
  std::vector<VehicleSummary> vehicles;
  std::vector<LinkSummary> links;
  long buffer_exhausted = 0;
  long buffer_stale = 0;
  long pf_divergences = 0;
  long mpc_inexact = 0;
  long safety_violations = 0;
  IpsSummary ips;

  std::string to_json() const;
  std::string to_table() const;
};

}  // namespace wncs
