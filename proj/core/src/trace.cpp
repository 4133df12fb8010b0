#include "wncs/trace.hpp"

#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

namespace wncs {

using json = nlohmann::ordered_json;

void TraceWriter::write(const std::string& line) {
  if (out_ == nullptr) return;
  *out_ << line << '\n';
}

void TraceWriter::header(std::uint64_t seed, int vehicle_count,
                         double sample_time_s, std::int64_t ticks) {
  if (out_ == nullptr) return;
  json j{{"kind", "run_header"},
         {"schema_version", kSchemaVersion},
         {"seed", seed},
         {"vehicle_count", vehicle_count},
         {"sample_time_s", sample_time_s},
         {"ticks", ticks}};
  write(j.dump());
}

void TraceWriter::state(std::int64_t tick, int vehicle, double s, double v,
                        double a, const Pose& pose, double gap) {
  if (out_ == nullptr) return;
  json j{{"tick", tick},        {"kind", "state"},  {"vehicle", vehicle},
         {"s_m", s},            {"v_mps", v},       {"a_mps2", a},
         {"x_m", pose.x},       {"y_m", pose.y},    {"omega_rad", pose.omega},
         {"gap_m", gap}};
  write(j.dump());
}

void TraceWriter::estimate_pair_kf(std::int64_t tick, int vehicle,
                                   double gap_hat, double v_ahead_hat,
                                   double v_hat, bool updated) {
  if (out_ == nullptr) return;
  json j{{"tick", tick},
         {"kind", "estimate"},
         {"source", "pair_kf"},
         {"vehicle", vehicle},
         {"gap_hat_m", gap_hat},
         {"v_ahead_hat_mps", v_ahead_hat},
         {"v_hat_mps", v_hat},
         {"updated", updated}};
  write(j.dump());
}

void TraceWriter::estimate_ips(std::int64_t tick, int vehicle, double x_hat,
                               double y_hat, double error_m) {
  if (out_ == nullptr) return;
  json j{{"tick", tick},     {"kind", "estimate"}, {"source", "ips"},
         {"vehicle", vehicle}, {"x_hat_m", x_hat},  {"y_hat_m", y_hat},
         {"error_m", error_m}};
  write(j.dump());
}

void TraceWriter::estimate_pose_kf(std::int64_t tick, int vehicle,
                                   const Pose& pose) {
  if (out_ == nullptr) return;
  json j{{"tick", tick},       {"kind", "estimate"},
         {"source", "pose_kf"}, {"vehicle", vehicle},
         {"x_hat_m", pose.x},  {"y_hat_m", pose.y},
         {"omega_hat_rad", pose.omega}};
  write(j.dump());
}

void TraceWriter::command(std::int64_t tick, int vehicle,
                          const std::string& zone, double u, int seq_len) {
  if (out_ == nullptr) return;
  json j{{"tick", tick},       {"kind", "command"}, {"vehicle", vehicle},
         {"zone", zone},       {"u_mps2", u},       {"seq_len", seq_len}};
  write(j.dump());
}

void TraceWriter::command_mpc(std::int64_t tick, int vehicle,
                              const std::string& zone, double u, int seq_len,
                              int qp_iters, double qp_residual, bool inexact) {
  if (out_ == nullptr) return;
  json j{{"tick", tick},       {"kind", "command"}, {"vehicle", vehicle},
         {"zone", zone},       {"u_mps2", u},       {"seq_len", seq_len},
         {"qp_iters", qp_iters}, {"qp_residual", qp_residual},
         {"inexact", inexact}};
  write(j.dump());
}

void TraceWriter::mpc_inexact(std::int64_t tick, int vehicle, int iters,
                              double residual) {
  if (out_ == nullptr) return;
  json j{{"tick", tick},
         {"kind", "mpc_inexact"},
         {"vehicle", vehicle},
         {"iters", iters},
         {"residual", residual}};
  write(j.dump());
}

void TraceWriter::packet_sent(std::int64_t tick, const std::string& link,
                              std::uint64_t seq) {
  if (out_ == nullptr) return;
  json j{{"tick", tick}, {"kind", "packet_sent"}, {"link", link}, {"seq", seq}};
  write(j.dump());
}

void TraceWriter::packet_lost(std::int64_t tick, const std::string& link,
                              std::uint64_t seq, const std::string& reason) {
  if (out_ == nullptr) return;
  json j{{"tick", tick},
         {"kind", "packet_lost"},
         {"link", link},
         {"seq", seq},
         {"reason", reason}};
  write(j.dump());
}

void TraceWriter::packet_delivered(std::int64_t tick, const std::string& link,
                                   std::uint64_t seq, std::int64_t send_tick) {
  if (out_ == nullptr) return;
  json j{{"tick", tick},
         {"kind", "packet_delivered"},
         {"link", link},
         {"seq", seq},
         {"send_tick", send_tick}};
  write(j.dump());
}

void TraceWriter::buffer_exhausted(std::int64_t tick, int vehicle,
                                   const std::string& policy) {
  if (out_ == nullptr) return;
  json j{{"tick", tick},
         {"kind", "buffer_exhausted"},
         {"vehicle", vehicle},
         {"policy", policy}};
  write(j.dump());
}

void TraceWriter::safety_violation(std::int64_t tick, int vehicle, double gap) {
  if (out_ == nullptr) return;
  json j{{"tick", tick},
         {"kind", "safety_violation"},
         {"vehicle", vehicle},
         {"gap_m", gap}};
  write(j.dump());
}

void TraceWriter::pf_divergence(std::int64_t tick, int vehicle) {
  if (out_ == nullptr) return;
  json j{{"tick", tick}, {"kind", "pf_divergence"}, {"vehicle", vehicle}};
  write(j.dump());
}

std::string RunSummary::to_json() const {
  json vehicles_j = json::array();
  for (const auto& v : vehicles) {
    vehicles_j.push_back({{"vehicle", v.vehicle},
                          {"leader", v.leader},
                          {"gap_rms_m", v.gap_rms_m},
                          {"gap_final_m", v.gap_final_m},
                          {"safety_violations", v.safety_violations}});
  }
  json links_j = json::array();
  for (const auto& l : links) {
    links_j.push_back({{"link", l.link},
                       {"sent", l.sent},
                       {"delivered", l.delivered},
                       {"dropped", l.dropped},
                       {"capped", l.capped},
                       {"in_flight", l.in_flight}});
  }
  json j{{"schema_version", schema_version},
         {"ticks", ticks},
         {"duration_s", duration_s},
         {"sample_time_s", sample_time_s},
         {"seed", seed},
         {"vehicles", vehicles_j},
         {"links", links_j},
         {"buffer_exhausted", buffer_exhausted},
         {"buffer_stale", buffer_stale},
         {"pf_divergences", pf_divergences},
         {"mpc_inexact", mpc_inexact},
         {"safety_violations", safety_violations},
         {"ips",
          {{"samples", ips.samples},
           {"p50_m", ips.p50_m},
           {"p90_m", ips.p90_m},
           {"max_m", ips.max_m}}}};
  return j.dump(2);
}

std::string RunSummary::to_table() const {
  std::ostringstream out;
  out << std::left;
  const auto row = [&](const std::string& k, const std::string& v) {
    out << "  " << std::setw(34) << k << v << '\n';
  };
  const auto num = [](double x) {
    std::ostringstream s;
    s << std::setprecision(6) << x;
    return s.str();
  };
  out << "run summary\n";
  row("ticks", std::to_string(ticks));
  row("duration [s]", num(duration_s));
  row("seed", std::to_string(seed));
  for (const auto& v : vehicles) {
    const std::string tag = "vehicle " + std::to_string(v.vehicle) +
                            (v.leader ? " (leader)" : "");
    if (v.leader) {
      row(tag + " final gap [m]", num(v.gap_final_m));
    } else {
      row(tag + " gap rms [m]", num(v.gap_rms_m));
      row(tag + " final gap [m]", num(v.gap_final_m));
    }
  }
  for (const auto& l : links) {
    row(l.link + " sent/delivered/dropped",
        std::to_string(l.sent) + "/" + std::to_string(l.delivered) + "/" +
            std::to_string(l.dropped));
  }
  row("buffer exhausted/stale", std::to_string(buffer_exhausted) + "/" +
                                    std::to_string(buffer_stale));
  if (ips.samples > 0) {
    row("ips samples", std::to_string(ips.samples));
    row("ips p50/p90/max [m]",
        num(ips.p50_m) + "/" + num(ips.p90_m) + "/" + num(ips.max_m));
  }
  row("safety violations", std::to_string(safety_violations));
  row("pf divergences", std::to_string(pf_divergences));
  row("mpc inexact solves", std::to_string(mpc_inexact));
  return out.str();
}

}  // namespace wncs
