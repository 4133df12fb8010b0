#include "wncs/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wncs/errors.hpp"

namespace wncs {

void SimConfig::validate() const {
  if (!(sample_time_s > 0.0)) throw ConfigError("sim.sample_time_s must be > 0");
  if (!(duration_s >= 0.0)) throw ConfigError("sim.duration_s must be >= 0");
  if (vehicle_count < 1) throw ConfigError("sim.vehicle_count must be >= 1");
  if (!(arena_width_m > 0.0) || !(arena_height_m > 0.0))
    throw ConfigError("arena dimensions must be strictly positive");
  if (!(full_speed_mps >= 0.0)) throw ConfigError("sim.full_speed_mps must be >= 0");
  if (!(v_max_mps > 0.0)) throw ConfigError("sim.v_max_mps must be > 0");
  if (!(contact_threshold_m >= 0.0))
    throw ConfigError("sim.contact_threshold_m must be >= 0");
  if (!(initial_spacing_m > 0.0))
    throw ConfigError("sim.initial_spacing_m must be > 0");
}

double wrap_angle(double a) {
  if (a > -M_PI && a <= M_PI) return a;  // early return keeps wrapping idempotent
  double w = std::fmod(a + M_PI, 2.0 * M_PI);
  if (w <= 0.0) w += 2.0 * M_PI;
  return w - M_PI;
}

Track::Track(std::vector<std::pair<double, double>> vertices, double arena_w,
             double arena_h)
    : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3)
    throw ConfigError("track needs at least 3 vertices");
  for (const auto& [x, y] : vertices_) {
    if (!std::isfinite(x) || !std::isfinite(y))
      throw ConfigError("track vertex is not finite");
    if (x < 0.0 || x > arena_w || y < 0.0 || y > arena_h)
      throw ConfigError("track vertex outside the arena rectangle");
  }
  cum_.resize(vertices_.size() + 1);
  cum_[0] = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const auto& a = vertices_[i];
    const auto& b = vertices_[(i + 1) % vertices_.size()];
    const double len = std::hypot(b.first - a.first, b.second - a.second);
    if (!(len > 0.0)) throw ConfigError("track has a zero-length segment");
    cum_[i + 1] = cum_[i] + len;
  }
}

double Track::wrap_arclength(double s) const {
  const double len = total_length();
  double w = std::fmod(s, len);
  if (w < 0.0) w += len;
  if (w >= len) w = 0.0;  // guards fmod landing exactly on len after the add
  return w;
}

double Track::project(double x, double y) const {
  double best_s = 0.0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const auto& a = vertices_[i];
    const auto& b = vertices_[(i + 1) % vertices_.size()];
    const double dx = b.first - a.first, dy = b.second - a.second;
    const double len2 = dx * dx + dy * dy;
    double t = ((x - a.first) * dx + (y - a.second) * dy) / len2;
    t = std::clamp(t, 0.0, 1.0);
    const double px = a.first + t * dx, py = a.second + t * dy;
    const double d2 = (x - px) * (x - px) + (y - py) * (y - py);
    if (d2 < best_d2) {
      best_d2 = d2;
      best_s = cum_[i] + t * (cum_[i + 1] - cum_[i]);
    }
  }
  return wrap_arclength(best_s);
}

Pose track_pose(const Track& track, double s) {
  const double sw = track.wrap_arclength(s);
  const auto& cum = track.cumulative_arclength();
  const auto& verts = track.vertices();
  // segment i covers [cum[i], cum[i+1])
  const auto it = std::upper_bound(cum.begin(), cum.end(), sw);
  const std::size_t i = static_cast<std::size_t>(it - cum.begin()) - 1;
  const auto& a = verts[i];
  const auto& b = verts[(i + 1) % verts.size()];
  const double seg_len = cum[i + 1] - cum[i];
  const double t = (sw - cum[i]) / seg_len;
  Pose p;
  p.x = a.first + t * (b.first - a.first);
  p.y = a.second + t * (b.second - a.second);
  p.omega = wrap_angle(std::atan2(b.second - a.second, b.first - a.first));
  return p;
}

Track default_rectangle_track(const SimConfig& config, double margin_m) {
  const double w = config.arena_width_m - 2.0 * margin_m;
  const double h = config.arena_height_m - 2.0 * margin_m;
  if (!(w > 0.0) || !(h > 0.0))
    throw ConfigError("track margin exceeds arena half-dimension");
  const double x0 = margin_m, y0 = margin_m;
  return Track({{x0, y0}, {x0 + w, y0}, {x0 + w, y0 + h}, {x0, y0 + h}},
               config.arena_width_m, config.arena_height_m);
}

BeaconMap make_default_beacons(const SimConfig& config, int count) {
  if (count < 1 || count > 8)
    throw ConfigError("beacon count must be in [1, 8]");
  const double w = config.arena_width_m, h = config.arena_height_m;
  const double in = 0.2;
  const std::vector<std::pair<double, double>> layout = {
      {in, in},          {w - in, in}, {w - in, h - in}, {in, h - in},
      {w / 2., h / 2.},  {w / 2., in}, {w - in, h / 2.}, {w / 2., h - in}};
  BeaconMap map;
  for (int i = 0; i < count; ++i)
    map.beacons.push_back({i, layout[i].first, layout[i].second});
  return map;
}

}  // namespace wncs
