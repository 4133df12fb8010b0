#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace wncs {

// Top-level scenario parameters shared by every subsystem.
struct SimConfig {
  double sample_time_s = 0.1;
  double duration_s = 60.0;
  std::uint64_t rng_seed = 1;
  int vehicle_count = 4;
  double full_speed_mps = 0.5;
  double arena_width_m = 3.0;
  double arena_height_m = 2.0;
  double v_max_mps = 1.0;            // longitudinal speed saturation
  double contact_threshold_m = 0.02; // gap below this logs a safety violation
  double initial_spacing_m = 1.0;    // start-of-run gap between consecutive vehicles

  void validate() const;  // throws ConfigError
};

// Planar pose; omega is the heading angle in radians, wrapped to (-pi, pi].
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double omega = 0.0;
};

// Idempotent wrap into (-pi, pi].
double wrap_angle(double a);

// Closed polyline loop inside the arena. cumulative_arclength has one entry
// per vertex plus the closing segment, so the last entry equals total_length.
class Track {
 public:
  Track(std::vector<std::pair<double, double>> vertices, double arena_w,
        double arena_h);

  const std::vector<std::pair<double, double>>& vertices() const {
    return vertices_;
  }
  const std::vector<double>& cumulative_arclength() const { return cum_; }
  double total_length() const { return cum_.back(); }

  // Wraps any real arclength into [0, total_length).
  double wrap_arclength(double s) const;

  // Nearest arclength to a planar point (used when positions come from the
  // positioning system rather than odometry).
  double project(double x, double y) const;

 private:
  std::vector<std::pair<double, double>> vertices_;
  std::vector<double> cum_;
};

// Pose at arclength s along the loop; heading is the segment direction and
// jumps at vertices.
Pose track_pose(const Track& track, double s);

// Axis-aligned counterclockwise rectangle centered in the arena with the
// given margin on every side.
Track default_rectangle_track(const SimConfig& config, double margin_m = 0.3);

struct Beacon {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
};

struct BeaconMap {
  std::vector<Beacon> beacons;
  int count() const { return static_cast<int>(beacons.size()); }
};

// Corner-inset + center + edge-midpoint layout, up to 8 landmarks.
BeaconMap make_default_beacons(const SimConfig& config, int count = 5);

}  // namespace wncs
