#include "wncs/ips.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "wncs/errors.hpp"

namespace wncs {

void RssModel::validate() const {
  if (!(d0_m > 0.0)) throw ConfigError("ips.d0_m must be > 0");
  if (!(path_loss_exponent_n > 0.0))
    throw ConfigError("ips.path_loss_exponent must be > 0");
  if (noise_sigma_db < 0.0)
    throw ConfigError("ips.rss_noise_sigma_db must be >= 0");
}

double rss_from_distance(const RssModel& model, double d, Rng* rng) {
  if (!(d > 0.0))
    throw std::invalid_argument("rss_from_distance: d must be > 0");
  double rss = model.rss_at_d0_dbm -
               10.0 * model.path_loss_exponent_n * std::log10(d / model.d0_m);
  if (rng != nullptr) rss += rng->gaussian(0.0, model.noise_sigma_db);
  return rss;
}

double distance_from_rss(const RssModel& model, double rss_dbm) {
  return model.d0_m * std::pow(10.0, (model.rss_at_d0_dbm - rss_dbm) /
                                         (10.0 * model.path_loss_exponent_n));
}

double ParticleSet::weight_sum() const {
  double s = 0.0;
  for (const auto& p : particles) s += p.w;
  return s;
}

double ParticleSet::effective_sample_size() const {
  double s2 = 0.0;
  for (const auto& p : particles) s2 += p.w * p.w;
  return s2 > 0.0 ? 1.0 / s2 : 0.0;
}

void PfConfig::validate() const {
  if (particle_count < 1) throw ConfigError("ips.particle_count must be >= 1");
  if (!(sigma_update_m > 0.0)) throw ConfigError("ips.sigma_update_m must be > 0");
  if (step_noise_length_m < 0.0 || step_noise_heading_rad < 0.0)
    throw ConfigError("ips step noise must be >= 0");
  if (!(resample_neff_fraction > 0.0 && resample_neff_fraction <= 1.0))
    throw ConfigError("ips.resample_neff_fraction must be in (0, 1]");
}

void StepDetectorConfig::validate() const {
  if (!(accel_threshold_mps2 > 0.0))
    throw ConfigError("ips.accel_threshold_mps2 must be > 0");
  if (min_interval_ticks < 1)
    throw ConfigError("ips.min_interval_ticks must be >= 1");
}

bool StepDetector::push(double accel_mps2) {
  const long now = tick_++;
  if (std::abs(accel_mps2) < cfg_.accel_threshold_mps2) return false;
  if (now - last_trigger_ < cfg_.min_interval_ticks) return false;
  last_trigger_ = now;
  return true;
}

void StepDetector::reset() {
  tick_ = 0;
  last_trigger_ = std::numeric_limits<long>::min() / 2;
}

bool detect_step(const std::vector<double>& accel_history,
                 const StepDetectorConfig& cfg) {
  if (accel_history.empty())
    throw std::invalid_argument("detect_step: needs at least one sample");
  StepDetector det(cfg);
  bool last = false;
  for (double a : accel_history) last = det.push(a);
  return last;
}

ParticleSet pf_init(const PfConfig& cfg, const Arena& arena, Rng& rng) {
  ParticleSet set;
  set.particles.resize(cfg.particle_count);
  const double w = 1.0 / cfg.particle_count;
  for (auto& p : set.particles) {
    p.x = rng.uniform(0.0, arena.width_m);
    p.y = rng.uniform(0.0, arena.height_m);
    p.w = w;
  }
  return set;
}

ParticleSet pf_predict(const ParticleSet& set, double heading_rad,
                       double step_length_m, const PfConfig& cfg,
                       const Arena& arena, Rng& rng) {
  ParticleSet out = set;
  for (auto& p : out.particles) {
    const double len = step_length_m + rng.gaussian(0.0, cfg.step_noise_length_m);
    const double th = heading_rad + rng.gaussian(0.0, cfg.step_noise_heading_rad);
    p.x += len * std::cos(th);
    p.y += len * std::sin(th);
    const double cx = std::clamp(p.x, 0.0, arena.width_m);
    const double cy = std::clamp(p.y, 0.0, arena.height_m);
    if (cx != p.x || cy != p.y) {
      p.x = cx;
      p.y = cy;
      p.w *= 0.1;  // map-matching penalty for leaving the feasible space
    }
  }
  return out;
}

PfUpdateResult pf_update(const ParticleSet& set,
                         const std::vector<BeaconDistance>& measurements,
                         const BeaconMap& beacons, const PfConfig& cfg,
                         const Arena& arena, Rng& rng) {
  if (measurements.empty())
    throw std::invalid_argument("pf_update: needs at least one measurement");
  PfUpdateResult result;
  result.set = set;
  const double sigma2 = cfg.sigma_update_m * cfg.sigma_update_m;
  const double norm = 1.0 / std::sqrt(2.0 * M_PI * sigma2);
  struct Range {
    double bx, by, d;
  };
  std::vector<Range> ranges;
  ranges.reserve(measurements.size());
  for (const auto& meas : measurements) {
    const Beacon* beacon = nullptr;
    for (const auto& b : beacons.beacons)
      if (b.id == meas.beacon_id) beacon = &b;
    if (beacon == nullptr)
      throw std::invalid_argument("pf_update: unknown beacon id " +
                                  std::to_string(meas.beacon_id));
    ranges.push_back({beacon->x, beacon->y, meas.distance_m});
  }
  for (auto& p : result.set.particles) {
    for (const auto& r : ranges) {
      const double d_i = std::hypot(p.x - r.bx, p.y - r.by);
      const double diff = r.d - d_i;
      p.w *= norm * std::exp(-diff * diff / (2.0 * sigma2));
    }
  }
  const double total = result.set.weight_sum();
  if (total <= 0.0) {
    result.set = pf_init(cfg, arena, rng);
    result.diverged = true;
    return result;
  }
  for (auto& p : result.set.particles) p.w /= total;
  return result;
}

ParticleSet pf_resample(const ParticleSet& set, const PfConfig& cfg, Rng& rng) {
  const int n = set.size();
  if (set.effective_sample_size() >= cfg.resample_neff_fraction * n) return set;
  ParticleSet out;
  out.particles.resize(n);
  const double offset = rng.uniform() / n;
  double cumulative = set.particles[0].w;
  int i = 0;
  for (int j = 0; j < n; ++j) {
    const double pointer = offset + static_cast<double>(j) / n;
    while (pointer > cumulative && i + 1 < n) cumulative += set.particles[++i].w;
    out.particles[j] = set.particles[i];
    out.particles[j].w = 1.0 / n;
  }
  return out;
}

std::pair<double, double> pf_extract(const ParticleSet& set) {
  double x = 0.0, y = 0.0;
  for (const auto& p : set.particles) {
    x += p.w * p.x;
    y += p.w * p.y;
  }
  return {x, y};
}

ErrorCdf error_cdf(const std::vector<double>& errors_m) {
  if (errors_m.empty())
    throw std::invalid_argument("error_cdf: needs at least one sample");
  std::vector<double> sorted = errors_m;
  std::sort(sorted.begin(), sorted.end());
  ErrorCdf cdf;
  cdf.points.reserve(sorted.size());
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    cdf.points.emplace_back(sorted[i], static_cast<double>(i + 1) / n);
  return cdf;
}

double ErrorCdf::percentile(double p) const {
  if (points.empty() || !(p > 0.0 && p <= 1.0))
    throw std::invalid_argument("ErrorCdf::percentile: p must be in (0, 1]");
  const auto n = points.size();
  // nearest rank: ceil(p*n), nudged so p*n landing on an integer stays there
  std::size_t rank = static_cast<std::size_t>(
      std::ceil(p * static_cast<double>(n) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, n);
  return points[rank - 1].first;
}

std::vector<ReplayRecord> read_replay_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open replay log: " + path);
  std::vector<ReplayRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string field;
    ReplayRecord rec;
    try {
      if (!std::getline(ls, field, ',')) continue;
      rec.tick = std::stol(field);
      if (!std::getline(ls, field, ','))
        throw std::invalid_argument("missing accel");
      rec.accel_mps2 = std::stod(field);
      while (std::getline(ls, field, ',')) {
        const auto colon = field.find(':');
        if (colon == std::string::npos)
          throw std::invalid_argument("beacon field needs id:rss");
        rec.beacon_rss.emplace_back(std::stoi(field.substr(0, colon)),
                                    std::stod(field.substr(colon + 1)));
      }
    } catch (const std::exception& e) {
      throw ConfigError("replay log " + path + ": line " +
                        std::to_string(line_no) + ": " + e.what());
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void write_replay_log(const std::string& path,
                      const std::vector<ReplayRecord>& records) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write replay log: " + path);
  char buf[64];
  for (const auto& rec : records) {
    out << rec.tick << ',';
    std::snprintf(buf, sizeof buf, "%.17g", rec.accel_mps2);
    out << buf;
    for (const auto& [id, rss] : rec.beacon_rss) {
      std::snprintf(buf, sizeof buf, "%.17g", rss);
      out << ',' << id << ':' << buf;
    }
    out << '\n';
  }
}

}  // namespace wncs
