#include "wncs/netsim.hpp"

#include <fstream>
#include <sstream>

namespace wncs {

std::pair<GilbertElliottState, bool> ge_step(const GilbertElliottChannel& ch,
                                             GilbertElliottState state,
                                             Rng& rng) {
  const double flip = rng.uniform();
  if (state.bad) {
    if (flip < ch.p_bad_to_good) state.bad = false;
  } else {
    if (flip < ch.p_good_to_bad) state.bad = true;
  }
  const double p = state.bad ? ch.loss_bad : ch.loss_good;
  return {state, rng.uniform() < p};
}

std::pair<std::vector<double>, std::vector<double>> load_rss_noise_trace(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open channel trace file: " + path);
  std::vector<double> rss, noise;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double r, n;
    if (!(ls >> r)) continue;  // blank/comment line
    if (!(ls >> n))
      throw ConfigError("channel trace " + path + ": line " +
                        std::to_string(line_no) + " needs two values");
    rss.push_back(r);
    noise.push_back(n);
  }
  if (rss.empty())
    throw ConfigError("channel trace " + path + " has no samples");
  return {rss, noise};
}

void LinkConfig::validate() const {
  if (delay_ticks < 0) throw ConfigError("link delay_ticks must be >= 0");
  if (jitter_ticks < 0) throw ConfigError("link jitter_ticks must be >= 0");
  if (max_packets_per_tick < 0)
    throw ConfigError("link max_packets_per_tick must be >= 0");
  if (auto* b = std::get_if<BernoulliChannel>(&channel)) {
    if (b->p_loss < 0.0 || b->p_loss > 1.0)
      throw ConfigError("bernoulli p_loss must be in [0, 1]");
  } else if (auto* ge = std::get_if<GilbertElliottChannel>(&channel)) {
    for (double p : {ge->p_good_to_bad, ge->p_bad_to_good, ge->loss_good,
                     ge->loss_bad})
      if (p < 0.0 || p > 1.0)
        throw ConfigError("gilbert-elliott probabilities must be in [0, 1]");
  } else {
    const auto& tr = std::get<TraceDrivenChannel>(channel);
    if (tr.rss_dbm.empty() || tr.rss_dbm.size() != tr.noise_dbm.size())
      throw ConfigError("trace-driven channel needs matching non-empty traces");
  }
}

}  // namespace wncs
