#pragma once
#include <algorithm>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "wncs/errors.hpp"
#include "wncs/rng.hpp"

namespace wncs {

struct BernoulliChannel {
  double p_loss = 0.0;
};

struct GilbertElliottState {
  bool bad = false;
};

struct GilbertElliottChannel {
  double p_good_to_bad = 0.05;
  double p_bad_to_good = 0.25;
  double loss_good = 0.0;
  double loss_bad = 0.5;
  GilbertElliottState state;
};

// Markov transition, then a loss draw at the new state's loss probability.
std::pair<GilbertElliottState, bool> ge_step(const GilbertElliottChannel& ch,
                                             GilbertElliottState state,
                                             Rng& rng);

// Loss decided purely by thresholding recorded (rss, noise) pairs: packet k
// is lost iff rss[k] - noise[k] < snr threshold. Traces cycle when shorter
// than the run. Consumes no randomness.
struct TraceDrivenChannel {
  std::vector<double> rss_dbm;
  std::vector<double> noise_dbm;
  double snr_loss_threshold_db = 3.0;
  std::size_t index = 0;
};

using ChannelModel =
    std::variant<BernoulliChannel, GilbertElliottChannel, TraceDrivenChannel>;

// Parses "rss_dbm noise_dbm" pairs, one per line; '#' comments allowed.
std::pair<std::vector<double>, std::vector<double>> load_rss_noise_trace(
    const std::string& path);

struct LinkConfig {
  ChannelModel channel = BernoulliChannel{};
  int delay_ticks = 1;
  int jitter_ticks = 0;
  int max_packets_per_tick = 0;  // 0 = unlimited
  std::uint64_t rng_stream = 0;

  void validate() const;  // throws ConfigError
};

struct LinkStats {
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;  // channel losses
  std::uint64_t capped = 0;   // discarded by the per-tick bandwidth cap
  std::uint64_t in_flight = 0;
};

template <class Payload>
struct Packet {
  std::uint64_t seq = 0;
  std::int64_t send_tick = 0;
  Payload payload;
};

enum class SendOutcome { kScheduled, kLostChannel, kLostCap };

// Unidirectional lossy, delaying link. Single-owner: the tick-synchronous
// scheduler calls send() any number of times and poll() once per tick.
template <class Payload>
class Link {
 public:
  Link(const LinkConfig& cfg, std::uint64_t master_seed)
      : cfg_(cfg), rng_(Rng::substream(master_seed, cfg.rng_stream)) {
    cfg_.validate();
  }

  SendOutcome send(Payload payload, std::int64_t now_tick) {
    if (now_tick != last_send_tick_) {
      sends_this_tick_ = 0;
      last_send_tick_ = now_tick;
    }
    ++stats_.sent;
    const std::uint64_t seq = next_seq_++;
    if (cfg_.max_packets_per_tick > 0 &&
        sends_this_tick_ >= cfg_.max_packets_per_tick) {
      ++stats_.capped;
      return SendOutcome::kLostCap;
    }
    ++sends_this_tick_;
    if (draw_loss()) {
      ++stats_.dropped;
      return SendOutcome::kLostChannel;
    }
    std::int64_t delivery = now_tick + cfg_.delay_ticks;
    if (cfg_.jitter_ticks > 0)
      delivery += static_cast<std::int64_t>(
          rng_.uniform_int(static_cast<std::uint64_t>(cfg_.jitter_ticks) + 1));
    queue_.push_back({delivery, Packet<Payload>{seq, now_tick, std::move(payload)}});
    ++stats_.in_flight;
    return SendOutcome::kScheduled;
  }

  // All packets due by now_tick, ordered by (delivery tick, seq); each is
  // delivered exactly once.
  std::vector<Packet<Payload>> poll(std::int64_t now_tick) {
    std::vector<std::pair<std::int64_t, Packet<Payload>>> due;
    std::size_t w = 0;
    for (std::size_t i = 0; i < queue_.size(); ++i) {
      if (queue_[i].first <= now_tick) {
        due.push_back(std::move(queue_[i]));
      } else {
        if (w != i) queue_[w] = std::move(queue_[i]);
        ++w;
      }
    }
    queue_.resize(w);
    std::sort(due.begin(), due.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first < b.first : a.second.seq < b.second.seq;
    });
    std::vector<Packet<Payload>> out;
    out.reserve(due.size());
    for (auto& d : due) out.push_back(std::move(d.second));
    stats_.delivered += out.size();
    stats_.in_flight -= out.size();
    return out;
  }

  const LinkStats& stats() const { return stats_; }
  const LinkConfig& config() const { return cfg_; }

 private:
  bool draw_loss() {
    if (auto* b = std::get_if<BernoulliChannel>(&cfg_.channel))
      return rng_.uniform() < b->p_loss;
    if (auto* ge = std::get_if<GilbertElliottChannel>(&cfg_.channel)) {
      auto [state, lost] = ge_step(*ge, ge->state, rng_);
      ge->state = state;
      return lost;
    }
    auto& tr = std::get<TraceDrivenChannel>(cfg_.channel);
    const std::size_t k = tr.index % tr.rss_dbm.size();
    tr.index++;
    return tr.rss_dbm[k] - tr.noise_dbm[k] < tr.snr_loss_threshold_db;
  }

  LinkConfig cfg_;
  Rng rng_;
  std::uint64_t next_seq_ = 0;
  std::int64_t last_send_tick_ = -1;
  int sends_this_tick_ = 0;
  std::vector<std::pair<std::int64_t, Packet<Payload>>> queue_;
  LinkStats stats_;
};

}  // namespace wncs
