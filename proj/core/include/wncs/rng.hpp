#pragma once
#include <cstdint>
#include <random>

namespace wncs {

// SplitMix64 step; used to derive independent substream seeds from one
// master seed. The counter-based derivation keeps every substream stable
// when new streams are added elsewhere.
struct SplitMix64 {
  std::uint64_t state;
  std::uint64_t next();
};

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream_id);

// Deterministic random stream. mt19937_64 is fully specified by the
// standard; the distributions are hand-rolled because the std:: ones are
// implementation-defined and would break byte-identical traces across
// toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng substream(std::uint64_t master_seed, std::uint64_t stream_id) {
    return Rng(derive_seed(master_seed, stream_id));
  }

  // uniform double in [0, 1)
  double uniform();
  // uniform double in [a, b)
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  // uniform integer in [0, n); n must be > 0
  std::uint64_t uniform_int(std::uint64_t n);
  // N(mean, sigma^2) via Box-Muller
  double gaussian(double mean, double sigma);

 private:
  std::mt19937_64 engine_;
};

// Well-known per-role stream ids so adding a link or vehicle never
// perturbs the draws of existing streams.
namespace stream_id {
inline constexpr std::uint64_t uplink_base = 1000;
inline constexpr std::uint64_t downlink_base = 2000;
inline constexpr std::uint64_t sensor_base = 3000;
inline constexpr std::uint64_t ips_base = 4000;
inline constexpr std::uint64_t rss_base = 5000;
inline constexpr std::uint64_t sweep_base = 9000;
}  // namespace stream_id

}  // namespace wncs
