#pragma once

#include <cstdint>
#include <random>

namespace latcover {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of stream `stream` under purpose tag `tag`. Distinct (tag, stream)
/// pairs give statistically independent generators for the same base seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag,
                                    std::uint64_t stream = 0) noexcept {
  return mix64(mix64(seed ^ mix64(tag)) + mix64(stream + 0x632be59bd9b4e019ULL));
}

// Purpose tags. Keeping them in one place stops two subsystems from drawing
// from the same stream by accident.
namespace rng_tag {
inline constexpr std::uint64_t kDensitySamples = 1;
inline constexpr std::uint64_t kLiftTranslations = 2;
inline constexpr std::uint64_t kLiftEstimate = 3;
inline constexpr std::uint64_t kTranslationTrial = 4;
inline constexpr std::uint64_t kSearch = 5;
inline constexpr std::uint64_t kPipeline = 6;
inline constexpr std::uint64_t kLemmaChecks = 7;
}  // namespace rng_tag

/// Seedable generator over std::mt19937_64 (bit-exact across standard
/// libraries). Doubles are built from the top 53 bits so the stream of
/// uniforms is also portable.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
    return Rng(derive_seed(seed, tag, index));
  }

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (no cached second variate).
  double normal();

  /// Uniform integer in [lo, hi].
  std::int64_t integer(std::int64_t lo, std::int64_t hi);

 private:
  std::mt19937_64 engine_;
};

}  // namespace latcover
