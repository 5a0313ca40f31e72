#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace advland {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent stream key from a root seed and a path of indices,
/// e.g. derive_key(seed, {trial, layer}). The result only depends on the
/// values, never on call order, so trials can run in any schedule.
constexpr std::uint64_t derive_key(std::uint64_t seed,
                                   std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t key = mix64(seed ^ 0x6a09e667f3bcc909ULL);
  for (std::uint64_t p : path) {
    key = mix64(key + 0x9e3779b97f4a7c15ULL * (p + 1));
  }
  return key;
}

/// Counter-based generator: output n is mix64(key + n * golden). Satisfies
/// UniformRandomBitGenerator.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t key) noexcept : state_(key) {}
  Stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept
      : state_(derive_key(seed, path)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  double normal() { return normal_(*this); }
  double uniform() { return uniform_(*this); }
  /// +1 or -1 with equal probability.
  double sign() noexcept { return ((*this)() >> 63) ? 1.0 : -1.0; }

 private:
  std::uint64_t state_;
  boost::random::normal_distribution<double> normal_{};
  boost::random::uniform_01<double> uniform_{};
};

// Stream tags keep the different consumers of one seed apart.
namespace stream_tag {
inline constexpr std::uint64_t kLayer = 0x4c41594552ULL;
inline constexpr std::uint64_t kSigns = 0x5349474e53ULL;
inline constexpr std::uint64_t kInput = 0x494e505554ULL;
inline constexpr std::uint64_t kNet = 0x4e4554ULL;
inline constexpr std::uint64_t kDirection = 0x444952ULL;
inline constexpr std::uint64_t kTrial = 0x545249414cULL;
}  // namespace stream_tag

}  // namespace advland
