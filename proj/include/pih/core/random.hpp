#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace pih {

/// Seeded source of randomness split into independent named channels.
///
/// Every channel owns its own engine seeded from (seed, channel name), so
/// drawing from one channel never changes the sequence of another. A stream
/// must not be shared between threads; fork one per worker instead.
class RandomStream {
 public:
  enum class Channel : std::size_t {
    kEnvInit = 0,
    kGoal,
    kPolicy,
    kRandomization,
    kDomainRand,
    kReplay,
    kCount,
  };

  explicit RandomStream(std::uint64_t seed = 0);

  std::uint64_t seed() const { return seed_; }

  std::mt19937_64& engine(Channel channel) {
    return engines_[static_cast<std::size_t>(channel)];
  }

  double uniform(Channel channel, double lo, double hi);
  double normal(Channel channel, double mean = 0.0, double stddev = 1.0);
  bool bernoulli(Channel channel, double p);
  /// Uniform index in [0, n).
  std::size_t index(Channel channel, std::size_t n);

  /// Deterministic child stream, e.g. one per episode or per worker.
  RandomStream fork(std::uint64_t salt) const;

  static std::string_view channel_name(Channel channel);

 private:
  std::uint64_t seed_;
  std::array<std::mt19937_64, static_cast<std::size_t>(Channel::kCount)> engines_;
};

/// SplitMix64 finaliser; used to derive decorrelated seeds.
std::uint64_t mix_seed(std::uint64_t value);

/// 64-bit FNV-1a of a byte string.
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace pih
