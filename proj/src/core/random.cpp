#include "pih/core/random.hpp"

namespace pih {

std::uint64_t mix_seed(std::uint64_t value) {
  value += 0x9e3779b97f4a7c15ULL;
  value = (value ^ (value >> 30)) * 0xbf58476d1ce4e5b9ULL;
  value = (value ^ (value >> 27)) * 0x94d049bb133111ebULL;
  return value ^ (value >> 31);
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string_view RandomStream::channel_name(Channel channel) {
  switch (channel) {
    case Channel::kEnvInit: return "env-init";
    case Channel::kGoal: return "goal-sampling";
    case Channel::kPolicy: return "policy";
    case Channel::kRandomization: return "randomization";
    case Channel::kDomainRand: return "domain-rand";
    case Channel::kReplay: return "replay";
    case Channel::kCount: break;
  }
  return "invalid";
}

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed) {
  for (std::size_t i = 0; i < engines_.size(); ++i) {
    const auto name = channel_name(static_cast<Channel>(i));
    engines_[i].seed(mix_seed(seed ^ fnv1a(name)));
  }
}

double RandomStream::uniform(Channel channel, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return dist(engine(channel));
}

double RandomStream::normal(Channel channel, double mean, double stddev) {
  std::normal_distribution<double> dist(mean, stddev);
  return dist(engine(channel));
}

bool RandomStream::bernoulli(Channel channel, double p) {
  return uniform(channel, 0.0, 1.0) < p;
}

std::size_t RandomStream::index(Channel channel, std::size_t n) {
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(engine(channel));
}

RandomStream RandomStream::fork(std::uint64_t salt) const {
  return RandomStream(mix_seed(seed_ * 0x100000001b3ULL + mix_seed(salt)));
}

}  // namespace pih
