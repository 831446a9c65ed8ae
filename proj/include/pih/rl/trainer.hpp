#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "pih/rl/environment.hpp"
#include "pih/rl/replay.hpp"
#include "pih/rl/sac.hpp"
#include "pih/rl/schedule.hpp"
#include "pih/rl/train_log.hpp"

namespace pih::rl {

struct TrainConfig {
  SacConfig sac;
  long total_steps = 20000;
  long warmup_steps = 1000;  // uniform random actions before this step
  long update_after = 1000;  // first gradient update
  int updates_per_step = 1;
  std::size_t replay_capacity = 100000;

  // Hybrid replay: expert share rho(t), linear from rho_start to rho_end.
  bool hybrid = false;
  double rho_start = 0.3;
  double rho_end = 0.0;
  // Behaviour cloning after each episode, weight lambda(t) linear.
  bool bc = false;
  double lambda_start = 0.05;
  double lambda_end = 0.0;
  int bc_updates = 2;
  int bc_batch = 64;

  // Network widths; image size and input dimension come from the environment.
  int conv1 = 8;
  int conv2 = 16;
  int vec_hidden = 64;
  int fusion_hidden = 128;

  std::uint64_t seed = 0;

  void validate() const;
  nn::EncoderSpec network(nn::EncoderSpec base) const;
  LinearSchedule rho() const;
  LinearSchedule lambda() const;
};

/// Seed of the environment reset for episode `index` of a run seeded `seed`.
std::uint64_t episode_seed(std::uint64_t seed, std::uint64_t index);

struct TrainResult {
  std::unique_ptr<SacAgent> agent;
  TrainLog log;
};

/// SAC training loop. With `hybrid` or `bc` enabled the expert store must be
/// non-empty (checked before any environment interaction).
TrainResult train_sac(Environment& env, const TrainConfig& cfg, std::vector<ReplayItem> expert = {},
                      bool zero_actor_head = false);

}  // namespace pih::rl
