#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pih/env/peg_hole_env.hpp"
#include "pih/rl/agent_obs.hpp"
#include "pih/rl/replay.hpp"

namespace pih::rl {

/// Peg-hole environment over one or more object pairs. Each episode picks
/// an object from the episode seed (unless pinned) and resets the
/// underlying environment from RandomStream(episode_seed).
class PegHoleAdapter : public Environment {
 public:
  PegHoleAdapter(const EnvConfig& cfg, const std::vector<ObjectPair>& pairs, Modalities modalities = {},
                 const sensors::PcaModel* pca = nullptr);

  nn::EncoderSpec encoder_spec() const override { return normalizer_.encoder_spec(); }
  int action_dim() const override { return kActionDim; }
  AgentObsPtr reset(std::uint64_t episode_seed) override;
  EnvStep step(const std::vector<double>& action) override;

  /// Forces every following reset onto one object (nullopt: seed-chosen).
  void pin_object(std::optional<std::size_t> index) { pinned_ = index; }
  std::size_t object_count() const { return envs_.size(); }
  std::size_t current_object() const { return current_; }
  PegHoleEnv& env() { return *envs_[current_]; }
  const ObsNormalizer& normalizer() const { return normalizer_; }
  const Observation& last_observation() const { return last_obs_; }

 private:
  std::vector<std::unique_ptr<PegHoleEnv>> envs_;
  ObsNormalizer normalizer_;
  std::optional<std::size_t> pinned_;
  std::size_t current_ = 0;
  Observation last_obs_;
};

/// Expert replay items from PiH demonstrations. Consecutive records share
/// observation storage; a record is terminal when it is the last one.
std::vector<ReplayItem> expert_items(const std::vector<Trajectory>& demos, const ObsNormalizer& normalizer);

}  // namespace pih::rl
