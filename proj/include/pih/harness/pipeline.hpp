#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "pih/core/random.hpp"
#include "pih/env/object_catalog.hpp"
#include "pih/harness/config.hpp"
#include "pih/harness/evaluate.hpp"
#include "pih/rl/baselines.hpp"
#include "pih/rl/peg_hole_adapter.hpp"
#include "pih/rl/sac.hpp"

namespace pih {

/// Catalog named by the config, or the built-in one.
ObjectCatalog experiment_catalog(const ExperimentConfig& cfg);
/// The config's objects looked up in its catalog.
std::vector<ObjectPair> experiment_pairs(const ExperimentConfig& cfg);
/// Observation modalities after the modality ablations.
rl::Modalities experiment_modalities(const ExperimentConfig& cfg);
/// Environment configuration for one task.
EnvConfig task_env(const ExperimentConfig& cfg, Task task);
/// Reversal settings after the randomization ablation.
ReversalConfig experiment_reversal(const ExperimentConfig& cfg);

/// A trained controller over normalised actions together with everything
/// needed to rebuild it from disk.
class TrainedPolicy {
 public:
  enum class Kind { kSac, kSl, kResidual };

  static TrainedPolicy from_agent(std::unique_ptr<rl::SacAgent> agent, rl::Modalities modalities);
  static TrainedPolicy from_sl(std::unique_ptr<nn::DeterministicPolicy> sl, rl::Modalities modalities);
  static TrainedPolicy from_residual(std::unique_ptr<nn::DeterministicPolicy> sl,
                                     std::unique_ptr<rl::SacAgent> residual, rl::Modalities modalities);

  TrainedPolicy(TrainedPolicy&&) noexcept;
  TrainedPolicy& operator=(TrainedPolicy&&) noexcept;
  ~TrainedPolicy();

  Kind kind() const { return kind_; }
  const nn::EncoderSpec& spec() const { return spec_; }
  int action_dim() const { return action_dim_; }
  const rl::Modalities& modalities() const { return modalities_; }
  rl::Policy& policy() { return *policy_; }
  rl::SacAgent* agent() { return agent_.get(); }

  /// Writes policy.ckpt (network parameters) and policy.json (kind, shapes,
  /// modalities) into `dir`.
  void save(const std::filesystem::path& dir) const;
  /// Throws nn::CheckpointError or std::runtime_error on a malformed or
  /// inconsistent directory.
  static TrainedPolicy load(const std::filesystem::path& dir);

 private:
  TrainedPolicy() = default;
  void bind();
  std::vector<nn::NamedParameter> parameters() const;

  Kind kind_ = Kind::kSac;
  nn::EncoderSpec spec_;
  int action_dim_ = kActionDim;
  rl::Modalities modalities_;
  std::unique_ptr<rl::SacAgent> agent_;
  std::unique_ptr<nn::DeterministicPolicy> sl_;
  std::unique_ptr<rl::SlPolicy> sl_policy_;
  std::unique_ptr<rl::Policy> policy_;
};

std::string_view to_string(TrainedPolicy::Kind kind);

struct TrainOutput {
  TrainedPolicy policy;
  rl::TrainLog log;  // empty for SL
};

/// SAC on PooH over the config's objects, standard replay only.
TrainOutput train_pooh(const ExperimentConfig& cfg, std::uint64_t seed);

/// Seed of collection attempt `attempt` on object `object`.
std::uint64_t collect_seed(std::uint64_t seed, std::size_t object, std::size_t attempt);

/// One PooH episode of `policy` on the adapter's pinned object, recorded
/// with raw observations and realised displacements as actions.
Trajectory rollout_pooh(rl::PegHoleAdapter& env, rl::Policy& policy, std::uint64_t episode_seed);

struct CollectStats {
  std::vector<std::string> objects;
  std::vector<int> attempts;
  std::vector<int> successes;
};

/// Rolls out `policy` on every object until `expert_per_object` successful
/// episodes or `collect_attempts_per_object` attempts; keeps successes only.
std::vector<Trajectory> collect(rl::Policy& policy, const ExperimentConfig& cfg, std::uint64_t seed,
                                CollectStats* stats = nullptr);
/// Same on a caller-owned PooH adapter (controllers that read the simulator
/// state need the adapter they act on).
std::vector<Trajectory> collect(rl::Policy& policy, rl::PegHoleAdapter& env, const ExperimentConfig& cfg,
                                std::uint64_t seed, CollectStats* stats = nullptr);

/// Oracle PooH controller: lifts the peg straight out of the hole, then
/// moves to the peg goal. Optional uniform lateral noise of `noise`
/// (normalised units) is added while the peg is in the hole.
class ScriptedExtractionPolicy : public rl::Policy {
 public:
  ScriptedExtractionPolicy(rl::PegHoleAdapter& env, double noise = 0.0, std::uint64_t seed = 0)
      : env_(env), noise_(noise), stream_(seed) {}
  std::vector<double> act(const rl::AgentObs& obs) override;

 private:
  rl::PegHoleAdapter& env_;
  double noise_;
  RandomStream stream_;
};

/// Reversal of a collected PooH dataset with the config's reversal settings.
std::vector<Trajectory> reverse(const std::vector<Trajectory>& pooh, const ExperimentConfig& cfg,
                                std::uint64_t seed, ReversalSummary* summary = nullptr);

/// PiH training for the config's method (and ablations). `expert` holds
/// reversed demonstrations; it is unused by direct RL.
TrainOutput train_pih(const ExperimentConfig& cfg, std::uint64_t seed, const std::vector<Trajectory>& expert);

/// PiH adapter for evaluation with the policy's modalities.
std::unique_ptr<rl::PegHoleAdapter> pih_adapter(const ExperimentConfig& cfg, rl::Modalities modalities);

EvalReport evaluate_policy(TrainedPolicy& policy, const ExperimentConfig& cfg, std::uint64_t seed);

}  // namespace pih
