#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "pih/core/random.hpp"
#include "pih/nn/adam.hpp"
#include "pih/nn/networks.hpp"
#include "pih/rl/replay.hpp"

namespace pih::rl {

struct SacConfig {
  double gamma = 0.99;
  double tau = 0.005;
  int batch_size = 64;
  double lr = 3e-4;
  double init_alpha = 0.2;
  bool auto_alpha = true;
  double target_entropy = 0.0;  // used when auto_alpha; 0 selects -action_dim
  bool target_entropy_set = false;
  double reward_scale = 1.0;    // applied to rewards inside the learner only
  int critic_hidden = 128;

  void validate() const;
};

struct SacLosses {
  double critic1 = 0.0;
  double critic2 = 0.0;
  double actor = 0.0;
  double alpha = 0.0;
  double entropy = 0.0;  // mean -log pi of the actor batch
};

/// Aborts training on NaN or infinite losses.
class TrainingDivergedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TransitionBatch {
  nn::ObsBatch obs;
  nn::Matrix action;  // B x A, normalised
  nn::Matrix reward;  // B x 1, unscaled
  nn::ObsBatch next_obs;
  nn::Matrix terminal;  // B x 1 of 0/1

  static TransitionBatch from(const Minibatch& mb, const nn::EncoderSpec& spec, int action_dim);
};

/// Soft actor-critic with twin critics, a Polyak target critic and
/// automatic entropy tuning. Owns separate Adam optimizers for the critic,
/// the actor, the entropy coefficient and behaviour cloning.
class SacAgent {
 public:
  SacAgent(const nn::EncoderSpec& spec, int action_dim, const SacConfig& cfg, std::uint64_t seed,
           bool zero_actor_head = false);
  SacAgent(const SacAgent&) = delete;
  SacAgent& operator=(const SacAgent&) = delete;

  /// Normalised action; stochastic draws use the kPolicy channel.
  std::vector<double> act(const AgentObs& obs, RandomStream& stream, bool deterministic);

  SacLosses update(const TransitionBatch& batch, RandomStream& stream);

  /// -lambda * mean log pi(a_expert | o) at the current parameters.
  double bc_loss(const nn::ObsBatch& obs, const nn::Matrix& expert_action, double lambda);
  /// One actor step on the BC loss; a no-op returning 0 when lambda == 0.
  double bc_update(const nn::ObsBatch& obs, const nn::Matrix& expert_action, double lambda);

  double alpha() const;
  const SacConfig& config() const { return cfg_; }
  const nn::EncoderSpec& spec() const { return spec_; }
  int action_dim() const { return action_dim_; }
  nn::Actor& actor() { return *actor_; }
  nn::Critic& critic() { return *critic_; }
  nn::Critic& target_critic() { return *target_; }

 private:
  nn::EncoderSpec spec_;
  int action_dim_;
  SacConfig cfg_;
  double target_entropy_;
  std::unique_ptr<nn::Actor> actor_;
  std::unique_ptr<nn::Critic> critic_;
  std::unique_ptr<nn::Critic> target_;
  nn::Parameter log_alpha_;
  std::unique_ptr<nn::Adam> actor_opt_;
  std::unique_ptr<nn::Adam> critic_opt_;
  std::unique_ptr<nn::Adam> alpha_opt_;
  std::unique_ptr<nn::Adam> bc_opt_;
};

/// Deterministic (mean) policy of an agent.
class SacPolicy : public Policy {
 public:
  explicit SacPolicy(SacAgent& agent) : agent_(agent) {}
  std::vector<double> act(const AgentObs& obs) override;

 private:
  SacAgent& agent_;
  RandomStream unused_{0};
};

}  // namespace pih::rl
