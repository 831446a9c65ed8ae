#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "pih/nn/networks.hpp"
#include "pih/rl/environment.hpp"
#include "pih/rl/replay.hpp"
#include "pih/rl/trainer.hpp"

namespace pih::rl {

struct SlConfig {
  int epochs = 200;
  int batch_size = 0;  // 0: full batch
  double lr = 1e-3;
  bool shuffle = true; // reshuffle minibatches every epoch (no effect on full batch)
  std::uint64_t seed = 0;
};

struct SlResult {
  std::unique_ptr<nn::DeterministicPolicy> policy;
  std::vector<double> epoch_loss;  // mean squared error at the start of each epoch, plus the final one
};

/// Regression of normalised expert actions with a mean-squared-error loss.
SlResult train_sl(const std::vector<ReplayItem>& data, const nn::EncoderSpec& spec, int action_dim,
                  const SlConfig& cfg);

/// Mean squared action error of `policy` over `data`.
double sl_loss(nn::DeterministicPolicy& policy, const std::vector<ReplayItem>& data);

class SlPolicy : public Policy {
 public:
  explicit SlPolicy(nn::DeterministicPolicy& net) : net_(net) {}
  std::vector<double> act(const AgentObs& obs) override;

 private:
  nn::DeterministicPolicy& net_;
};

inline constexpr double kResidualScale = 0.5;

/// Executes clip(base(o) + scale * r) for a residual action r in [-1, 1].
class ResidualEnvironment : public Environment {
 public:
  ResidualEnvironment(Environment& inner, Policy& base, double scale = kResidualScale)
      : inner_(inner), base_(base), scale_(scale) {}

  nn::EncoderSpec encoder_spec() const override { return inner_.encoder_spec(); }
  int action_dim() const override { return inner_.action_dim(); }
  AgentObsPtr reset(std::uint64_t episode_seed) override;
  EnvStep step(const std::vector<double>& residual) override;

 private:
  Environment& inner_;
  Policy& base_;
  double scale_;
  AgentObsPtr obs_;
};

/// base(o) plus the scaled mean residual of a SAC agent.
class ResidualPolicy : public Policy {
 public:
  ResidualPolicy(Policy& base, SacAgent& residual, double scale = kResidualScale)
      : base_(base), residual_(residual), scale_(scale) {}
  std::vector<double> act(const AgentObs& obs) override;

 private:
  Policy& base_;
  SacAgent& residual_;
  double scale_;
  RandomStream unused_{0};
};

std::vector<double> combine_residual(const std::vector<double>& base, const std::vector<double>& residual,
                                     double scale);

/// SAC on the residual of a frozen base policy. The actor head starts at
/// zero, so the initial deterministic behaviour equals the base policy.
TrainResult train_residual(Policy& base, Environment& env, const TrainConfig& cfg);

}  // namespace pih::rl
