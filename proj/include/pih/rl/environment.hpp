#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "pih/nn/networks.hpp"

namespace pih::rl {

/// Network-ready observation: image as float pixels plus the normalised
/// vector part. Shared between replay entries to avoid copies.
struct AgentObs {
  std::vector<float> image;
  std::vector<double> vec;
};
using AgentObsPtr = std::shared_ptr<const AgentObs>;

struct EnvStep {
  AgentObsPtr obs;
  double reward = 0.0;
  bool done = false;      // episode over (success or time limit)
  bool terminal = false;  // no bootstrapping past this step
  bool success = false;
  double contact_force = 0.0;
};

/// Episodic task with actions normalised to [-1, 1]^action_dim.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual nn::EncoderSpec encoder_spec() const = 0;
  virtual int action_dim() const = 0;
  virtual AgentObsPtr reset(std::uint64_t episode_seed) = 0;
  virtual EnvStep step(const std::vector<double>& action) = 0;
};

/// Deterministic controller over normalised actions.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::vector<double> act(const AgentObs& obs) = 0;
};

/// Stacks observations into a network batch.
nn::ObsBatch make_batch(const std::vector<const AgentObs*>& obs, const nn::EncoderSpec& spec);
nn::ObsBatch make_batch(const AgentObs& obs, const nn::EncoderSpec& spec);

}  // namespace pih::rl
