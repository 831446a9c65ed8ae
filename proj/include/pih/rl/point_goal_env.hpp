#pragma once

#include <array>

#include "pih/rl/environment.hpp"

namespace pih::rl {

/// Contact-free 3-D point reaching: start and goal uniform in the cube
/// [-half_extent, half_extent]^3, actions move the point by up to `max_step`
/// per axis, reward -|p - g|, success (terminal) within `success_radius`.
struct PointGoalConfig {
  double half_extent = 1.0;
  double max_step = 0.1;
  double success_radius = 0.1;
  int episode_len = 50;
};

class PointGoalEnv : public Environment {
 public:
  explicit PointGoalEnv(PointGoalConfig cfg = {}) : cfg_(cfg) {}

  nn::EncoderSpec encoder_spec() const override;
  int action_dim() const override { return 3; }
  AgentObsPtr reset(std::uint64_t episode_seed) override;
  EnvStep step(const std::vector<double>& action) override;

  const std::array<double, 3>& position() const { return pos_; }
  const std::array<double, 3>& goal() const { return goal_; }

 private:
  AgentObsPtr observe() const;
  double distance() const;

  PointGoalConfig cfg_;
  std::array<double, 3> pos_{};
  std::array<double, 3> goal_{};
  int t_ = 0;
};

}  // namespace pih::rl
