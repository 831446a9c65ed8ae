#include "pih/rl/point_goal_env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pih/core/random.hpp"

namespace pih::rl {

nn::EncoderSpec PointGoalEnv::encoder_spec() const {
  nn::EncoderSpec s;
  s.image_h = 0;
  s.image_w = 0;
  s.vec_dim = 6;
  return s;
}

AgentObsPtr PointGoalEnv::reset(std::uint64_t episode_seed) {
  RandomStream rs(episode_seed);
  const double h = cfg_.half_extent;
  for (double& p : pos_) p = rs.uniform(RandomStream::Channel::kEnvInit, -h, h);
  for (double& g : goal_) g = rs.uniform(RandomStream::Channel::kGoal, -h, h);
  t_ = 0;
  return observe();
}

EnvStep PointGoalEnv::step(const std::vector<double>& action) {
  if (action.size() != 3) throw std::invalid_argument("point-goal actions are 3-D");
  for (std::size_t i = 0; i < 3; ++i) {
    if (!std::isfinite(action[i])) throw std::invalid_argument("non-finite action");
    pos_[i] = std::clamp(pos_[i] + std::clamp(action[i], -1.0, 1.0) * cfg_.max_step, -cfg_.half_extent,
                         cfg_.half_extent);
  }
  ++t_;
  EnvStep s;
  const double d = distance();
  s.obs = observe();
  s.reward = -d;
  s.success = d <= cfg_.success_radius;
  s.terminal = s.success;
  s.done = s.success || t_ >= cfg_.episode_len;
  return s;
}

AgentObsPtr PointGoalEnv::observe() const {
  auto o = std::make_shared<AgentObs>();
  for (double p : pos_) o->vec.push_back(p / cfg_.half_extent);
  for (std::size_t i = 0; i < 3; ++i) o->vec.push_back((goal_[i] - pos_[i]) / cfg_.half_extent);
  return o;
}

double PointGoalEnv::distance() const {
  double s = 0.0;
  for (std::size_t i = 0; i < 3; ++i) s += (pos_[i] - goal_[i]) * (pos_[i] - goal_[i]);
  return std::sqrt(s);
}

}  // namespace pih::rl
