#include "pih/rl/peg_hole_adapter.hpp"

#include <stdexcept>

namespace pih::rl {

PegHoleAdapter::PegHoleAdapter(const EnvConfig& cfg, const std::vector<ObjectPair>& pairs,
                               Modalities modalities, const sensors::PcaModel* pca) {
  if (pairs.empty()) throw std::invalid_argument("adapter needs at least one object pair");
  for (const auto& p : pairs) envs_.push_back(std::make_unique<PegHoleEnv>(cfg, p, pca));
  normalizer_ = ObsNormalizer::for_env(cfg, envs_.front()->pca(), modalities);
}

AgentObsPtr PegHoleAdapter::reset(std::uint64_t episode_seed) {
  current_ = pinned_ ? *pinned_ : static_cast<std::size_t>(mix_seed(episode_seed) % envs_.size());
  if (current_ >= envs_.size()) throw std::out_of_range("pinned object index out of range");
  RandomStream rs(episode_seed);
  last_obs_ = envs_[current_]->reset(rs).obs;
  return std::make_shared<AgentObs>(normalizer_(last_obs_));
}

EnvStep PegHoleAdapter::step(const std::vector<double>& action) {
  const auto r = envs_[current_]->step(to_action(action));
  last_obs_ = r.obs;
  EnvStep s;
  s.obs = std::make_shared<AgentObs>(normalizer_(r.obs));
  s.reward = r.reward;
  s.done = r.done;
  s.success = r.success;
  s.terminal = r.success;
  s.contact_force = r.state.contact_force;
  return s;
}

std::vector<ReplayItem> expert_items(const std::vector<Trajectory>& demos, const ObsNormalizer& normalizer) {
  std::vector<ReplayItem> out;
  for (const auto& traj : demos) {
    AgentObsPtr prev;
    for (std::size_t i = 0; i < traj.transitions.size(); ++i) {
      const Transition& t = traj.transitions[i];
      ReplayItem item;
      item.obs = prev ? prev : std::make_shared<AgentObs>(normalizer(t.obs));
      item.next_obs = std::make_shared<AgentObs>(normalizer(t.next_obs));
      item.action = normalise_action(t.action);
      item.reward = t.reward;
      item.terminal = t.done;
      item.source = Provenance::kExpert;
      prev = item.next_obs;
      out.push_back(std::move(item));
    }
  }
  return out;
}

}  // namespace pih::rl
