#include "pih/rl/trainer.hpp"

#include <stdexcept>

namespace pih::rl {

void TrainConfig::validate() const {
  sac.validate();
  if (total_steps < 1) throw std::invalid_argument("total_steps must be >= 1");
  if (warmup_steps < 0 || update_after < 0) throw std::invalid_argument("warmup/update_after must be >= 0");
  if (updates_per_step < 0) throw std::invalid_argument("updates_per_step must be >= 0");
  for (double r : {rho_start, rho_end}) {
    if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("rho must be in [0, 1]");
  }
  if (rho_end > rho_start) throw std::invalid_argument("rho schedule must be non-increasing");
  if (!(lambda_start >= 0.0) || !(lambda_end >= 0.0) || lambda_end > lambda_start) {
    throw std::invalid_argument("lambda schedule must be non-negative and non-increasing");
  }
  if (bc_updates < 0 || bc_batch < 1) throw std::invalid_argument("invalid behaviour-cloning settings");
  if (conv1 < 1 || conv2 < 1 || vec_hidden < 1 || fusion_hidden < 1) throw std::invalid_argument("network widths must be >= 1");
}

nn::EncoderSpec TrainConfig::network(nn::EncoderSpec base) const {
  base.conv1 = conv1;
  base.conv2 = conv2;
  base.vec_hidden = vec_hidden;
  base.fusion_hidden = fusion_hidden;
  return base;
}

LinearSchedule TrainConfig::rho() const {
  return hybrid ? LinearSchedule{rho_start, rho_end, total_steps} : LinearSchedule{0.0, 0.0, total_steps};
}

LinearSchedule TrainConfig::lambda() const {
  return bc ? LinearSchedule{lambda_start, lambda_end, total_steps} : LinearSchedule{0.0, 0.0, total_steps};
}

std::uint64_t episode_seed(std::uint64_t seed, std::uint64_t index) {
  return mix_seed(mix_seed(seed) ^ (index + 1));
}

namespace {

nn::Matrix action_matrix(const Minibatch& mb, int action_dim) {
  nn::Matrix a(static_cast<Eigen::Index>(mb.items.size()), action_dim);
  for (std::size_t i = 0; i < mb.items.size(); ++i) {
    for (int j = 0; j < action_dim; ++j) a(static_cast<Eigen::Index>(i), j) = mb.items[i]->action[static_cast<std::size_t>(j)];
  }
  return a;
}

}  // namespace

TrainResult train_sac(Environment& env, const TrainConfig& cfg, std::vector<ReplayItem> expert,
                      bool zero_actor_head) {
  cfg.validate();
  if ((cfg.hybrid || cfg.bc) && expert.empty()) {
    throw std::invalid_argument("hybrid replay and behaviour cloning need a non-empty expert dataset");
  }
  const nn::EncoderSpec spec = cfg.network(env.encoder_spec());
  const int adim = env.action_dim();
  TrainResult result;
  result.agent = std::make_unique<SacAgent>(spec, adim, cfg.sac, cfg.seed, zero_actor_head);
  SacAgent& agent = *result.agent;
  HybridReplayBuffer buffer(cfg.replay_capacity, std::move(expert));
  RandomStream rs(cfg.seed);
  const LinearSchedule rho = cfg.rho();
  const LinearSchedule lambda = cfg.lambda();
  const auto batch = static_cast<std::size_t>(cfg.sac.batch_size);

  long episode = 0;
  AgentObsPtr obs = env.reset(episode_seed(cfg.seed, 0));
  SacLosses last;
  for (long step = 0; step < cfg.total_steps; ++step) {
    std::vector<double> a;
    if (step < cfg.warmup_steps) {
      a.resize(static_cast<std::size_t>(adim));
      for (double& x : a) x = rs.uniform(RandomStream::Channel::kPolicy, -1.0, 1.0);
    } else {
      a = agent.act(*obs, rs, false);
    }
    const EnvStep s = env.step(a);
    buffer.add({obs, a, s.reward, s.obs, s.terminal, Provenance::kStandard});

    const double r_t = rho(step);
    const double l_t = lambda(step);
    if (step >= cfg.update_after) {
      const std::size_t standard_needed = batch - HybridReplayBuffer::expert_share(batch, r_t);
      if (standard_needed == 0 || buffer.standard().size() >= standard_needed) {
        for (int u = 0; u < cfg.updates_per_step; ++u) {
          const Minibatch mb = buffer.sample(batch, r_t, rs);
          last = agent.update(TransitionBatch::from(mb, spec, adim), rs);
        }
      }
    }

    TrainLogRow row;
    row.step = step;
    row.episode = episode;
    row.reward = s.reward;
    row.critic1 = last.critic1;
    row.critic2 = last.critic2;
    row.actor = last.actor;
    row.alpha = agent.alpha();
    row.rho = r_t;
    row.lambda = l_t;
    row.success = s.done ? (s.success ? 1 : 0) : -1;
    result.log.add(row);

    if (s.done) {
      if (cfg.bc && l_t > 0.0) {
        for (int i = 0; i < cfg.bc_updates; ++i) {
          const Minibatch mb = buffer.sample_expert(static_cast<std::size_t>(cfg.bc_batch), rs);
          std::vector<const AgentObs*> o;
          for (const ReplayItem* it : mb.items) o.push_back(it->obs.get());
          agent.bc_update(make_batch(o, spec), action_matrix(mb, adim), l_t);
        }
      }
      ++episode;
      obs = env.reset(episode_seed(cfg.seed, static_cast<std::uint64_t>(episode)));
    } else {
      obs = s.obs;
    }
  }
  return result;
}

}  // namespace pih::rl
