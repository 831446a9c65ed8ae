#include "pih/rl/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

#include "pih/nn/adam.hpp"

namespace pih::rl {

using nn::Matrix;

namespace {

struct Data {
  nn::ObsBatch obs;
  Matrix action;
};

Data gather(const std::vector<ReplayItem>& data, const std::vector<std::size_t>& idx,
            const nn::EncoderSpec& spec, int action_dim) {
  std::vector<const AgentObs*> o;
  Data d;
  d.action.resize(static_cast<Eigen::Index>(idx.size()), action_dim);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const ReplayItem& it = data[idx[r]];
    o.push_back(it.obs.get());
    for (int j = 0; j < action_dim; ++j) d.action(static_cast<Eigen::Index>(r), j) = it.action[static_cast<std::size_t>(j)];
  }
  d.obs = make_batch(o, spec);
  return d;
}

}  // namespace

double sl_loss(nn::DeterministicPolicy& policy, const std::vector<ReplayItem>& data) {
  if (data.empty()) throw std::invalid_argument("empty dataset");
  constexpr std::size_t kChunk = 512;
  double total = 0.0;
  for (std::size_t b = 0; b < data.size(); b += kChunk) {
    std::vector<std::size_t> idx(std::min(kChunk, data.size() - b));
    std::iota(idx.begin(), idx.end(), b);
    const Data d = gather(data, idx, policy.spec(), policy.action_dim());
    total += (policy.forward(d.obs) - d.action).squaredNorm();
  }
  return total / static_cast<double>(data.size() * static_cast<std::size_t>(policy.action_dim()));
}

SlResult train_sl(const std::vector<ReplayItem>& data, const nn::EncoderSpec& spec, int action_dim,
                  const SlConfig& cfg) {
  if (data.empty()) throw std::invalid_argument("supervised baseline needs a non-empty dataset");
  if (cfg.epochs < 0 || cfg.batch_size < 0 || !(cfg.lr > 0.0)) throw std::invalid_argument("invalid SL config");
  std::mt19937_64 rng(mix_seed(cfg.seed ^ 0x51ULL));
  SlResult res;
  res.policy = std::make_unique<nn::DeterministicPolicy>(spec, action_dim, rng);
  nn::AdamConfig ac;
  ac.lr = cfg.lr;
  nn::Adam opt(res.policy->parameters(), ac);

  const std::size_t n = data.size();
  const std::size_t bs = cfg.batch_size == 0 ? n : std::min<std::size_t>(n, static_cast<std::size_t>(cfg.batch_size));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const double scale = 1.0 / static_cast<double>(action_dim);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle && bs < n) std::shuffle(order.begin(), order.end(), rng);
    double epoch_sum = 0.0;
    for (std::size_t b = 0; b < n; b += bs) {
      const std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(b),
                                         order.begin() + static_cast<std::ptrdiff_t>(std::min(n, b + bs)));
      const Data d = gather(data, idx, spec, action_dim);
      res.policy->zero_grad();
      const Matrix err = res.policy->forward(d.obs) - d.action;
      const double m = static_cast<double>(idx.size());
      epoch_sum += err.squaredNorm();
      res.policy->backward(2.0 * scale / m * err);
      opt.step();
    }
    res.epoch_loss.push_back(epoch_sum * scale / static_cast<double>(n));
  }
  res.epoch_loss.push_back(sl_loss(*res.policy, data));
  return res;
}

std::vector<double> SlPolicy::act(const AgentObs& obs) {
  const Matrix a = net_.forward(make_batch(obs, net_.spec()));
  std::vector<double> out(a.data(), a.data() + a.size());
  for (double& x : out) x = std::clamp(x, -1.0, 1.0);
  return out;
}

std::vector<double> combine_residual(const std::vector<double>& base, const std::vector<double>& residual,
                                     double scale) {
  if (base.size() != residual.size()) throw std::invalid_argument("residual and base actions differ in size");
  std::vector<double> out(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) out[i] = std::clamp(base[i] + scale * residual[i], -1.0, 1.0);
  return out;
}

AgentObsPtr ResidualEnvironment::reset(std::uint64_t episode_seed) {
  obs_ = inner_.reset(episode_seed);
  return obs_;
}

EnvStep ResidualEnvironment::step(const std::vector<double>& residual) {
  if (!obs_) throw std::logic_error("step() before reset()");
  EnvStep s = inner_.step(combine_residual(base_.act(*obs_), residual, scale_));
  obs_ = s.obs;
  return s;
}

std::vector<double> ResidualPolicy::act(const AgentObs& obs) {
  return combine_residual(base_.act(obs), residual_.act(obs, unused_, true), scale_);
}

TrainResult train_residual(Policy& base, Environment& env, const TrainConfig& cfg) {
  TrainConfig c = cfg;
  c.hybrid = false;
  c.bc = false;
  ResidualEnvironment residual_env(env, base);
  return train_sac(residual_env, c, {}, true);
}

}  // namespace pih::rl
