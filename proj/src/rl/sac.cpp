#include "pih/rl/sac.hpp"

#include <cmath>
#include <random>

#include "pih/nn/policy_head.hpp"
#include "pih/nn/sequential.hpp"

namespace pih::rl {

using nn::Matrix;

void SacConfig::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must be in [0, 1)");
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must be in (0, 1]");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (!(lr > 0.0)) throw std::invalid_argument("lr must be > 0");
  if (!(init_alpha >= 0.0)) throw std::invalid_argument("init_alpha must be >= 0");
  if (auto_alpha && !(init_alpha > 0.0)) throw std::invalid_argument("automatic tuning needs init_alpha > 0");
  if (!(reward_scale > 0.0)) throw std::invalid_argument("reward_scale must be > 0");
}

TransitionBatch TransitionBatch::from(const Minibatch& mb, const nn::EncoderSpec& spec, int action_dim) {
  const auto n = static_cast<Eigen::Index>(mb.items.size());
  std::vector<const AgentObs*> obs;
  std::vector<const AgentObs*> next;
  TransitionBatch b;
  b.action.resize(n, action_dim);
  b.reward.resize(n, 1);
  b.terminal.resize(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const ReplayItem& it = *mb.items[static_cast<std::size_t>(i)];
    obs.push_back(it.obs.get());
    next.push_back(it.next_obs.get());
    if (static_cast<int>(it.action.size()) != action_dim) throw std::invalid_argument("replay action has the wrong size");
    for (int j = 0; j < action_dim; ++j) b.action(i, j) = it.action[static_cast<std::size_t>(j)];
    b.reward(i, 0) = it.reward;
    b.terminal(i, 0) = it.terminal ? 1.0 : 0.0;
  }
  b.obs = make_batch(obs, spec);
  b.next_obs = make_batch(next, spec);
  return b;
}

SacAgent::SacAgent(const nn::EncoderSpec& spec, int action_dim, const SacConfig& cfg,
                   std::uint64_t seed, bool zero_actor_head)
    : spec_(spec), action_dim_(action_dim), cfg_(cfg) {
  cfg_.validate();
  target_entropy_ = cfg_.target_entropy_set ? cfg_.target_entropy : -static_cast<double>(action_dim);
  std::mt19937_64 rng(mix_seed(seed ^ 0x5ac0a9e17ULL));
  actor_ = std::make_unique<nn::Actor>(spec, action_dim, rng, zero_actor_head);
  critic_ = std::make_unique<nn::Critic>(spec, action_dim, rng, cfg_.critic_hidden);
  target_ = std::make_unique<nn::Critic>(*critic_);
  const double a0 = cfg_.init_alpha > 0.0 ? std::log(cfg_.init_alpha) : -INFINITY;
  log_alpha_ = {"log_alpha", Matrix::Constant(1, 1, a0), Matrix::Zero(1, 1)};
  nn::AdamConfig ac;
  ac.lr = cfg_.lr;
  actor_opt_ = std::make_unique<nn::Adam>(actor_->parameters(), ac);
  critic_opt_ = std::make_unique<nn::Adam>(critic_->parameters(), ac);
  alpha_opt_ = std::make_unique<nn::Adam>(std::vector<nn::Parameter*>{&log_alpha_}, ac);
  bc_opt_ = std::make_unique<nn::Adam>(actor_->parameters(), ac);
}

double SacAgent::alpha() const { return std::exp(log_alpha_.value(0, 0)); }

std::vector<double> SacAgent::act(const AgentObs& obs, RandomStream& stream, bool deterministic) {
  const Matrix head = actor_->forward(make_batch(obs, spec_));
  const Matrix a = deterministic ? nn::mean_action(head) : nn::sample_policy(head, stream).action;
  return std::vector<double>(a.data(), a.data() + a.size());
}

namespace {

void check_finite(double v, const char* what, const SacLosses& l) {
  if (!std::isfinite(v)) {
    throw TrainingDivergedError(std::string("non-finite ") + what + " (critic1=" +
                                std::to_string(l.critic1) + " critic2=" + std::to_string(l.critic2) +
                                " actor=" + std::to_string(l.actor) + " alpha=" + std::to_string(l.alpha) + ")");
  }
}

}  // namespace

SacLosses SacAgent::update(const TransitionBatch& batch, RandomStream& stream) {
  const auto n = static_cast<double>(batch.action.rows());
  const double alpha = this->alpha();
  SacLosses out;
  out.alpha = alpha;

  // Critic targets.
  Matrix y;
  {
    const auto next = nn::sample_policy(actor_->forward(batch.next_obs), stream);
    const auto tq = target_->forward(batch.next_obs, next.action);
    const Matrix soft = tq.q1.cwiseMin(tq.q2) - alpha * next.log_prob;
    y = cfg_.reward_scale * batch.reward +
        cfg_.gamma * (Matrix::Ones(batch.terminal.rows(), 1) - batch.terminal).cwiseProduct(soft);
  }

  // Critic regression.
  critic_->zero_grad();
  const auto q = critic_->forward(batch.obs, batch.action);
  const Matrix e1 = q.q1 - y;
  const Matrix e2 = q.q2 - y;
  out.critic1 = e1.squaredNorm() / n;
  out.critic2 = e2.squaredNorm() / n;
  check_finite(out.critic1 + out.critic2, "critic loss", out);
  critic_->backward(2.0 / n * e1, 2.0 / n * e2);
  critic_opt_->step();

  // Actor: minimise alpha log pi - min Q.
  actor_->zero_grad();
  const auto s = nn::sample_policy(actor_->forward(batch.obs), stream);
  const auto qa = critic_->forward(batch.obs, s.action);
  Matrix g1 = Matrix::Zero(qa.q1.rows(), 1);
  Matrix g2 = Matrix::Zero(qa.q1.rows(), 1);
  double min_q = 0.0;
  for (Eigen::Index i = 0; i < qa.q1.rows(); ++i) {
    if (qa.q1(i, 0) <= qa.q2(i, 0)) {
      g1(i, 0) = -1.0 / n;
      min_q += qa.q1(i, 0);
    } else {
      g2(i, 0) = -1.0 / n;
      min_q += qa.q2(i, 0);
    }
  }
  const double mean_logp = s.log_prob.mean();
  out.actor = alpha * mean_logp - min_q / n;
  out.entropy = -mean_logp;
  check_finite(out.actor, "actor loss", out);
  const Matrix d_action = critic_->backward(g1, g2, false);
  actor_->backward(nn::sample_backward(s, d_action, Matrix::Constant(s.log_prob.rows(), 1, alpha / n)));
  actor_opt_->step();

  if (cfg_.auto_alpha) {
    // L(log alpha) = -log alpha * mean(log pi + target entropy).
    log_alpha_.grad(0, 0) = -(mean_logp + target_entropy_);
    alpha_opt_->step();
  }

  nn::polyak_update(target_->parameters(), critic_->parameters(), cfg_.tau);
  return out;
}

double SacAgent::bc_loss(const nn::ObsBatch& obs, const Matrix& expert_action, double lambda) {
  const Matrix lp = nn::log_prob(actor_->forward(obs), expert_action);
  return -lambda * lp.mean();
}

double SacAgent::bc_update(const nn::ObsBatch& obs, const Matrix& expert_action, double lambda) {
  if (lambda == 0.0) return 0.0;
  actor_->zero_grad();
  const Matrix head = actor_->forward(obs);
  const Matrix lp = nn::log_prob(head, expert_action);
  const double n = static_cast<double>(lp.rows());
  const double loss = -lambda * lp.mean();
  if (!std::isfinite(loss)) throw TrainingDivergedError("non-finite behaviour-cloning loss");
  actor_->backward(nn::log_prob_backward(head, expert_action, Matrix::Constant(lp.rows(), 1, -lambda / n)));
  bc_opt_->step();
  return loss;
}

std::vector<double> SacPolicy::act(const AgentObs& obs) { return agent_.act(obs, unused_, true); }

}  // namespace pih::rl
