#include "pih/harness/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "pih/nn/checkpoint.hpp"
#include "pih/rl/agent_obs.hpp"
#include "pih/rl/trainer.hpp"

namespace pih {

using json = nlohmann::ordered_json;

ObjectCatalog experiment_catalog(const ExperimentConfig& cfg) {
  return cfg.catalog.empty() ? ObjectCatalog::default_catalog() : ObjectCatalog::load(cfg.catalog);
}

std::vector<ObjectPair> experiment_pairs(const ExperimentConfig& cfg) {
  const ObjectCatalog catalog = experiment_catalog(cfg);
  std::vector<ObjectPair> out;
  for (const auto& name : cfg.objects) out.push_back(catalog.get(name));
  return out;
}

rl::Modalities experiment_modalities(const ExperimentConfig& cfg) {
  return {!cfg.ablation.no_vision, !cfg.ablation.no_tactile};
}

EnvConfig task_env(const ExperimentConfig& cfg, Task task) {
  EnvConfig e = cfg.env;
  e.task = task;
  return e;
}

ReversalConfig experiment_reversal(const ExperimentConfig& cfg) {
  ReversalConfig r = cfg.reversal;
  r.rotation_weight = cfg.env.rotation_weight;
  if (cfg.ablation.no_randomization) r.randomized_fraction = 0.0;
  return r;
}

// ---------------------------------------------------------------------------
// Trained policies

std::string_view to_string(TrainedPolicy::Kind kind) {
  switch (kind) {
    case TrainedPolicy::Kind::kSac: return "sac";
    case TrainedPolicy::Kind::kSl: return "sl";
    case TrainedPolicy::Kind::kResidual: return "residual";
  }
  return "sac";
}

TrainedPolicy::TrainedPolicy(TrainedPolicy&&) noexcept = default;
TrainedPolicy& TrainedPolicy::operator=(TrainedPolicy&&) noexcept = default;
TrainedPolicy::~TrainedPolicy() = default;

TrainedPolicy TrainedPolicy::from_agent(std::unique_ptr<rl::SacAgent> agent, rl::Modalities modalities) {
  TrainedPolicy p;
  p.kind_ = Kind::kSac;
  p.agent_ = std::move(agent);
  p.modalities_ = modalities;
  p.bind();
  return p;
}

TrainedPolicy TrainedPolicy::from_sl(std::unique_ptr<nn::DeterministicPolicy> sl, rl::Modalities modalities) {
  TrainedPolicy p;
  p.kind_ = Kind::kSl;
  p.sl_ = std::move(sl);
  p.modalities_ = modalities;
  p.bind();
  return p;
}

TrainedPolicy TrainedPolicy::from_residual(std::unique_ptr<nn::DeterministicPolicy> sl,
                                           std::unique_ptr<rl::SacAgent> residual, rl::Modalities modalities) {
  TrainedPolicy p;
  p.kind_ = Kind::kResidual;
  p.sl_ = std::move(sl);
  p.agent_ = std::move(residual);
  p.modalities_ = modalities;
  p.bind();
  return p;
}

void TrainedPolicy::bind() {
  if (sl_) sl_policy_ = std::make_unique<rl::SlPolicy>(*sl_);
  switch (kind_) {
    case Kind::kSac:
      if (!agent_) throw std::logic_error("SAC policy without an agent");
      spec_ = agent_->spec();
      action_dim_ = agent_->action_dim();
      policy_ = std::make_unique<rl::SacPolicy>(*agent_);
      break;
    case Kind::kSl:
      if (!sl_) throw std::logic_error("SL policy without a network");
      spec_ = sl_->spec();
      action_dim_ = sl_->action_dim();
      policy_ = std::make_unique<rl::SlPolicy>(*sl_);
      break;
    case Kind::kResidual:
      if (!sl_ || !agent_) throw std::logic_error("residual policy needs a base and a residual");
      if (!(sl_->spec() == agent_->spec()) || sl_->action_dim() != agent_->action_dim()) {
        throw std::logic_error("residual and base policy shapes differ");
      }
      spec_ = agent_->spec();
      action_dim_ = agent_->action_dim();
      policy_ = std::make_unique<rl::ResidualPolicy>(*sl_policy_, *agent_);
      break;
  }
}

std::vector<nn::NamedParameter> TrainedPolicy::parameters() const {
  std::vector<nn::NamedParameter> out;
  if (sl_) {
    auto p = sl_->named_parameters("sl.");
    out.insert(out.end(), p.begin(), p.end());
  }
  if (agent_) {
    auto p = agent_->actor().named_parameters("actor.");
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

namespace {

json spec_json(const nn::EncoderSpec& s) {
  return json{{"image_h", s.image_h},     {"image_w", s.image_w},       {"vec_dim", s.vec_dim},
              {"conv1", s.conv1},         {"conv2", s.conv2},           {"vec_hidden", s.vec_hidden},
              {"fusion_hidden", s.fusion_hidden}};
}

nn::EncoderSpec spec_from_json(const json& j) {
  nn::EncoderSpec s;
  s.image_h = j.at("image_h").get<int>();
  s.image_w = j.at("image_w").get<int>();
  s.vec_dim = j.at("vec_dim").get<int>();
  s.conv1 = j.at("conv1").get<int>();
  s.conv2 = j.at("conv2").get<int>();
  s.vec_hidden = j.at("vec_hidden").get<int>();
  s.fusion_hidden = j.at("fusion_hidden").get<int>();
  return s;
}

}  // namespace

void TrainedPolicy::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  nn::save_checkpoint(dir / "policy.ckpt", parameters());
  json meta{{"kind", std::string(to_string(kind_))},
            {"action_dim", action_dim_},
            {"vision", modalities_.vision},
            {"tactile", modalities_.tactile},
            {"spec", spec_json(spec_)}};
  std::ofstream out(dir / "policy.json");
  if (!out) throw std::runtime_error("cannot write " + (dir / "policy.json").string());
  out << meta.dump(2) << '\n';
}

TrainedPolicy TrainedPolicy::load(const std::filesystem::path& dir) {
  std::ifstream in(dir / "policy.json");
  if (!in) throw std::runtime_error("cannot read " + (dir / "policy.json").string());
  json meta;
  try {
    meta = json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed policy.json: " + std::string(e.what()));
  }
  TrainedPolicy p;
  try {
    const std::string kind = meta.at("kind").get<std::string>();
    p.spec_ = spec_from_json(meta.at("spec"));
    p.action_dim_ = meta.at("action_dim").get<int>();
    p.modalities_ = {meta.at("vision").get<bool>(), meta.at("tactile").get<bool>()};
    std::mt19937_64 rng(0);
    if (kind == "sac" || kind == "residual") {
      p.agent_ = std::make_unique<rl::SacAgent>(p.spec_, p.action_dim_, rl::SacConfig{}, 0);
    }
    if (kind == "sl" || kind == "residual") {
      p.sl_ = std::make_unique<nn::DeterministicPolicy>(p.spec_, p.action_dim_, rng);
    }
    if (kind == "sac") {
      p.kind_ = Kind::kSac;
    } else if (kind == "sl") {
      p.kind_ = Kind::kSl;
    } else if (kind == "residual") {
      p.kind_ = Kind::kResidual;
    } else {
      throw std::runtime_error("unknown policy kind '" + kind + "'");
    }
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed policy.json: " + std::string(e.what()));
  }
  nn::load_checkpoint(dir / "policy.ckpt", p.parameters());
  p.bind();
  return p;
}

// ---------------------------------------------------------------------------
// PooH

TrainOutput train_pooh(const ExperimentConfig& cfg, std::uint64_t seed) {
  rl::PegHoleAdapter env(task_env(cfg, Task::kPooH), experiment_pairs(cfg));
  rl::TrainConfig tc = cfg.pooh;
  tc.seed = seed;
  tc.hybrid = false;
  tc.bc = false;
  auto result = rl::train_sac(env, tc);
  return {TrainedPolicy::from_agent(std::move(result.agent), {}), std::move(result.log)};
}

std::uint64_t collect_seed(std::uint64_t seed, std::size_t object, std::size_t attempt) {
  constexpr std::uint64_t kCollectSalt = 0xc011ec7ULL;
  return mix_seed(mix_seed(seed ^ kCollectSalt) ^ mix_seed((static_cast<std::uint64_t>(object) << 32) | attempt));
}

Trajectory rollout_pooh(rl::PegHoleAdapter& env, rl::Policy& policy, std::uint64_t episode_seed) {
  rl::AgentObsPtr obs = env.reset(episode_seed);
  const PegHoleEnv& e = env.env();
  if (e.config().task != Task::kPooH) throw std::invalid_argument("rollout_pooh needs a PooH environment");
  Trajectory traj;
  traj.task = Task::kPooH;
  traj.object_id = e.pair().name;
  traj.seed = static_cast<std::int64_t>(episode_seed);
  traj.env_digest = e.config().digest();
  bool done = false;
  while (!done) {
    Transition t;
    t.obs = env.last_observation();
    const auto step = env.step(policy.act(*obs));
    t.next_obs = env.last_observation();
    t.action = difference(t.obs.k, t.next_obs.k).clipped();
    t.reward = step.reward;
    t.done = step.done;
    done = step.done;
    obs = step.obs;
    traj.transitions.push_back(std::move(t));
  }
  return traj;
}

std::vector<Trajectory> collect(rl::Policy& policy, const ExperimentConfig& cfg, std::uint64_t seed,
                                CollectStats* stats) {
  rl::PegHoleAdapter env(task_env(cfg, Task::kPooH), experiment_pairs(cfg));
  return collect(policy, env, cfg, seed, stats);
}

std::vector<Trajectory> collect(rl::Policy& policy, rl::PegHoleAdapter& env, const ExperimentConfig& cfg,
                                std::uint64_t seed, CollectStats* stats) {
  CollectStats st;
  std::vector<Trajectory> out;
  for (std::size_t o = 0; o < env.object_count(); ++o) {
    env.pin_object(o);
    int attempts = 0;
    int successes = 0;
    while (successes < cfg.expert_per_object && attempts < cfg.collect_attempts_per_object) {
      Trajectory traj = rollout_pooh(env, policy, collect_seed(seed, o, static_cast<std::size_t>(attempts)));
      ++attempts;
      if (env.env().state().step_index > 0 && is_success(env.env().state(), Task::kPooH, env.env().goals(),
                                                         env.env().config())) {
        ++successes;
        out.push_back(std::move(traj));
      }
    }
    st.objects.push_back(env.env().pair().name);
    st.attempts.push_back(attempts);
    st.successes.push_back(successes);
  }
  env.pin_object(std::nullopt);
  if (stats) *stats = st;
  return out;
}

std::vector<double> ScriptedExtractionPolicy::act(const rl::AgentObs&) {
  const PegHoleEnv& e = env_.env();
  const Pose peg = e.state().peg_pose;
  const Pose hole = e.state().hole_pose;
  constexpr double kLift = 0.002;  // clearance above the board before moving sideways
  Action a;
  if (peg.z < hole.z + kLift) {
    a[2] = hole.z + kLift - peg.z;
    if (noise_ > 0.0 && peg.z < hole.z) {
      for (int j = 0; j < 2; ++j) {
        a[j] = noise_ * Action::bound(j) * stream_.uniform(RandomStream::Channel::kPolicy, -1.0, 1.0);
      }
    }
  } else {
    a = difference(peg, e.goals().goal_peg);
  }
  return rl::normalise_action(a.clipped());
}

std::vector<Trajectory> reverse(const std::vector<Trajectory>& pooh, const ExperimentConfig& cfg,
                                std::uint64_t seed, ReversalSummary* summary) {
  constexpr std::uint64_t kReverseSalt = 0x2e7e25eULL;
  RandomStream stream(mix_seed(seed ^ kReverseSalt));
  return reverse_dataset(pooh, experiment_reversal(cfg), task_env(cfg, Task::kPiH), experiment_catalog(cfg),
                         stream, summary);
}

// ---------------------------------------------------------------------------
// PiH

std::unique_ptr<rl::PegHoleAdapter> pih_adapter(const ExperimentConfig& cfg, rl::Modalities modalities) {
  return std::make_unique<rl::PegHoleAdapter>(task_env(cfg, Task::kPiH), experiment_pairs(cfg), modalities);
}

TrainOutput train_pih(const ExperimentConfig& cfg, std::uint64_t seed, const std::vector<Trajectory>& expert) {
  const rl::Modalities modalities = experiment_modalities(cfg);
  auto env = pih_adapter(cfg, modalities);
  rl::TrainConfig tc = cfg.pih;
  tc.seed = seed;
  tc.hybrid = false;
  tc.bc = false;

  auto expert_store = [&] {
    if (expert.empty()) throw std::invalid_argument(std::string(to_string(cfg.method)) + " needs expert data");
    return rl::expert_items(expert, env->normalizer());
  };

  switch (cfg.method) {
    case Method::kOurs: {
      tc.hybrid = !cfg.ablation.no_hybrid;
      tc.bc = !cfg.ablation.no_bc;
      std::vector<rl::ReplayItem> items;
      if (tc.hybrid || tc.bc) items = expert_store();
      auto r = rl::train_sac(*env, tc, std::move(items));
      return {TrainedPolicy::from_agent(std::move(r.agent), modalities), std::move(r.log)};
    }
    case Method::kDirectRl: {
      auto r = rl::train_sac(*env, tc);
      return {TrainedPolicy::from_agent(std::move(r.agent), modalities), std::move(r.log)};
    }
    case Method::kSl:
    case Method::kResidual: {
      rl::SlConfig sc = cfg.sl;
      sc.seed = seed;
      auto sl = rl::train_sl(expert_store(), tc.network(env->encoder_spec()), kActionDim, sc);
      if (cfg.method == Method::kSl) return {TrainedPolicy::from_sl(std::move(sl.policy), modalities), {}};
      rl::SlPolicy base(*sl.policy);
      auto r = rl::train_residual(base, *env, tc);
      return {TrainedPolicy::from_residual(std::move(sl.policy), std::move(r.agent), modalities), std::move(r.log)};
    }
  }
  throw std::logic_error("unhandled method");
}

EvalReport evaluate_policy(TrainedPolicy& policy, const ExperimentConfig& cfg, std::uint64_t seed) {
  auto env = pih_adapter(cfg, policy.modalities());
  EvalConfig ec;
  ec.trials_per_object = cfg.trials_per_object;
  ec.force_successes = cfg.force_successes;
  ec.seed = seed;
  return evaluate(policy.policy(), policy.spec(), *env, ec);
}

}  // namespace pih
