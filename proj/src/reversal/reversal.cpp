#include "pih/reversal/reversal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

namespace pih {

using Ch = RandomStream::Channel;

void ReversalConfig::validate() const {
  if (!(z_threshold > 0.0) || z_threshold > kMaxTranslationStep) {
    throw ValidationError("z_threshold must be in (0, max translation step]");
  }
  if (!(offset_range >= 0.0) || offset_range > kMaxTranslationStep) {
    throw ValidationError("offset_range must lie within the action bounds");
  }
  if (!(randomized_fraction >= 0.0 && randomized_fraction <= 1.0)) {
    throw ValidationError("randomized_fraction must be in [0, 1]");
  }
  if (max_retries < 1) throw ValidationError("max_retries must be >= 1");
  if (!(divergence_tolerance > 0.0)) throw ValidationError("divergence_tolerance must be > 0");
}

ReplayDivergenceError::ReplayDivergenceError(std::size_t record, double error)
    : std::runtime_error("replay diverged at record " + std::to_string(record) + " by " +
                         std::to_string(error)),
      record_(record) {}

std::string ReversalSummary::line() const {
  return "input=" + std::to_string(input) + " randomized=" + std::to_string(randomized) +
         " fallback=" + std::to_string(fallback);
}

std::pair<double, double> exact_split(double b, double target) {
  if (b == 0.0) return {target, -target};
  // On the grid of multiples of ulp(b) the difference b - x is exact.
  const double q = std::nextafter(std::abs(b), HUGE_VAL) - std::abs(b);
  const double snapped = std::round(target / q) * q;
  if (std::isfinite(snapped) && snapped + (b - snapped) == b) return {snapped, b - snapped};
  double up = target;
  double down = target;
  for (int i = 0; i < 256; ++i) {
    for (double x : {up, down}) {
      const double y = b - x;
      if (x + y == b) return {x, y};
    }
    up = std::nextafter(up, HUGE_VAL);
    down = std::nextafter(down, -HUGE_VAL);
  }
  // Unreachable in practice: x = b, y = 0 always works.
  return {b, 0.0};
}

namespace {

double relabel(const Pose& peg, const Pose& inserted, double rotation_weight) {
  EnvState s;
  s.peg_pose = peg;
  return reward(s, GoalSpec{inserted, Pose{}}, rotation_weight);
}

double pose_error(const Pose& a, const Pose& b) {
  const auto x = a.to_array();
  const auto y = b.to_array();
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

void reset_for(const Trajectory& traj, PegHoleEnv& env) {
  if (env.config().task != Task::kPiH) throw ValidationError("reversal needs a PiH environment");
  if (!traj.object_id.empty() && traj.object_id != env.pair().name) {
    throw ValidationError("trajectory object '" + traj.object_id + "' does not match environment '" +
                          env.pair().name + "'");
  }
  RandomStream s(static_cast<std::uint64_t>(traj.seed));
  env.reset(s);
}

}  // namespace

Trajectory reverse_kinematic(const Trajectory& pooh, double rotation_weight) {
  Trajectory out;
  out.task = Task::kPiH;
  out.object_id = pooh.object_id;
  out.seed = pooh.seed;
  out.env_digest = pooh.env_digest;
  const auto& src = pooh.transitions;
  if (src.empty()) return out;

  const Pose inserted = src.front().obs.k;
  out.transitions.reserve(src.size());
  for (auto it = src.rbegin(); it != src.rend(); ++it) {
    Transition r;
    r.obs = it->next_obs;
    r.obs.c = {};
    r.action = -it->action;
    r.next_obs = it->obs;
    r.next_obs.c = {};
    r.reward = relabel(r.next_obs.k, inserted, rotation_weight);
    out.transitions.push_back(std::move(r));
  }
  out.transitions.back().done = true;
  return out;
}

Trajectory regenerate_tactile(const Trajectory& reversed, PegHoleEnv& env,
                              double divergence_tolerance) {
  Trajectory out = reversed;
  out.env_digest = env.config().digest();
  reset_for(reversed, env);
  if (out.transitions.empty()) return out;

  env.teleport(out.transitions.front().obs.k);
  Observation current = env.observe();
  for (std::size_t i = 0; i < out.transitions.size(); ++i) {
    Transition& rec = out.transitions[i];
    rec.obs = current;
    env.teleport(rec.obs.k);
    const auto res = env.step(rec.action);
    if (!rec.randomized && res.state.contact_force == 0.0) {
      const double err = pose_error(res.state.peg_pose, rec.next_obs.k);
      if (err > divergence_tolerance) throw ReplayDivergenceError(i, err);
    }
    Observation next = res.obs;
    next.k = rec.next_obs.k;
    rec.next_obs = next;
    current = std::move(next);
  }
  return out;
}

ReversalOutcome generate_pih_trajectory(const Trajectory& pooh, const ReversalConfig& cfg,
                                        PegHoleEnv& env, RandomStream& stream) {
  cfg.validate();
  ReversalOutcome outcome;
  Trajectory kin = reverse_kinematic(pooh, cfg.rotation_weight);
  const bool want = stream.bernoulli(Ch::kRandomization, cfg.randomized_fraction);

  if (want && !kin.transitions.empty()) {
    reset_for(pooh, env);
    const double surface = env.state().hole_pose.z;
    const Pose inserted = pooh.transitions.front().obs.k;
    const double d = cfg.z_threshold;

    for (std::size_t i = 0; i < kin.transitions.size() && !outcome.randomized; ++i) {
      const Transition& rec = kin.transitions[i];
      if (!(std::abs(rec.obs.k.z - surface) < d)) continue;
      const Action back = rec.action;  // -a_t
      // a''_z = back_z + d must stay inside the action bounds.
      if (std::abs(back[2] + d) > Action::bound(2)) continue;

      for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
        Action poke;
        Action recover;
        for (int j = 0; j < 2; ++j) {
          const double b = Action::bound(j);
          const double lo = std::max(-cfg.offset_range, back[j] - b);
          const double hi = std::min(cfg.offset_range, back[j] + b);
          const auto [x, y] = exact_split(back[j], stream.uniform(Ch::kRandomization, lo, hi));
          poke[j] = x;
          recover[j] = y;
        }
        const auto [pz, rz] = exact_split(back[2], -d);
        poke[2] = pz;
        recover[2] = rz;
        for (int j = 3; j < kActionDim; ++j) {
          poke[j] = 0.0;
          recover[j] = back[j];
        }
        if (!poke.within_bounds() || !recover.within_bounds()) continue;

        ++outcome.attempts;
        env.teleport(rec.obs.k);
        const auto res = env.step(poke);
        if (pose_error(res.state.peg_pose, rec.obs.k) <= 1e-12) continue;  // fully blocked

        Transition first;
        first.obs = rec.obs;
        first.action = poke;
        first.next_obs.k = res.state.peg_pose;
        first.next_obs.v = rec.obs.v;
        first.reward = relabel(first.next_obs.k, inserted, cfg.rotation_weight);
        first.randomized = true;

        Transition second = rec;
        second.obs = first.next_obs;
        second.action = recover;
        second.randomized = true;

        kin.transitions[i] = std::move(second);
        kin.transitions.insert(kin.transitions.begin() + static_cast<std::ptrdiff_t>(i),
                               std::move(first));
        outcome.randomized = true;
        break;
      }
      // Only the first eligible step is tried.
      break;
    }
    outcome.fallback = !outcome.randomized;
  }

  outcome.trajectory = regenerate_tactile(kin, env, cfg.divergence_tolerance);
  return outcome;
}

std::vector<Trajectory> reverse_dataset(const std::vector<Trajectory>& pooh,
                                        const ReversalConfig& cfg, const EnvConfig& env_cfg,
                                        const ObjectCatalog& catalog, RandomStream& stream,
                                        ReversalSummary* summary) {
  EnvConfig pih_cfg = env_cfg;
  pih_cfg.task = Task::kPiH;
  std::map<std::string, std::unique_ptr<PegHoleEnv>> envs;
  ReversalSummary sum;
  std::vector<Trajectory> out;
  out.reserve(pooh.size());
  for (const auto& traj : pooh) {
    if (traj.task != Task::kPooH) throw ValidationError("reverse_dataset expects PooH trajectories");
    auto& env = envs[traj.object_id];
    if (!env) env = std::make_unique<PegHoleEnv>(pih_cfg, catalog.get(traj.object_id));
    auto outcome = generate_pih_trajectory(traj, cfg, *env, stream);
    ++sum.input;
    if (outcome.randomized) ++sum.randomized;
    if (outcome.fallback) ++sum.fallback;
    out.push_back(std::move(outcome.trajectory));
  }
  if (summary) *summary = sum;
  return out;
}

}  // namespace pih
