#include "pih/env/peg_hole_env.hpp"

#include <cmath>
#include <sstream>

#include "pih/core/base64.hpp"

namespace pih {

using geometry::Vec2;
using Ch = RandomStream::Channel;

void EnvConfig::validate() const {
  if (episode_len < 1) throw ValidationError("episode_len must be >= 1");
  if (!(contact_stiffness > 0.0)) throw ValidationError("contact stiffness must be > 0");
  if (!(friction >= 0.0)) throw ValidationError("friction coefficient must be >= 0");
  if (!(tilt_max > 0.0)) throw ValidationError("tilt_max must be > 0");
  if (!(chamfer >= 0.0)) throw ValidationError("chamfer must be >= 0");
  if (!(hole_depth > 0.0) || !(insert_depth > 0.0) || insert_depth > hole_depth) {
    throw ValidationError("need 0 < insert_depth <= hole_depth");
  }
  if (!(insert_depth > pih_success_depth)) {
    throw ValidationError("fully inserted pose must count as a PiH success");
  }
  if (!is_allowed_clearance(clearance)) {
    throw ValidationError("clearance must be one of 0.0005, 0.001, 0.002");
  }
  for (const auto& r : {goal_dx, goal_dy, goal_dz, posture_weight}) {
    if (!(r[0] <= r[1])) throw ValidationError("empty sampling range");
  }
  if (!(hole_jitter >= 0.0)) throw ValidationError("hole_jitter must be >= 0");
  if (!(rotation_weight >= 0.0)) throw ValidationError("rotation_weight must be >= 0");
  if (max_reset_retries < 1) throw ValidationError("max_reset_retries must be >= 1");
  if (!(workspace_xy > hole_jitter) || !(workspace_z > hover_height + goal_dz[1]) ||
      !(workspace_angle > 0.0)) {
    throw ValidationError("workspace must contain the hole jitter and the goal range");
  }
  try {
    render.validate();
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
}

std::string EnvConfig::digest() const {
  std::ostringstream s;
  auto put = [&s](double v) { s << format_double(v) << ';'; };
  s << to_string(task) << ';' << episode_len << ';';
  for (double v : {contact_stiffness, friction, tilt_max, chamfer, hole_nominal[0], hole_nominal[1],
                   hole_nominal[2], hole_jitter, hole_depth, insert_depth, hover_height, goal_dx[0],
                   goal_dx[1], goal_dy[0], goal_dy[1], goal_dz[0], goal_dz[1], posture_weight[0],
                   posture_weight[1], rotation_weight, pooh_success_radius, pih_success_depth,
                   clearance, workspace_xy, workspace_z, workspace_angle}) {
    put(v);
  }
  s << render.height << ';' << render.width << ';';
  for (double v : {render.view_x, render.view_y, render.view_z, render.half_extent, render.oblique,
                   render.color_scale_min, render.color_scale_max, render.peg_length,
                   render.goal_marker_radius}) {
    put(v);
  }
  s << render.supersample << ';' << render.peg_slices << ';' << tactile.grid_rows << ';'
    << tactile.grid_cols << ';';
  for (double v : {tactile.marker_spacing, tactile.dilate_gain, tactile.shear_gain,
                   tactile.twist_gain, tactile.noise_sigma, tactile.displacement_cap,
                   tactile.finger_half_width, tactile.grip_lever}) {
    put(v);
  }
  s << pca_seed;
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(s.str())));
  return buf;
}

namespace {

Vec2 lateral_offset(const Pose& peg, const Pose& hole) {
  return geometry::rotate({peg.x - hole.x, peg.y - hole.y}, -hole.theta_z);
}

double tilt(const Pose& p) { return std::abs(p.theta_x) + std::abs(p.theta_y); }

// Furthest fraction in [0,1] along a path whose start satisfies `ok`.
template <typename Pred>
double furthest_feasible(Pred ok) {
  if (ok(1.0)) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ok(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace

bool is_non_penetrating(const EnvConfig& cfg, const ObjectPair& pair, const Pose& peg,
                        const Pose& hole, double tolerance) {
  const double depth = hole.z - peg.z;
  if (depth <= tolerance) return true;
  if (depth > cfg.hole_depth + tolerance) return false;
  const auto hole_sec = pair.hole_section();
  return geometry::overlap_depth(pair.peg_section, hole_sec, lateral_offset(peg, hole),
                                 peg.theta_z - hole.theta_z) <= tolerance;
}

EnvState resolve_step(const EnvConfig& cfg, const ObjectPair& pair, const EnvState& state,
                      const Action& action) {
  action.validate();
  const auto hole_sec = pair.hole_section();
  const auto& peg_sec = pair.peg_section;
  const Pose& hole = state.hole_pose;
  const double surface = hole.z;
  const double bottom = surface - cfg.hole_depth;

  Pose p = state.peg_pose;
  const bool inside = surface - p.z > 0.0;
  Vec2 rel = lateral_offset(p, hole);
  double yaw = p.theta_z - hole.theta_z;

  // Roll and pitch are never blocked; they only matter for jamming.
  p.theta_x += action[3];
  p.theta_y += action[4];

  // Yaw, limited by the hole walls while inside.
  double yaw_blocked = 0.0;
  {
    const double target = yaw + action[5];
    if (inside) {
      const double s = furthest_feasible([&](double f) {
        return geometry::fits(peg_sec, hole_sec, rel, yaw + f * action[5]);
      });
      yaw = yaw + s * action[5];
      yaw_blocked = target - yaw;
    } else {
      yaw = target;
    }
  }

  // Lateral motion in the hole frame.
  const Vec2 step_lat = geometry::rotate({action[0], action[1]}, -hole.theta_z);
  const Vec2 target_lat = rel + step_lat;
  if (inside) {
    const double s = furthest_feasible([&](double f) {
      return geometry::fits(peg_sec, hole_sec, rel + step_lat * f, yaw);
    });
    rel = rel + step_lat * s;
  } else {
    rel = target_lat;
  }
  Vec2 deviation_lat = rel - target_lat;

  // Vertical motion.
  const double target_z = p.z + action[2];
  double z = target_z;
  const bool jammed = tilt(p) > cfg.tilt_max;
  if (inside) {
    if (jammed) {
      z = p.z;
    } else {
      z = std::max(target_z, bottom);
    }
  } else if (target_z < surface) {
    if (jammed) {
      z = surface;
    } else if (geometry::fits(peg_sec, hole_sec, rel, yaw)) {
      z = std::max(target_z, bottom);
    } else {
      std::optional<Vec2> guided;
      if (cfg.chamfer > 0.0) guided = geometry::nearest_fit(peg_sec, hole_sec, rel, yaw);
      if (guided && geometry::norm(*guided - rel) <= cfg.chamfer) {
        // The chamfer pushes the peg sideways into the opening.
        rel = *guided;
        deviation_lat = rel - target_lat;
        z = std::max(target_z, bottom);
      } else {
        z = surface;
      }
    }
  }
  const double deviation_z = z - target_z;

  EnvState next = state;
  const Vec2 world_lat = geometry::rotate(rel, hole.theta_z);
  p.x = hole.x + world_lat.x;
  p.y = hole.y + world_lat.y;
  p.z = z;
  p.theta_z = hole.theta_z + yaw;
  next.peg_pose = p;
  next.insertion_depth = std::max(0.0, surface - z);
  next.step_index = state.step_index + 1;

  const Vec2 dev_world = geometry::rotate(deviation_lat, hole.theta_z);
  const double arm = peg_sec.circumradius();
  const double kc = cfg.contact_stiffness;
  next.wrench.force = {kc * dev_world.x, kc * dev_world.y, kc * deviation_z};
  next.wrench.torque_z = -kc * arm * arm * yaw_blocked;
  next.contact_force = kc * std::sqrt(dev_world.x * dev_world.x + dev_world.y * dev_world.y +
                                      deviation_z * deviation_z +
                                      arm * yaw_blocked * arm * yaw_blocked);

  // Wall friction opposes vertical travel inside the hole in proportion to
  // the lateral normal force.
  const double realized_dz = z - state.peg_pose.z;
  const double lateral_force = kc * geometry::norm(dev_world);
  const bool in_hole = inside || next.insertion_depth > 0.0;
  next.friction_force = 0.0;
  if (in_hole && realized_dz != 0.0 && lateral_force > 0.0) {
    next.friction_force = cfg.friction * lateral_force;
  }
  next.wrench.friction = realized_dz > 0.0 ? -next.friction_force : next.friction_force;
  return next;
}

double reward(const EnvState& state, const GoalSpec& goals, double rotation_weight) {
  auto sq = [rotation_weight](const Pose& a, const Pose& b) {
    const auto x = a.to_array();
    const auto y = b.to_array();
    double s = 0.0;
    for (std::size_t i = 0; i < 6; ++i) {
      const double d = x[i] - y[i];
      s += (i < 3 ? 1.0 : rotation_weight) * d * d;
    }
    return s;
  };
  return -(sq(state.peg_pose, goals.goal_peg) + sq(state.hole_pose, goals.goal_hole));
}

bool is_success(const EnvState& state, Task task, const GoalSpec& goals, const EnvConfig& cfg) {
  if (task == Task::kPiH) return state.insertion_depth > cfg.pih_success_depth;
  if (state.insertion_depth > 0.0) return false;
  const double dx = state.peg_pose.x - goals.goal_peg.x;
  const double dy = state.peg_pose.y - goals.goal_peg.y;
  const double dz = state.peg_pose.z - goals.goal_peg.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz) <= cfg.pooh_success_radius;
}

PegHoleEnv::PegHoleEnv(EnvConfig cfg, ObjectPair pair, const sensors::PcaModel* pca)
    : cfg_(std::move(cfg)), pair_(std::move(pair)), pca_(pca) {
  cfg_.validate();
  pair_ = pair_.with_clearance(cfg_.clearance);
  if (pca_ == nullptr) pca_ = &sensors::default_tactile_pca(cfg_.tactile, cfg_.pca_seed);
  if (pca_->raw_dim() != sensors::kFingers * cfg_.tactile.finger_dim() || pca_->k() != kTactileDim) {
    throw ValidationError("tactile PCA does not match the sensor layout");
  }
}

Pose PegHoleEnv::inserted_pose() const {
  Pose p = state_.hole_pose;
  p.z -= cfg_.insert_depth;
  return p;
}

PegHoleEnv::ResetResult PegHoleEnv::reset(RandomStream& stream) {
  noise_ = stream.fork(0x7ac711eULL);
  Pose hole;
  hole.x = cfg_.hole_nominal[0] + stream.uniform(Ch::kEnvInit, -cfg_.hole_jitter, cfg_.hole_jitter);
  hole.y = cfg_.hole_nominal[1] + stream.uniform(Ch::kEnvInit, -cfg_.hole_jitter, cfg_.hole_jitter);
  hole.z = cfg_.hole_nominal[2];
  colors_ = sensors::draw_color_factors(stream, cfg_.render);

  Pose inserted = hole;
  inserted.z -= cfg_.insert_depth;

  for (int attempt = 0; attempt < cfg_.max_reset_retries; ++attempt) {
    Pose pooh_goal = hole;
    pooh_goal.x += stream.uniform(Ch::kGoal, cfg_.goal_dx[0], cfg_.goal_dx[1]);
    pooh_goal.y += stream.uniform(Ch::kGoal, cfg_.goal_dy[0], cfg_.goal_dy[1]);
    pooh_goal.z += cfg_.hover_height + stream.uniform(Ch::kGoal, cfg_.goal_dz[0], cfg_.goal_dz[1]);

    Pose start = inserted;
    GoalSpec goals{pooh_goal, hole};
    if (cfg_.task == Task::kPiH) {
      const auto off = difference(inserted, pooh_goal);
      for (int i = 0; i < 3; ++i) {
        const double w = stream.uniform(Ch::kGoal, cfg_.posture_weight[0], cfg_.posture_weight[1]);
        if (i == 0) start.x += w * off[0];
        if (i == 1) start.y += w * off[1];
        if (i == 2) start.z += w * off[2];
      }
      goals.goal_peg = inserted;
      // Goals that would be inside the board make the start invalid too.
      if (!is_non_penetrating(cfg_, pair_, pooh_goal, hole, 0.0)) continue;
    }
    if (!is_non_penetrating(cfg_, pair_, start, hole, 0.0) ||
        !is_non_penetrating(cfg_, pair_, goals.goal_peg, hole, 0.0)) {
      continue;
    }

    state_ = EnvState{};
    state_.peg_pose = start;
    state_.hole_pose = hole;
    state_.insertion_depth = std::max(0.0, hole.z - start.z);
    goals_ = goals;
    has_episode_ = true;
    return {state_, make_observation(state_, &noise_), goals_};
  }
  throw ValidationError("could not sample a collision-free initial state in " +
                        std::to_string(cfg_.max_reset_retries) + " attempts");
}

Action workspace_clip(const EnvConfig& cfg, const Pose& peg, const Action& action) {
  const auto k = peg.to_array();
  const std::array<double, kPoseDim> lo{cfg.hole_nominal[0] - cfg.workspace_xy, cfg.hole_nominal[1] - cfg.workspace_xy,
                                        -HUGE_VAL, -cfg.workspace_angle, -cfg.workspace_angle, -cfg.workspace_angle};
  const std::array<double, kPoseDim> hi{cfg.hole_nominal[0] + cfg.workspace_xy, cfg.hole_nominal[1] + cfg.workspace_xy,
                                        cfg.hole_nominal[2] + cfg.workspace_z, cfg.workspace_angle, cfg.workspace_angle,
                                        cfg.workspace_angle};
  Action out = action;
  for (int i = 0; i < kActionDim; ++i) {
    const auto u = static_cast<std::size_t>(i);
    const double target = k[u] + action[i];
    if (target > hi[u] && action[i] > 0.0) out[i] = std::max(0.0, hi[u] - k[u]);
    if (target < lo[u] && action[i] < 0.0) out[i] = std::min(0.0, lo[u] - k[u]);
  }
  return out;
}

PegHoleEnv::StepResult PegHoleEnv::step(const Action& action) {
  if (!has_episode_) throw std::logic_error("step() before reset()");
  state_ = resolve_step(cfg_, pair_, state_, workspace_clip(cfg_, state_.peg_pose, action));
  StepResult out;
  out.state = state_;
  out.obs = make_observation(state_, &noise_);
  out.reward = reward(state_, goals_, cfg_.rotation_weight);
  out.success = is_success(state_, cfg_.task, goals_, cfg_);
  out.done = out.success || state_.step_index >= cfg_.episode_len;
  return out;
}

void PegHoleEnv::teleport(const Pose& peg) {
  if (!has_episode_) throw std::logic_error("teleport() before reset()");
  if (!peg.is_finite() || !is_non_penetrating(cfg_, pair_, peg, state_.hole_pose)) {
    throw ValidationError("teleport target penetrates the board");
  }
  state_.peg_pose = peg;
  state_.insertion_depth = std::max(0.0, state_.hole_pose.z - peg.z);
  state_.contact_force = 0.0;
  state_.friction_force = 0.0;
  state_.wrench = {};
}

Observation PegHoleEnv::observe() { return make_observation(state_, &noise_); }

Observation PegHoleEnv::make_observation(const EnvState& state, RandomStream* noise) const {
  Observation obs;
  obs.k = state.peg_pose;
  sensors::Scene scene;
  scene.peg = state.peg_pose;
  scene.hole = state.hole_pose;
  scene.pair = &pair_;
  if (cfg_.task == Task::kPooH) scene.goal_marker = goals_.goal_peg;
  obs.v = sensors::render(scene, cfg_.render, colors_);
  const auto raw = sensors::sense_raw(state.wrench, cfg_.tactile, noise);
  const Eigen::VectorXd c = pca_->project(raw);
  for (int i = 0; i < kTactileDim; ++i) obs.c[static_cast<std::size_t>(i)] = c[i];
  return obs;
}

}  // namespace pih
