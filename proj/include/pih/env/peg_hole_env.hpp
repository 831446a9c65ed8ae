#pragma once

#include <array>
#include <string>

#include "pih/core/random.hpp"
#include "pih/core/types.hpp"
#include "pih/env/object_catalog.hpp"
#include "pih/sensors/pca.hpp"
#include "pih/sensors/render.hpp"
#include "pih/sensors/tactile.hpp"

namespace pih {

/// Desk model of one gripped peg above a fixed hole board.
///
/// World z points up. The hole pose is the centre of the opening on the board
/// surface; the peg pose is the peg tip, rigidly attached to the gripper, so
/// the kinematic observation k equals the peg pose.
struct EnvConfig {
  Task task = Task::kPooH;
  int episode_len = 50;

  double contact_stiffness = 1000.0;  // k_c, N/m
  double friction = 0.3;              // mu
  double tilt_max = 0.1;              // rad, |roll| + |pitch| that jams the hole mouth
  double chamfer = 0.003;             // lateral capture width of the hole chamfer, m

  std::array<double, 3> hole_nominal{0.5, 0.1, 0.22};  // opening centre, m
  double hole_jitter = 0.005;   // per-episode uniform x/y offset of the board, m
  double hole_depth = 0.03;     // m
  double insert_depth = 0.02;   // depth of the fully inserted pose, m

  // Goal offsets of the peg relative to a hover point above the hole.
  double hover_height = 0.03;
  std::array<double, 2> goal_dx{-0.02, 0.02};
  std::array<double, 2> goal_dy{0.02, 0.04};
  std::array<double, 2> goal_dz{-0.02, 0.02};
  std::array<double, 2> posture_weight{0.8, 1.2};  // PiH start = inserted + w * (PooH goal - inserted)

  double rotation_weight = 1.0;       // weight of squared angle errors in the reward
  double pooh_success_radius = 0.005; // m
  double pih_success_depth = 0.01;    // m, strict
  int max_reset_retries = 10;
  double clearance = 0.001;

  // Reachable box of the peg tip around the nominal hole: commanded targets
  // outside it are clipped component-wise before contact resolution.
  double workspace_xy = 0.1;      // half-width in x and y, m
  double workspace_z = 0.15;      // height above the nominal opening, m
  double workspace_angle = 0.5;   // |theta| limit for every axis, rad

  sensors::RenderConfig render;
  sensors::TactileConfig tactile;
  std::uint64_t pca_seed = 0;

  /// Throws ValidationError on an invalid configuration.
  void validate() const;
  /// Stable textual digest of every field.
  std::string digest() const;
};

struct EnvState {
  Pose peg_pose;
  Pose hole_pose;
  double insertion_depth = 0.0;
  double contact_force = 0.0;
  double friction_force = 0.0;
  sensors::ContactWrench wrench;
  int step_index = 0;
};

/// Quasi-static resolution of one commanded displacement: rotations first,
/// then lateral motion, then vertical motion, each advanced as far as the
/// board and hole walls allow. Pure function of its inputs.
EnvState resolve_step(const EnvConfig& cfg, const ObjectPair& pair, const EnvState& state,
                      const Action& action);

/// `action` with each component shortened so that `peg + action` stays in
/// the workspace box. Components pointing back into the box are unchanged.
Action workspace_clip(const EnvConfig& cfg, const Pose& peg, const Action& action);

/// True if the peg pose does not overlap the board.
bool is_non_penetrating(const EnvConfig& cfg, const ObjectPair& pair, const Pose& peg,
                        const Pose& hole, double tolerance = 1e-9);

/// -(|P_p - G_p|^2 + |P_h - G_h|^2) over all six pose components, with
/// squared angle errors scaled by `rotation_weight`.
double reward(const EnvState& state, const GoalSpec& goals, double rotation_weight = 1.0);

/// PiH: insertion depth strictly above `pih_success_depth`. PooH: peg clear
/// of the hole mouth and within `pooh_success_radius` of the peg goal.
bool is_success(const EnvState& state, Task task, const GoalSpec& goals, const EnvConfig& cfg);

class PegHoleEnv {
 public:
  /// Uses the cached default tactile PCA when `pca` is null. The pair's
  /// clearance is replaced by `cfg.clearance`.
  PegHoleEnv(EnvConfig cfg, ObjectPair pair, const sensors::PcaModel* pca = nullptr);

  struct ResetResult {
    EnvState state;
    Observation obs;
    GoalSpec goals;
  };
  struct StepResult {
    EnvState state;
    Observation obs;
    double reward = 0.0;
    bool done = false;
    bool success = false;
  };

  /// Samples hole placement, colours and goals from `stream`. Two resets
  /// from equal streams give identical results.
  ResetResult reset(RandomStream& stream);
  StepResult step(const Action& action);

  /// Places the peg at `peg` with no contact, keeping the episode context.
  /// Throws ValidationError if the pose penetrates the board.
  void teleport(const Pose& peg);
  /// Renders and senses the current state (draws tactile noise).
  Observation observe();

  const EnvState& state() const { return state_; }
  const GoalSpec& goals() const { return goals_; }
  const EnvConfig& config() const { return cfg_; }
  const ObjectPair& pair() const { return pair_; }
  const sensors::PcaModel& pca() const { return *pca_; }
  const sensors::ColorFactors& color_factors() const { return colors_; }
  /// Fully inserted peg pose of the current episode.
  Pose inserted_pose() const;

 private:
  Observation make_observation(const EnvState& state, RandomStream* noise) const;

  EnvConfig cfg_;
  ObjectPair pair_;
  const sensors::PcaModel* pca_;
  EnvState state_;
  GoalSpec goals_;
  sensors::ColorFactors colors_;
  RandomStream noise_{0};
  bool has_episode_ = false;
};

}  // namespace pih
