#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pih {

inline constexpr int kPoseDim = 6;
inline constexpr int kActionDim = 6;
inline constexpr int kTactileDim = 15;

// Per-step clip bounds of an Action.
inline constexpr double kMaxTranslationStep = 0.02;  // m
inline constexpr double kMaxRotationStep = 0.05;     // rad

enum class Task { kPooH, kPiH };

std::string_view to_string(Task task);
Task task_from_string(std::string_view name);

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// End-effector (and gripped peg tip) pose.
///
/// Angles use the extrinsic fixed-axis XYZ convention: the orientation is
/// Rz(theta_z) * Ry(theta_y) * Rx(theta_x) applied to the world frame.
/// Poses are composed component-wise with actions, so angles are kept as
/// plain numbers; `wrapped()` maps them into (-pi, pi].
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double theta_x = 0.0;
  double theta_y = 0.0;
  double theta_z = 0.0;

  std::array<double, kPoseDim> to_array() const {
    return {x, y, z, theta_x, theta_y, theta_z};
  }
  static Pose from_array(const std::array<double, kPoseDim>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5]};
  }

  bool is_finite() const;
  Pose wrapped() const;

  bool operator==(const Pose&) const = default;
};

double wrap_angle(double angle);

/// Per-step end-effector displacement, a_t = k_{t+1} - k_t.
struct Action {
  std::array<double, kActionDim> delta{};

  double& operator[](int i) { return delta[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return delta[static_cast<std::size_t>(i)]; }

  static double bound(int component) {
    return component < 3 ? kMaxTranslationStep : kMaxRotationStep;
  }

  bool is_finite() const;
  bool within_bounds(double tolerance = 1e-12) const;
  /// Throws ValidationError on NaN/inf or out-of-bound components.
  void validate() const;
  Action clipped() const;
  Action operator-() const;
  Action operator+(const Action& other) const;

  bool operator==(const Action&) const = default;
};

Pose operator+(const Pose& pose, const Action& action);
/// Component-wise k_b - k_a as an (unclipped) action.
Action difference(const Pose& from, const Pose& to);

/// Row-major H x W x 3 image with values in [0, 1].
struct Image {
  int height = 0;
  int width = 0;
  std::vector<float> pixels;

  Image() = default;
  Image(int h, int w) : height(h), width(w), pixels(static_cast<std::size_t>(h * w * 3), 0.0f) {}

  float& at(int row, int col, int channel) {
    return pixels[static_cast<std::size_t>((row * width + col) * 3 + channel)];
  }
  float at(int row, int col, int channel) const {
    return pixels[static_cast<std::size_t>((row * width + col) * 3 + channel)];
  }

  bool operator==(const Image&) const = default;
};

using TactileFeature = std::array<double, kTactileDim>;

struct Observation {
  Pose k;
  Image v;
  TactileFeature c{};

  void validate(int expected_h, int expected_w) const;
  bool operator==(const Observation&) const = default;
};

struct Transition {
  Observation obs;
  Action action;
  double reward = 0.0;
  Observation next_obs;
  bool done = false;
  bool randomized = false;

  bool operator==(const Transition&) const = default;
};

struct Trajectory {
  Task task = Task::kPooH;
  std::string object_id;
  std::int64_t seed = 0;
  std::vector<Transition> transitions;
  std::string env_digest;

  int image_height() const;
  int image_width() const;

  /// Checks the per-transition and chaining invariants. `max_length` caps the
  /// number of transitions (reversed trajectories may exceed the episode
  /// length by one randomized split).
  void validate(std::optional<std::size_t> max_length = std::nullopt) const;

  bool operator==(const Trajectory&) const = default;
};

/// Desired goals of peg and hole.
struct GoalSpec {
  Pose goal_peg;
  Pose goal_hole;

  bool operator==(const GoalSpec&) const = default;
};

}  // namespace pih
