#pragma once

#include <array>
#include <vector>

#include "pih/core/random.hpp"
#include "pih/env/geometry.hpp"

namespace pih::sensors {

struct TactileConfig {
  int grid_rows = 7;
  int grid_cols = 7;
  double marker_spacing = 0.0015;  // m
  double dilate_gain = 1e-4;       // c_d, m/N
  double shear_gain = 2e-4;        // c_s, m/N
  double twist_gain = 5e-3;        // c_tau, m/(N m)
  double noise_sigma = 1e-5;       // sigma_m, m
  double displacement_cap = 0.002; // elastomer limit, m
  double finger_half_width = 0.012;  // finger contact pads at y = +-half width, m
  double grip_lever = 0.03;        // grip point to peg tip, m

  int markers() const { return grid_rows * grid_cols; }
  /// Raw flow dimension of one finger (x/y displacement per marker).
  int finger_dim() const { return 2 * markers(); }
};

inline constexpr int kFingers = 2;

/// Load seen by one finger pad.
struct FingerLoad {
  double normal = 0.0;                    // N, >= 0
  std::array<double, 2> tangential{};     // N, in pad plane
  double torque = 0.0;                    // N m about the pad normal
};

struct MarkerField {
  std::vector<geometry::Vec2> rest;          // N x 2, sensor-plane metres
  std::vector<geometry::Vec2> displacement;  // N x 2, metres
};

/// Marker rest grid centred on the pad, row-major.
std::vector<geometry::Vec2> marker_grid(const TactileConfig& cfg);

/// Superposition of dilate, shear and twist primitives plus optional
/// Gaussian marker noise (`noise` may be null for a noise-free field).
/// Each marker displacement is capped at `displacement_cap` in magnitude.
MarkerField tactile_flow(const FingerLoad& load, const TactileConfig& cfg,
                         RandomStream* noise = nullptr);

/// Contact wrench acting on the peg, expressed in the gripper frame.
struct ContactWrench {
  std::array<double, 3> force{};  // N
  double friction = 0.0;          // N along z, opposing insertion motion
  double torque_z = 0.0;          // N m about the peg axis
};

/// Distributes a peg wrench onto the two finger pads. Finger 0 sits at +y
/// (left), finger 1 at -y (right).
std::array<FingerLoad, kFingers> finger_loads(const ContactWrench& wrench, const TactileConfig& cfg);

/// Raw flow vector: finger 0 markers then finger 1 markers, each marker as
/// (dx, dy). Length kFingers * cfg.finger_dim().
std::vector<double> raw_flow(const std::array<MarkerField, kFingers>& fields);

std::vector<double> sense_raw(const ContactWrench& wrench, const TactileConfig& cfg,
                              RandomStream* noise);

/// Calibration frames: `objects` indenters with `frames_per_object` random
/// relative poses each (translations in [-1,-1,-0.05]..[1,1,0.5] cm,
/// rotations in [-0.2,-0.2,-0.5]..[0.2,0.2,0.5] rad) pressed into each pad.
std::vector<std::vector<double>> calibration_frames(const TactileConfig& cfg, RandomStream& stream,
                                                    int objects = 21, int frames_per_object = 100);

}  // namespace pih::sensors
