#include "pih/sensors/tactile.hpp"

#include <algorithm>
#include <cmath>

namespace pih::sensors {

using geometry::Vec2;
using Ch = RandomStream::Channel;

std::vector<Vec2> marker_grid(const TactileConfig& cfg) {
  std::vector<Vec2> grid;
  grid.reserve(static_cast<std::size_t>(cfg.markers()));
  const double r0 = 0.5 * (cfg.grid_rows - 1);
  const double c0 = 0.5 * (cfg.grid_cols - 1);
  for (int r = 0; r < cfg.grid_rows; ++r) {
    for (int c = 0; c < cfg.grid_cols; ++c) {
      grid.push_back({(c - c0) * cfg.marker_spacing, (r - r0) * cfg.marker_spacing});
    }
  }
  return grid;
}

MarkerField tactile_flow(const FingerLoad& load, const TactileConfig& cfg, RandomStream* noise) {
  MarkerField field;
  field.rest = marker_grid(cfg);
  field.displacement.resize(field.rest.size());
  for (std::size_t i = 0; i < field.rest.size(); ++i) {
    // Grid is centred on the pad, so p - centre is the rest position itself.
    const Vec2 rel = field.rest[i];
    const Vec2 dilate = rel * (cfg.dilate_gain * load.normal);
    const Vec2 shear{cfg.shear_gain * load.tangential[0], cfg.shear_gain * load.tangential[1]};
    const Vec2 twist = Vec2{-rel.y, rel.x} * (cfg.twist_gain * load.torque);
    Vec2 d = dilate + shear + twist;
    if (noise != nullptr && cfg.noise_sigma > 0.0) {
      d.x += noise->normal(Ch::kDomainRand, 0.0, cfg.noise_sigma);
      d.y += noise->normal(Ch::kDomainRand, 0.0, cfg.noise_sigma);
    }
    const double mag = geometry::norm(d);
    if (mag > cfg.displacement_cap) d = d * (cfg.displacement_cap / mag);
    field.displacement[i] = d;
  }
  return field;
}

std::array<FingerLoad, kFingers> finger_loads(const ContactWrench& w, const TactileConfig& cfg) {
  const double fx = w.force[0];
  const double fy = w.force[1];
  const double fz = w.force[2] + w.friction;
  const double yaw_shear = w.torque_z / (2.0 * cfg.finger_half_width);
  const double lever_twist = 0.5 * cfg.grip_lever * fx;

  std::array<FingerLoad, kFingers> loads;
  loads[0].normal = std::max(0.0, fy);
  loads[0].tangential = {0.5 * fx - yaw_shear, 0.5 * fz};
  loads[0].torque = -lever_twist;
  loads[1].normal = std::max(0.0, -fy);
  loads[1].tangential = {0.5 * fx + yaw_shear, 0.5 * fz};
  loads[1].torque = lever_twist;
  return loads;
}

std::vector<double> raw_flow(const std::array<MarkerField, kFingers>& fields) {
  std::vector<double> out;
  for (const auto& f : fields) {
    for (const Vec2& d : f.displacement) {
      out.push_back(d.x);
      out.push_back(d.y);
    }
  }
  return out;
}

std::vector<double> sense_raw(const ContactWrench& wrench, const TactileConfig& cfg,
                              RandomStream* noise) {
  const auto loads = finger_loads(wrench, cfg);
  std::array<MarkerField, kFingers> fields;
  for (int i = 0; i < kFingers; ++i) {
    fields[static_cast<std::size_t>(i)] = tactile_flow(loads[static_cast<std::size_t>(i)], cfg, noise);
  }
  return raw_flow(fields);
}

std::vector<std::vector<double>> calibration_frames(const TactileConfig& cfg, RandomStream& stream,
                                                    int objects, int frames_per_object) {
  // Indenter pose -> pad load. Press depth along the pad normal sets the
  // normal force; in-plane offset and tilt drag the gel; spin twists it.
  constexpr double kPressStiffness = 1000.0;  // N/m
  constexpr double kDragStiffness = 100.0;    // N/m
  constexpr double kTiltShear = 2.0;          // N/rad
  constexpr double kSpinTorque = 0.05;        // N m/rad

  std::vector<std::vector<double>> frames;
  frames.reserve(static_cast<std::size_t>(objects * frames_per_object));
  for (int obj = 0; obj < objects; ++obj) {
    const double scale = 0.5 + static_cast<double>(obj) / std::max(1, objects - 1);
    for (int f = 0; f < frames_per_object; ++f) {
      std::array<MarkerField, kFingers> fields;
      for (int finger = 0; finger < kFingers; ++finger) {
        const double tx = stream.uniform(Ch::kDomainRand, -0.01, 0.01);
        const double ty = stream.uniform(Ch::kDomainRand, -0.01, 0.01);
        const double tz = stream.uniform(Ch::kDomainRand, -0.0005, 0.005);
        const double rx = stream.uniform(Ch::kDomainRand, -0.2, 0.2);
        const double ry = stream.uniform(Ch::kDomainRand, -0.2, 0.2);
        const double rz = stream.uniform(Ch::kDomainRand, -0.5, 0.5);
        FingerLoad load;
        if (tz > 0.0) {
          load.normal = scale * kPressStiffness * tz;
          load.tangential = {scale * (kDragStiffness * tx + kTiltShear * ry),
                             scale * (kDragStiffness * ty - kTiltShear * rx)};
          load.torque = scale * kSpinTorque * rz;
        }
        fields[static_cast<std::size_t>(finger)] = tactile_flow(load, cfg, &stream);
      }
      frames.push_back(raw_flow(fields));
    }
  }
  return frames;
}

}  // namespace pih::sensors
