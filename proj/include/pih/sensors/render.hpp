#pragma once

#include <array>
#include <optional>

#include "pih/core/random.hpp"
#include "pih/core/types.hpp"
#include "pih/env/object_catalog.hpp"

namespace pih::sensors {

struct RenderConfig {
  int height = 32;
  int width = 32;
  // Oblique orthographic camera: image columns follow world x, rows follow
  // world y plus `oblique` times the height above `view_z`.
  double view_x = 0.5;
  double view_y = 0.12;
  double view_z = 0.22;
  double half_extent = 0.05;  // metres covered from the image centre to its edge
  double oblique = 0.5;
  int supersample = 3;
  double color_scale_min = 0.8;
  double color_scale_max = 1.2;
  double peg_length = 0.05;
  int peg_slices = 4;
  double goal_marker_radius = 0.004;

  /// Throws std::invalid_argument when H or W < 16 or the colour range is empty.
  void validate() const;
};

/// Per-episode multiplicative colour factors, one per RGB channel.
struct ColorFactors {
  std::array<double, 3> scale{1.0, 1.0, 1.0};
};

ColorFactors draw_color_factors(RandomStream& stream, const RenderConfig& cfg);

struct Scene {
  Pose peg;                 // peg tip
  Pose hole;                // centre of the hole opening on the board surface
  const ObjectPair* pair = nullptr;
  std::optional<Pose> goal_marker;  // drawn when the target is not the hole itself
};

/// Rasterises board, hole opening, optional goal marker and the visible part
/// of the peg with coverage anti-aliasing. Deterministic in its inputs.
Image render(const Scene& scene, const RenderConfig& cfg, const ColorFactors& factors);

/// Continuous pixel coordinates (column, row) of a world point.
std::array<double, 2> project_point(double x, double y, double z, const RenderConfig& cfg);

}  // namespace pih::sensors
