#include "pih/sensors/render.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace pih::sensors {

using geometry::Vec2;

void RenderConfig::validate() const {
  if (height < 16 || width < 16) throw std::invalid_argument("image must be at least 16x16");
  if (!(color_scale_min <= color_scale_max) || color_scale_min < 0.0) {
    throw std::invalid_argument("invalid colour randomisation range");
  }
  if (!(half_extent > 0.0) || supersample < 1 || peg_slices < 1) {
    throw std::invalid_argument("invalid camera parameters");
  }
}

ColorFactors draw_color_factors(RandomStream& stream, const RenderConfig& cfg) {
  ColorFactors f;
  for (double& s : f.scale) {
    s = stream.uniform(RandomStream::Channel::kDomainRand, cfg.color_scale_min, cfg.color_scale_max);
  }
  return f;
}

std::array<double, 2> project_point(double x, double y, double z, const RenderConfig& cfg) {
  const double sx = 0.5 * cfg.width / cfg.half_extent;
  const double sy = 0.5 * cfg.height / cfg.half_extent;
  const double col = 0.5 * cfg.width + (x - cfg.view_x) * sx;
  const double row = 0.5 * cfg.height - ((y - cfg.view_y) + cfg.oblique * (z - cfg.view_z)) * sy;
  return {col, row};
}

namespace {

constexpr std::array<double, 3> kBoardColor{0.55, 0.52, 0.48};
constexpr std::array<double, 3> kHoleColor{0.06, 0.06, 0.07};
constexpr std::array<double, 3> kGoalColor{0.15, 0.8, 0.25};
constexpr double kShadowShade = 0.6;

struct Layer {
  geometry::Section shape;     // in the layer frame
  double cx, cy, z, yaw;       // world placement
  double dilation = 0.0;       // hole openings are dilated sections
  std::array<double, 3> color;
  double col_lo, col_hi, row_lo, row_hi;  // pixel bounding box
};

std::array<double, 3> scaled(const std::array<double, 3>& c, const ColorFactors& f) {
  return {std::clamp(c[0] * f.scale[0], 0.0, 1.0), std::clamp(c[1] * f.scale[1], 0.0, 1.0),
          std::clamp(c[2] * f.scale[2], 0.0, 1.0)};
}

Layer make_layer(const geometry::Section& shape, double cx, double cy, double z, double yaw,
                 double dilation, const std::array<double, 3>& color, const RenderConfig& cfg) {
  Layer l{shape, cx, cy, z, yaw, dilation, color, 0, 0, 0, 0};
  const double r = shape.circumradius() + dilation;
  const auto a = project_point(cx - r, cy - r, z, cfg);
  const auto b = project_point(cx + r, cy + r, z, cfg);
  l.col_lo = std::min(a[0], b[0]);
  l.col_hi = std::max(a[0], b[0]);
  l.row_lo = std::min(a[1], b[1]);
  l.row_hi = std::max(a[1], b[1]);
  return l;
}

}  // namespace

Image render(const Scene& scene, const RenderConfig& cfg, const ColorFactors& factors) {
  cfg.validate();
  if (scene.pair == nullptr) throw std::invalid_argument("scene has no object pair");

  const double surface = scene.hole.z;
  const auto board = scaled(kBoardColor, factors);

  // Back to front.
  std::vector<Layer> layers;
  layers.push_back(make_layer(scene.pair->peg_section, scene.hole.x, scene.hole.y, surface,
                              scene.hole.theta_z, scene.pair->clearance, kHoleColor, cfg));
  if (scene.goal_marker) {
    // Drop shadow on the board: with the oblique camera the marker alone
    // does not separate y from height.
    layers.push_back(make_layer(geometry::Section::circle(cfg.goal_marker_radius), scene.goal_marker->x,
                                scene.goal_marker->y, surface, 0.0, 0.0,
                                {board[0] * kShadowShade, board[1] * kShadowShade, board[2] * kShadowShade}, cfg));
    layers.push_back(make_layer(geometry::Section::circle(cfg.goal_marker_radius),
                                scene.goal_marker->x, scene.goal_marker->y, scene.goal_marker->z,
                                0.0, 0.0, scaled(kGoalColor, factors), cfg));
  }
  const auto peg_color = scaled(scene.pair->color, factors);
  for (int s = 0; s < cfg.peg_slices; ++s) {
    const double frac = cfg.peg_slices == 1 ? 1.0 : static_cast<double>(s) / (cfg.peg_slices - 1);
    const double h = frac * cfg.peg_length;
    const double z = scene.peg.z + h;
    if (z < surface) continue;  // hidden inside the hole
    const double shade = 0.7 + 0.3 * frac;
    const double cx = scene.peg.x + h * scene.peg.theta_y;
    const double cy = scene.peg.y - h * scene.peg.theta_x;
    layers.push_back(make_layer(scene.pair->peg_section, cx, cy, z, scene.peg.theta_z, 0.0,
                                {peg_color[0] * shade, peg_color[1] * shade, peg_color[2] * shade},
                                cfg));
  }

  Image img(cfg.height, cfg.width);
  const int ss = cfg.supersample;
  const double inv = 1.0 / (ss * ss);
  const double wx = cfg.half_extent / (0.5 * cfg.width);
  const double wy = cfg.half_extent / (0.5 * cfg.height);
  for (int row = 0; row < cfg.height; ++row) {
    for (int col = 0; col < cfg.width; ++col) {
      std::array<double, 3> acc{0.0, 0.0, 0.0};
      for (int sr = 0; sr < ss; ++sr) {
        for (int sc = 0; sc < ss; ++sc) {
          const double pc = col + (sc + 0.5) / ss;
          const double pr = row + (sr + 0.5) / ss;
          const std::array<double, 3>* color = &board;
          for (auto it = layers.rbegin(); it != layers.rend(); ++it) {
            if (pc < it->col_lo || pc > it->col_hi || pr < it->row_lo || pr > it->row_hi) continue;
            const double x = cfg.view_x + (pc - 0.5 * cfg.width) * wx;
            const double y = cfg.view_y + (0.5 * cfg.height - pr) * wy - cfg.oblique * (it->z - cfg.view_z);
            const Vec2 local = geometry::rotate({x - it->cx, y - it->cy}, -it->yaw);
            if (it->shape.distance(local) <= it->dilation) {
              color = &it->color;
              break;
            }
          }
          for (int ch = 0; ch < 3; ++ch) acc[static_cast<std::size_t>(ch)] += (*color)[static_cast<std::size_t>(ch)];
        }
      }
      for (int ch = 0; ch < 3; ++ch) {
        img.at(row, col, ch) = static_cast<float>(std::clamp(acc[static_cast<std::size_t>(ch)] * inv, 0.0, 1.0));
      }
    }
  }
  return img;
}

}  // namespace pih::sensors
