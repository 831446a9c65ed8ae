#pragma once

#include <optional>
#include <vector>

namespace pih::geometry {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Vec2&) const = default;
};

double dot(Vec2 a, Vec2 b);
double cross(Vec2 a, Vec2 b);
double norm(Vec2 v);
Vec2 rotate(Vec2 v, double angle);

/// Convex cross-section in its own frame: a circle or a CCW convex polygon.
class Section {
 public:
  enum class Kind { kCircle, kPolygon };

  static Section circle(double radius);
  /// Vertices are reordered CCW; throws std::invalid_argument if not convex.
  static Section polygon(std::vector<Vec2> vertices);

  Kind kind() const { return kind_; }
  double radius() const { return radius_; }
  const std::vector<Vec2>& vertices() const { return vertices_; }

  /// Support function h(u) = max_{p in section} <p, u> for unit u.
  double support(Vec2 direction) const;
  double circumradius() const;
  /// Euclidean distance from p to the section (0 inside).
  double distance(Vec2 p) const;
  bool contains(Vec2 p, double tolerance = 0.0) const;
  double area() const;
  Vec2 centroid() const;

  /// Polygon approximation (circles become regular n-gons); used by the renderer.
  std::vector<Vec2> outline(int circle_segments = 32) const;

  bool operator==(const Section&) const = default;

 private:
  Kind kind_ = Kind::kCircle;
  double radius_ = 0.0;
  std::vector<Vec2> vertices_;
};

/// Peg section dilated by `clearance` (Minkowski sum with a disc).
struct HoleSection {
  Section base;
  double clearance = 0.0;

  bool contains(Vec2 p, double tolerance = 0.0) const {
    return base.distance(p) <= clearance + tolerance;
  }
};

inline constexpr double kFitTolerance = 1e-12;

/// True if the peg section rotated by `yaw` and translated by `offset`
/// lies inside the hole opening.
bool fits(const Section& peg, const HoleSection& hole, Vec2 offset, double yaw,
          double tolerance = kFitTolerance);

/// Nearest translation (to `offset`) at which the rotated peg fits, or
/// nullopt when no translation fits at this yaw.
std::optional<Vec2> nearest_fit(const Section& peg, const HoleSection& hole, Vec2 offset,
                                double yaw);

/// Largest depth of any point of the rotated, translated peg outside the hole
/// opening (0 when it fits). Used as the overlap measure for the board.
double overlap_depth(const Section& peg, const HoleSection& hole, Vec2 offset, double yaw);

}  // namespace pih::geometry
