#include "pih/env/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace pih::geometry {

double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 v) { return std::hypot(v.x, v.y); }

Vec2 rotate(Vec2 v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

namespace {

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + ab * t));
}

// Signed distance to a convex CCW polygon (negative inside).
double polygon_signed_distance(const std::vector<Vec2>& poly, Vec2 p) {
  bool inside = true;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % poly.size()];
    if (cross(b - a, p - a) < 0.0) inside = false;
    best = std::min(best, segment_distance(p, a, b));
  }
  return inside ? -best : best;
}

double signed_distance(const Section& s, Vec2 p) {
  if (s.kind() == Section::Kind::kCircle) return norm(p) - s.radius();
  return polygon_signed_distance(s.vertices(), p);
}

// Sutherland-Hodgman clip of a convex polygon by the half-plane <t, u> <= b.
std::vector<Vec2> clip(const std::vector<Vec2>& poly, Vec2 u, double b) {
  std::vector<Vec2> out;
  if (poly.empty()) return out;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 cur = poly[i];
    const Vec2 nxt = poly[(i + 1) % poly.size()];
    const double dc = dot(cur, u) - b;
    const double dn = dot(nxt, u) - b;
    if (dc <= 0.0) out.push_back(cur);
    if ((dc < 0.0 && dn > 0.0) || (dc > 0.0 && dn < 0.0)) {
      const double t = dc / (dc - dn);
      out.push_back(cur + (nxt - cur) * t);
    }
  }
  return out;
}

Vec2 project_onto_convex(const std::vector<Vec2>& poly, Vec2 p) {
  if (poly.size() == 1) return poly[0];
  if (polygon_signed_distance(poly, p) <= 0.0) return p;
  double best = std::numeric_limits<double>::infinity();
  Vec2 best_pt = poly[0];
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % poly.size()];
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const Vec2 q = a + ab * t;
    const double d = norm(p - q);
    if (d < best) {
      best = d;
      best_pt = q;
    }
  }
  return best_pt;
}

}  // namespace

Section Section::circle(double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("circle radius must be positive");
  Section s;
  s.kind_ = Kind::kCircle;
  s.radius_ = radius;
  return s;
}

Section Section::polygon(std::vector<Vec2> vertices) {
  if (vertices.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
  double signed_area = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    signed_area += cross(vertices[i], vertices[(i + 1) % vertices.size()]);
  }
  if (signed_area < 0.0) std::reverse(vertices.begin(), vertices.end());
  if (std::abs(signed_area) <= 0.0) throw std::invalid_argument("degenerate polygon");
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const Vec2 a = vertices[i];
    const Vec2 b = vertices[(i + 1) % vertices.size()];
    const Vec2 c = vertices[(i + 2) % vertices.size()];
    if (cross(b - a, c - b) < -1e-15) throw std::invalid_argument("polygon is not convex");
  }
  Section s;
  s.kind_ = Kind::kPolygon;
  s.vertices_ = std::move(vertices);
  for (const Vec2& v : s.vertices_) s.radius_ = std::max(s.radius_, norm(v));
  return s;
}

double Section::support(Vec2 u) const {
  if (kind_ == Kind::kCircle) return radius_ * norm(u);
  double best = -std::numeric_limits<double>::infinity();
  for (const Vec2& v : vertices_) best = std::max(best, dot(v, u));
  return best;
}

double Section::circumradius() const { return radius_; }

double Section::distance(Vec2 p) const { return std::max(0.0, signed_distance(*this, p)); }

bool Section::contains(Vec2 p, double tolerance) const {
  return signed_distance(*this, p) <= tolerance;
}

double Section::area() const {
  if (kind_ == Kind::kCircle) return std::numbers::pi * radius_ * radius_;
  double a = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    a += cross(vertices_[i], vertices_[(i + 1) % vertices_.size()]);
  }
  return 0.5 * a;
}

Vec2 Section::centroid() const {
  if (kind_ == Kind::kCircle) return {0.0, 0.0};
  double a = 0.0;
  Vec2 c{};
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const Vec2 p = vertices_[i];
    const Vec2 q = vertices_[(i + 1) % vertices_.size()];
    const double w = cross(p, q);
    a += w;
    c = c + (p + q) * w;
  }
  return c * (1.0 / (3.0 * a));
}

std::vector<Vec2> Section::outline(int circle_segments) const {
  if (kind_ == Kind::kPolygon) return vertices_;
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(circle_segments));
  for (int i = 0; i < circle_segments; ++i) {
    const double a = 2.0 * std::numbers::pi * i / circle_segments;
    out.push_back({radius_ * std::cos(a), radius_ * std::sin(a)});
  }
  return out;
}

bool fits(const Section& peg, const HoleSection& hole, Vec2 offset, double yaw, double tolerance) {
  return overlap_depth(peg, hole, offset, yaw) <= tolerance;
}

double overlap_depth(const Section& peg, const HoleSection& hole, Vec2 offset, double yaw) {
  if (peg.kind() == Section::Kind::kCircle) {
    return std::max(0.0, signed_distance(hole.base, offset) + peg.radius() - hole.clearance);
  }
  double worst = 0.0;
  for (const Vec2& v : peg.vertices()) {
    const Vec2 p = rotate(v, yaw) + offset;
    worst = std::max(worst, hole.base.distance(p) - hole.clearance);
  }
  return worst;
}

std::optional<Vec2> nearest_fit(const Section& peg, const HoleSection& hole, Vec2 offset,
                                double yaw) {
  if (fits(peg, hole, offset, yaw)) return offset;

  if (peg.kind() == Section::Kind::kCircle && hole.base.kind() == Section::Kind::kCircle) {
    const double r = hole.base.radius() + hole.clearance - peg.radius();
    if (r < 0.0) return std::nullopt;
    const double n = norm(offset);
    return offset * (r / n);
  }

  // Feasible translations form a convex set bounded by
  // <t, u> <= h_hole(u) + clearance - h_peg(R(yaw) u) for every direction u.
  constexpr int kDirections = 128;
  std::vector<Vec2> directions;
  directions.reserve(kDirections + 16);
  for (int i = 0; i < kDirections; ++i) {
    const double a = 2.0 * std::numbers::pi * i / kDirections;
    directions.push_back({std::cos(a), std::sin(a)});
  }
  auto add_edge_normals = [&](const std::vector<Vec2>& poly, double angle) {
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Vec2 e = rotate(poly[(i + 1) % poly.size()] - poly[i], angle);
      const double len = norm(e);
      if (len > 0.0) directions.push_back({e.y / len, -e.x / len});
    }
  };
  if (hole.base.kind() == Section::Kind::kPolygon) add_edge_normals(hole.base.vertices(), 0.0);
  if (peg.kind() == Section::Kind::kPolygon) add_edge_normals(peg.vertices(), yaw);

  std::vector<Vec2> region{{-1.0, -1.0}, {1.0, -1.0}, {1.0, 1.0}, {-1.0, 1.0}};
  for (const Vec2& u : directions) {
    const double bound = hole.base.support(u) + hole.clearance - peg.support(rotate(u, -yaw));
    region = clip(region, u, bound);
    if (region.empty()) return std::nullopt;
  }

  Vec2 centre{};
  for (const Vec2& v : region) centre = centre + v;
  centre = centre * (1.0 / static_cast<double>(region.size()));
  if (!fits(peg, hole, centre, yaw)) return std::nullopt;

  Vec2 candidate = project_onto_convex(region, offset);
  if (fits(peg, hole, candidate, yaw)) return candidate;
  // The half-plane set over-approximates the feasible set; walk toward the
  // centre until the exact test passes.
  double lo = 0.0;  // fraction toward centre that still fails
  double hi = 1.0;  // fraction that fits
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (fits(peg, hole, candidate + (centre - candidate) * mid, yaw)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return candidate + (centre - candidate) * hi;
}

}  // namespace pih::geometry
