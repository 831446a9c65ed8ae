#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pih/env/geometry.hpp"

namespace pih {

inline constexpr std::array<double, 3> kAllowedClearances{0.0005, 0.001, 0.002};

bool is_allowed_clearance(double clearance);

/// A peg and its matching hole: the hole opening is the peg section dilated
/// by the clearance.
struct ObjectPair {
  std::string name;
  geometry::Section peg_section;
  double clearance = 0.001;
  std::array<double, 3> color{1.0, 0.0, 0.0};
  bool seen = false;

  geometry::HoleSection hole_section() const { return {peg_section, clearance}; }
  ObjectPair with_clearance(double clearance) const;
  /// Throws std::invalid_argument on a clearance outside the allowed set or a
  /// colour outside [0,1].
  void validate() const;
};

/// Catalog text format, one pair per line ('#' starts a comment):
///   name kind shape clearance r g b seen|unseen
/// where kind is `circle` (shape = radius) or `polygon`
/// (shape = x0,y0;x1,y1;... in metres).
class ObjectCatalog {
 public:
  static ObjectCatalog parse(std::istream& in);
  static ObjectCatalog load(const std::filesystem::path& path);
  /// Six desk pairs: cube, cylinder, hexagon, white_cube, d_shape,
  /// scalene_triangle; cube and d_shape are marked seen.
  static ObjectCatalog default_catalog();

  void write(std::ostream& out) const;

  const std::vector<ObjectPair>& pairs() const { return pairs_; }
  const ObjectPair& get(const std::string& name) const;
  std::vector<std::string> seen_names() const;
  std::vector<std::string> unseen_names() const;

 private:
  std::vector<ObjectPair> pairs_;
};

}  // namespace pih
