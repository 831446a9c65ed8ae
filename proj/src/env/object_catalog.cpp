#include "pih/env/object_catalog.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "pih/core/base64.hpp"

namespace pih {

bool is_allowed_clearance(double clearance) {
  for (double c : kAllowedClearances) {
    if (c == clearance) return true;
  }
  return false;
}

ObjectPair ObjectPair::with_clearance(double c) const {
  ObjectPair out = *this;
  out.clearance = c;
  out.validate();
  return out;
}

void ObjectPair::validate() const {
  if (!is_allowed_clearance(clearance)) {
    throw std::invalid_argument("object '" + name + "': clearance " + format_double(clearance) +
                                " is not one of 0.0005, 0.001, 0.002");
  }
  for (double ch : color) {
    if (!(ch >= 0.0 && ch <= 1.0)) {
      throw std::invalid_argument("object '" + name + "': colour outside [0,1]");
    }
  }
}

namespace {

double require_number(const std::string& token, int line_no) {
  const auto v = parse_double(token);
  if (!v) {
    throw std::invalid_argument("catalog line " + std::to_string(line_no) + ": bad number '" +
                                token + "'");
  }
  return *v;
}

geometry::Section parse_polygon(const std::string& text, int line_no) {
  std::vector<geometry::Vec2> vertices;
  std::stringstream ss(text);
  std::string vertex;
  while (std::getline(ss, vertex, ';')) {
    const auto comma = vertex.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("catalog line " + std::to_string(line_no) +
                                  ": vertex must be x,y");
    }
    vertices.push_back({require_number(vertex.substr(0, comma), line_no),
                        require_number(vertex.substr(comma + 1), line_no)});
  }
  return geometry::Section::polygon(std::move(vertices));
}

std::vector<geometry::Vec2> regular_polygon(int n, double circumradius, double phase) {
  std::vector<geometry::Vec2> v;
  for (int i = 0; i < n; ++i) {
    const double a = phase + 2.0 * std::numbers::pi * i / n;
    v.push_back({circumradius * std::cos(a), circumradius * std::sin(a)});
  }
  return v;
}

}  // namespace

ObjectCatalog ObjectCatalog::parse(std::istream& in) {
  ObjectCatalog catalog;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() != 8) {
      throw std::invalid_argument("catalog line " + std::to_string(line_no) +
                                  ": expected 8 fields, got " + std::to_string(tok.size()));
    }
    ObjectPair pair;
    pair.name = tok[0];
    if (tok[1] == "circle") {
      pair.peg_section = geometry::Section::circle(require_number(tok[2], line_no));
    } else if (tok[1] == "polygon") {
      pair.peg_section = parse_polygon(tok[2], line_no);
    } else {
      throw std::invalid_argument("catalog line " + std::to_string(line_no) + ": unknown kind '" +
                                  tok[1] + "'");
    }
    pair.clearance = require_number(tok[3], line_no);
    for (int i = 0; i < 3; ++i) pair.color[static_cast<std::size_t>(i)] = require_number(tok[4 + static_cast<std::size_t>(i)], line_no);
    if (tok[7] == "seen") {
      pair.seen = true;
    } else if (tok[7] != "unseen") {
      throw std::invalid_argument("catalog line " + std::to_string(line_no) +
                                  ": last field must be seen or unseen");
    }
    pair.validate();
    for (const auto& existing : catalog.pairs_) {
      if (existing.name == pair.name) {
        throw std::invalid_argument("catalog line " + std::to_string(line_no) +
                                    ": duplicate name '" + pair.name + "'");
      }
    }
    catalog.pairs_.push_back(std::move(pair));
  }
  return catalog;
}

ObjectCatalog ObjectCatalog::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open catalog " + path.string());
  return parse(in);
}

ObjectCatalog ObjectCatalog::default_catalog() {
  ObjectCatalog c;
  const std::array<double, 3> red{0.85, 0.12, 0.1};
  const std::array<double, 3> white{0.92, 0.92, 0.9};
  auto add = [&c](std::string name, geometry::Section s, std::array<double, 3> color, bool seen) {
    c.pairs_.push_back({std::move(name), std::move(s), 0.001, color, seen});
  };
  add("cube", geometry::Section::polygon(regular_polygon(4, 0.01 * std::numbers::sqrt2, std::numbers::pi / 4)),
      red, true);
  add("cylinder", geometry::Section::circle(0.01), red, false);
  add("hexagon", geometry::Section::polygon(regular_polygon(6, 0.011, 0.0)), red, false);
  add("white_cube",
      geometry::Section::polygon(regular_polygon(4, 0.01 * std::numbers::sqrt2, std::numbers::pi / 4)),
      white, false);
  // D-shape: a half disc of radius 10 mm joined to a 10 x 20 mm rectangle.
  std::vector<geometry::Vec2> d_shape{{-0.01, -0.01}, {0.0, -0.01}};
  for (int i = 1; i < 8; ++i) {
    const double a = -std::numbers::pi / 2 + std::numbers::pi * i / 8;
    d_shape.push_back({0.01 * std::cos(a), 0.01 * std::sin(a)});
  }
  d_shape.push_back({0.0, 0.01});
  d_shape.push_back({-0.01, 0.01});
  add("d_shape", geometry::Section::polygon(std::move(d_shape)), red, true);
  add("scalene_triangle",
      geometry::Section::polygon({{-0.011, -0.008}, {0.013, -0.006}, {-0.003, 0.012}}), red, false);
  return c;
}

void ObjectCatalog::write(std::ostream& out) const {
  out << "# name kind shape clearance r g b seen\n";
  for (const auto& p : pairs_) {
    out << p.name << ' ';
    if (p.peg_section.kind() == geometry::Section::Kind::kCircle) {
      out << "circle " << format_double(p.peg_section.radius());
    } else {
      out << "polygon ";
      const auto& v = p.peg_section.vertices();
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out << ';';
        out << format_double(v[i].x) << ',' << format_double(v[i].y);
      }
    }
    out << ' ' << format_double(p.clearance) << ' ' << format_double(p.color[0]) << ' '
        << format_double(p.color[1]) << ' ' << format_double(p.color[2]) << ' '
        << (p.seen ? "seen" : "unseen") << '\n';
  }
}

const ObjectPair& ObjectCatalog::get(const std::string& name) const {
  for (const auto& p : pairs_) {
    if (p.name == name) return p;
  }
  throw std::out_of_range("no object pair named '" + name + "'");
}

std::vector<std::string> ObjectCatalog::seen_names() const {
  std::vector<std::string> out;
  for (const auto& p : pairs_) {
    if (p.seen) out.push_back(p.name);
  }
  return out;
}

std::vector<std::string> ObjectCatalog::unseen_names() const {
  std::vector<std::string> out;
  for (const auto& p : pairs_) {
    if (!p.seen) out.push_back(p.name);
  }
  return out;
}

}  // namespace pih
