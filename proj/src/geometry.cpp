#include "roughlayer/geometry.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace roughlayer {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

constexpr int kProfileSamples = 4096;

}  // namespace

const char* to_string(BoundaryLabel label) {
  switch (label) {
    case BoundaryLabel::Bottom: return "bottom";
    case BoundaryLabel::Top: return "top";
    case BoundaryLabel::Left: return "left";
    case BoundaryLabel::Right: return "right";
    case BoundaryLabel::ArtificialTop: return "artificial_top";
    case BoundaryLabel::ArtificialSide: return "artificial_side";
    case BoundaryLabel::Interface: return "interface";
  }
  return "unknown";
}

std::optional<BoundaryLabel> label_from_string(std::string_view name) {
  for (BoundaryLabel l : {BoundaryLabel::Bottom, BoundaryLabel::Top, BoundaryLabel::Left,
                          BoundaryLabel::Right, BoundaryLabel::ArtificialTop,
                          BoundaryLabel::ArtificialSide, BoundaryLabel::Interface}) {
    if (name == to_string(l)) return l;
  }
  return std::nullopt;
}

double RoughProfile::value(double t) const {
  if (!oscillation) return amplitude_offset;
  double frac = t - std::floor(t);
  return amplitude_offset + oscillation(frac);
}

RoughProfile RoughProfile::reflected() const {
  RoughProfile r = *this;
  if (oscillation) {
    auto osc = oscillation;
    r.oscillation = [osc](double t) { return osc(1.0 - t); };
  }
  return r;
}

void RoughProfile::validate() const {
  double lo = std::numeric_limits<double>::max();
  double hi = std::numeric_limits<double>::lowest();
  for (int i = 0; i <= kProfileSamples; ++i) {
    double v = value(static_cast<double>(i) / kProfileSamples);
    if (!std::isfinite(v)) fail("rough profile: non-finite value");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi > 1e-12) fail("rough profile: must be nonpositive, max value " + std::to_string(hi));
  if (lo < -100.0) fail("rough profile: unbounded below (min " + std::to_string(lo) + ")");
  if (std::abs(value(0.0) - value(1.0)) > 1e-12) fail("rough profile: f(0) != f(1)");
}

double RoughProfile::min_value() const {
  double lo = std::numeric_limits<double>::max();
  for (int i = 0; i <= kProfileSamples; ++i)
    lo = std::min(lo, value(static_cast<double>(i) / kProfileSamples));
  return lo;
}

double RoughProfile::max_value() const {
  double hi = std::numeric_limits<double>::lowest();
  for (int i = 0; i <= kProfileSamples; ++i)
    hi = std::max(hi, value(static_cast<double>(i) / kProfileSamples));
  return hi;
}

RoughProfile RoughProfile::sine() {
  RoughProfile p;
  p.amplitude_offset = -1.0;
  p.oscillation = [](double t) { return 0.5 * std::sin(2.0 * std::numbers::pi * t); };
  p.lipschitz = std::numbers::pi;
  return p;
}

RoughProfile RoughProfile::cosine() {
  RoughProfile p;
  p.amplitude_offset = -1.0;
  p.oscillation = [](double t) { return 0.5 * std::cos(2.0 * std::numbers::pi * t); };
  p.lipschitz = std::numbers::pi;
  return p;
}

RoughProfile RoughProfile::flat() { return constant(-1.0); }

RoughProfile RoughProfile::constant(double c) {
  RoughProfile p;
  p.amplitude_offset = c;
  p.lipschitz = 0.0;
  return p;
}

void DomainSpec::validate() const {
  profile.validate();
  switch (kind) {
    case DomainKind::RoughFull:
    case DomainKind::Sublayer:
      if (!(epsilon > 0.0 && epsilon <= 1.0)) fail("domain spec: epsilon must lie in (0, 1]");
      break;
    case DomainKind::CellTruncated:
    case DomainKind::QuarterPlaneIn:
    case DomainKind::QuarterPlaneOut:
      if (!(truncation_L >= 2.0)) fail("domain spec: truncation_L must be >= 2");
      break;
    case DomainKind::UnitSquare:
      break;
  }
}

void GradingSpec::validate() const {
  if (!(background_h > 0.0)) fail("grading: background_h must be positive");
  if (!(target_h_min > 0.0 && target_h_min <= background_h))
    fail("grading: need 0 < target_h_min <= background_h");
  if (!(ratio >= 0.3 && ratio <= 0.9)) fail("grading: ratio must lie in [0.3, 0.9]");
}

double GradingSpec::size_at(double r) const {
  double floor_frac = target_h_min / background_h;
  if (r <= 0.0) return target_h_min;
  // grows like r away from the corner, so the far field is left alone
  double steps = std::ceil(std::log(r / background_h) / std::log(ratio));
  return background_h * std::max(std::pow(ratio, steps), floor_frac);
}

double triangle_area(Vec2 a, Vec2 b, Vec2 c) { return 0.5 * cross(b - a, c - a); }

double triangle_diameter(Vec2 a, Vec2 b, Vec2 c) {
  return std::max({norm(b - a), norm(c - b), norm(a - c)});
}

double triangle_quality(Vec2 a, Vec2 b, Vec2 c) {
  double la = norm(c - b), lb = norm(a - c), lc = norm(b - a);
  double area = std::abs(triangle_area(a, b, c));
  if (area <= 0.0) return 0.0;
  double s = 0.5 * (la + lb + lc);
  double r_in = area / s;
  double r_circ = la * lb * lc / (4.0 * area);
  return 2.0 * r_in / r_circ;
}

double Mesh::h_min() const {
  double h = std::numeric_limits<double>::max();
  for (const auto& t : triangles)
    h = std::min(h, triangle_diameter(vertices[t[0]], vertices[t[1]], vertices[t[2]]));
  return h;
}

double Mesh::h_max() const {
  double h = 0.0;
  for (const auto& t : triangles)
    h = std::max(h, triangle_diameter(vertices[t[0]], vertices[t[1]], vertices[t[2]]));
  return h;
}

double Mesh::min_quality() const {
  double q = std::numeric_limits<double>::max();
  for (const auto& t : triangles)
    q = std::min(q, triangle_quality(vertices[t[0]], vertices[t[1]], vertices[t[2]]));
  return q;
}

std::array<Vec2, 2> Mesh::bounding_box() const {
  Vec2 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
  Vec2 hi{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
  for (const auto& v : vertices) {
    lo.x = std::min(lo.x, v.x);
    lo.y = std::min(lo.y, v.y);
    hi.x = std::max(hi.x, v.x);
    hi.y = std::max(hi.y, v.y);
  }
  return {lo, hi};
}

namespace {

using EdgeKey = std::pair<int, int>;

EdgeKey make_edge(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

}  // namespace

void validate_mesh(const Mesh& mesh) {
  const int nv = mesh.vertex_count();
  if (nv < 3 || mesh.triangles.empty()) fail("mesh validation: empty mesh");

  std::map<EdgeKey, int> edge_use;
  for (size_t ti = 0; ti < mesh.triangles.size(); ++ti) {
    const auto& t = mesh.triangles[ti];
    for (int k = 0; k < 3; ++k) {
      if (t[k] < 0 || t[k] >= nv)
        fail("mesh validation: triangle " + std::to_string(ti) + " has out-of-range vertex");
      edge_use[make_edge(t[k], t[(k + 1) % 3])] += 1;
    }
    double area = triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
    if (!(area > 0.0))
      fail("mesh validation: triangle " + std::to_string(ti) +
           " has nonpositive signed area " + std::to_string(area));
  }

  std::map<EdgeKey, int> label_count;
  for (const auto& be : mesh.boundary_edges) {
    if (be.a < 0 || be.a >= nv || be.b < 0 || be.b >= nv)
      fail("mesh validation: labeled edge has out-of-range vertex");
    label_count[make_edge(be.a, be.b)] += 1;
  }

  for (const auto& [edge, uses] : edge_use) {
    if (uses > 2)
      fail("mesh validation: edge shared by " + std::to_string(uses) + " triangles");
    const int labels = label_count.count(edge) ? label_count.at(edge) : 0;
    if (uses == 2 && labels != 0) fail("mesh validation: interior edge carries a label");
    if (uses == 1 && labels != 1)
      fail("mesh validation: boundary edge (" + std::to_string(edge.first) + "," +
           std::to_string(edge.second) + ") carries " + std::to_string(labels) +
           " labels instead of 1");
  }
  for (const auto& [edge, n] : label_count) {
    (void)n;
    if (!edge_use.count(edge)) fail("mesh validation: labeled edge not part of any triangle");
  }

  for (const auto& [l, r] : mesh.periodic_pairs) {
    if (l < 0 || l >= nv || r < 0 || r >= nv) fail("mesh validation: periodic pair out of range");
    if (std::abs(mesh.vertices[l].y - mesh.vertices[r].y) > 1e-12)
      fail("mesh validation: periodic pair heights differ by more than 1e-12");
  }
}

void rebuild_periodic_pairs(Mesh& mesh) {
  std::vector<int> left, right;
  auto collect = [&](BoundaryLabel label, std::vector<int>& out) {
    std::vector<char> seen(mesh.vertices.size(), 0);
    for (const auto& be : mesh.boundary_edges) {
      if (be.label != label) continue;
      for (int v : {be.a, be.b}) {
        if (!seen[v]) {
          seen[v] = 1;
          out.push_back(v);
        }
      }
    }
  };
  collect(BoundaryLabel::Left, left);
  collect(BoundaryLabel::Right, right);
  if (left.size() != right.size())
    fail("periodic pairing: left/right vertex counts differ");
  auto by_height = [&](int a, int b) { return mesh.vertices[a].y < mesh.vertices[b].y; };
  std::sort(left.begin(), left.end(), by_height);
  std::sort(right.begin(), right.end(), by_height);
  mesh.periodic_pairs.clear();
  for (size_t i = 0; i < left.size(); ++i) {
    if (std::abs(mesh.vertices[left[i]].y - mesh.vertices[right[i]].y) > 1e-12)
      fail("periodic pairing: lateral discretizations are not mirror images");
    mesh.periodic_pairs.emplace_back(left[i], right[i]);
  }
}

void write_mesh(const Mesh& mesh, std::ostream& out) {
  out << "vertices " << mesh.vertices.size() << " triangles " << mesh.triangles.size()
      << " edges " << mesh.boundary_edges.size() << "\n";
  char buf[80];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.x, v.y);
    out << buf;
  }
  for (const auto& t : mesh.triangles) out << t[0] << " " << t[1] << " " << t[2] << "\n";
  for (const auto& e : mesh.boundary_edges)
    out << e.a << " " << e.b << " " << to_string(e.label) << "\n";
}

Mesh read_mesh(std::istream& in) {
  std::string kw1, kw2, kw3;
  size_t nv = 0, nt = 0, ne = 0;
  in >> kw1 >> nv >> kw2 >> nt >> kw3 >> ne;
  if (!in || kw1 != "vertices" || kw2 != "triangles" || kw3 != "edges")
    fail("mesh read: bad header");
  Mesh mesh;
  mesh.vertices.resize(nv);
  for (auto& v : mesh.vertices) in >> v.x >> v.y;
  mesh.triangles.resize(nt);
  for (auto& t : mesh.triangles) in >> t[0] >> t[1] >> t[2];
  mesh.boundary_edges.resize(ne);
  for (auto& e : mesh.boundary_edges) {
    std::string name;
    in >> e.a >> e.b >> name;
    auto label = label_from_string(name);
    if (!label) fail("mesh read: unknown boundary label '" + name + "'");
    e.label = *label;
  }
  if (!in) fail("mesh read: truncated file");
  return mesh;
}

void save_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream f(path);
  if (!f) fail("cannot open mesh file for writing: " + path);
  write_mesh(mesh, f);
  if (!f) fail("mesh write failed: " + path);
}

Mesh load_mesh(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail("cannot open mesh file: " + path);
  return read_mesh(f);
}

}  // namespace roughlayer
