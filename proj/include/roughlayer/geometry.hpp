#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace roughlayer {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }

/// Labels carried by boundary edges across all mesh families.
enum class BoundaryLabel {
  Bottom,
  Top,
  Left,
  Right,
  ArtificialTop,
  ArtificialSide,
  Interface,
};

const char* to_string(BoundaryLabel label);
std::optional<BoundaryLabel> label_from_string(std::string_view name);

/// 1-periodic bottom profile y2 = f(y1). Nonpositive, bounded, Lipschitz.
struct RoughProfile {
  double amplitude_offset = -1.0;
  /// 1-periodic oscillation added to the offset; null means a flat profile.
  std::function<double(double)> oscillation;
  /// Reported bound on |f'|; estimated on construction for the built-ins.
  double lipschitz = 0.0;

  double value(double t) const;
  /// Profile t -> f(-t) (equivalently f(1-t) on the unit cell).
  RoughProfile reflected() const;
  /// Throws if the profile is positive somewhere, unbounded, or aperiodic.
  void validate() const;
  double min_value() const;
  double max_value() const;

  static RoughProfile sine();    // -1 + sin(2 pi t)/2
  static RoughProfile cosine();  // -1 + cos(2 pi t)/2
  static RoughProfile flat();    // -1
  static RoughProfile constant(double c);
};

enum class DomainKind {
  RoughFull,
  UnitSquare,
  Sublayer,
  CellTruncated,
  QuarterPlaneIn,
  QuarterPlaneOut,
};

/// Parametrized description of one of the computational domains.
struct DomainSpec {
  DomainKind kind = DomainKind::UnitSquare;
  double epsilon = 1.0;        // RoughFull / Sublayer only
  double truncation_L = 10.0;  // cell / quarter-plane only
  RoughProfile profile;

  void validate() const;
};

/// Geometric grading request toward a corner point.
struct GradingSpec {
  Vec2 corner;
  double target_h_min = 0.0;
  double ratio = 0.5;
  double background_h = 0.0;

  void validate() const;
  /// Size bound at distance r from the corner.
  double size_at(double r) const;
};

/// Conforming triangulation with labeled boundary and optional periodic pairing.
struct Mesh {
  struct BoundaryEdge {
    int a = -1;
    int b = -1;
    BoundaryLabel label = BoundaryLabel::Bottom;
  };

  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  // counterclockwise
  std::vector<BoundaryEdge> boundary_edges;
  std::vector<std::pair<int, int>> periodic_pairs;  // (left, right) vertex ids

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int triangle_count() const { return static_cast<int>(triangles.size()); }

  double h_min() const;
  double h_max() const;
  double min_quality() const;
  std::array<Vec2, 2> bounding_box() const;
};

double triangle_area(Vec2 a, Vec2 b, Vec2 c);
double triangle_diameter(Vec2 a, Vec2 b, Vec2 c);
/// 2 r_in / r_circ; equals 1 for the equilateral triangle.
double triangle_quality(Vec2 a, Vec2 b, Vec2 c);

/// Full conformity/orientation/labeling/pairing check; throws on violation.
void validate_mesh(const Mesh& mesh);

/// Pair Left/Right boundary vertices of equal height (used after file load).
void rebuild_periodic_pairs(Mesh& mesh);

void write_mesh(const Mesh& mesh, std::ostream& out);
Mesh read_mesh(std::istream& in);
void save_mesh(const Mesh& mesh, const std::string& path);
Mesh load_mesh(const std::string& path);

}  // namespace roughlayer
