#include "roughlayer/meshgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>

namespace roughlayer {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

using EdgeKey = std::pair<int, int>;

EdgeKey make_edge(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

// ---------------------------------------------------------------------------
// Tensor-product construction: boundary-fitted bottom band under a structured
// lattice, vertical-sided quads split along the shorter diagonal.
// ---------------------------------------------------------------------------

struct TensorLabels {
  BoundaryLabel bottom = BoundaryLabel::Bottom;
  BoundaryLabel top = BoundaryLabel::Top;
  BoundaryLabel left = BoundaryLabel::Left;
  BoundaryLabel right = BoundaryLabel::Right;
};

struct TensorSpec {
  std::vector<double> xs;                 // column positions, ascending
  std::function<double(double)> bottom;   // bottom curve
  double band_top = 0.0;                  // flat level closing the curved band
  int band_rows = 0;                      // intervals between curve and band_top
  std::vector<double> upper_levels;       // absolute levels above band_top
  TensorLabels labels;
  bool with_periodic_pairs = false;
};

Mesh build_tensor_mesh(const TensorSpec& spec) {
  const int ncols = static_cast<int>(spec.xs.size());
  if (ncols < 2) fail("tensor mesh: need at least two columns");
  const int nrows = 1 + spec.band_rows + static_cast<int>(spec.upper_levels.size());
  if (nrows < 2) fail("tensor mesh: need at least two rows");

  Mesh mesh;
  mesh.vertices.reserve(static_cast<size_t>(ncols) * nrows);
  for (int i = 0; i < ncols; ++i) {
    const double x = spec.xs[i];
    const double g = spec.bottom(x);
    mesh.vertices.push_back({x, g});
    for (int k = 1; k <= spec.band_rows; ++k) {
      double t = static_cast<double>(k) / spec.band_rows;
      mesh.vertices.push_back({x, g + t * (spec.band_top - g)});
    }
    for (double y : spec.upper_levels) mesh.vertices.push_back({x, y});
  }
  auto idx = [nrows](int i, int j) { return i * nrows + j; };

  const double mid_x = 0.5 * (spec.xs.front() + spec.xs.back());
  for (int i = 0; i + 1 < ncols; ++i) {
    for (int j = 0; j + 1 < nrows; ++j) {
      int v00 = idx(i, j), v10 = idx(i + 1, j);
      int v11 = idx(i + 1, j + 1), v01 = idx(i, j + 1);
      double da = norm(mesh.vertices[v11] - mesh.vertices[v00]);
      double db = norm(mesh.vertices[v01] - mesh.vertices[v10]);
      bool use_a;
      if (da < db * (1.0 - 1e-12)) {
        use_a = true;
      } else if (db < da * (1.0 - 1e-12)) {
        use_a = false;
      } else {
        // tie: orient by position so mirror-symmetric inputs mesh symmetrically
        use_a = 0.5 * (spec.xs[i] + spec.xs[i + 1]) < mid_x;
      }
      if (use_a) {
        mesh.triangles.push_back({v00, v10, v11});
        mesh.triangles.push_back({v00, v11, v01});
      } else {
        mesh.triangles.push_back({v00, v10, v01});
        mesh.triangles.push_back({v10, v11, v01});
      }
    }
  }

  for (int i = 0; i + 1 < ncols; ++i) {
    mesh.boundary_edges.push_back({idx(i, 0), idx(i + 1, 0), spec.labels.bottom});
    mesh.boundary_edges.push_back({idx(i, nrows - 1), idx(i + 1, nrows - 1), spec.labels.top});
  }
  for (int j = 0; j + 1 < nrows; ++j) {
    mesh.boundary_edges.push_back({idx(0, j), idx(0, j + 1), spec.labels.left});
    mesh.boundary_edges.push_back({idx(ncols - 1, j), idx(ncols - 1, j + 1), spec.labels.right});
  }

  if (spec.with_periodic_pairs) {
    for (int j = 0; j < nrows; ++j)
      mesh.periodic_pairs.emplace_back(idx(0, j), idx(ncols - 1, j));
  }
  return mesh;
}

std::vector<double> uniform_columns(double x0, double x1, int n) {
  std::vector<double> xs(n + 1);
  for (int i = 0; i <= n; ++i) xs[i] = x0 + (x1 - x0) * static_cast<double>(i) / n;
  return xs;
}

// Row levels above `start`: uniform spacing h over `uniform_height`, then
// geometric growth capped at `dy_max`, snapped to end exactly at `top`.
// The sequence below any fixed height does not depend on `top`.
std::vector<double> graded_levels(double start, double top, double h, double uniform_height,
                                  double growth, double dy_max) {
  std::vector<double> levels;
  double y = start;
  double dy = h;
  while (y + 1.45 * dy < top) {
    if (y + dy - start > uniform_height) dy = std::min(dy * growth, dy_max);
    y += dy;
    levels.push_back(y);
  }
  levels.push_back(top);
  return levels;
}

int band_row_count(double depth, double dy) {
  if (depth <= 1e-14) return 0;
  return std::max(1, static_cast<int>(std::ceil(depth / dy)));
}

// Guarded smoothing of vertices adjacent to low-quality triangles. Interior
// vertices take the ring average; boundary vertices slide along their own
// segment (Bottom vertices stay on the fitted curve). Moves are kept only if
// the local minimum quality improves and no incident diameter grows past the
// active size bound (or past its previous local maximum).
void smooth_bad_vertices(Mesh& mesh, double q_threshold, int rounds,
                         const std::function<double(Vec2)>* size_bound,
                         const std::function<double(double)>* bottom_curve = nullptr) {
  const int nv = mesh.vertex_count();
  // boundary classification: labels touching each vertex + neighbors along it
  std::vector<std::set<BoundaryLabel>> vertex_labels(nv);
  std::vector<std::vector<int>> boundary_nbr(nv);
  for (const auto& be : mesh.boundary_edges) {
    vertex_labels[be.a].insert(be.label);
    vertex_labels[be.b].insert(be.label);
    boundary_nbr[be.a].push_back(be.b);
    boundary_nbr[be.b].push_back(be.a);
  }
  std::vector<std::vector<int>> incident(nv);
  for (int ti = 0; ti < mesh.triangle_count(); ++ti)
    for (int v : mesh.triangles[ti]) incident[v].push_back(ti);

  auto local_quality = [&](int v) {
    double q = std::numeric_limits<double>::max();
    for (int ti : incident[v]) {
      const auto& t = mesh.triangles[ti];
      double area = triangle_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
      if (area <= 0.0) return -1.0;
      q = std::min(q, triangle_quality(mesh.vertices[t[0]], mesh.vertices[t[1]],
                                       mesh.vertices[t[2]]));
    }
    return q;
  };
  auto local_max_diam = [&](int v) {
    double d = 0.0;
    for (int ti : incident[v]) {
      const auto& t = mesh.triangles[ti];
      d = std::max(d, triangle_diameter(mesh.vertices[t[0]], mesh.vertices[t[1]],
                                        mesh.vertices[t[2]]));
    }
    return d;
  };
  auto size_ok = [&](int v, double old_max) {
    for (int ti : incident[v]) {
      const auto& t = mesh.triangles[ti];
      Vec2 a = mesh.vertices[t[0]], b = mesh.vertices[t[1]], c = mesh.vertices[t[2]];
      double diam = triangle_diameter(a, b, c);
      if (diam <= old_max * (1.0 + 1e-12)) continue;
      if (!size_bound) return false;
      Vec2 cen = (1.0 / 3.0) * (a + b + c);
      if (diam > (*size_bound)(cen) * (1.0 + 1e-7)) return false;
    }
    return true;
  };

  auto candidate_for = [&](int v) -> std::optional<Vec2> {
    const auto& labels = vertex_labels[v];
    if (labels.empty()) {
      Vec2 sum{0, 0};
      std::set<int> ring;
      for (int ti : incident[v])
        for (int w : mesh.triangles[ti])
          if (w != v) ring.insert(w);
      if (ring.empty()) return std::nullopt;
      for (int w : ring) sum = sum + mesh.vertices[w];
      return (1.0 / static_cast<double>(ring.size())) * sum;
    }
    if (labels.size() != 1 || boundary_nbr[v].size() != 2) return std::nullopt;  // corner
    Vec2 p0 = mesh.vertices[boundary_nbr[v][0]];
    Vec2 p1 = mesh.vertices[boundary_nbr[v][1]];
    BoundaryLabel l = *labels.begin();
    if (l == BoundaryLabel::Bottom) {
      if (!bottom_curve) return std::nullopt;
      double x = 0.5 * (p0.x + p1.x);
      return Vec2{x, (*bottom_curve)(x)};
    }
    Vec2 cur = mesh.vertices[v];
    if (std::abs(p0.x - p1.x) < 1e-13 * (1.0 + std::abs(p0.x)))
      return Vec2{cur.x, 0.5 * (p0.y + p1.y)};  // vertical segment
    if (std::abs(p0.y - p1.y) < 1e-13 * (1.0 + std::abs(p0.y)))
      return Vec2{0.5 * (p0.x + p1.x), cur.y};  // horizontal segment
    return std::nullopt;
  };

  for (int round = 0; round < rounds; ++round) {
    bool moved = false;
    for (int v = 0; v < nv; ++v) {
      if (incident[v].empty()) continue;
      double q_old = local_quality(v);
      if (q_old >= q_threshold) continue;
      auto candidate = candidate_for(v);
      if (!candidate) continue;
      Vec2 saved = mesh.vertices[v];
      double old_max = local_max_diam(v);
      mesh.vertices[v] = *candidate;
      double q_new = local_quality(v);
      if (q_new <= q_old || !size_ok(v, old_max)) {
        mesh.vertices[v] = saved;
      } else {
        moved = true;
      }
    }
    if (!moved) break;
  }
}

std::map<EdgeKey, BoundaryLabel> labeled_edge_map(const Mesh& mesh) {
  std::map<EdgeKey, BoundaryLabel> labels;
  for (const auto& be : mesh.boundary_edges) labels[make_edge(be.a, be.b)] = be.label;
  return labels;
}

}  // namespace

int delaunay_flip_pass(Mesh& mesh, int max_rounds) {
  int total_flips = 0;
  for (int round = 0; round < max_rounds; ++round) {
    std::map<EdgeKey, std::vector<int>> edge_tris;
    for (int ti = 0; ti < mesh.triangle_count(); ++ti) {
      const auto& t = mesh.triangles[ti];
      for (int k = 0; k < 3; ++k) edge_tris[make_edge(t[k], t[(k + 1) % 3])].push_back(ti);
    }
    int flips = 0;
    std::vector<char> touched(mesh.triangles.size(), 0);
    for (const auto& [edge, tris] : edge_tris) {
      if (tris.size() != 2) continue;
      int t1 = tris[0], t2 = tris[1];
      if (touched[t1] || touched[t2]) continue;
      // orient: t1 holds (u,v), t2 holds (v,u)
      int u = edge.first, v = edge.second;
      auto has_directed = [&](int ti, int a, int b) {
        const auto& t = mesh.triangles[ti];
        for (int k = 0; k < 3; ++k)
          if (t[k] == a && t[(k + 1) % 3] == b) return true;
        return false;
      };
      if (!has_directed(t1, u, v)) std::swap(t1, t2);
      auto third = [&](int ti, int a, int b) {
        for (int w : mesh.triangles[ti])
          if (w != a && w != b) return w;
        return -1;
      };
      int c = third(t1, u, v);
      int d = third(t2, u, v);
      Vec2 pu = mesh.vertices[u], pv = mesh.vertices[v];
      Vec2 pc = mesh.vertices[c], pd = mesh.vertices[d];
      double sin_c = cross(pu - pc, pv - pc);
      double cos_c = dot(pu - pc, pv - pc);
      double sin_d = cross(pv - pd, pu - pd);
      double cos_d = dot(pv - pd, pu - pd);
      sin_c = std::abs(sin_c);
      sin_d = std::abs(sin_d);
      double scale = norm(pu - pc) * norm(pv - pc) * norm(pu - pd) * norm(pv - pd);
      if (sin_c * cos_d + cos_c * sin_d >= -1e-13 * scale) continue;
      // flip to diagonal (c,d); quad boundary u -> d -> v -> c
      double a1 = triangle_area(pu, pd, pc);
      double a2 = triangle_area(pd, pv, pc);
      if (!(a1 > 1e-16 && a2 > 1e-16)) continue;
      mesh.triangles[t1] = {u, d, c};
      mesh.triangles[t2] = {d, v, c};
      touched[t1] = touched[t2] = 1;
      ++flips;
    }
    total_flips += flips;
    if (flips == 0) break;
  }
  return total_flips;
}

Mesh refine_to_size(const Mesh& input, const std::function<double(Vec2)>& size_bound,
                    const std::function<double(double)>* bottom_curve) {
  Mesh mesh = input;
  const bool had_pairs = !mesh.periodic_pairs.empty();

  for (int iteration = 0; iteration < 60; ++iteration) {
    auto labels = labeled_edge_map(mesh);
    std::vector<char> marked(mesh.triangles.size(), 0);
    bool any = false;
    for (int ti = 0; ti < mesh.triangle_count(); ++ti) {
      const auto& t = mesh.triangles[ti];
      Vec2 a = mesh.vertices[t[0]], b = mesh.vertices[t[1]], c = mesh.vertices[t[2]];
      Vec2 cen = (1.0 / 3.0) * (a + b + c);
      if (triangle_diameter(a, b, c) > size_bound(cen) * (1.0 + 1e-7)) {
        marked[ti] = 1;
        any = true;
      }
    }
    if (!any) break;

    auto edge_len = [&](EdgeKey e) {
      return norm(mesh.vertices[e.first] - mesh.vertices[e.second]);
    };
    auto longest_edge = [&](int ti) {
      const auto& t = mesh.triangles[ti];
      EdgeKey best = make_edge(t[0], t[1]);
      double len = edge_len(best);
      for (int k = 1; k < 3; ++k) {
        EdgeKey e = make_edge(t[k], t[(k + 1) % 3]);
        double l = edge_len(e);
        if (l > len * (1.0 + 1e-13) || (l > len * (1.0 - 1e-13) && e < best)) {
          // ties resolved by vertex ids so neighbors agree
          if (l > len) len = l;
          best = e;
        }
      }
      return best;
    };

    std::set<EdgeKey> split;
    for (int ti = 0; ti < mesh.triangle_count(); ++ti)
      if (marked[ti]) split.insert(longest_edge(ti));
    // conforming closure: a triangle with any split edge splits its longest
    for (bool grew = true; grew;) {
      grew = false;
      for (int ti = 0; ti < mesh.triangle_count(); ++ti) {
        const auto& t = mesh.triangles[ti];
        bool touched_tri = false;
        for (int k = 0; k < 3; ++k)
          if (split.count(make_edge(t[k], t[(k + 1) % 3]))) touched_tri = true;
        if (!touched_tri) continue;
        EdgeKey le = longest_edge(ti);
        if (!split.count(le)) {
          split.insert(le);
          grew = true;
        }
      }
    }

    std::map<EdgeKey, int> midpoint;
    for (const EdgeKey& e : split) {
      Vec2 pa = mesh.vertices[e.first], pb = mesh.vertices[e.second];
      Vec2 m = 0.5 * (pa + pb);
      auto it = labels.find(e);
      if (it != labels.end() && it->second == BoundaryLabel::Bottom && bottom_curve)
        m.y = (*bottom_curve)(m.x);
      midpoint[e] = mesh.vertex_count();
      mesh.vertices.push_back(m);
    }

    std::vector<std::array<int, 3>> new_tris;
    new_tris.reserve(mesh.triangles.size() * 2);
    for (int ti = 0; ti < mesh.triangle_count(); ++ti) {
      std::array<int, 3> t = mesh.triangles[ti];
      auto split_count = [&]() {
        int n = 0;
        for (int k = 0; k < 3; ++k)
          if (split.count(make_edge(t[k], t[(k + 1) % 3]))) ++n;
        return n;
      };
      if (split_count() == 0) {
        new_tris.push_back(t);
        continue;
      }
      // rotate so the longest (hence split) edge is (t[0], t[1])
      EdgeKey le = longest_edge(ti);
      for (int r = 0; r < 3 && make_edge(t[0], t[1]) != le; ++r)
        t = {t[1], t[2], t[0]};
      if (make_edge(t[0], t[1]) != le) fail("refine: longest edge rotation failed");
      const int a = t[0], b = t[1], c = t[2];
      const int m0 = midpoint.at(make_edge(a, b));
      const bool s1 = split.count(make_edge(b, c)) > 0;
      const bool s2 = split.count(make_edge(c, a)) > 0;
      if (!s1 && !s2) {
        new_tris.push_back({a, m0, c});
        new_tris.push_back({m0, b, c});
      } else if (s1 && !s2) {
        const int m1 = midpoint.at(make_edge(b, c));
        new_tris.push_back({a, m0, c});
        new_tris.push_back({m0, b, m1});
        new_tris.push_back({m0, m1, c});
      } else if (!s1 && s2) {
        const int m2 = midpoint.at(make_edge(c, a));
        new_tris.push_back({m0, b, c});
        new_tris.push_back({m0, c, m2});
        new_tris.push_back({a, m0, m2});
      } else {
        const int m1 = midpoint.at(make_edge(b, c));
        const int m2 = midpoint.at(make_edge(c, a));
        new_tris.push_back({a, m0, m2});
        new_tris.push_back({m0, b, m1});
        new_tris.push_back({m2, m1, c});
        new_tris.push_back({m0, m1, m2});
      }
    }
    mesh.triangles = std::move(new_tris);

    std::vector<Mesh::BoundaryEdge> new_edges;
    new_edges.reserve(mesh.boundary_edges.size());
    for (const auto& be : mesh.boundary_edges) {
      auto it = midpoint.find(make_edge(be.a, be.b));
      if (it == midpoint.end()) {
        new_edges.push_back(be);
      } else {
        new_edges.push_back({be.a, it->second, be.label});
        new_edges.push_back({it->second, be.b, be.label});
      }
    }
    mesh.boundary_edges = std::move(new_edges);

    delaunay_flip_pass(mesh);
    smooth_bad_vertices(mesh, 0.25, 2, &size_bound, bottom_curve);
    delaunay_flip_pass(mesh);
  }

  if (had_pairs) rebuild_periodic_pairs(mesh);
  validate_mesh(mesh);
  return mesh;
}

Mesh refine_toward_corner(const Mesh& mesh, const GradingSpec& grading,
                          const std::function<double(double)>* bottom_curve) {
  grading.validate();
  if (grading.target_h_min >= grading.background_h * (1.0 - 1e-12)) return mesh;
  auto bound = [&grading](Vec2 cen) {
    return grading.size_at(norm(cen - grading.corner));
  };
  return refine_to_size(mesh, bound, bottom_curve);
}

Mesh build_unit_square_mesh(double H) {
  if (!(H > 0.0 && H <= 1.0)) fail("unit square mesh: H must lie in (0, 1]");
  const int n = static_cast<int>(std::ceil(1.0 / H - 1e-9));
  TensorSpec spec;
  spec.xs = uniform_columns(0.0, 1.0, n);
  spec.bottom = [](double) { return 0.0; };
  spec.band_top = 0.0;
  spec.band_rows = 0;
  spec.upper_levels = uniform_columns(0.0, 1.0, n);
  spec.upper_levels.erase(spec.upper_levels.begin());
  spec.labels = {BoundaryLabel::Bottom, BoundaryLabel::Top, BoundaryLabel::Left,
                 BoundaryLabel::Right};
  Mesh mesh = build_tensor_mesh(spec);
  validate_mesh(mesh);
  return mesh;
}

namespace {

// Shared band/lattice layout for cell and quarter-plane meshes.
Mesh build_banded(const RoughProfile& profile, double x0, double x1, double top, double h,
                  const TensorLabels& labels, bool periodic, double uniform_height) {
  profile.validate();
  int n = static_cast<int>(std::ceil((x1 - x0) / h - 1e-9));
  n = std::max(n, 8);
  if (n % 2 != 0) ++n;
  const double dx = (x1 - x0) / n;

  TensorSpec spec;
  spec.xs = uniform_columns(x0, x1, n);
  spec.bottom = [profile](double x) { return profile.value(x); };
  spec.band_top = 0.0;
  const double f_min = profile.min_value();
  const double f_max = profile.max_value();
  if (f_max > 1e-14) fail("banded mesh: profile must stay nonpositive");
  const double shear = std::clamp(profile.lipschitz, 1.0, 2.0);
  spec.band_rows = band_row_count(-f_min, shear * dx);
  spec.upper_levels = graded_levels(0.0, top, dx, uniform_height, 1.3, 8.0 * dx);
  spec.labels = labels;
  spec.with_periodic_pairs = periodic;
  Mesh mesh = build_tensor_mesh(spec);
  delaunay_flip_pass(mesh);
  if (!periodic && mesh.min_quality() < 0.25) {
    // lateral sliding would break the mirrored periodic discretization
    auto curve = std::function<double(double)>([profile](double x) { return profile.value(x); });
    smooth_bad_vertices(mesh, 0.3, 3, nullptr, &curve);
    delaunay_flip_pass(mesh);
  }
  if (periodic) rebuild_periodic_pairs(mesh);
  validate_mesh(mesh);
  return mesh;
}

}  // namespace

Mesh build_cell_mesh(const DomainSpec& spec, double h) {
  if (spec.kind != DomainKind::CellTruncated) fail("cell mesh: spec kind must be CellTruncated");
  spec.validate();
  if (!(h > 0.0 && h <= 0.2)) fail("cell mesh: need 0 < h <= 0.2");
  TensorLabels labels{BoundaryLabel::Bottom, BoundaryLabel::ArtificialTop, BoundaryLabel::Left,
                      BoundaryLabel::Right};
  return build_banded(spec.profile, 0.0, 1.0, spec.truncation_L, h, labels,
                      /*periodic=*/true, /*uniform_height=*/1.0);
}

Mesh build_quarter_plane_mesh(const DomainSpec& spec, double h, const GradingSpec& grading) {
  if (spec.kind != DomainKind::QuarterPlaneIn && spec.kind != DomainKind::QuarterPlaneOut)
    fail("quarter-plane mesh: spec kind must be QuarterPlaneIn or QuarterPlaneOut");
  spec.validate();
  if (!(h > 0.0 && h <= 0.5)) fail("quarter-plane mesh: need 0 < h <= 0.5");
  const RoughProfile prof =
      spec.kind == DomainKind::QuarterPlaneOut ? spec.profile.reflected() : spec.profile;
  const double L = spec.truncation_L;

  TensorLabels labels{BoundaryLabel::Bottom, BoundaryLabel::ArtificialTop, BoundaryLabel::Left,
                      BoundaryLabel::ArtificialSide};
  Mesh mesh = build_banded(prof, 0.0, L, L, h, labels, /*periodic=*/false,
                           /*uniform_height=*/std::min(2.0, 0.5 * L));

  // grading corner must sit on the boundary
  double dist = std::numeric_limits<double>::max();
  for (const auto& be : mesh.boundary_edges) {
    Vec2 a = mesh.vertices[be.a], b = mesh.vertices[be.b];
    Vec2 ab = b - a;
    double t = std::clamp(dot(grading.corner - a, ab) / dot(ab, ab), 0.0, 1.0);
    dist = std::min(dist, norm(grading.corner - (a + t * ab)));
  }
  if (dist > 1e-6) fail("quarter-plane mesh: grading corner is not on the boundary");

  auto curve = std::function<double(double)>([prof](double x) { return prof.value(x); });
  mesh = refine_toward_corner(mesh, grading, &curve);
  if (mesh.min_quality() < 0.2) {
    auto bound = [&grading](Vec2 cen) { return grading.size_at(norm(cen - grading.corner)); };
    std::function<double(Vec2)> bound_fn = bound;
    smooth_bad_vertices(mesh, 0.3, 4, &bound_fn, &curve);
    delaunay_flip_pass(mesh);
  }
  validate_mesh(mesh);
  if (mesh.min_quality() < 0.2)
    fail("quarter-plane mesh: could not reach quality 0.2 (got " +
         std::to_string(mesh.min_quality()) + ")");
  return mesh;
}

Mesh build_sublayer_mesh(const RoughProfile& profile, double epsilon, double h,
                         const GradingSpec& grading) {
  profile.validate();
  if (!(epsilon > 0.0 && epsilon <= 1.0)) fail("sublayer mesh: epsilon must lie in (0, 1]");
  if (!(h > 0.0)) fail("sublayer mesh: h must be positive");

  const double dx_target = std::min(h, epsilon / 16.0);
  int n = static_cast<int>(std::ceil(1.0 / dx_target - 1e-9));
  n = std::max(n, 8);
  if (n % 2 != 0) ++n;
  const double dx = 1.0 / n;

  TensorSpec spec;
  spec.xs = uniform_columns(0.0, 1.0, n);
  spec.bottom = [profile, epsilon](double x) { return epsilon * profile.value(x / epsilon); };
  spec.band_top = 0.0;
  const double g_min = epsilon * profile.min_value();
  const double shear = std::clamp(profile.lipschitz, 1.0, 2.0);
  spec.band_rows = band_row_count(-g_min, shear * dx);
  const double top = epsilon / 10.0;
  const double dy_u = std::min(dx, epsilon / 20.0);
  const int n_up = std::max(2, static_cast<int>(std::ceil(top / dy_u - 1e-9)));
  for (int k = 1; k <= n_up; ++k) spec.upper_levels.push_back(top * k / n_up);
  spec.labels = {BoundaryLabel::Bottom, BoundaryLabel::Interface, BoundaryLabel::Left,
                 BoundaryLabel::Right};
  Mesh mesh = build_tensor_mesh(spec);
  delaunay_flip_pass(mesh);

  auto curve = std::function<double(double)>(
      [profile, epsilon](double x) { return epsilon * profile.value(x / epsilon); });
  if (mesh.min_quality() < 0.25) {
    smooth_bad_vertices(mesh, 0.3, 3, nullptr, &curve);
    delaunay_flip_pass(mesh);
  }
  GradingSpec g = grading;
  g.background_h = std::min(g.background_h, std::max(3.0 * dx, g.target_h_min));
  if (g.target_h_min < g.background_h * (1.0 - 1e-12))
    mesh = refine_toward_corner(mesh, g, &curve);
  validate_mesh(mesh);
  return mesh;
}

CompositeMeshes build_rough_composite(const DomainSpec& spec, double H,
                                      const GradingSpec& grading) {
  if (spec.kind != DomainKind::RoughFull) fail("composite mesh: spec kind must be RoughFull");
  spec.validate();
  grading.validate();
  const double eps = spec.epsilon;
  if (eps / 10.0 < 2.0 * grading.target_h_min)
    fail("composite mesh: overlap eps/10 unresolvable with target_h_min " +
         std::to_string(grading.target_h_min));

  CompositeMeshes pair;
  pair.top = build_unit_square_mesh(H);
  const double h_sub = std::min(eps / 16.0, 0.9 * H / std::sqrt(5.0));
  pair.sublayer = build_sublayer_mesh(spec.profile, eps, h_sub, grading);
  return pair;
}

}  // namespace roughlayer
