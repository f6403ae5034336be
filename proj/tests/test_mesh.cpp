#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "roughlayer/geometry.hpp"
#include "roughlayer/meshgen.hpp"

using namespace roughlayer;

namespace {

int count_label(const Mesh& m, BoundaryLabel l) {
  int n = 0;
  for (const auto& be : m.boundary_edges)
    if (be.label == l) ++n;
  return n;
}

std::set<int> label_vertices(const Mesh& m, BoundaryLabel l) {
  std::set<int> out;
  for (const auto& be : m.boundary_edges)
    if (be.label == l) {
      out.insert(be.a);
      out.insert(be.b);
    }
  return out;
}

double max_bottom_fit_error(const Mesh& m, const std::function<double(double)>& curve) {
  double worst = 0.0;
  for (int v : label_vertices(m, BoundaryLabel::Bottom))
    worst = std::max(worst, std::abs(m.vertices[v].y - curve(m.vertices[v].x)));
  return worst;
}

}  // namespace

TEST_CASE("unit square mesh counts") {
  Mesh m = build_unit_square_mesh(0.5);
  CHECK(m.vertex_count() == 9);
  CHECK(m.triangle_count() == 8);

  Mesh one = build_unit_square_mesh(1.0);
  CHECK(one.vertex_count() == 4);
  CHECK(one.triangle_count() == 2);

  Mesh fine = build_unit_square_mesh(0.1);
  CHECK(fine.vertex_count() == 121);
  CHECK(fine.triangle_count() == 200);

  CHECK(count_label(fine, BoundaryLabel::Bottom) == 10);
  CHECK(count_label(fine, BoundaryLabel::Top) == 10);
  CHECK(count_label(fine, BoundaryLabel::Left) == 10);
  CHECK(count_label(fine, BoundaryLabel::Right) == 10);

  CHECK_THROWS(build_unit_square_mesh(0.0));
  CHECK_THROWS(build_unit_square_mesh(-0.1));
  CHECK_THROWS(build_unit_square_mesh(1.5));
}

TEST_CASE("flat cell mesh is a rectangular strip with matched pairs") {
  DomainSpec spec;
  spec.kind = DomainKind::CellTruncated;
  spec.truncation_L = 2.0;
  spec.profile = RoughProfile::flat();
  Mesh m = build_cell_mesh(spec, 0.2);
  validate_mesh(m);

  auto [lo, hi] = m.bounding_box();
  CHECK(lo.x == doctest::Approx(0.0));
  CHECK(hi.x == doctest::Approx(1.0));
  CHECK(lo.y == doctest::Approx(-1.0));
  CHECK(hi.y == doctest::Approx(2.0));

  // every lateral vertex is paired and heights agree exactly
  auto left = label_vertices(m, BoundaryLabel::Left);
  CHECK(m.periodic_pairs.size() == left.size());
  for (auto [l, r] : m.periodic_pairs) {
    CHECK(m.vertices[l].x == doctest::Approx(0.0));
    CHECK(m.vertices[r].x == doctest::Approx(1.0));
    CHECK(std::abs(m.vertices[l].y - m.vertices[r].y) <= 1e-12);
  }
}

TEST_CASE("cell mesh for the sine profile: fit, pairing, paper-scale count") {
  DomainSpec spec;
  spec.kind = DomainKind::CellTruncated;
  spec.truncation_L = 10.0;
  spec.profile = RoughProfile::sine();

  Mesh m = build_cell_mesh(spec, 0.05);
  validate_mesh(m);
  CHECK(max_bottom_fit_error(m, [&](double x) { return spec.profile.value(x); }) <= 1e-12);

  // lateral height multisets agree exactly
  std::multiset<double> ly, ry;
  for (int v : label_vertices(m, BoundaryLabel::Left)) ly.insert(m.vertices[v].y);
  for (int v : label_vertices(m, BoundaryLabel::Right)) ry.insert(m.vertices[v].y);
  CHECK(ly == ry);

  // paper-comparable resolution
  Mesh paper_scale = build_cell_mesh(spec, 1.0 / 140.0);
  CHECK(paper_scale.vertex_count() >= 30000);
  CHECK(paper_scale.vertex_count() <= 50000);

  CHECK_THROWS(build_cell_mesh(spec, 0.5));  // h precondition
  DomainSpec bad = spec;
  bad.profile = RoughProfile::constant(0.5);
  CHECK_THROWS(build_cell_mesh(bad, 0.1));  // positive profile rejected
}

TEST_CASE("quarter-plane mesh: flat geometry, quality, paper-scale count") {
  GradingSpec grading;
  grading.corner = {0.0, -1.0};
  grading.background_h = 0.25;
  grading.target_h_min = 0.03;
  grading.ratio = 0.5;

  DomainSpec spec;
  spec.kind = DomainKind::QuarterPlaneIn;
  spec.truncation_L = 3.0;
  spec.profile = RoughProfile::flat();
  Mesh flat = build_quarter_plane_mesh(spec, 0.25, grading);
  validate_mesh(flat);
  auto [lo, hi] = flat.bounding_box();
  CHECK(lo.x == doctest::Approx(0.0));
  CHECK(hi.x == doctest::Approx(3.0));
  CHECK(lo.y == doctest::Approx(-1.0));
  CHECK(hi.y == doctest::Approx(3.0));
  // E is the whole left edge, bottom corner through the truncation height
  double e_lo = 1e30, e_hi = -1e30;
  for (int v : label_vertices(flat, BoundaryLabel::Left)) {
    e_lo = std::min(e_lo, flat.vertices[v].y);
    e_hi = std::max(e_hi, flat.vertices[v].y);
  }
  CHECK(e_lo == doctest::Approx(-1.0));
  CHECK(e_hi == doctest::Approx(3.0));
  CHECK(flat.min_quality() >= 0.2);

  spec.profile = RoughProfile::sine();
  spec.truncation_L = 20.0;
  GradingSpec g2 = grading;
  g2.background_h = 1.0 / 11.0;
  g2.target_h_min = 1.0 / 88.0;
  Mesh paper_scale = build_quarter_plane_mesh(spec, 1.0 / 11.0, g2);
  CHECK(paper_scale.min_quality() >= 0.2);
  CHECK(paper_scale.vertex_count() >= 60000);
  CHECK(paper_scale.vertex_count() <= 95000);
  CHECK(max_bottom_fit_error(paper_scale, [&](double x) { return spec.profile.value(x); }) <=
        1e-12);

  // grading corner off the boundary is rejected
  GradingSpec bad = grading;
  bad.corner = {5.0, 5.0};
  spec.truncation_L = 3.0;
  CHECK_THROWS(build_quarter_plane_mesh(spec, 0.25, bad));
}

TEST_CASE("quarter-plane Out side meshes the mirrored profile") {
  DomainSpec spec;
  spec.kind = DomainKind::QuarterPlaneOut;
  spec.truncation_L = 4.0;
  spec.profile = RoughProfile::sine();
  GradingSpec grading;
  grading.corner = {0.0, -1.0};
  grading.background_h = 0.2;
  grading.target_h_min = 0.05;
  Mesh m = build_quarter_plane_mesh(spec, 0.2, grading);
  RoughProfile mirrored = spec.profile.reflected();
  CHECK(max_bottom_fit_error(m, [&](double x) { return mirrored.value(x); }) <= 1e-12);
}

TEST_CASE("refine_toward_corner: no-op, monotone count, grading law") {
  DomainSpec spec;
  spec.kind = DomainKind::QuarterPlaneIn;
  spec.truncation_L = 3.0;
  spec.profile = RoughProfile::sine();
  GradingSpec coarse;
  coarse.corner = {0.0, -1.0};
  coarse.background_h = 0.2;
  coarse.target_h_min = 0.2;
  Mesh base = build_quarter_plane_mesh(spec, 0.2, coarse);

  GradingSpec noop = coarse;
  Mesh same = refine_toward_corner(base, noop);
  CHECK(same.triangle_count() == base.triangle_count());

  GradingSpec finer = coarse;
  finer.target_h_min = 0.02;
  Mesh refined = refine_toward_corner(base, finer);
  CHECK(refined.triangle_count() >= base.triangle_count());
  validate_mesh(refined);

  // diameters obey the annulus bound at exit
  for (const auto& t : refined.triangles) {
    Vec2 a = refined.vertices[t[0]], b = refined.vertices[t[1]], c = refined.vertices[t[2]];
    Vec2 cen = (1.0 / 3.0) * (a + b + c);
    double r = norm(cen - finer.corner);
    CHECK(triangle_diameter(a, b, c) <= finer.size_at(r) * (1.0 + 1e-6));
  }

  // far-field sizes unchanged within 2x
  double far_base = 0.0, far_refined = 1e30;
  for (const auto& t : base.triangles) {
    Vec2 a = base.vertices[t[0]], b = base.vertices[t[1]], c = base.vertices[t[2]];
    Vec2 cen = (1.0 / 3.0) * (a + b + c);
    if (norm(cen - finer.corner) > 2.0) far_base = std::max(far_base, triangle_diameter(a, b, c));
  }
  for (const auto& t : refined.triangles) {
    Vec2 a = refined.vertices[t[0]], b = refined.vertices[t[1]], c = refined.vertices[t[2]];
    Vec2 cen = (1.0 / 3.0) * (a + b + c);
    if (norm(cen - finer.corner) > 2.0)
      far_refined = std::min(far_refined, triangle_diameter(a, b, c));
  }
  CHECK(far_refined * 2.0 >= far_base * (1.0 - 1e-9));
}

TEST_CASE("sublayer grading tracks the prescribed corner law across epsilon") {
  RoughProfile prof = RoughProfile::sine();
  std::vector<double> eps_list{0.5, 1.0 / 3.0, 0.2, 0.1};
  std::vector<double> ratio;
  for (double eps : eps_list) {
    GradingSpec grading;
    grading.corner = {1.0, eps * prof.value(1.0 / eps)};
    grading.background_h = eps / 4.0;
    grading.target_h_min = 0.15 * std::pow(eps, 2.29);
    Mesh m = build_sublayer_mesh(prof, eps, eps / 12.0, grading);
    validate_mesh(m);
    ratio.push_back(m.h_min() / std::pow(eps, 2.29));
  }
  double lo = *std::min_element(ratio.begin(), ratio.end());
  double hi = *std::max_element(ratio.begin(), ratio.end());
  CHECK(hi / lo <= 3.0);
}

TEST_CASE("rough composite meshes") {
  DomainSpec spec;
  spec.kind = DomainKind::RoughFull;
  spec.epsilon = 0.5;
  spec.profile = RoughProfile::sine();
  GradingSpec grading;
  grading.corner = {1.0, spec.epsilon * spec.profile.value(1.0 / spec.epsilon)};
  grading.background_h = spec.epsilon / 4.0;
  grading.target_h_min = 0.15 * std::pow(spec.epsilon, 2.29);

  double H = 0.5 * std::pow(spec.epsilon, 1.25);
  auto pair = build_rough_composite(spec, H, grading);
  validate_mesh(pair.top);
  validate_mesh(pair.sublayer);

  auto [lo, hi] = pair.sublayer.bounding_box();
  CHECK(lo.y == doctest::Approx(spec.epsilon * spec.profile.min_value()));
  CHECK(hi.y == doctest::Approx(spec.epsilon / 10.0));
  CHECK(pair.sublayer.h_max() < H);

  // smallest triangle near the corner honors the target
  double nearest = 1e30;
  for (const auto& t : pair.sublayer.triangles) {
    Vec2 a = pair.sublayer.vertices[t[0]], b = pair.sublayer.vertices[t[1]],
         c = pair.sublayer.vertices[t[2]];
    Vec2 cen = (1.0 / 3.0) * (a + b + c);
    if (norm(cen - grading.corner) <= spec.epsilon)
      nearest = std::min(nearest, triangle_diameter(a, b, c));
  }
  CHECK(nearest <= grading.target_h_min);

  // flat profile: sublayer is the strip (-eps, eps/10)
  DomainSpec flat = spec;
  flat.profile = RoughProfile::flat();
  auto fp = build_rough_composite(flat, H, grading);
  auto [flo, fhi] = fp.sublayer.bounding_box();
  CHECK(flo.y == doctest::Approx(-spec.epsilon));
  CHECK(fhi.y == doctest::Approx(spec.epsilon / 10.0));

  // unresolvable overlap rejected
  GradingSpec bad = grading;
  bad.target_h_min = spec.epsilon;
  bad.background_h = 2.0 * spec.epsilon;
  CHECK_THROWS(build_rough_composite(spec, H, bad));
}

TEST_CASE("mesh text format round-trips bit-exactly") {
  DomainSpec spec;
  spec.kind = DomainKind::CellTruncated;
  spec.truncation_L = 2.0;
  spec.profile = RoughProfile::sine();
  Mesh m = build_cell_mesh(spec, 0.1);

  std::stringstream ss;
  write_mesh(m, ss);
  Mesh back = read_mesh(ss);
  REQUIRE(back.vertex_count() == m.vertex_count());
  REQUIRE(back.triangle_count() == m.triangle_count());
  REQUIRE(back.boundary_edges.size() == m.boundary_edges.size());
  for (int i = 0; i < m.vertex_count(); ++i) {
    CHECK(back.vertices[i].x == m.vertices[i].x);
    CHECK(back.vertices[i].y == m.vertices[i].y);
  }
  for (int i = 0; i < m.triangle_count(); ++i) CHECK(back.triangles[i] == m.triangles[i]);
  for (size_t i = 0; i < m.boundary_edges.size(); ++i) {
    CHECK(back.boundary_edges[i].a == m.boundary_edges[i].a);
    CHECK(back.boundary_edges[i].b == m.boundary_edges[i].b);
    CHECK(back.boundary_edges[i].label == m.boundary_edges[i].label);
  }

  rebuild_periodic_pairs(back);
  CHECK(back.periodic_pairs.size() == m.periodic_pairs.size());
}

TEST_CASE("profile invariants") {
  RoughProfile sine = RoughProfile::sine();
  sine.validate();
  CHECK(sine.value(0.0) == doctest::Approx(-1.0));
  CHECK(sine.value(0.25) == doctest::Approx(-0.5));
  CHECK(sine.value(0.75) == doctest::Approx(-1.5));
  CHECK(std::abs(sine.value(0.0) - sine.value(1.0)) <= 1e-12);

  RoughProfile refl = sine.reflected();
  CHECK(refl.value(0.25) == doctest::Approx(sine.value(0.75)));

  CHECK_NOTHROW(RoughProfile::constant(0.0).validate());  // nonpositive is allowed
  CHECK_THROWS(RoughProfile::constant(0.5).validate());
}
