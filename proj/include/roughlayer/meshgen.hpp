#pragma once

#include "roughlayer/geometry.hpp"

namespace roughlayer {

/// Structured grid on [0,1]^2 with ceil(1/H) cells per side, two triangles each.
/// Labels: Bottom, Top, Left, Right.
Mesh build_unit_square_mesh(double H);

/// Boundary-fitted mesh of the truncated periodic cell (0,1) x (f(y1), L).
/// Lateral discretizations mirror each other and periodic_pairs is populated.
Mesh build_cell_mesh(const DomainSpec& spec, double h);

/// Boundary-fitted mesh of the truncated rough quarter-plane (0,L) x (f(y1), L),
/// graded toward the corner (0, f(0)). The Out variant meshes the mirrored
/// geometry (profile t -> f(-t)) so both sides share one orientation.
Mesh build_quarter_plane_mesh(const DomainSpec& spec, double h, const GradingSpec& grading);

/// Rough sublayer (0,1) x (eps f(x1/eps), eps/10), graded toward the corner.
/// Labels: Bottom (rough), Interface (top), Left, Right.
Mesh build_sublayer_mesh(const RoughProfile& profile, double epsilon, double h,
                         const GradingSpec& grading);

struct CompositeMeshes {
  Mesh top;       // structured grid on the unit square
  Mesh sublayer;  // boundary-fitted rough sublayer, overlaps [0, eps/10]
};

/// Overlapping mesh pair for the domain-decomposition solver.
CompositeMeshes build_rough_composite(const DomainSpec& spec, double H,
                                      const GradingSpec& grading);

/// Geometric grading: bisect until diameters obey the radial size bound of
/// `grading`. Passing the bottom curve keeps split Bottom vertices on it.
Mesh refine_toward_corner(const Mesh& mesh, const GradingSpec& grading,
                          const std::function<double(double)>* bottom_curve = nullptr);

/// Longest-edge bisection until every triangle diameter is below the
/// pointwise bound evaluated at its centroid.
Mesh refine_to_size(const Mesh& mesh, const std::function<double(Vec2)>& size_bound,
                    const std::function<double(double)>* bottom_curve = nullptr);

/// Flip interior diagonals to the locally Delaunay configuration.
/// Returns the number of flips performed.
int delaunay_flip_pass(Mesh& mesh, int max_rounds = 40);

}  // namespace roughlayer
