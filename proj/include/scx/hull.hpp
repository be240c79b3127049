#pragma once

#include <span>
#include <vector>

#include "json.hpp"

#include "scx/vec.hpp"

namespace scx {

/// Supporting half-space <normal, p> <= offset of a hull facet, expressed in
/// ambient coordinates; normal is unit length and lies in the affine span.
struct Facet {
    Vec normal;
    double offset = 0.0;
    std::vector<Vec> polygon;  ///< facet vertices, ordered around the facet when it is 2D
};

/// Convex hull of finitely many points in dimension <= 3.
///
/// Degenerate inputs keep their affine dimension: a single point, a segment,
/// or a planar polygon inside 3-space. Facets live inside the affine span, so
/// a segment has its two endpoints as facets and a planar polygon its edges.
struct ConvexPolytope {
    int ambient_dim = 0;
    int affine_dim = 0;
    /// Extreme points. Counterclockwise when the hull is a full-dimensional polygon in the plane.
    std::vector<Vec> vertices;
    Vec origin;                       ///< a point of the affine span
    std::vector<Vec> span_basis;      ///< orthonormal, affine_dim vectors
    std::vector<Vec> complement_basis;  ///< orthonormal complement of the span
    std::vector<Facet> facets;
    double scale = 0.0;  ///< max distance between origin and a vertex

    /// Largest violation of the facet and span constraints; <= 0 inside.
    double excess(const Vec& p) const;
    bool contains(const Vec& p, double tol = 1e-9) const { return excess(p) <= tol; }
    /// Topological boundary in the ambient space: the whole polytope when it is
    /// lower dimensional, otherwise the union of the facets.
    bool on_boundary(const Vec& p, double tol = 1e-9) const;

    nlohmann::json to_json() const;
};

/// Throws InputError on empty input or dimension > 3.
ConvexPolytope convex_hull(std::span<const Vec> points);

/// Generators of the normal cone at p0 (p0 within 1e-9 of the polytope): the
/// active facet normals plus +-complement directions, truncated to n_dirs.
/// Empty when p0 is interior to a full-dimensional polytope.
std::vector<Vec> normal_cone_directions(const ConvexPolytope& polytope, const Vec& p0, int n_dirs);

/// Points of the topological boundary at roughly the given spacing.
std::vector<Vec> sample_hull_boundary(const ConvexPolytope& polytope, double spacing);

}  // namespace scx
