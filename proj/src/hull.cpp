#include "scx/hull.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "scx/error.hpp"

namespace scx {

namespace {

Vec cross(const Vec& a, const Vec& b) {
    return Vec{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double cross2(const std::array<double, 2>& o, const std::array<double, 2>& a,
              const std::array<double, 2>& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Andrew's monotone chain. Returns indices of the hull in counterclockwise
// order, dropping collinear points.
std::vector<std::size_t> monotone_chain(const std::vector<std::array<double, 2>>& z, double eps) {
    std::vector<std::size_t> idx(z.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return z[a][0] < z[b][0] || (z[a][0] == z[b][0] && z[a][1] < z[b][1]);
    });
    idx.erase(std::unique(idx.begin(), idx.end(),
                          [&](std::size_t a, std::size_t b) { return z[a] == z[b]; }),
              idx.end());
    if (idx.size() < 3) return idx;
    std::vector<std::size_t> h(2 * idx.size());
    std::size_t k = 0;
    for (std::size_t i : idx) {
        while (k >= 2 && cross2(z[h[k - 2]], z[h[k - 1]], z[i]) <= eps) --k;
        h[k++] = i;
    }
    for (std::size_t t = idx.size() - 1, lower = k + 1; t-- > 0;) {
        const std::size_t i = idx[t];
        while (k >= lower && cross2(z[h[k - 2]], z[h[k - 1]], z[i]) <= eps) --k;
        h[k++] = i;
    }
    h.resize(k - 1);
    return h;
}

// Orthonormal basis of the complement of `basis` in R^dim.
std::vector<Vec> complement_of(const std::vector<Vec>& basis, int dim) {
    std::vector<Vec> all = basis;
    std::vector<Vec> out;
    for (int axis = 0; axis < dim && static_cast<int>(all.size()) < dim; ++axis) {
        Vec v = Vec::unit(dim, axis);
        for (const Vec& b : all) v -= dot(v, b) * b;
        const double len = norm(v);
        if (len > 1e-6) {
            v /= len;
            all.push_back(v);
            out.push_back(v);
        }
    }
    return out;
}

// Plane orthonormal pair for a unit normal in 3D.
std::pair<Vec, Vec> plane_axes(const Vec& n) {
    int axis = 0;
    for (int k = 1; k < 3; ++k)
        if (std::abs(n[k]) < std::abs(n[axis])) axis = k;
    Vec e = Vec::unit(3, axis);
    Vec t1 = e - dot(e, n) * n;
    t1 /= norm(t1);
    return {t1, cross(n, t1)};
}

// Orders coplanar points (plane normal n) counterclockwise as seen from the tip of n.
std::vector<Vec> order_in_plane(const std::vector<Vec>& pts, const Vec& n, double eps) {
    const auto [t1, t2] = plane_axes(n);
    std::vector<std::array<double, 2>> z;
    for (const Vec& p : pts) z.push_back({dot(p, t1), dot(p, t2)});
    std::vector<Vec> out;
    for (std::size_t i : monotone_chain(z, eps)) out.push_back(pts[i]);
    return out;
}

void sample_segment(const Vec& a, const Vec& b, double spacing, bool include_end,
                    std::vector<Vec>& out) {
    const double len = distance(a, b);
    const int m = std::max(1, static_cast<int>(std::ceil(len / spacing - 1e-9)));
    for (int i = 0; i < m + (include_end ? 1 : 0); ++i) {
        const double t = static_cast<double>(i) / m;
        out.push_back(a + t * (b - a));
    }
}

// Edges plus an interior lattice of a convex polygon spanned by (t1, t2).
void sample_planar_polygon(const std::vector<Vec>& polygon, const Vec& t1, const Vec& t2,
                           double spacing, std::vector<Vec>& out) {
    for (std::size_t i = 0; i < polygon.size(); ++i)
        sample_segment(polygon[i], polygon[(i + 1) % polygon.size()], spacing, false, out);
    if (polygon.size() < 3) return;
    const Vec base = polygon[0];
    double lo1 = 0, hi1 = 0, lo2 = 0, hi2 = 0;
    std::vector<std::array<double, 2>> z;
    for (const Vec& p : polygon) {
        const double a = dot(p - base, t1), b = dot(p - base, t2);
        z.push_back({a, b});
        lo1 = std::min(lo1, a), hi1 = std::max(hi1, a), lo2 = std::min(lo2, b), hi2 = std::max(hi2, b);
    }
    // Orientation of the ordered polygon in (t1, t2) coordinates.
    double area = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const auto& p = z[i];
        const auto& q = z[(i + 1) % z.size()];
        area += p[0] * q[1] - q[0] * p[1];
    }
    const double orient = area >= 0 ? 1.0 : -1.0;
    for (double a = lo1 + spacing; a < hi1; a += spacing) {
        for (double b = lo2 + spacing; b < hi2; b += spacing) {
            bool inside = true;
            for (std::size_t i = 0; i < z.size() && inside; ++i)
                inside = orient * cross2(z[i], z[(i + 1) % z.size()], {a, b}) > 0.0;
            if (inside) out.push_back(base + a * t1 + b * t2);
        }
    }
}

}  // namespace

// ======================================================
// ConvexPolytope
// ======================================================

double ConvexPolytope::excess(const Vec& p) const {
    if (p.dim() != ambient_dim) throw InputError("polytope: dimension mismatch");
    double worst = -INFINITY;
    for (const Vec& c : complement_basis) worst = std::max(worst, std::abs(dot(c, p - origin)));
    for (const Facet& f : facets) worst = std::max(worst, dot(f.normal, p) - f.offset);
    if (affine_dim == 0 && complement_basis.empty()) worst = distance(p, origin);
    return worst == -INFINITY ? 0.0 : worst;
}

bool ConvexPolytope::on_boundary(const Vec& p, double tol) const {
    if (!contains(p, tol)) return false;
    if (affine_dim < ambient_dim) return true;
    for (const Facet& f : facets)
        if (std::abs(dot(f.normal, p) - f.offset) <= tol) return true;
    return false;
}

nlohmann::json ConvexPolytope::to_json() const {
    nlohmann::json v = nlohmann::json::array();
    for (const Vec& p : vertices) v.push_back(p.to_vector());
    nlohmann::json f = nlohmann::json::array();
    for (const Facet& fa : facets) f.push_back({{"normal", fa.normal.to_vector()}, {"offset", fa.offset}});
    return {{"ambient_dim", ambient_dim}, {"affine_dim", affine_dim}, {"vertices", v}, {"facets", f}};
}

ConvexPolytope convex_hull(std::span<const Vec> points) {
    if (points.empty()) throw InputError("convex_hull: empty input");
    const int dim = points[0].dim();
    if (dim < 1 || dim > 3) throw InputError("convex_hull: dimension must be 1, 2 or 3");
    for (const Vec& p : points)
        if (p.dim() != dim) throw InputError("convex_hull: mixed dimensions");

    ConvexPolytope poly;
    poly.ambient_dim = dim;
    poly.origin = points[0];
    for (const Vec& p : points) poly.scale = std::max(poly.scale, distance(p, poly.origin));

    // Affine span by greedy farthest-residual Gram-Schmidt.
    const double tol = 1e-10 * std::max(poly.scale, 1e-300);
    if (poly.scale > 1e-14 * std::max(1.0, norm(poly.origin))) {
        while (static_cast<int>(poly.span_basis.size()) < dim) {
            double best = 0.0;
            Vec best_res(dim);
            for (const Vec& p : points) {
                Vec r = p - poly.origin;
                for (const Vec& b : poly.span_basis) r -= dot(r, b) * b;
                const double len = norm(r);
                if (len > best) best = len, best_res = r;
            }
            if (best <= tol) break;
            poly.span_basis.push_back(best_res / best);
        }
    }
    poly.affine_dim = static_cast<int>(poly.span_basis.size());
    if (poly.affine_dim == dim) {
        // Keep ambient orientation so planar hulls come out counterclockwise.
        poly.span_basis.clear();
        for (int k = 0; k < dim; ++k) poly.span_basis.push_back(Vec::unit(dim, k));
    }
    poly.complement_basis = complement_of(poly.span_basis, dim);

    auto local = [&](const Vec& p) {
        std::array<double, 3> z{};
        for (int k = 0; k < poly.affine_dim; ++k) z[k] = dot(p - poly.origin, poly.span_basis[k]);
        return z;
    };

    switch (poly.affine_dim) {
        case 0:
            poly.vertices = {poly.origin};
            break;
        case 1: {
            std::size_t imin = 0, imax = 0;
            for (std::size_t i = 0; i < points.size(); ++i) {
                const double z = local(points[i])[0];
                if (z < local(points[imin])[0]) imin = i;
                if (z > local(points[imax])[0]) imax = i;
            }
            const Vec& b = poly.span_basis[0];
            poly.vertices = {points[imin], points[imax]};
            poly.facets.push_back({-b, -dot(b, points[imin]), {points[imin]}});
            poly.facets.push_back({b, dot(b, points[imax]), {points[imax]}});
            break;
        }
        case 2: {
            std::vector<std::array<double, 2>> z;
            for (const Vec& p : points) {
                const auto l = local(p);
                z.push_back({l[0], l[1]});
            }
            const auto hull = monotone_chain(z, 1e-12 * poly.scale * poly.scale);
            for (std::size_t i : hull) poly.vertices.push_back(points[i]);
            for (std::size_t i = 0; i < hull.size(); ++i) {
                const auto& a = z[hull[i]];
                const auto& c = z[hull[(i + 1) % hull.size()]];
                const double dx = c[0] - a[0], dy = c[1] - a[1];
                const double len = std::hypot(dx, dy);
                Vec n = (dy / len) * poly.span_basis[0] + (-dx / len) * poly.span_basis[1];
                const Vec& va = points[hull[i]];
                poly.facets.push_back({n, dot(n, va), {va, points[hull[(i + 1) % hull.size()]]}});
            }
            break;
        }
        case 3: {
            std::vector<Vec> pts(points.begin(), points.end());
            std::sort(pts.begin(), pts.end(), lex_less);
            pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
            const double plane_tol = 1e-10 * poly.scale;
            const std::size_t n = pts.size();
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                    for (std::size_t k = j + 1; k < n; ++k) {
                        Vec nrm = cross(pts[j] - pts[i], pts[k] - pts[i]);
                        const double len = norm(nrm);
                        if (len <= 1e-12 * poly.scale * poly.scale) continue;
                        nrm /= len;
                        double off = dot(nrm, pts[i]);
                        bool pos = false, neg = false;
                        for (const Vec& p : pts) {
                            const double s = dot(nrm, p) - off;
                            pos |= s > plane_tol;
                            neg |= s < -plane_tol;
                            if (pos && neg) break;
                        }
                        if (pos && neg) continue;
                        if (pos) nrm = -nrm, off = -off;
                        bool dup = false;
                        for (const Facet& f : poly.facets)
                            if (distance(f.normal, nrm) < 1e-9 && std::abs(f.offset - off) < plane_tol) {
                                dup = true;
                                break;
                            }
                        if (dup) continue;
                        std::vector<Vec> on;
                        for (const Vec& p : pts)
                            if (std::abs(dot(nrm, p) - off) <= plane_tol) on.push_back(p);
                        poly.facets.push_back({nrm, off, order_in_plane(on, nrm, 1e-12 * poly.scale * poly.scale)});
                    }
            for (const Facet& f : poly.facets)
                for (const Vec& v : f.polygon)
                    if (std::find(poly.vertices.begin(), poly.vertices.end(), v) == poly.vertices.end())
                        poly.vertices.push_back(v);
            std::sort(poly.vertices.begin(), poly.vertices.end(), lex_less);
            break;
        }
    }
    return poly;
}

std::vector<Vec> normal_cone_directions(const ConvexPolytope& polytope, const Vec& p0, int n_dirs) {
    if (n_dirs < 1) throw InputError("normal_cone_directions: n_dirs must be >= 1");
    const double tol = 1e-9 * std::max(1.0, polytope.scale);
    if (!polytope.contains(p0, tol))
        throw InputError("normal_cone_directions: " + to_string(p0) + " is not on the polytope");
    std::vector<Vec> out;
    auto add = [&](const Vec& v) {
        for (const Vec& w : out)
            if (distance(v, w) < 1e-9) return;
        out.push_back(v);
    };
    for (const Facet& f : polytope.facets)
        if (std::abs(dot(f.normal, p0) - f.offset) <= tol) add(f.normal);
    for (const Vec& c : polytope.complement_basis) {
        add(c);
        add(-c);
    }
    if (static_cast<int>(out.size()) > n_dirs) out.resize(n_dirs);
    return out;
}

std::vector<Vec> sample_hull_boundary(const ConvexPolytope& polytope, double spacing) {
    if (!(spacing > 0.0)) throw InputError("sample_hull_boundary: spacing must be positive");
    std::vector<Vec> out;
    const auto& v = polytope.vertices;
    switch (polytope.affine_dim) {
        case 0:
            out.push_back(polytope.origin);
            break;
        case 1:
            sample_segment(v[0], v[1], spacing, true, out);
            break;
        case 2:
            if (polytope.ambient_dim == 2) {
                for (std::size_t i = 0; i < v.size(); ++i)
                    sample_segment(v[i], v[(i + 1) % v.size()], spacing, false, out);
            } else {
                sample_planar_polygon(v, polytope.span_basis[0], polytope.span_basis[1], spacing, out);
            }
            break;
        case 3:
            for (const Facet& f : polytope.facets) {
                const auto [t1, t2] = plane_axes(f.normal);
                sample_planar_polygon(f.polygon, t1, t2, spacing, out);
            }
            break;
    }
    return out;
}

}  // namespace scx
