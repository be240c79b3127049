#include "scx/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <tuple>

#include "scx/error.hpp"

namespace scx {

namespace {

void require_dim(int dim) {
    if (dim < 1 || dim > kMaxDim) throw InputError("domain dimension must be 1, 2 or 3");
}

void require_same_dim(const Vec& a, int dim, const char* what) {
    if (a.dim() != dim)
        throw InputError(std::string(what) + ": dimension mismatch (expected " +
                         std::to_string(dim) + ", got " + std::to_string(a.dim()) + ")");
}

// Orthonormal basis of the hyperplane orthogonal to the unit vector n.
std::vector<Vec> tangent_basis(const Vec& n) {
    const int dim = n.dim();
    if (dim == 1) return {};
    if (dim == 2) return {Vec{-n[1], n[0]}};
    int axis = 0;
    for (int k = 1; k < 3; ++k)
        if (std::abs(n[k]) < std::abs(n[axis])) axis = k;
    Vec e = Vec::unit(3, axis);
    Vec t1 = e - dot(e, n) * n;
    t1 /= norm(t1);
    Vec t2{n[1] * t1[2] - n[2] * t1[1], n[2] * t1[0] - n[0] * t1[2], n[0] * t1[1] - n[1] * t1[0]};
    return {t1, t2};
}

// Points anchor + spacing * sum_k i_k t_k for |i_k| <= reach.
std::vector<Vec> plane_lattice(const Vec& anchor, const std::vector<Vec>& basis, double spacing,
                               int reach) {
    std::vector<Vec> out;
    if (basis.empty()) return {anchor};
    if (basis.size() == 1) {
        for (int i = -reach; i <= reach; ++i) out.push_back(anchor + (spacing * i) * basis[0]);
        return out;
    }
    for (int i = -reach; i <= reach; ++i)
        for (int j = -reach; j <= reach; ++j)
            out.push_back(anchor + (spacing * i) * basis[0] + (spacing * j) * basis[1]);
    return out;
}

std::vector<Vec> sphere_points(const Vec& c, double r, double spacing) {
    const int dim = c.dim();
    std::vector<Vec> out;
    if (dim == 1) return {Vec{c[0] - r}, Vec{c[0] + r}};
    const double two_pi = 2.0 * std::numbers::pi;
    if (dim == 2) {
        const int n = std::max(1, static_cast<int>(std::ceil(two_pi * r / spacing - 1e-9)));
        for (int j = 0; j < n; ++j) {
            const double phi = two_pi * j / n;
            out.push_back(Vec{c[0] + r * std::cos(phi), c[1] + r * std::sin(phi)});
        }
        return out;
    }
    const int m = std::max(1, static_cast<int>(std::ceil(std::numbers::pi * r / spacing - 1e-9)));
    for (int i = 0; i <= m; ++i) {
        const double theta = std::numbers::pi * i / m;
        const double ring = r * std::sin(theta);
        const int n = std::max(1, static_cast<int>(std::ceil(two_pi * ring / spacing - 1e-9)));
        for (int j = 0; j < n; ++j) {
            const double phi = two_pi * j / n;
            out.push_back(Vec{c[0] + ring * std::cos(phi), c[1] + ring * std::sin(phi),
                              c[2] + r * std::cos(theta)});
        }
    }
    return out;
}

// Anchored lattice coordinates in [lo, hi] plus both end values.
std::vector<double> axis_coordinates(double anchor, double lo, double hi, double spacing) {
    std::vector<double> out{lo, hi};
    const long kmin = static_cast<long>(std::ceil((lo - anchor) / spacing));
    const long kmax = static_cast<long>(std::floor((hi - anchor) / spacing));
    for (long k = kmin; k <= kmax; ++k) {
        const double v = anchor + spacing * static_cast<double>(k);
        if (v > lo && v < hi) out.push_back(v);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Vec> deduplicate(std::vector<Vec> pts) {
    std::sort(pts.begin(), pts.end(), lex_less);
    std::vector<Vec> out;
    for (const Vec& p : pts) {
        bool dup = false;
        for (auto it = out.rbegin(); it != out.rend(); ++it) {
            if ((*it)[0] < p[0] - 1e-10) break;
            if (distance(*it, p) <= 1e-10) {
                dup = true;
                break;
            }
        }
        if (!dup) out.push_back(p);
    }
    return out;
}

}  // namespace

// ======================================================
// BallRegion
// ======================================================

BallRegion::BallRegion(Vec c, double r) : center(std::move(c)), radius(r) {
    require_dim(center.dim());
    if (!(radius > 0.0) || !std::isfinite(radius)) throw InputError("ball radius must be positive");
}

bool BallRegion::contains_closed(const Vec& x) const {
    return distance(x, center) <= radius * (1.0 + 1e-12);
}

// ======================================================
// DomainSpec
// ======================================================

DomainSpec DomainSpec::ball(Vec center, double radius) {
    require_dim(center.dim());
    if (!(radius > 0.0)) throw InputError("domain radius must be positive");
    DomainSpec d;
    d.kind_ = DomainKind::Ball;
    d.dim_ = center.dim();
    d.center_ = std::move(center);
    d.radius_ = radius;
    return d;
}

DomainSpec DomainSpec::box(Vec lo, Vec hi) {
    require_dim(lo.dim());
    require_same_dim(hi, lo.dim(), "box");
    for (int k = 0; k < lo.dim(); ++k)
        if (!(lo[k] < hi[k])) throw InputError("box requires lo < hi on every axis");
    DomainSpec d;
    d.kind_ = DomainKind::Box;
    d.dim_ = lo.dim();
    d.lo_ = std::move(lo);
    d.hi_ = std::move(hi);
    return d;
}

DomainSpec DomainSpec::half_space(Vec normal, double offset) {
    require_dim(normal.dim());
    const double len = norm(normal);
    if (!(len > 0.0)) throw InputError("half-space normal must be nonzero");
    DomainSpec d;
    d.kind_ = DomainKind::HalfSpace;
    d.dim_ = normal.dim();
    d.normal_ = normal / len;
    d.offset_ = offset / len;
    return d;
}

DomainSpec DomainSpec::capped_ball(Vec center, double radius, Vec normal, double offset) {
    DomainSpec b = ball(std::move(center), radius);
    require_same_dim(normal, b.dim_, "capped-ball normal");
    DomainSpec h = half_space(std::move(normal), offset);
    b.kind_ = DomainKind::CappedBall;
    b.normal_ = h.normal_;
    b.offset_ = h.offset_;
    if (std::abs(dot(b.normal_, b.center_) - b.offset_) >= b.radius_ &&
        dot(b.normal_, b.center_) < b.offset_)
        throw InputError("capped-ball: half-space misses the ball");
    return b;
}

DomainSpec DomainSpec::unit_half_disk() {
    return capped_ball(Vec{0.0, 0.0}, 1.0, Vec{1.0, 0.0}, 0.0);
}

double DomainSpec::level(const Vec& x) const {
    require_same_dim(x, dim_, "domain membership");
    switch (kind_) {
        case DomainKind::Ball:
            return distance(x, center_) - radius_;
        case DomainKind::HalfSpace:
            return offset_ - dot(normal_, x);
        case DomainKind::CappedBall:
            return std::max(distance(x, center_) - radius_, offset_ - dot(normal_, x));
        case DomainKind::Box: {
            double v = -INFINITY;
            for (int k = 0; k < dim_; ++k) v = std::max({v, lo_[k] - x[k], x[k] - hi_[k]});
            return v;
        }
    }
    return 0.0;
}

bool DomainSpec::contains(const Vec& x, Where where, double band) const {
    const double v = level(x);
    switch (where) {
        case Where::Open:
            return v < -band;
        case Where::Closure:
            return v <= band;
        case Where::Boundary:
            return std::abs(v) <= band;
    }
    return false;
}

std::string DomainSpec::describe() const {
    switch (kind_) {
        case DomainKind::Ball:
            return "ball(center=" + to_string(center_) + ", r=" + std::to_string(radius_) + ")";
        case DomainKind::Box:
            return "box(" + to_string(lo_) + ", " + to_string(hi_) + ")";
        case DomainKind::HalfSpace:
            return "half-space(n=" + to_string(normal_) + ", offset=" + std::to_string(offset_) + ")";
        case DomainKind::CappedBall:
            return "capped-ball(center=" + to_string(center_) + ", r=" + std::to_string(radius_) +
                   ", n=" + to_string(normal_) + ", offset=" + std::to_string(offset_) + ")";
    }
    return "?";
}

nlohmann::json DomainSpec::to_json() const {
    nlohmann::json j;
    switch (kind_) {
        case DomainKind::Ball:
            j = {{"kind", "ball"}, {"center", scx::to_json(center_)}, {"radius", radius_}};
            break;
        case DomainKind::Box:
            j = {{"kind", "box"}, {"lo", scx::to_json(lo_)}, {"hi", scx::to_json(hi_)}};
            break;
        case DomainKind::HalfSpace:
            j = {{"kind", "half-space"}, {"normal", scx::to_json(normal_)}, {"offset", offset_}};
            break;
        case DomainKind::CappedBall:
            j = {{"kind", "capped-ball"},
                 {"center", scx::to_json(center_)},
                 {"radius", radius_},
                 {"normal", scx::to_json(normal_)},
                 {"offset", offset_}};
            break;
    }
    return j;
}

DomainSpec DomainSpec::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind")) throw InputError("domain: missing \"kind\"");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "ball") return ball(vec_from_json(j.at("center")), j.at("radius").get<double>());
    if (kind == "box") return box(vec_from_json(j.at("lo")), vec_from_json(j.at("hi")));
    if (kind == "half-space")
        return half_space(vec_from_json(j.at("normal")), j.value("offset", 0.0));
    if (kind == "capped-ball")
        return capped_ball(vec_from_json(j.at("center")), j.at("radius").get<double>(),
                           vec_from_json(j.at("normal")), j.value("offset", 0.0));
    if (kind == "half-disk") return unit_half_disk();
    throw InputError("domain: unknown kind \"" + kind + "\"");
}

// ======================================================
// Operations
// ======================================================

bool contains(const DomainSpec& domain, const Vec& x, Where where) {
    return domain.contains(x, where);
}

bool segment_in_closure(const DomainSpec& domain, const Vec& a, const Vec& b, int n_probe) {
    if (n_probe < 2) throw InputError("segment_in_closure: n_probe must be >= 2");
    require_same_dim(a, domain.dim(), "segment_in_closure");
    require_same_dim(b, domain.dim(), "segment_in_closure");
    for (int i = 0; i < n_probe; ++i) {
        const double t = static_cast<double>(i) / (n_probe - 1);
        if (!domain.contains(a + t * (b - a), Where::Closure)) return false;
    }
    return true;
}

std::vector<Vec> closure_grid(const DomainSpec& domain, const BallRegion& region, double spacing) {
    if (!(spacing > 0.0)) throw InputError("closure_grid: spacing must be positive");
    require_same_dim(region.center, domain.dim(), "closure_grid");
    const int n = domain.dim();
    const long reach = static_cast<long>(std::floor(region.radius / spacing + 1e-9));
    std::vector<Vec> out;
    std::array<long, kMaxDim> k{};
    for (int a = 0; a < n; ++a) k[a] = -reach;
    for (;;) {
        Vec x = region.center;
        for (int a = 0; a < n; ++a) x[a] += spacing * static_cast<double>(k[a]);
        if (region.contains_closed(x) && domain.contains(x, Where::Closure)) out.push_back(x);
        int a = n - 1;
        while (a >= 0 && k[a] == reach) k[a--] = -reach;
        if (a < 0) break;
        ++k[a];
    }
    return out;
}

std::vector<Vec> boundary_sample(const DomainSpec& domain, const BallRegion& region,
                                 double spacing) {
    if (!(spacing > 0.0)) throw InputError("boundary_sample: spacing must be positive");
    require_same_dim(region.center, domain.dim(), "boundary_sample");
    const int n = domain.dim();
    const int reach = static_cast<int>(std::ceil(region.radius / spacing)) + 1;
    std::vector<Vec> raw;

    auto add_plane = [&](const Vec& normal, double offset) {
        const Vec anchor = region.center - (dot(normal, region.center) - offset) * normal;
        auto pts = plane_lattice(anchor, tangent_basis(normal), spacing, reach);
        raw.insert(raw.end(), pts.begin(), pts.end());
    };

    switch (domain.kind()) {
        case DomainKind::Ball:
            raw = sphere_points(domain.center(), domain.radius(), spacing);
            break;
        case DomainKind::HalfSpace:
            add_plane(domain.normal(), domain.offset());
            break;
        case DomainKind::CappedBall: {
            raw = sphere_points(domain.center(), domain.radius(), spacing);
            add_plane(domain.normal(), domain.offset());
            const double d = domain.offset() - dot(domain.normal(), domain.center());
            const double rim = std::sqrt(std::max(0.0, domain.radius() * domain.radius() - d * d));
            const Vec rim_center = domain.center() + d * domain.normal();
            if (n == 1) {
                raw.push_back(rim_center);
            } else if (n == 2) {
                const Vec t = tangent_basis(domain.normal())[0];
                raw.push_back(rim_center + rim * t);
                raw.push_back(rim_center - rim * t);
            } else {
                const auto basis = tangent_basis(domain.normal());
                const int m = std::max(3, static_cast<int>(std::ceil(2.0 * std::numbers::pi * rim / spacing)));
                for (int j = 0; j < m; ++j) {
                    const double phi = 2.0 * std::numbers::pi * j / m;
                    raw.push_back(rim_center + rim * std::cos(phi) * basis[0] +
                                  rim * std::sin(phi) * basis[1]);
                }
            }
            break;
        }
        case DomainKind::Box: {
            std::array<std::vector<double>, kMaxDim> coords;
            for (int a = 0; a < n; ++a)
                coords[a] = axis_coordinates(region.center[a], domain.lo()[a], domain.hi()[a], spacing);
            for (int face_axis = 0; face_axis < n; ++face_axis) {
                for (double face_value : {domain.lo()[face_axis], domain.hi()[face_axis]}) {
                    std::array<std::size_t, kMaxDim> idx{};
                    for (;;) {
                        Vec x(n);
                        for (int a = 0; a < n; ++a)
                            x[a] = a == face_axis ? face_value : coords[a][idx[a]];
                        raw.push_back(x);
                        int a = n - 1;
                        for (; a >= 0; --a) {
                            if (a == face_axis) continue;
                            if (++idx[a] < coords[a].size()) break;
                            idx[a] = 0;
                        }
                        if (a < 0) break;
                    }
                }
            }
            break;
        }
    }

    std::vector<Vec> kept;
    for (const Vec& x : raw)
        if (region.contains_closed(x) && domain.contains(x, Where::Boundary)) kept.push_back(x);
    return deduplicate(std::move(kept));
}

// ======================================================
// JSON helpers
// ======================================================

Vec vec_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw InputError("expected an array of numbers");
    std::vector<double> v = j.get<std::vector<double>>();
    if (v.empty() || v.size() > static_cast<std::size_t>(kMaxDim))
        throw InputError("vector length must be 1, 2 or 3");
    return Vec::from(v);
}

nlohmann::json to_json(const Vec& v) { return v.to_vector(); }

nlohmann::json to_json(const BallRegion& ball) {
    return {{"center", to_json(ball.center)}, {"radius", ball.radius}};
}

BallRegion ball_from_json(const nlohmann::json& j) {
    return BallRegion(vec_from_json(j.at("center")), j.at("radius").get<double>());
}

}  // namespace scx
