#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "scx/vec.hpp"

namespace scx {

inline constexpr double kBoundaryBand = 1e-12;
inline constexpr int kDefaultSegmentProbes = 256;

enum class DomainKind { Ball, Box, HalfSpace, CappedBall };

enum class Where { Open, Closure, Boundary };

/// Open ball B_radius(center).
struct BallRegion {
    Vec center;
    double radius = 1.0;

    BallRegion() = default;
    BallRegion(Vec c, double r);

    int dim() const { return center.dim(); }
    /// Closed-ball membership with a relative rounding allowance.
    bool contains_closed(const Vec& x) const;
};

/// Open analytic domain Omega.
///
/// Kinds:
///   Ball        {|x - center| < radius}
///   Box         {lo < x < hi} componentwise
///   HalfSpace   {<normal, x> > offset}, normal stored unit length
///   CappedBall  Ball intersected with HalfSpace (the half-disk of the worked examples)
class DomainSpec {
public:
    static DomainSpec ball(Vec center, double radius);
    static DomainSpec box(Vec lo, Vec hi);
    static DomainSpec half_space(Vec normal, double offset);
    static DomainSpec capped_ball(Vec center, double radius, Vec normal, double offset);
    /// {x1 > 0, |x| < 1} in the plane.
    static DomainSpec unit_half_disk();

    DomainKind kind() const { return kind_; }
    int dim() const { return dim_; }
    const Vec& center() const { return center_; }
    double radius() const { return radius_; }
    const Vec& normal() const { return normal_; }
    double offset() const { return offset_; }
    const Vec& lo() const { return lo_; }
    const Vec& hi() const { return hi_; }

    /// Max of the constraint residuals, each a Euclidean distance to its face.
    /// Negative inside, zero on the boundary, positive outside.
    double level(const Vec& x) const;

    bool contains(const Vec& x, Where where, double band = kBoundaryBand) const;

    std::string describe() const;
    nlohmann::json to_json() const;
    static DomainSpec from_json(const nlohmann::json& j);

private:
    DomainKind kind_ = DomainKind::Ball;
    int dim_ = 0;
    Vec center_, normal_, lo_, hi_;
    double radius_ = 0.0;
    double offset_ = 0.0;
};

bool contains(const DomainSpec& domain, const Vec& x, Where where);

/// True iff n_probe equally spaced points of [a,b] (endpoints included) lie in the closure.
/// Exact for convex domains, a sampling approximation otherwise.
bool segment_in_closure(const DomainSpec& domain, const Vec& a, const Vec& b,
                        int n_probe = kDefaultSegmentProbes);

/// Lattice nodes region.center + spacing * k lying in closure(domain) and the closed ball.
std::vector<Vec> closure_grid(const DomainSpec& domain, const BallRegion& region, double spacing);

/// Parametric samples of the boundary of the domain inside the closed ball.
std::vector<Vec> boundary_sample(const DomainSpec& domain, const BallRegion& region,
                                 double spacing);

nlohmann::json to_json(const BallRegion& ball);
BallRegion ball_from_json(const nlohmann::json& j);

Vec vec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Vec& v);

}  // namespace scx
