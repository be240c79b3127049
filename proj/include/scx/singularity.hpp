#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "scx/error.hpp"
#include "scx/extension.hpp"
#include "scx/gradients.hpp"

namespace scx {

struct ConditionResult {
    bool holds = false;
    std::vector<Vec> candidates;  ///< hull-gap points, possible anchors p0
};

/// Condition (h): the boundary of co D* minus D* is nonempty.
ConditionResult check_condition_h(const ReachableGradientSet& set, double eps_g, double eps_c);

/// Candidate farthest from every representative; ties go to the first in order.
Vec deepest_candidate(const ReachableGradientSet& set, const std::vector<Vec>& candidates);

/// theta = -nu for each normal-cone generator nu of co(representatives) at p0.
/// Throws DegenerateDirectionError when the cone is {0}.
std::vector<Vec> propagation_directions(const ReachableGradientSet& set, const Vec& p0,
                                        int n_dirs = 8);

struct IndicatorParams {
    double rho = 0.00375;  ///< probe radius
    int m = 16;            ///< points on the probe circle (sphere)
    double h_fd = 3.75e-5;
    double eps_c = 0.02;
};

/// Diameter of the clustered central-difference gradients of the field at x and
/// at m points of the sphere of radius rho around x. Throws InputError when
/// the stencils leave the ball.
double singularity_indicator(const ScalarField& field, const BallRegion& ball, const Vec& x,
                             const IndicatorParams& params);

struct TraceParams {
    double ds = 0.02;          ///< arc step
    double sigma = 0.4;        ///< horizon
    double width = 0.06;       ///< transverse search radius w
    double step = 0.002;       ///< transverse grid spacing
    double eps_s = kDefaultSingularTol;
    double rho_t = 0.25;       ///< tangency residual tolerance on the first three steps
    IndicatorParams indicator;

    /// ds = 0.02 delta, sigma = 0.4 delta.
    static TraceParams for_radius(double delta);
    /// w = 3 ds, spacing ds/10, indicator radius 0.75 spacing.
    static TraceParams with_step(double ds, double sigma);
    nlohmann::json to_json() const;
};

struct ArcSample {
    double s = 0.0;
    Vec x;
    double indicator = 0.0;
    double residual = 0.0;  ///< |x(s) - x0 - s theta| / s, zero at s = 0
};

struct SingularArc {
    Vec x0;
    Vec p0;
    Vec theta;
    double sigma = 0.0;
    double ds = 0.0;
    double eps_s = kDefaultSingularTol;
    double rho_t = 0.25;
    std::vector<ArcSample> samples;

    /// Largest residual among the first three positive steps.
    double leading_residual() const;
    /// Indicator above eps_s at every s > 0, x(s) != x0, leading residual <= rho_t.
    bool validated() const;
    nlohmann::json to_json() const;
    /// Header "s,x1,...,xn,indicator,residual".
    std::string to_csv() const;
};

/// The indicator fell below eps_s; carries the arc traced so far.
class PropagationLostError : public Error {
public:
    PropagationLostError(const std::string& what, SingularArc partial, double s_lost)
        : Error(what), partial_(std::move(partial)), s_lost_(s_lost) {}
    const SingularArc& partial() const { return partial_; }
    double s_lost() const { return s_lost_; }

private:
    SingularArc partial_;
    double s_lost_;
};

/// For s_i = i ds <= sigma, maximizes the indicator over the disc of radius w
/// through x0 + s_i theta orthogonal to theta. Ties go to the smallest offset.
SingularArc trace_singular_arc(const ScalarField& field, const BallRegion& ball, const Vec& x0,
                               const Vec& theta, const Vec& p0, const TraceParams& params);

inline SingularArc trace_singular_arc(const ExtensionField& field, const Vec& x0, const Vec& theta,
                                      const Vec& p0, const TraceParams& params) {
    return trace_singular_arc(field, field.ball(), x0, theta, p0, params);
}

}  // namespace scx
