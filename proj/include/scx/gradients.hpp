#pragma once

#include <span>
#include <vector>

#include "json.hpp"

#include "scx/funcspace.hpp"
#include "scx/geometry.hpp"
#include "scx/hull.hpp"
#include "scx/semiconcavity.hpp"

namespace scx {

/// Annulus schedule and tolerances for reachable-gradient sampling.
struct GradientProbe {
    double r0 = 0.2;      ///< outer radius of the first annulus
    double ratio = 0.5;   ///< r_{k+1} = ratio * r_k
    int k_max = 8;        ///< number of annuli
    int m_a = 200;        ///< evaluations per annulus
    double eps_c = 0.02;  ///< cluster tolerance and differentiability-filter threshold
    double h_fd = 1e-5;   ///< stencil step on the outermost annulus

    /// Defaults scaled to a ball of radius delta: r0 = 0.2 delta, h_fd = 1e-5 delta.
    static GradientProbe for_radius(double delta);
    void validate() const;
    nlohmann::json to_json() const;
};

inline constexpr double kDefaultSingularTol = 0.05;  // eps_s

/// Finite approximation of D*u(x) by cluster means.
struct ReachableGradientSet {
    Vec base;
    std::vector<Vec> representatives;  ///< lexicographically sorted, pairwise > eps_c apart
    std::vector<int> cluster_sizes;
    GradientProbe probe;
    int n_samples = 0;  ///< retained gradient samples
    std::vector<int> annuli_used;

    ConvexPolytope hull() const { return convex_hull(representatives); }
    double diameter() const;
    nlohmann::json to_json() const;
};

/// Samples gradients on circles (spheres) inside the innermost annuli around x,
/// refines the angular sampling where neighbouring gradients differ, and
/// clusters the retained samples.
///
/// Only the innermost max(1, k_max/4) annuli that produce valid samples are
/// kept, and the stencil step shrinks quadratically with the radius, so the
/// representatives approximate limits rather than nearby gradients.
/// Throws IsolationError when no annulus yields a valid sample.
ReachableGradientSet reachable_gradients(const FunctionSpec& func, const DomainSpec& domain,
                                         const Vec& x, const GradientProbe& probe);

/// Single-linkage style clustering: leader pass over lexicographically sorted
/// samples, then merging of means closer than eps_c. Returns (means, sizes).
std::pair<std::vector<Vec>, std::vector<int>> cluster_samples(std::vector<Vec> samples,
                                                             double eps_c);

/// u(y) - u(x) - <p, y - x> - C |y - x|^(1+alpha). Throws HypothesisError when
/// [x, y] leaves the closure.
double supergradient_defect(const FunctionSpec& func, const DomainSpec& domain, const Vec& x,
                            const Vec& p, const Vec& y, const ModulusParams& params);

/// Boundary points of co(representatives) at spacing eps_g farther than eps_c
/// from every representative.
std::vector<Vec> hull_gap(const ReachableGradientSet& set, double eps_g);

bool is_singular(const FunctionSpec& func, const DomainSpec& domain, const Vec& x, double eps_s,
                 const GradientProbe& probe);

double hausdorff_distance(std::span<const Vec> a, std::span<const Vec> b);

}  // namespace scx
