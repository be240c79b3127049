#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "scx/funcspace.hpp"
#include "scx/geometry.hpp"
#include "scx/gradients.hpp"
#include "scx/semiconcavity.hpp"

namespace scx {

// ======================================================
// Support set K
// ======================================================

enum class PairSource { Gradient, Representative };

struct SupportPair {
    Vec y;
    Vec p;
    double u = 0.0;  ///< u(y), cached
    PairSource source = PairSource::Gradient;
};

struct SupportOptions {
    double spacing = 0.01;
    double h_fd = 1e-7;        ///< stencil step at lattice nodes
    double eps_c = 0.02;       ///< differentiability filter at lattice nodes
    GradientProbe probe;       ///< reachable-gradient probe at boundary and kink nodes
    /// Representatives violating u(z) <= u(y) + <p, z-y> + coefficient |z-y|^(1+alpha)
    /// at some node z are dropped (the least violating one per point is kept).
    bool screen = true;
    double alpha = 1.0;
    double coefficient = 1.0;

    /// spacing = 0.01 delta; probe with r0 = spacing / 2 and h_fd = 1e-5 spacing.
    static SupportOptions for_ball(const BallRegion& ball, double spacing = 0.0);
};

struct SupportSet {
    std::vector<SupportPair> pairs;
    BallRegion ball;
    double spacing = 0.0;
    int n_points = 0;            ///< distinct y
    int n_screened = 0;          ///< representatives dropped by screening
    int n_unscreened_points = 0; ///< points where every representative violated the screen

    nlohmann::json to_json() const;
};

/// Gradient pairs at smooth lattice nodes of closure(domain) within the ball, and
/// reachable-gradient representatives at kink nodes and boundary samples.
/// Throws GeometryError when the ball misses the closure.
SupportSet build_support_set(const FunctionSpec& func, const DomainSpec& domain,
                             const BallRegion& ball, const SupportOptions& options);

// ======================================================
// Constants
// ======================================================

/// (C+1)(1+alpha)(1+2^(2-alpha)).
double constant_bound(const ModulusParams& params);
/// coefficient (1+alpha)(1+2^(2-alpha)).
double constant_bound_for(double coefficient, double alpha);

/// C rounded up to two decimals and clamped at 0; the field coefficient is that plus 1.
double rounded_constant(double c_estimate);

/// |Dv_y(x) - Dv_y(z)| / |x-z|^alpha for v_y(w) = coefficient |w-y|^(1+alpha).
double holder_ratio(const Vec& y, const Vec& x, const Vec& z, double alpha, double coefficient);

// ======================================================
// Envelope
// ======================================================

namespace detail {
struct EnvelopeIndex;
}

/// E(u)(x) = min over pairs of u(y) + <p, x-y> + coefficient |x-y|^(1+alpha), together
/// with the term u(x) itself for x in closure(domain).
///
/// Pairs are grouped into buckets by position and gradient; a lower bound per
/// bucket lets most of them be skipped. The result equals the exhaustive scan.
class ExtensionField final : public ScalarField {
public:
    ExtensionField(FunctionSpec u, DomainSpec domain, SupportSet support, ModulusParams params,
                   double coefficient);

    int dim() const override { return support_.ball.dim(); }
    double value(const Vec& x) const override;
    void values(std::span<const Vec> xs, std::span<double> out) const override;
    std::string id() const override { return "extension(" + u_.id() + ")"; }
    nlohmann::json descriptor() const override;
    static std::shared_ptr<ExtensionField> from_descriptor(const nlohmann::json& j);

    /// Plain scan over every pair, kept as the reference for the pruned search.
    double exhaustive_value(const Vec& x) const;

    const SupportSet& support() const { return support_; }
    const ModulusParams& params() const { return params_; }
    double coefficient() const { return coefficient_; }
    double constant_bound() const { return constant_bound_for(coefficient_, params_.alpha); }
    const BallRegion& ball() const { return support_.ball; }
    const DomainSpec& domain() const { return domain_; }
    const FunctionSpec& base() const { return u_; }

private:
    void check_in_ball(const Vec& x) const;
    double initial_value(const Vec& x) const;

    FunctionSpec u_;
    DomainSpec domain_;
    SupportSet support_;
    ModulusParams params_;
    double coefficient_;
    std::shared_ptr<const detail::EnvelopeIndex> index_;
};

/// Support set, default coefficient and field in one call. The constant is
/// estimated on the ball when params_C is absent.
std::shared_ptr<ExtensionField> build_extension(const FunctionSpec& func, const DomainSpec& domain,
                                                const BallRegion& ball, double alpha,
                                                std::optional<double> params_C,
                                                const SupportOptions& options,
                                                int n_triples = 10000, std::uint64_t seed = 1);

// ======================================================
// Partition of unity and gluing
// ======================================================

/// exp(1/(r^2 - 1)) for r < 1, zero otherwise.
double bump(double r);
/// Smooth step: 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t);

/// Bumps over a finite cover of balls plus a cut-off of the domain, normalized.
/// Element j < cover.size() is ball j; the last element is the domain.
class PartitionOfUnity {
public:
    /// eta: width of the domain cut-off band, default half the smallest radius.
    PartitionOfUnity(DomainSpec domain, std::vector<BallRegion> cover, double eta = 0.0);

    std::size_t size() const { return cover_.size() + 1; }
    const std::vector<BallRegion>& cover() const { return cover_; }
    const DomainSpec& domain() const { return domain_; }
    double eta() const { return eta_; }

    std::vector<double> raw(const Vec& y) const;
    /// Normalized weights; throws PartitionError where every bump vanishes.
    std::vector<double> weights(const Vec& y) const;
    /// y inside the open element (ball or domain).
    bool in_element(std::size_t j, const Vec& y) const;
    /// y in the union of the open balls and the domain.
    bool in_union(const Vec& y) const;

    /// Throws PartitionError when some probe has no positive bump or a weight sum
    /// deviating from 1 by more than tol.
    void validate(std::span<const Vec> probes, double tol = 1e-9) const;

    nlohmann::json to_json() const;

private:
    DomainSpec domain_;
    std::vector<BallRegion> cover_;
    double eta_;
};

/// Probe points of the union: a lattice over the bounding box of the cover and
/// the domain inside it, filtered to the union; the lattice is refined until at least n points remain.
std::vector<Vec> union_probe_grid(const PartitionOfUnity& partition, int n);

/// y -> sum_j chi_j(y) E_j(y) + chi_domain(y) u(y).
class GlobalExtension final : public ScalarField {
public:
    GlobalExtension(FunctionSpec u, PartitionOfUnity partition,
                    std::vector<std::shared_ptr<const ScalarField>> local);

    int dim() const override { return u_.dim(); }
    double value(const Vec& y) const override;
    std::string id() const override { return "glued(" + u_.id() + ")"; }
    nlohmann::json descriptor() const override;

    const PartitionOfUnity& partition() const { return partition_; }
    const std::vector<std::shared_ptr<const ScalarField>>& local() const { return local_; }

private:
    FunctionSpec u_;
    PartitionOfUnity partition_;
    std::vector<std::shared_ptr<const ScalarField>> local_;
};

/// Validates the partition on the probes and returns the glued field.
std::shared_ptr<GlobalExtension> glue_global(const FunctionSpec& u, const PartitionOfUnity& partition,
                                             std::vector<std::shared_ptr<const ScalarField>> local,
                                             std::span<const Vec> probes);

// ======================================================
// Mollification
// ======================================================

/// Midpoint tensor grid on [-1,1]^n restricted to |y| < 1 with weights
/// proportional to the bump and summing to one.
struct MollifierQuadrature {
    int dim = 0;
    int m_q = 0;
    std::vector<Vec> nodes;
    std::vector<double> weights;

    static MollifierQuadrature make(int dim, int m_q = 21);
};

/// u_h(x) = sum_j w_j F(x + y_j / h) on B_{delta/2}(x0).
class MollifiedApproximant final : public ScalarField {
public:
    /// Throws ParameterError unless h > 2 / delta.
    MollifiedApproximant(std::shared_ptr<const ScalarField> base, BallRegion ball, int h,
                         int m_q = 21);

    int dim() const override { return ball_.dim(); }
    double value(const Vec& x) const override;
    std::string id() const override { return "mollified(" + base_->id() + ",h=" + std::to_string(h_) + ")"; }
    nlohmann::json descriptor() const override;

    int h() const { return h_; }
    const BallRegion& ball() const { return ball_; }
    /// B_{delta/2}(x0), where u_h is defined.
    BallRegion inner_ball() const { return {ball_.center, 0.5 * ball_.radius}; }
    const MollifierQuadrature& quadrature() const { return quad_; }

private:
    std::shared_ptr<const ScalarField> base_;
    BallRegion ball_;
    int h_;
    MollifierQuadrature quad_;
};

/// True unless the sum of the fields passes the differentiability filter at x
/// while some summand fails it.
bool summand_differentiability_probe(std::span<const FunctionSpec> fields, const DomainSpec& domain,
                                     const Vec& x, double h_fd, double eps_c);

}  // namespace scx
