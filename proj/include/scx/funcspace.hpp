#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "scx/geometry.hpp"
#include "scx/vec.hpp"

namespace scx {

/// Anything that can be evaluated pointwise: named functions, sampled grids,
/// envelopes, glued and mollified fields.
class ScalarField {
public:
    virtual ~ScalarField() = default;
    virtual int dim() const = 0;
    virtual double value(const Vec& x) const = 0;
    /// Batch evaluation; out[i] = value(xs[i]). Fields may override to share work.
    virtual void values(std::span<const Vec> xs, std::span<double> out) const {
        for (std::size_t i = 0; i < xs.size(); ++i) out[i] = value(xs[i]);
    }
    /// Closed-form gradient where the field declares one.
    virtual std::optional<Vec> analytic_gradient(const Vec&) const { return std::nullopt; }
    virtual std::string id() const = 0;
    /// Descriptor sufficient to rebuild the field (see FunctionSpec::from_json).
    virtual nlohmann::json descriptor() const { return {{"id", id()}}; }
};

/// Value handle on a shared, immutable ScalarField.
class FunctionSpec {
public:
    explicit FunctionSpec(std::shared_ptr<const ScalarField> field);

    /// Built-in analytic functions:
    ///   neg-norm            -|x|
    ///   neg-abs-x2          -|x2|
    ///   neg-sqrt-x1p4-x2sq  -sqrt(x1^4 + x2^2)
    ///   sq-norm             |x|^2
    ///   neg-sq-norm         -|x|^2
    ///   x-one-minus-x       x(1-x) in one dimension
    ///   affine              <coefficients, x> + offset
    ///   constant            value
    /// plus anything added with register_function.
    static FunctionSpec named(const std::string& id, int dim, const nlohmann::json& params = {});
    static FunctionSpec affine(Vec coefficients, double offset = 0.0);
    static FunctionSpec constant(int dim, double value);
    /// Multilinear interpolation of node values on a lattice; values are row-major
    /// with the last axis varying fastest.
    static FunctionSpec sampled_grid(Vec origin, Vec spacing, std::vector<int> counts,
                                     std::vector<double> values);
    static FunctionSpec from_callable(std::string id, int dim,
                                      std::function<double(const Vec&)> eval,
                                      std::function<Vec(const Vec&)> gradient = {});
    static FunctionSpec from_json(const nlohmann::json& j, int dim);

    double operator()(const Vec& x) const { return field_->value(x); }
    int dim() const { return field_->dim(); }
    std::string id() const { return field_->id(); }
    std::optional<Vec> analytic_gradient(const Vec& x) const { return field_->analytic_gradient(x); }
    nlohmann::json descriptor() const { return field_->descriptor(); }
    const ScalarField& field() const { return *field_; }
    std::shared_ptr<const ScalarField> shared() const { return field_; }

private:
    std::shared_ptr<const ScalarField> field_;
};

/// Adds a user expression under a new identifier; later calls to named(id, ...) resolve it.
void register_function(const std::string& id, std::function<double(const Vec&)> eval,
                       std::function<Vec(const Vec&)> gradient = {});

enum class GradientMethod { Analytic, CentralDifference };

struct GradientSample {
    Vec point;
    Vec gradient;
    GradientMethod method = GradientMethod::CentralDifference;
    double h_fd = 0.0;
};

/// Forward and backward difference quotients on each axis.
struct StencilProbe {
    Vec central;
    double max_disagreement = 0.0;  ///< max over axes of |forward - backward|
};

double eval(const FunctionSpec& func, const Vec& x);

/// Throws StencilError when some stencil point x +- h e_k leaves closure(domain).
StencilProbe probe_stencil(const FunctionSpec& func, const DomainSpec& domain, const Vec& x,
                           double h_fd);

/// One-sided quotients agree within tol on every axis.
bool passes_differentiability_filter(const StencilProbe& probe, double tol);

/// Analytic gradient when declared, central differences otherwise.
GradientSample gradient(const FunctionSpec& func, const DomainSpec& domain, const Vec& x,
                        double h_fd);

/// Lower bound on the Lipschitz constant over closure(domain) intersected with the ball,
/// from n_pairs seeded random pairs.
double lipschitz_estimate(const FunctionSpec& func, const DomainSpec& domain,
                          const BallRegion& region, int n_pairs, std::uint64_t seed);

/// Uniform sample of closure(domain) intersected with the closed ball; throws
/// InputError when no point is found after max_tries draws.
class RegionSampler {
public:
    RegionSampler(const DomainSpec& domain, const BallRegion& region, int max_tries = 10000);
    template <typename Rng>
    Vec draw(Rng& rng) const {
        for (int t = 0; t < max_tries_; ++t) {
            Vec x = rng.in_ball(region_.center, region_.radius);
            if (domain_.contains(x, Where::Closure)) return x;
        }
        throw_disjoint();
        return {};
    }

private:
    [[noreturn]] void throw_disjoint() const;
    const DomainSpec& domain_;
    const BallRegion& region_;
    int max_tries_;
};

}  // namespace scx
