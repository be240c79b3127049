#include "scx/funcspace.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>

#include "scx/error.hpp"
#include "scx/random.hpp"

namespace scx {

namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

class CallableField final : public ScalarField {
public:
    CallableField(std::string id, int dim, std::function<double(const Vec&)> eval,
                  std::function<Vec(const Vec&)> grad, nlohmann::json params = {})
        : id_(std::move(id)), dim_(dim), eval_(std::move(eval)), grad_(std::move(grad)),
          params_(std::move(params)) {}

    int dim() const override { return dim_; }
    double value(const Vec& x) const override {
        if (x.dim() != dim_) throw InputError(id_ + ": dimension mismatch");
        return eval_(x);
    }
    std::optional<Vec> analytic_gradient(const Vec& x) const override {
        if (!grad_) return std::nullopt;
        return grad_(x);
    }
    std::string id() const override { return id_; }
    nlohmann::json descriptor() const override {
        nlohmann::json j = params_.is_object() ? params_ : nlohmann::json::object();
        j["id"] = id_;
        return j;
    }

private:
    std::string id_;
    int dim_;
    std::function<double(const Vec&)> eval_;
    std::function<Vec(const Vec&)> grad_;
    nlohmann::json params_;
};

class SampledGridField final : public ScalarField {
public:
    SampledGridField(Vec origin, Vec spacing, std::vector<int> counts, std::vector<double> values)
        : origin_(std::move(origin)), spacing_(std::move(spacing)), counts_(std::move(counts)),
          values_(std::move(values)) {
        const int n = origin_.dim();
        if (spacing_.dim() != n || static_cast<int>(counts_.size()) != n)
            throw InputError("sampled-grid: dimension mismatch");
        std::size_t total = 1;
        for (int k = 0; k < n; ++k) {
            if (counts_[k] < 2) throw InputError("sampled-grid: need at least 2 nodes per axis");
            if (!(spacing_[k] > 0.0)) throw InputError("sampled-grid: spacing must be positive");
            total *= static_cast<std::size_t>(counts_[k]);
        }
        if (values_.size() != total) throw InputError("sampled-grid: wrong number of values");
    }

    int dim() const override { return origin_.dim(); }

    double value(const Vec& x) const override {
        const int n = dim();
        if (x.dim() != n) throw InputError("sampled-grid: dimension mismatch");
        std::array<int, kMaxDim> base{};
        std::array<double, kMaxDim> frac{};
        for (int k = 0; k < n; ++k) {
            const double t = (x[k] - origin_[k]) / spacing_[k];
            const double last = counts_[k] - 1;
            if (t < -1e-9 || t > last + 1e-9)
                throw EvaluationError("sampled-grid: point " + to_string(x) + " outside grid hull");
            const double tc = std::clamp(t, 0.0, last);
            int b = static_cast<int>(std::floor(tc));
            if (b >= counts_[k] - 1) b = counts_[k] - 2;
            base[k] = b;
            frac[k] = tc - b;
        }
        double acc = 0.0;
        for (int corner = 0; corner < (1 << n); ++corner) {
            double w = 1.0;
            std::size_t idx = 0;
            for (int k = 0; k < n; ++k) {
                const int bit = (corner >> k) & 1;
                w *= bit ? frac[k] : 1.0 - frac[k];
                idx = idx * counts_[k] + (base[k] + bit);
            }
            if (w != 0.0) acc += w * values_[idx];
        }
        return acc;
    }

    std::string id() const override { return "sampled-grid"; }
    nlohmann::json descriptor() const override {
        return {{"id", "sampled-grid"},
                {"origin", to_json(origin_)},
                {"spacing", to_json(spacing_)},
                {"counts", counts_},
                {"values", values_}};
    }

private:
    Vec origin_, spacing_;
    std::vector<int> counts_;
    std::vector<double> values_;
};

struct Registered {
    std::function<double(const Vec&)> eval;
    std::function<Vec(const Vec&)> grad;
};

std::mutex& registry_mutex() {
    static std::mutex m;
    return m;
}
std::map<std::string, Registered>& registry() {
    static std::map<std::string, Registered> r;
    return r;
}

void require_min_dim(const std::string& id, int dim, int min_dim) {
    if (dim < min_dim) throw InputError(id + " needs dimension >= " + std::to_string(min_dim));
}

}  // namespace

// ======================================================
// FunctionSpec
// ======================================================

FunctionSpec::FunctionSpec(std::shared_ptr<const ScalarField> field) : field_(std::move(field)) {
    if (!field_) throw InputError("FunctionSpec: null field");
}

FunctionSpec FunctionSpec::from_callable(std::string id, int dim,
                                         std::function<double(const Vec&)> eval,
                                         std::function<Vec(const Vec&)> gradient) {
    return FunctionSpec(std::make_shared<CallableField>(std::move(id), dim, std::move(eval),
                                                        std::move(gradient)));
}

FunctionSpec FunctionSpec::affine(Vec coefficients, double offset) {
    const int dim = coefficients.dim();
    nlohmann::json params = {{"coefficients", to_json(coefficients)}, {"offset", offset}};
    return FunctionSpec(std::make_shared<CallableField>(
        "affine", dim, [coefficients, offset](const Vec& x) { return dot(coefficients, x) + offset; },
        [coefficients](const Vec&) { return coefficients; }, params));
}

FunctionSpec FunctionSpec::constant(int dim, double value) {
    return FunctionSpec(std::make_shared<CallableField>(
        "constant", dim, [value](const Vec&) { return value; },
        [dim](const Vec&) { return Vec(dim); }, nlohmann::json{{"value", value}}));
}

FunctionSpec FunctionSpec::sampled_grid(Vec origin, Vec spacing, std::vector<int> counts,
                                        std::vector<double> values) {
    return FunctionSpec(std::make_shared<SampledGridField>(std::move(origin), std::move(spacing),
                                                           std::move(counts), std::move(values)));
}

FunctionSpec FunctionSpec::named(const std::string& id, int dim, const nlohmann::json& params) {
    if (dim < 1 || dim > kMaxDim) throw InputError("function dimension must be 1, 2 or 3");
    auto make = [&](auto eval, auto grad) {
        return FunctionSpec(std::make_shared<CallableField>(id, dim, eval, grad));
    };
    if (id == "neg-norm")
        return make([](const Vec& x) { return -norm(x); },
                    [](const Vec& x) {
                        const double r = norm(x);
                        return r > 0.0 ? -x / r : Vec(x.dim());
                    });
    if (id == "neg-abs-x2") {
        require_min_dim(id, dim, 2);
        return make([](const Vec& x) { return -std::abs(x[1]); },
                    [](const Vec& x) {
                        Vec g(x.dim());
                        g[1] = -sign(x[1]);
                        return g;
                    });
    }
    if (id == "neg-sqrt-x1p4-x2sq") {
        if (dim != 2) throw InputError(id + " is defined in dimension 2");
        return make(
            [](const Vec& x) {
                const double a = x[0] * x[0];
                return -std::sqrt(a * a + x[1] * x[1]);
            },
            [](const Vec& x) {
                const double a = x[0] * x[0];
                const double r = std::sqrt(a * a + x[1] * x[1]);
                if (r == 0.0) return Vec(2);
                return Vec{-2.0 * a * x[0] / r, -x[1] / r};
            });
    }
    if (id == "sq-norm")
        return make([](const Vec& x) { return squared_norm(x); }, [](const Vec& x) { return 2.0 * x; });
    if (id == "neg-sq-norm")
        return make([](const Vec& x) { return -squared_norm(x); },
                    [](const Vec& x) { return -2.0 * x; });
    if (id == "x-one-minus-x") {
        if (dim != 1) throw InputError(id + " is defined in dimension 1");
        return make([](const Vec& x) { return x[0] * (1.0 - x[0]); },
                    [](const Vec& x) { return Vec{1.0 - 2.0 * x[0]}; });
    }
    if (id == "affine") {
        Vec p = vec_from_json(params.at("coefficients"));
        if (p.dim() != dim) throw InputError("affine: coefficient length must equal dimension");
        return affine(p, params.value("offset", 0.0));
    }
    if (id == "constant") return constant(dim, params.value("value", 0.0));
    {
        std::lock_guard lock(registry_mutex());
        auto it = registry().find(id);
        if (it != registry().end())
            return FunctionSpec(std::make_shared<CallableField>(id, dim, it->second.eval, it->second.grad));
    }
    throw InputError("unknown function identifier \"" + id + "\"");
}

FunctionSpec FunctionSpec::from_json(const nlohmann::json& j, int dim) {
    if (!j.is_object() || !j.contains("id")) throw InputError("function: missing \"id\"");
    const std::string id = j.at("id").get<std::string>();
    if (id == "sampled-grid") {
        return sampled_grid(vec_from_json(j.at("origin")), vec_from_json(j.at("spacing")),
                            j.at("counts").get<std::vector<int>>(),
                            j.at("values").get<std::vector<double>>());
    }
    return named(id, dim, j);
}

void register_function(const std::string& id, std::function<double(const Vec&)> eval,
                       std::function<Vec(const Vec&)> gradient) {
    if (!eval) throw InputError("register_function: empty evaluator");
    std::lock_guard lock(registry_mutex());
    registry()[id] = Registered{std::move(eval), std::move(gradient)};
}

// ======================================================
// Operations
// ======================================================

double eval(const FunctionSpec& func, const Vec& x) { return func(x); }

StencilProbe probe_stencil(const FunctionSpec& func, const DomainSpec& domain, const Vec& x,
                           double h_fd) {
    if (!(h_fd > 0.0)) throw InputError("h_fd must be positive");
    const int n = x.dim();
    if (n != domain.dim()) throw InputError("probe_stencil: dimension mismatch");
    for (int k = 0; k < n; ++k) {
        const Vec e = Vec::unit(n, k);
        if (!domain.contains(x + h_fd * e, Where::Closure) ||
            !domain.contains(x - h_fd * e, Where::Closure))
            throw StencilError("stencil of radius " + std::to_string(h_fd) + " at " + to_string(x) +
                               " leaves the domain");
    }
    const double f0 = func(x);
    StencilProbe out{Vec(n), 0.0};
    for (int k = 0; k < n; ++k) {
        Vec xp = x, xm = x;
        xp[k] += h_fd;
        xm[k] -= h_fd;
        const double fp = func(xp);
        const double fm = func(xm);
        const double forward = (fp - f0) / h_fd;
        const double backward = (f0 - fm) / h_fd;
        out.central[k] = (fp - fm) / (2.0 * h_fd);
        out.max_disagreement = std::max(out.max_disagreement, std::abs(forward - backward));
    }
    return out;
}

bool passes_differentiability_filter(const StencilProbe& probe, double tol) {
    return probe.max_disagreement <= tol;
}

GradientSample gradient(const FunctionSpec& func, const DomainSpec& domain, const Vec& x,
                        double h_fd) {
    if (auto g = func.analytic_gradient(x)) {
        if (!domain.contains(x, Where::Closure))
            throw StencilError("gradient requested outside the domain at " + to_string(x));
        return {x, *g, GradientMethod::Analytic, 0.0};
    }
    StencilProbe probe = probe_stencil(func, domain, x, h_fd);
    return {x, probe.central, GradientMethod::CentralDifference, h_fd};
}

RegionSampler::RegionSampler(const DomainSpec& domain, const BallRegion& region, int max_tries)
    : domain_(domain), region_(region), max_tries_(max_tries) {
    if (domain.dim() != region.dim()) throw InputError("region/domain dimension mismatch");
}

void RegionSampler::throw_disjoint() const {
    throw InputError("region " + to_string(region_.center) + " r=" + std::to_string(region_.radius) +
                     " does not meet " + domain_.describe());
}

double lipschitz_estimate(const FunctionSpec& func, const DomainSpec& domain,
                          const BallRegion& region, int n_pairs, std::uint64_t seed) {
    if (n_pairs < 1) throw InputError("lipschitz_estimate: n_pairs must be >= 1");
    RegionSampler sampler(domain, region);
    Rng rng(seed);
    double best = 0.0;
    for (int i = 0; i < n_pairs; ++i) {
        const Vec x = sampler.draw(rng);
        const Vec y = sampler.draw(rng);
        const double d = distance(x, y);
        if (d <= 0.0) continue;
        best = std::max(best, std::abs(func(x) - func(y)) / d);
    }
    return best;
}

}  // namespace scx
