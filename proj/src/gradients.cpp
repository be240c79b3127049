#include "scx/gradients.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "scx/error.hpp"

namespace scx {

namespace {

constexpr double kGolden = 0.6180339887498949;

struct AngleSample {
    double phi;
    bool valid;
    Vec g;
};

// Gradient at q if q is interior, the stencil fits, and the one-sided
// quotients agree; nullopt otherwise.
std::optional<Vec> filtered_gradient(const FunctionSpec& func, const DomainSpec& domain,
                                     const Vec& q, double h, double eps_c) {
    if (!domain.contains(q, Where::Open)) return std::nullopt;
    StencilProbe probe;
    try {
        probe = probe_stencil(func, domain, q, h);
    } catch (const StencilError&) {
        return std::nullopt;
    }
    if (!passes_differentiability_filter(probe, eps_c)) return std::nullopt;
    if (auto g = func.analytic_gradient(q)) return g;
    return probe.central;
}

// Adaptive angular sampling of one circle: start from an even set of angles and
// bisect the interval with the largest gradient jump (or validity change)
// until the budget is spent or every interval is resolved.
std::vector<Vec> sample_circle(const FunctionSpec& func, const DomainSpec& domain, const Vec& x,
                               double rho, double h, int k, const GradientProbe& probe) {
    constexpr double kTwoPi = 2.0 * std::numbers::pi;
    const int n0 = std::min(probe.m_a, std::max(8, probe.m_a / 4));
    const double offset = kTwoPi * std::fmod(kGolden * (k + 1), 1.0) / n0;
    auto eval_at = [&](double phi) {
        const Vec q = x + rho * Vec{std::cos(phi), std::sin(phi)};
        auto g = filtered_gradient(func, domain, q, h, probe.eps_c);
        return AngleSample{phi, g.has_value(), g.value_or(Vec(2))};
    };
    std::vector<AngleSample> s;
    for (int j = 0; j < n0; ++j) s.push_back(eval_at(offset + kTwoPi * j / n0));

    const double w_min = std::max(0.5 * h / rho, 1e-12);
    const double target = 0.5 * probe.eps_c;
    for (int evals = n0; evals < probe.m_a; ++evals) {
        double best = 0.0;
        std::size_t best_i = s.size();
        double best_width = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const auto& a = s[i];
            const auto& b = s[(i + 1) % s.size()];
            const double width = (i + 1 < s.size()) ? b.phi - a.phi : b.phi + kTwoPi - a.phi;
            if (width < 2.0 * w_min) continue;
            double pri = 0.0;
            if (a.valid && b.valid) {
                const double gap = distance(a.g, b.g);
                if (gap > target) pri = gap;
            } else if (a.valid != b.valid) {
                pri = 1.0;
            }
            if (pri > best) best = pri, best_i = i, best_width = width;
        }
        if (best_i == s.size()) break;
        double mid = s[best_i].phi + 0.5 * best_width;
        if (mid >= offset + kTwoPi) mid -= kTwoPi;
        const auto pos = std::lower_bound(s.begin(), s.end(), mid,
                                          [](const AngleSample& a, double v) { return a.phi < v; });
        s.insert(pos, eval_at(mid));
    }
    std::vector<Vec> out;
    for (const auto& a : s)
        if (a.valid) out.push_back(a.g);
    return out;
}

std::vector<Vec> sample_shell(const FunctionSpec& func, const DomainSpec& domain, const Vec& x,
                              double rho, double h, int k, const GradientProbe& probe) {
    const int n = x.dim();
    std::vector<Vec> out;
    auto take = [&](const Vec& dir) {
        if (auto g = filtered_gradient(func, domain, x + rho * dir, h, probe.eps_c)) out.push_back(*g);
    };
    if (n == 1) {
        take(Vec{1.0});
        take(Vec{-1.0});
    } else if (n == 2) {
        return sample_circle(func, domain, x, rho, h, k, probe);
    } else {
        const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
        const double offset = 2.0 * std::numbers::pi * std::fmod(kGolden * (k + 1), 1.0);
        for (int j = 0; j < probe.m_a; ++j) {
            const double z = 1.0 - 2.0 * (j + 0.5) / probe.m_a;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = offset + j * golden_angle;
            take(Vec{r * std::cos(phi), r * std::sin(phi), z});
        }
    }
    return out;
}

}  // namespace

GradientProbe GradientProbe::for_radius(double delta) {
    GradientProbe p;
    p.r0 = 0.2 * delta;
    p.h_fd = 1e-5 * delta;
    return p;
}

void GradientProbe::validate() const {
    if (!(r0 > 0.0)) throw InputError("gradient probe: r0 must be positive");
    if (!(ratio > 0.0 && ratio < 1.0)) throw InputError("gradient probe: ratio must lie in (0,1)");
    if (k_max < 1) throw InputError("gradient probe: k_max must be >= 1");
    if (m_a < 1) throw InputError("gradient probe: m_a must be >= 1");
    if (!(eps_c > 0.0)) throw InputError("gradient probe: eps_c must be positive");
    if (!(h_fd > 0.0)) throw InputError("gradient probe: h_fd must be positive");
}

nlohmann::json GradientProbe::to_json() const {
    return {{"r0", r0}, {"ratio", ratio}, {"k_max", k_max}, {"m_a", m_a}, {"eps_c", eps_c}, {"h_fd", h_fd}};
}

double ReachableGradientSet::diameter() const {
    double d = 0.0;
    for (std::size_t i = 0; i < representatives.size(); ++i)
        for (std::size_t j = i + 1; j < representatives.size(); ++j)
            d = std::max(d, distance(representatives[i], representatives[j]));
    return d;
}

nlohmann::json ReachableGradientSet::to_json() const {
    nlohmann::json reps = nlohmann::json::array();
    for (std::size_t i = 0; i < representatives.size(); ++i)
        reps.push_back({{"p", representatives[i].to_vector()}, {"cluster_size", cluster_sizes[i]}});
    return {{"base", base.to_vector()},
            {"representatives", reps},
            {"n_samples", n_samples},
            {"annuli_used", annuli_used},
            {"probe", probe.to_json()}};
}

std::pair<std::vector<Vec>, std::vector<int>> cluster_samples(std::vector<Vec> samples,
                                                             double eps_c) {
    std::sort(samples.begin(), samples.end(), lex_less);
    std::vector<Vec> leaders, sums;
    std::vector<int> counts;
    for (const Vec& g : samples) {
        std::size_t best = leaders.size();
        double best_d = eps_c;
        for (std::size_t c = 0; c < leaders.size(); ++c) {
            const double d = distance(g, leaders[c]);
            if (d <= best_d) best_d = d, best = c;
        }
        if (best == leaders.size()) {
            leaders.push_back(g);
            sums.push_back(g);
            counts.push_back(1);
        } else {
            sums[best] += g;
            ++counts[best];
        }
    }
    std::vector<Vec> means;
    for (std::size_t c = 0; c < sums.size(); ++c) means.push_back(sums[c] / counts[c]);

    // Merge the closest pair of means until all are more than eps_c apart.
    for (;;) {
        double best_d = eps_c;
        std::size_t bi = 0, bj = 0;
        bool found = false;
        for (std::size_t i = 0; i < means.size(); ++i)
            for (std::size_t j = i + 1; j < means.size(); ++j) {
                const double d = distance(means[i], means[j]);
                if (d <= best_d) best_d = d, bi = i, bj = j, found = true;
            }
        if (!found) break;
        const int total = counts[bi] + counts[bj];
        means[bi] = (counts[bi] * means[bi] + counts[bj] * means[bj]) / total;
        counts[bi] = total;
        means.erase(means.begin() + bj);
        counts.erase(counts.begin() + bj);
    }

    std::vector<std::size_t> order(means.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return lex_less(means[a], means[b]); });
    std::pair<std::vector<Vec>, std::vector<int>> out;
    for (std::size_t i : order) {
        out.first.push_back(means[i]);
        out.second.push_back(counts[i]);
    }
    return out;
}

ReachableGradientSet reachable_gradients(const FunctionSpec& func, const DomainSpec& domain,
                                         const Vec& x, const GradientProbe& probe) {
    probe.validate();
    if (x.dim() != domain.dim() || func.dim() != domain.dim())
        throw InputError("reachable_gradients: dimension mismatch");
    if (!domain.contains(x, Where::Closure))
        throw InputError("reachable_gradients: " + to_string(x) + " is outside the closure");

    const int keep = std::max(1, probe.k_max / 4);
    const double h_floor = 1e-10 * std::max(1.0, norm(x));
    ReachableGradientSet set;
    set.base = x;
    set.probe = probe;
    std::vector<Vec> samples;
    for (int k = probe.k_max - 1; k >= 0 && static_cast<int>(set.annuli_used.size()) < keep; --k) {
        const double r_out = probe.r0 * std::pow(probe.ratio, k);
        const double rho = r_out * std::sqrt(probe.ratio);
        const double shrink = r_out / probe.r0;
        const double h = std::max(probe.h_fd * shrink * shrink, h_floor);
        auto g = sample_shell(func, domain, x, rho, h, k, probe);
        if (g.empty()) continue;
        set.annuli_used.push_back(k);
        samples.insert(samples.end(), g.begin(), g.end());
    }
    if (samples.empty())
        throw IsolationError("reachable_gradients: no admissible sample point near " + to_string(x));
    set.n_samples = static_cast<int>(samples.size());
    auto [means, sizes] = cluster_samples(std::move(samples), probe.eps_c);
    set.representatives = std::move(means);
    set.cluster_sizes = std::move(sizes);
    return set;
}

double supergradient_defect(const FunctionSpec& func, const DomainSpec& domain, const Vec& x,
                            const Vec& p, const Vec& y, const ModulusParams& params) {
    if (!segment_in_closure(domain, x, y))
        throw HypothesisError("segment " + to_string(x) + " - " + to_string(y) +
                              " leaves the closure of " + domain.describe());
    return func(y) - func(x) - dot(p, y - x) - params.C * modulus_power(distance(x, y), params.alpha);
}

std::vector<Vec> hull_gap(const ReachableGradientSet& set, double eps_g) {
    if (set.representatives.empty()) return {};
    const ConvexPolytope hull = set.hull();
    std::vector<Vec> out;
    for (const Vec& q : sample_hull_boundary(hull, eps_g)) {
        double nearest = INFINITY;
        for (const Vec& p : set.representatives) nearest = std::min(nearest, distance(p, q));
        if (nearest > set.probe.eps_c) out.push_back(q);
    }
    return out;
}

bool is_singular(const FunctionSpec& func, const DomainSpec& domain, const Vec& x, double eps_s,
                 const GradientProbe& probe) {
    return reachable_gradients(func, domain, x, probe).diameter() > eps_s;
}

double hausdorff_distance(std::span<const Vec> a, std::span<const Vec> b) {
    if (a.empty() || b.empty()) throw InputError("hausdorff_distance: empty set");
    auto directed = [](std::span<const Vec> from, std::span<const Vec> to) {
        double worst = 0.0;
        for (const Vec& p : from) {
            double nearest = INFINITY;
            for (const Vec& q : to) nearest = std::min(nearest, distance(p, q));
            worst = std::max(worst, nearest);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

}  // namespace scx
