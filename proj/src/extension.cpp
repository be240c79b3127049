#include "scx/extension.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>

#include "scx/error.hpp"
#include "scx/parallel.hpp"

namespace scx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kScreenTol = 1e-13;

double kernel_sq(double d2, double alpha) {
    return alpha == 1.0 ? d2 : std::pow(d2, 0.5 * (1.0 + alpha));
}

double kernel_r(double r, double alpha) { return alpha == 1.0 ? r * r : std::pow(r, 1.0 + alpha); }

const char* source_name(PairSource s) {
    return s == PairSource::Gradient ? "gradient" : "representative";
}

struct PointData {
    Vec y;
    double u = 0.0;
    bool smooth = false;
    bool isolated = false;
    Vec g;
    std::vector<Vec> reps;
};

}  // namespace

// ======================================================
// Support set
// ======================================================

SupportOptions SupportOptions::for_ball(const BallRegion& ball, double spacing) {
    SupportOptions o;
    o.spacing = spacing > 0.0 ? spacing : 0.01 * ball.radius;
    o.h_fd = 1e-5 * ball.radius;
    o.probe.r0 = 0.5 * o.spacing;
    o.probe.h_fd = 1e-5 * o.spacing;
    return o;
}

nlohmann::json SupportSet::to_json() const {
    nlohmann::json pj = nlohmann::json::array();
    for (const auto& pr : pairs)
        pj.push_back({{"y", pr.y.to_vector()}, {"p", pr.p.to_vector()}, {"u", pr.u},
                      {"source", source_name(pr.source)}});
    return {{"ball", scx::to_json(ball)},
            {"spacing", spacing},
            {"n_points", n_points},
            {"n_screened", n_screened},
            {"n_unscreened_points", n_unscreened_points},
            {"pairs", pj}};
}

SupportSet build_support_set(const FunctionSpec& func, const DomainSpec& domain,
                             const BallRegion& ball, const SupportOptions& options) {
    if (!(options.spacing > 0.0)) throw InputError("support set: spacing must be positive");
    if (ball.dim() != domain.dim() || func.dim() != domain.dim())
        throw InputError("support set: dimension mismatch");

    std::vector<PointData> pts;
    for (const Vec& y : closure_grid(domain, ball, options.spacing)) pts.push_back(PointData{y, 0.0, false, false, Vec(), {}});
    const std::size_t n_nodes = pts.size();
    for (const Vec& b : boundary_sample(domain, ball, options.spacing)) {
        bool dup = false;
        for (std::size_t i = 0; i < n_nodes && !dup; ++i) dup = distance(pts[i].y, b) <= 1e-12;
        if (!dup) pts.push_back(PointData{b, 0.0, false, false, Vec(), {}});
    }
    if (pts.empty()) throw GeometryError("support set: the ball does not meet the closure");

    parallel_for(pts.size(), [&](std::size_t i) {
        PointData& d = pts[i];
        d.u = func(d.y);
        if (i < n_nodes) {
            try {
                const StencilProbe probe = probe_stencil(func, domain, d.y, options.h_fd);
                if (passes_differentiability_filter(probe, options.eps_c)) {
                    d.smooth = true;
                    d.g = func.analytic_gradient(d.y).value_or(probe.central);
                    return;
                }
            } catch (const StencilError&) {
            }
        }
        try {
            d.reps = reachable_gradients(func, domain, d.y, options.probe).representatives;
        } catch (const IsolationError&) {
            d.isolated = true;
        }
    });

    SupportSet set;
    set.ball = ball;
    set.spacing = options.spacing;

    // Screen representatives against every point of the set.
    std::vector<std::vector<double>> violation(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
        const PointData& d = pts[i];
        if (d.smooth || !options.screen) return;
        for (const Vec& p : d.reps) {
            double worst = -kInf;
            for (const PointData& z : pts) {
                const Vec dz = z.y - d.y;
                const double bound =
                    d.u + dot(p, dz) + options.coefficient * kernel_sq(squared_norm(dz), options.alpha);
                worst = std::max(worst, z.u - bound);
            }
            violation[i].push_back(worst);
        }
    });

    for (std::size_t i = 0; i < pts.size(); ++i) {
        const PointData& d = pts[i];
        if (d.isolated) continue;
        ++set.n_points;
        if (d.smooth) {
            set.pairs.push_back({d.y, d.g, d.u, PairSource::Gradient});
            continue;
        }
        std::size_t kept = 0;
        for (std::size_t r = 0; r < d.reps.size(); ++r) {
            if (options.screen && violation[i][r] > kScreenTol) continue;
            set.pairs.push_back({d.y, d.reps[r], d.u, PairSource::Representative});
            ++kept;
        }
        set.n_screened += static_cast<int>(d.reps.size() - kept);
        if (kept == 0 && !d.reps.empty()) {
            const auto best = std::min_element(violation[i].begin(), violation[i].end()) - violation[i].begin();
            set.pairs.push_back({d.y, d.reps[best], d.u, PairSource::Representative});
            --set.n_screened;
            ++set.n_unscreened_points;
        }
    }
    if (set.pairs.empty()) throw GeometryError("support set: no admissible pair");
    return set;
}

// ======================================================
// Constants
// ======================================================

double constant_bound_for(double coefficient, double alpha) {
    return coefficient * (1.0 + alpha) * (1.0 + std::pow(2.0, 2.0 - alpha));
}

double constant_bound(const ModulusParams& params) {
    return constant_bound_for(params.C + 1.0, params.alpha);
}

double rounded_constant(double c_estimate) {
    return std::max(0.0, std::ceil(c_estimate * 100.0 - 1e-9) / 100.0);
}

double holder_ratio(const Vec& y, const Vec& x, const Vec& z, double alpha, double coefficient) {
    const double dxz = distance(x, z);
    if (dxz == 0.0) throw InputError("holder_ratio: x and z coincide");
    auto dv = [&](const Vec& w) {
        const Vec d = w - y;
        if (alpha == 1.0) return 2.0 * coefficient * d;
        const double r = norm(d);
        if (r == 0.0) return Vec(d.dim());
        return coefficient * (1.0 + alpha) * std::pow(r, alpha - 1.0) * d;
    };
    return distance(dv(x), dv(z)) / std::pow(dxz, alpha);
}

// ======================================================
// ExtensionField
// ======================================================

namespace detail {

/// Pair and bucket data in flat arrays (stride kMaxDim), pairs grouped by bucket.
struct EnvelopeIndex {
    int dim = 0;
    double alpha = 1.0;
    double coef = 1.0;
    bool prune = true;
    std::vector<double> y, p, u;
    std::vector<double> center, p_mid;
    std::vector<double> radius, p_radius, p_mid_norm, beta;
    std::vector<std::size_t> begin, end;

    std::size_t n_buckets() const { return radius.size(); }
    std::size_t n_pairs() const { return u.size(); }
};

}  // namespace detail

namespace {

using detail::EnvelopeIndex;

double margin(double best) { return 1e-11 * (1.0 + std::abs(best)); }

template <int N>
double scan(const EnvelopeIndex& ix, const double* x, std::size_t begin, std::size_t end, double best) {
    for (std::size_t i = begin; i < end; ++i) {
        const double* y = &ix.y[kMaxDim * i];
        const double* p = &ix.p[kMaxDim * i];
        double dp = 0.0, d2 = 0.0;
        for (int k = 0; k < N; ++k) {
            const double d = x[k] - y[k];
            dp += p[k] * d;
            d2 += d * d;
        }
        const double t = ix.u[i] + dp + ix.coef * kernel_sq(d2, ix.alpha);
        if (t < best) best = t;
    }
    return best;
}

// Lower bound of every term of bucket b over the ball B(x, rq).
template <int N>
double bucket_bound(const EnvelopeIndex& ix, std::size_t b, const double* x, double rq) {
    const double* c = &ix.center[kMaxDim * b];
    const double* pm = &ix.p_mid[kMaxDim * b];
    double dp = 0.0, d2 = 0.0;
    for (int k = 0; k < N; ++k) {
        const double d = x[k] - c[k];
        dp += pm[k] * d;
        d2 += d * d;
    }
    const double r = std::sqrt(d2);
    return ix.beta[b] + dp - ix.p_mid_norm[b] * rq - ix.p_radius[b] * (r + rq) +
           ix.coef * kernel_r(std::max(0.0, r - rq - ix.radius[b]), ix.alpha);
}

// out[i] holds the starting value (u(x) on the closure, +inf elsewhere) and
// receives the minimum over all pairs.
template <int N>
void envelope_batch(const EnvelopeIndex& ix, const std::vector<double>& xs, std::size_t m, double* out) {
    if (!ix.prune) {
        for (std::size_t i = 0; i < m; ++i) out[i] = scan<N>(ix, &xs[kMaxDim * i], 0, ix.n_pairs(), out[i]);
        return;
    }
    std::array<double, kMaxDim> xc{};
    for (std::size_t i = 0; i < m; ++i)
        for (int k = 0; k < N; ++k) xc[k] += xs[kMaxDim * i + k];
    for (int k = 0; k < N; ++k) xc[k] /= static_cast<double>(m);
    double rq = 0.0;
    if (m > 1) {
        for (std::size_t i = 0; i < m; ++i) {
            double d2 = 0.0;
            for (int k = 0; k < N; ++k) d2 += (xs[kMaxDim * i + k] - xc[k]) * (xs[kMaxDim * i + k] - xc[k]);
            rq = std::max(rq, std::sqrt(d2));
        }
        rq *= 1.0 + 1e-12;
    } else {
        xc = {xs[0], xs[1], xs[2]};
    }

    const std::size_t nb = ix.n_buckets();
    std::vector<double> lb(nb);
    std::size_t bmin = 0;
    for (std::size_t b = 0; b < nb; ++b) {
        lb[b] = bucket_bound<N>(ix, b, xc.data(), rq);
        if (lb[b] < lb[bmin]) bmin = b;
    }
    double worst = -kInf;
    for (std::size_t i = 0; i < m; ++i) worst = std::max(worst, out[i]);
    if (worst == kInf) {
        worst = -kInf;
        for (std::size_t i = 0; i < m; ++i) {
            out[i] = scan<N>(ix, &xs[kMaxDim * i], ix.begin[bmin], ix.end[bmin], out[i]);
            worst = std::max(worst, out[i]);
        }
    }
    std::vector<std::pair<double, std::size_t>> cand;
    for (std::size_t b = 0; b < nb; ++b)
        if (lb[b] <= worst + margin(worst)) cand.emplace_back(lb[b], b);
    std::sort(cand.begin(), cand.end());
    for (const auto& [bound, b] : cand) {
        if (bound > worst + margin(worst)) break;
        if (m == 1) {
            out[0] = scan<N>(ix, &xs[0], ix.begin[b], ix.end[b], out[0]);
            worst = out[0];
            continue;
        }
        worst = -kInf;
        for (std::size_t i = 0; i < m; ++i) {
            const double* x = &xs[kMaxDim * i];
            if (bucket_bound<N>(ix, b, x, 0.0) <= out[i] + margin(out[i]))
                out[i] = scan<N>(ix, x, ix.begin[b], ix.end[b], out[i]);
            worst = std::max(worst, out[i]);
        }
    }
}

void dispatch(const EnvelopeIndex& ix, const std::vector<double>& xs, std::size_t m, double* out) {
    switch (ix.dim) {
        case 1: return envelope_batch<1>(ix, xs, m, out);
        case 2: return envelope_batch<2>(ix, xs, m, out);
        default: return envelope_batch<3>(ix, xs, m, out);
    }
}

std::shared_ptr<EnvelopeIndex> make_index(const SupportSet& support, double alpha, double coef) {
    auto ix = std::make_shared<EnvelopeIndex>();
    const int n = support.ball.dim();
    ix->dim = n;
    ix->alpha = alpha;
    ix->coef = coef;
    ix->prune = coef >= 0.0;
    const double cell = 4.0 * (support.spacing > 0.0 ? support.spacing : 0.01 * support.ball.radius);
    constexpr double p_cell = 0.5;
    std::map<std::array<long, 2 * kMaxDim>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < support.pairs.size(); ++i) {
        const auto& pr = support.pairs[i];
        std::array<long, 2 * kMaxDim> key{};
        for (int k = 0; k < n; ++k) {
            key[k] = static_cast<long>(std::floor((pr.y[k] - support.ball.center[k]) / cell));
            key[kMaxDim + k] = static_cast<long>(std::floor(pr.p[k] / p_cell));
        }
        groups[key].push_back(i);
    }
    for (const auto& [key, idx] : groups) {
        const std::size_t first = ix->u.size();
        Vec ylo = support.pairs[idx[0]].y, yhi = ylo, plo = support.pairs[idx[0]].p, phi = plo;
        for (std::size_t i : idx) {
            const auto& pr = support.pairs[i];
            for (int k = 0; k < kMaxDim; ++k) {
                ix->y.push_back(k < n ? pr.y[k] : 0.0);
                ix->p.push_back(k < n ? pr.p[k] : 0.0);
            }
            ix->u.push_back(pr.u);
            for (int k = 0; k < n; ++k) {
                ylo[k] = std::min(ylo[k], pr.y[k]), yhi[k] = std::max(yhi[k], pr.y[k]);
                plo[k] = std::min(plo[k], pr.p[k]), phi[k] = std::max(phi[k], pr.p[k]);
            }
        }
        const Vec c = 0.5 * (ylo + yhi);
        const Vec pm = 0.5 * (plo + phi);
        double radius = 0.0, p_radius = 0.0, beta = kInf;
        for (std::size_t i : idx) {
            const auto& pr = support.pairs[i];
            radius = std::max(radius, distance(pr.y, c));
            p_radius = std::max(p_radius, distance(pr.p, pm));
            beta = std::min(beta, pr.u + dot(pr.p, c - pr.y));
        }
        for (int k = 0; k < kMaxDim; ++k) {
            ix->center.push_back(k < n ? c[k] : 0.0);
            ix->p_mid.push_back(k < n ? pm[k] : 0.0);
        }
        // Slack for the rounding in the bound itself.
        ix->radius.push_back(radius * (1.0 + 1e-12));
        ix->p_radius.push_back(p_radius * (1.0 + 1e-12));
        ix->p_mid_norm.push_back(norm(pm) * (1.0 + 1e-12));
        ix->beta.push_back(beta - 1e-12 * (1.0 + std::abs(beta)));
        ix->begin.push_back(first);
        ix->end.push_back(ix->u.size());
    }
    return ix;
}

}  // namespace

ExtensionField::ExtensionField(FunctionSpec u, DomainSpec domain, SupportSet support,
                               ModulusParams params, double coefficient)
    : u_(std::move(u)), domain_(std::move(domain)), support_(std::move(support)), params_(params),
      coefficient_(coefficient) {
    if (support_.pairs.empty()) throw InputError("extension: empty support set");
    if (!(coefficient_ > params_.C))
        throw ParameterError("extension: coefficient must exceed the semiconcavity constant");
    if (support_.ball.dim() != domain_.dim() || u_.dim() != domain_.dim())
        throw InputError("extension: dimension mismatch");
    index_ = make_index(support_, params_.alpha, coefficient_);
}

void ExtensionField::check_in_ball(const Vec& x) const {
    if (x.dim() != dim()) throw InputError("extension: dimension mismatch");
    if (!support_.ball.contains_closed(x))
        throw InputError("extension: " + to_string(x) + " lies outside the source ball");
}

double ExtensionField::initial_value(const Vec& x) const {
    return domain_.contains(x, Where::Closure) ? u_(x) : kInf;
}

double ExtensionField::exhaustive_value(const Vec& x) const {
    check_in_ball(x);
    const std::vector<double> xs{x[0], x[1], x[2]};
    double best = initial_value(x);
    switch (dim()) {
        case 1: return scan<1>(*index_, xs.data(), 0, index_->n_pairs(), best);
        case 2: return scan<2>(*index_, xs.data(), 0, index_->n_pairs(), best);
        default: return scan<3>(*index_, xs.data(), 0, index_->n_pairs(), best);
    }
}

double ExtensionField::value(const Vec& x) const {
    double out;
    values(std::span<const Vec>(&x, 1), std::span<double>(&out, 1));
    return out;
}

void ExtensionField::values(std::span<const Vec> xs, std::span<double> out) const {
    if (xs.empty()) return;
    std::vector<double> flat(kMaxDim * xs.size(), 0.0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        check_in_ball(xs[i]);
        for (int k = 0; k < dim(); ++k) flat[kMaxDim * i + k] = xs[i][k];
        out[i] = initial_value(xs[i]);
    }
    dispatch(*index_, flat, xs.size(), out.data());
}

nlohmann::json ExtensionField::descriptor() const {
    return {{"id", "extension"},
            {"function", u_.descriptor()},
            {"domain", domain_.to_json()},
            {"alpha", params_.alpha},
            {"C", params_.C},
            {"coefficient", coefficient_},
            {"constant_bound", constant_bound()},
            {"support", support_.to_json()}};
}

std::shared_ptr<ExtensionField> ExtensionField::from_descriptor(const nlohmann::json& j) {
    try {
        DomainSpec domain = DomainSpec::from_json(j.at("domain"));
        FunctionSpec u = FunctionSpec::from_json(j.at("function"), domain.dim());
        const auto& s = j.at("support");
        SupportSet set;
        set.ball = ball_from_json(s.at("ball"));
        set.spacing = s.at("spacing").get<double>();
        set.n_points = s.value("n_points", 0);
        set.n_screened = s.value("n_screened", 0);
        set.n_unscreened_points = s.value("n_unscreened_points", 0);
        for (const auto& pj : s.at("pairs")) {
            const auto src = pj.at("source").get<std::string>();
            set.pairs.push_back({vec_from_json(pj.at("y")), vec_from_json(pj.at("p")), pj.at("u").get<double>(),
                                 src == "gradient" ? PairSource::Gradient : PairSource::Representative});
        }
        return std::make_shared<ExtensionField>(
            u, domain, std::move(set), ModulusParams(j.at("alpha").get<double>(), j.at("C").get<double>()),
            j.at("coefficient").get<double>());
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("extension descriptor: ") + e.what());
    }
}

std::shared_ptr<ExtensionField> build_extension(const FunctionSpec& func, const DomainSpec& domain,
                                                const BallRegion& ball, double alpha,
                                                std::optional<double> params_C,
                                                const SupportOptions& options, int n_triples,
                                                std::uint64_t seed) {
    const double C = params_C ? *params_C
                              : rounded_constant(estimate_constant(func, domain, ball, alpha, n_triples, seed));
    SupportOptions opts = options;
    opts.alpha = alpha;
    opts.coefficient = C + 1.0;
    SupportSet support = build_support_set(func, domain, ball, opts);
    return std::make_shared<ExtensionField>(func, domain, std::move(support), ModulusParams(alpha, C), C + 1.0);
}

}  // namespace scx
