#include "scx/singularity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "scx/format.hpp"

namespace scx {

namespace {

// Orthonormal basis of the hyperplane orthogonal to the unit vector theta.
std::vector<Vec> transverse_basis(const Vec& theta) {
    const int n = theta.dim();
    std::vector<Vec> out;
    for (int axis = 0; axis < n && static_cast<int>(out.size()) < n - 1; ++axis) {
        Vec v = Vec::unit(n, axis);
        v -= dot(v, theta) * theta;
        for (const Vec& b : out) v -= dot(v, b) * b;
        const double len = norm(v);
        if (len > 1e-6) out.push_back(v / len);
    }
    return out;
}

std::vector<Vec> probe_directions(int n, int m) {
    std::vector<Vec> dirs;
    if (n == 1) return {Vec{1.0}, Vec{-1.0}};
    if (n == 2) {
        for (int j = 0; j < m; ++j) {
            const double phi = 2.0 * std::numbers::pi * (j + 0.5) / m;
            dirs.push_back(Vec{std::cos(phi), std::sin(phi)});
        }
        return dirs;
    }
    const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int j = 0; j < m; ++j) {
        const double z = 1.0 - 2.0 * (j + 0.5) / m;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        dirs.push_back(Vec{r * std::cos(j * golden_angle), r * std::sin(j * golden_angle), z});
    }
    return dirs;
}

}  // namespace

ConditionResult check_condition_h(const ReachableGradientSet& set, double eps_g, double eps_c) {
    ReachableGradientSet copy = set;
    copy.probe.eps_c = eps_c;
    ConditionResult r;
    r.candidates = hull_gap(copy, eps_g);
    r.holds = !r.candidates.empty();
    return r;
}

Vec deepest_candidate(const ReachableGradientSet& set, const std::vector<Vec>& candidates) {
    if (candidates.empty()) throw InputError("deepest_candidate: no candidates");
    double best = -1.0;
    Vec out = candidates.front();
    for (const Vec& q : candidates) {
        double nearest = INFINITY;
        for (const Vec& p : set.representatives) nearest = std::min(nearest, distance(p, q));
        if (nearest > best) best = nearest, out = q;
    }
    return out;
}

std::vector<Vec> propagation_directions(const ReachableGradientSet& set, const Vec& p0, int n_dirs) {
    const auto nus = normal_cone_directions(set.hull(), p0, n_dirs);
    if (nus.empty())
        throw DegenerateDirectionError("normal cone at " + to_string(p0) + " is {0}: p0 is interior");
    std::vector<Vec> out;
    for (const Vec& nu : nus) out.push_back(-nu / norm(nu));
    return out;
}

double singularity_indicator(const ScalarField& field, const BallRegion& ball, const Vec& x,
                             const IndicatorParams& params) {
    const int n = x.dim();
    if (n != field.dim()) throw InputError("singularity_indicator: dimension mismatch");
    if (!(params.rho > 0.0 && params.h_fd > 0.0 && params.m >= 1))
        throw InputError("singularity_indicator: rho, h_fd and m must be positive");
    if (distance(x, ball.center) + params.rho + params.h_fd > ball.radius)
        throw InputError("singularity_indicator: probe ball around " + to_string(x) + " escapes the field ball");
    std::vector<Vec> centers{x};
    for (const Vec& d : probe_directions(n, params.m)) centers.push_back(x + params.rho * d);
    std::vector<Vec> stencil;
    for (const Vec& c : centers)
        for (int k = 0; k < n; ++k) {
            const Vec e = params.h_fd * Vec::unit(n, k);
            stencil.push_back(c + e);
            stencil.push_back(c - e);
        }
    std::vector<double> v(stencil.size());
    field.values(stencil, v);
    std::vector<Vec> grads;
    for (std::size_t c = 0; c < centers.size(); ++c) {
        Vec g(n);
        for (int k = 0; k < n; ++k) g[k] = (v[2 * (c * n + k)] - v[2 * (c * n + k) + 1]) / (2.0 * params.h_fd);
        grads.push_back(g);
    }
    const auto [means, sizes] = cluster_samples(std::move(grads), params.eps_c);
    double d = 0.0;
    for (std::size_t i = 0; i < means.size(); ++i)
        for (std::size_t j = i + 1; j < means.size(); ++j) d = std::max(d, distance(means[i], means[j]));
    return d;
}

TraceParams TraceParams::with_step(double ds, double sigma) {
    TraceParams t;
    t.ds = ds;
    t.sigma = sigma;
    t.width = 3.0 * ds;
    t.step = ds / 10.0;
    t.indicator.rho = 0.75 * t.step;
    t.indicator.h_fd = 0.01 * t.indicator.rho;
    return t;
}

TraceParams TraceParams::for_radius(double delta) { return with_step(0.02 * delta, 0.4 * delta); }

nlohmann::json TraceParams::to_json() const {
    return {{"ds", ds}, {"sigma", sigma}, {"width", width}, {"step", step}, {"eps_s", eps_s},
            {"rho_t", rho_t}, {"indicator_rho", indicator.rho}, {"indicator_m", indicator.m},
            {"indicator_h_fd", indicator.h_fd}, {"eps_c", indicator.eps_c}};
}

double SingularArc::leading_residual() const {
    double worst = 0.0;
    int seen = 0;
    for (const auto& a : samples) {
        if (a.s <= 0.0) continue;
        worst = std::max(worst, a.residual);
        if (++seen == 3) break;
    }
    return worst;
}

bool SingularArc::validated() const {
    if (samples.empty() || samples.front().x != x0) return false;
    for (const auto& a : samples) {
        if (a.s <= 0.0) continue;
        if (!(a.indicator > eps_s) || a.x == x0) return false;
    }
    return leading_residual() <= rho_t;
}

nlohmann::json SingularArc::to_json() const {
    nlohmann::json s = nlohmann::json::array();
    for (const auto& a : samples)
        s.push_back({{"s", a.s}, {"x", a.x.to_vector()}, {"indicator", a.indicator}, {"residual", a.residual}});
    return {{"x0", x0.to_vector()}, {"p0", p0.to_vector()}, {"theta", theta.to_vector()},
            {"sigma", sigma}, {"ds", ds}, {"eps_s", eps_s}, {"rho_t", rho_t},
            {"leading_residual", leading_residual()}, {"validated", validated()}, {"samples", s}};
}

std::string SingularArc::to_csv() const {
    std::ostringstream out;
    out << "s";
    for (int k = 0; k < x0.dim(); ++k) out << ",x" << k + 1;
    out << ",indicator,residual\n";
    for (const auto& a : samples) {
        out << format_double(a.s);
        for (int k = 0; k < a.x.dim(); ++k) out << ',' << format_double(a.x[k]);
        out << ',' << format_double(a.indicator) << ',' << format_double(a.residual) << '\n';
    }
    return out.str();
}

SingularArc trace_singular_arc(const ScalarField& field, const BallRegion& ball, const Vec& x0,
                               const Vec& theta_in, const Vec& p0, const TraceParams& params) {
    const int n = x0.dim();
    if (theta_in.dim() != n || field.dim() != n) throw InputError("trace: dimension mismatch");
    if (!(params.ds > 0.0 && params.sigma > 0.0 && params.step > 0.0 && params.width >= 0.0))
        throw InputError("trace: ds, sigma and the transverse step must be positive");
    const double tn = norm(theta_in);
    if (!(tn > 0.0)) throw InputError("trace: theta must be nonzero");
    const Vec theta = theta_in / tn;
    const double reach = ball.radius - distance(x0, ball.center);
    if (!(params.sigma + params.width + params.indicator.rho + params.indicator.h_fd < reach))
        throw InputError("trace: sigma + w exceeds the distance from x0 to the ball boundary");

    // Transverse offsets ordered by length so ties resolve to the smallest one.
    const auto basis = transverse_basis(theta);
    std::vector<Vec> offsets;
    const int J = static_cast<int>(std::floor(params.width / params.step + 1e-9));
    if (n == 1) {
        offsets.push_back(Vec(1));
    } else if (n == 2) {
        for (int j = -J; j <= J; ++j) offsets.push_back(j * params.step * basis[0]);
    } else {
        for (int a = -J; a <= J; ++a)
            for (int b = -J; b <= J; ++b)
                if (a * a + b * b <= J * J) offsets.push_back(a * params.step * basis[0] + b * params.step * basis[1]);
    }
    std::stable_sort(offsets.begin(), offsets.end(),
                     [](const Vec& a, const Vec& b) { return squared_norm(a) < squared_norm(b); });

    SingularArc arc;
    arc.x0 = x0;
    arc.p0 = p0;
    arc.theta = theta;
    arc.sigma = params.sigma;
    arc.ds = params.ds;
    arc.eps_s = params.eps_s;
    arc.rho_t = params.rho_t;
    arc.samples.push_back({0.0, x0, singularity_indicator(field, ball, x0, params.indicator), 0.0});

    const int steps = static_cast<int>(std::floor(params.sigma / params.ds + 1e-9));
    for (int i = 1; i <= steps; ++i) {
        const double s = i * params.ds;
        const Vec c = x0 + s * theta;
        double best = -1.0;
        Vec best_x = c;
        for (const Vec& o : offsets) {
            const double v = singularity_indicator(field, ball, c + o, params.indicator);
            if (v > best + 1e-9) best = v, best_x = c + o;
        }
        if (!(best > params.eps_s)) {
            std::ostringstream msg;
            msg << "propagation lost at s = " << s << " (indicator " << best << " <= " << params.eps_s << ")";
            throw PropagationLostError(msg.str(), arc, s);
        }
        arc.samples.push_back({s, best_x, best, distance(best_x, c) / s});
    }
    return arc;
}

}  // namespace scx
