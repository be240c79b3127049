#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "scx/format.hpp"
#include "scx/scenario.hpp"
#include "scx/singularity.hpp"

namespace scx {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw Error("write to " + path.string() + " failed");
}

std::string json_number(double v) { return std::isfinite(v) ? format_double(v) : "null"; }

std::string table_csv(const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows) {
    std::string s;
    for (std::size_t i = 0; i < columns.size(); ++i) s += (i ? "," : "") + columns[i];
    s += '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + format_double(r[i]);
        s += '\n';
    }
    return s;
}

std::string table_json(const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows) {
    std::string s = "{\"columns\":[";
    for (std::size_t i = 0; i < columns.size(); ++i) s += (i ? ",\"" : "\"") + columns[i] + "\"";
    s += "],\"rows\":[";
    for (std::size_t k = 0; k < rows.size(); ++k) {
        s += k ? ",\n[" : "\n[";
        for (std::size_t i = 0; i < rows[k].size(); ++i) s += (i ? "," : "") + json_number(rows[k][i]);
        s += "]";
    }
    s += "]}\n";
    return s;
}

std::vector<std::string> coord_columns(int d, const std::string& prefix = "x") {
    std::vector<std::string> c;
    for (int k = 1; k <= d; ++k) c.push_back(prefix + std::to_string(k));
    return c;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double angle_deg(const Vec& a, const Vec& b) {
    const double c = dot(a, b) / (norm(a) * norm(b));
    return std::acos(std::clamp(c, -1.0, 1.0)) * 180.0 / std::numbers::pi;
}

// Closed forms of the worked examples on B_1(0) with alpha = 1 and coefficient 1.
double example_closed_form(int k, const Vec& x) {
    if (x[0] < 0.0) return -std::abs(x[1]) + x[0] * x[0];
    switch (k) {
        case 1: return -norm(x);
        case 2: return -std::abs(x[1]);
        default: return -std::sqrt(x[0] * x[0] * x[0] * x[0] + x[1] * x[1]);
    }
}

// Analytic reachable-gradient sets at the origin, sampled.
std::vector<Vec> example_gradient_set(int k) {
    std::vector<Vec> s;
    if (k == 1) {
        for (int i = 0; i <= 720; ++i) {
            const double t = std::numbers::pi / 2 + std::numbers::pi * i / 720.0;
            s.push_back(Vec{std::cos(t), std::sin(t)});
        }
    } else if (k == 2) {
        s = {Vec{0.0, -1.0}, Vec{0.0, 1.0}};
    } else {
        for (int i = 0; i <= 400; ++i) s.push_back(Vec{0.0, -1.0 + i / 200.0});
    }
    return s;
}

struct Context {
    const ScenarioConfig& cfg;
    FunctionSpec u;
    fs::path dir;
    RunReport& report;

    std::optional<double> C_est;
    std::optional<double> C_used;
    std::shared_ptr<ExtensionField> E;
    std::optional<ReachableGradientSet> u_set;
    std::optional<ConditionResult> cond;
    Vec p0;
    std::vector<Vec> dirs;

    bool wants(const std::string& fmt) const {
        return std::find(cfg.formats.begin(), cfg.formats.end(), fmt) != cfg.formats.end();
    }

    double constant() {
        if (!C_used) {
            if (cfg.C) {
                C_used = *cfg.C;
            } else {
                C_est = estimate_constant(u, cfg.domain, cfg.ball, cfg.alpha, cfg.knobs.triples, cfg.knobs.seed);
                C_used = rounded_constant(*C_est);
            }
        }
        return *C_used;
    }

    ExtensionField& extension() {
        if (!E) {
            SupportOptions opts = SupportOptions::for_ball(cfg.ball, cfg.knobs.support_spacing);
            E = build_extension(u, cfg.domain, cfg.ball, cfg.alpha, constant(), opts, cfg.knobs.triples,
                                cfg.knobs.seed);
        }
        return *E;
    }

    const ReachableGradientSet& base_set() {
        if (!u_set) u_set = reachable_gradients(u, cfg.domain, cfg.ball.center, GradientProbe::for_radius(cfg.ball.radius));
        return *u_set;
    }

    const ConditionResult& condition() {
        if (!cond) {
            const auto& set = base_set();
            cond = check_condition_h(set, cfg.knobs.eps_g, set.probe.eps_c);
            if (cond->holds) {
                p0 = deepest_candidate(set, cond->candidates);
                dirs = propagation_directions(set, p0);
            } else {
                p0 = Vec(set.base.dim());
                for (const auto& r : set.representatives) p0 = p0 + r;
                p0 = p0 / static_cast<double>(set.representatives.size());
            }
        }
        return *cond;
    }

    // Grid-like table in every requested format; returns the artifact names.
    std::vector<std::string> table(const std::string& stem, const std::vector<std::string>& columns,
                                   const std::vector<std::vector<double>>& rows) {
        std::vector<std::string> names;
        if (wants("csv")) {
            write_text(dir / (stem + ".csv"), table_csv(columns, rows));
            names.push_back(stem + ".csv");
        }
        if (wants("json")) {
            write_text(dir / (stem + ".json"), table_json(columns, rows));
            names.push_back(stem + ".json");
        }
        return names;
    }

    std::string document(const std::string& name, const json& j) {
        write_text(dir / name, j.dump(2) + "\n");
        return name;
    }

    // Values of field at the ball_grid nodes, written as a grid table.
    std::vector<double> grid(const std::string& stem, const ScalarField& field, const BallRegion& region,
                             double spacing, std::vector<std::string>& artifacts) {
        const auto nodes = ball_grid(region, spacing);
        std::vector<double> vals(nodes.size());
        field.values(nodes, vals);
        std::vector<std::vector<double>> rows;
        rows.reserve(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            auto r = nodes[i].to_vector();
            r.push_back(vals[i]);
            rows.push_back(std::move(r));
        }
        auto cols = coord_columns(region.dim());
        cols.push_back("value");
        for (auto& n : table(stem, cols, rows)) artifacts.push_back(n);
        return vals;
    }

    // Closed form for the configured expectation, if it applies to this run.
    std::optional<std::function<double(const Vec&)>> closed_form(std::string& why_not) {
        const auto& cf = cfg.expect.closed_form;
        if (cf.empty()) {
            why_not = "no closed form configured";
            return std::nullopt;
        }
        if (cf == "affine") {
            FunctionSpec f = u;
            return [f](const Vec& x) { return f(x); };
        }
        const int k = cf.back() - '0';
        if (cfg.domain.dim() != 2 || cfg.alpha != 1.0 || norm(cfg.ball.center) != 0.0 || cfg.ball.radius != 1.0 ||
            extension().coefficient() != 1.0) {
            why_not = "closed form holds for B_1(0), alpha 1 and coefficient 1 only";
            return std::nullopt;
        }
        return [k](const Vec& x) { return example_closed_form(k, x); };
    }
};

Assertion check(const std::string& name, double value, double limit) {
    return {name, value, limit, value <= limit};
}

void stage_certify(Context& cx, StageReport& st) {
    const double C = cx.constant();
    const auto cert = certify(cx.u, cx.cfg.domain, cx.cfg.ball, ModulusParams(cx.cfg.alpha, C), cx.cfg.knobs.triples,
                              cx.cfg.knobs.seed);
    st.artifacts.push_back(cx.document("certify_base.json", cert.to_json()));
    st.metrics["C_used"] = C;
    st.metrics["C_estimate"] = cx.C_est ? json(*cx.C_est) : json(nullptr);
    st.metrics["max_defect"] = cert.max_defect;
    st.metrics["witnesses"] = cert.witnesses.size();
    // Affine data has rounding-level defects of either sign; exact scenarios bound them instead.
    if (cx.cfg.expect.exact)
        st.assertions.push_back(check("base_max_defect", cert.max_defect, 1e-9));
    else
        st.assertions.push_back(check("base_witnesses", static_cast<double>(cert.witnesses.size()), 0.0));
    cx.report.headline["base_max_defect"] = cert.max_defect;
}

void stage_support(Context& cx, StageReport& st) {
    const auto& E = cx.extension();
    const auto& K = E.support();
    const int d = cx.cfg.domain.dim();
    std::vector<std::vector<double>> rows;
    for (const auto& pr : K.pairs) {
        auto r = pr.y.to_vector();
        for (int k = 0; k < d; ++k) r.push_back(pr.p[k]);
        r.push_back(pr.u);
        r.push_back(pr.source == PairSource::Gradient ? 0.0 : 1.0);
        rows.push_back(std::move(r));
    }
    auto cols = coord_columns(d, "y");
    for (auto& c : coord_columns(d, "p")) cols.push_back(c);
    cols.push_back("u");
    cols.push_back("representative");
    for (auto& n : cx.table("support", cols, rows)) st.artifacts.push_back(n);
    st.metrics = K.to_json();
    st.metrics["coefficient"] = E.coefficient();
    st.metrics["constant_bound"] = E.constant_bound();
}

void stage_extend(Context& cx, StageReport& st) {
    auto& E = cx.extension();
    const auto& K = E.support();
    double identity = 0.0;
    for (const auto& pr : K.pairs) identity = std::max(identity, std::abs(E.value(pr.y) - pr.u));
    st.metrics["identity_max_error"] = identity;
    st.assertions.push_back(check("identity_max_error", identity, 1e-12));
    cx.report.headline["identity_max_error"] = identity;

    const auto vals = cx.grid("extend_grid", E, cx.cfg.ball, cx.cfg.knobs.grid_spacing, st.artifacts);
    std::string why;
    if (auto cf = cx.closed_form(why)) {
        const auto nodes = ball_grid(cx.cfg.ball, cx.cfg.knobs.grid_spacing);
        double err = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) err = std::max(err, std::abs(vals[i] - (*cf)(nodes[i])));
        st.metrics["envelope_sup_error"] = err;
        st.assertions.push_back(check("envelope_sup_error", err, cx.cfg.knobs.grid_tol));
        cx.report.headline["envelope_sup_error"] = err;
    } else {
        st.metrics["envelope_sup_error"] = nullptr;
        st.metrics["closed_form_skipped"] = why;
    }

    const double bound = E.constant_bound() + 0.05;
    const auto cert = certify(FunctionSpec(cx.E), DomainSpec::ball(cx.cfg.ball.center, cx.cfg.ball.radius), cx.cfg.ball,
                              ModulusParams(cx.cfg.alpha, bound), cx.cfg.knobs.triples, cx.cfg.knobs.seed);
    st.artifacts.push_back(cx.document("certify_extension.json", cert.to_json()));
    st.metrics["extension_max_defect"] = cert.max_defect;
    st.metrics["extension_constant"] = bound;
    st.assertions.push_back(check("extension_witnesses", static_cast<double>(cert.witnesses.size()), 0.0));
    cx.report.headline["extension_max_defect"] = cert.max_defect;
}

void stage_gradients(Context& cx, StageReport& st) {
    const auto& cfg = cx.cfg;
    auto& E = cx.extension();
    const auto env = reachable_gradients(FunctionSpec(cx.E), DomainSpec::ball(cfg.ball.center, cfg.ball.radius),
                                         cfg.ball.center, GradientProbe::for_radius(cfg.ball.radius));
    const auto& base = cx.base_set();
    (void)E;
    st.artifacts.push_back(cx.document("gradients.json", {{"base", base.to_json()}, {"envelope", env.to_json()}}));
    st.metrics["envelope_representatives"] = env.representatives.size();
    st.metrics["base_representatives"] = base.representatives.size();
    st.metrics["envelope_vs_base_hausdorff"] = hausdorff_distance(env.representatives, base.representatives);

    std::vector<Vec> analytic;
    const auto& cf = cfg.expect.closed_form;
    if (cf == "affine") {
        analytic = {vec_from_json(cfg.function.at("coefficients"))};
    } else if (!cf.empty() && cfg.domain.dim() == 2 && norm(cfg.ball.center) == 0.0) {
        analytic = example_gradient_set(cf.back() - '0');
    }
    if (!analytic.empty()) {
        const double h = hausdorff_distance(env.representatives, analytic);
        st.metrics["hausdorff_envelope"] = h;
        st.metrics["hausdorff_base"] = hausdorff_distance(base.representatives, analytic);
        st.assertions.push_back(check("hausdorff_envelope", h, cfg.knobs.gradient_tol));
        cx.report.headline["hausdorff_envelope"] = h;
    }
}

void stage_condition(Context& cx, StageReport& st) {
    const auto& cond = cx.condition();
    json cands = json::array();
    for (const auto& c : cond.candidates) cands.push_back(scx::to_json(c));
    json dirs = json::array();
    for (const auto& t : cx.dirs) dirs.push_back(scx::to_json(t));
    st.artifacts.push_back(cx.document(
        "condition.json", {{"condition_h", cond.holds}, {"candidates", cands}, {"p0", scx::to_json(cx.p0)}, {"directions", dirs}}));
    st.metrics["condition_h"] = cond.holds;
    st.metrics["n_candidates"] = cond.candidates.size();
    st.metrics["directions"] = dirs;
    cx.report.headline["condition_h"] = cond.holds;
    if (cx.cfg.expect.condition_h)
        st.assertions.push_back({"condition_h", cond.holds ? 1.0 : 0.0, *cx.cfg.expect.condition_h ? 1.0 : 0.0,
                                 cond.holds == *cx.cfg.expect.condition_h});
    if (!cx.cfg.expect.theta.empty()) {
        // Both ways: every expected direction is recovered and nothing else is.
        double worst = 0.0;
        for (const auto& t : cx.cfg.expect.theta) {
            double best = 180.0;
            for (const auto& d : cx.dirs) best = std::min(best, angle_deg(t, d));
            worst = std::max(worst, best);
        }
        for (const auto& d : cx.dirs) {
            double best = 180.0;
            for (const auto& t : cx.cfg.expect.theta) best = std::min(best, angle_deg(t, d));
            worst = std::max(worst, best);
        }
        st.metrics["direction_error_deg"] = worst;
        st.assertions.push_back(check("direction_error_deg", worst, cx.cfg.knobs.theta_tol_deg));
    }
}

void stage_trace(Context& cx, StageReport& st) {
    const auto& cfg = cx.cfg;
    const auto& cond = cx.condition();
    std::vector<Vec> thetas = cond.holds ? cx.dirs : cfg.expect.trace_theta;
    if (thetas.empty()) {
        st.status = "skipped";
        st.message = "condition (h) fails and no trace_theta is configured";
        return;
    }
    auto& E = cx.extension();
    const TraceParams params = TraceParams::with_step(cfg.knobs.trace_ds, cfg.knobs.trace_sigma);
    json arcs = json::array();
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        const Vec theta = thetas[i] / norm(thetas[i]);
        SingularArc arc;
        bool lost = false;
        try {
            arc = trace_singular_arc(E, cfg.ball.center, theta, cx.p0, params);
        } catch (const PropagationLostError& e) {
            arc = e.partial();
            lost = true;
        }
        const std::string stem = "arc_" + std::to_string(i + 1);
        std::vector<std::vector<double>> rows;
        for (const auto& s : arc.samples) {
            std::vector<double> r{s.s};
            for (double v : s.x.to_vector()) r.push_back(v);
            r.push_back(s.indicator);
            r.push_back(s.residual);
            rows.push_back(std::move(r));
        }
        std::vector<std::string> cols{"s"};
        for (auto& c : coord_columns(theta.dim())) cols.push_back(c);
        cols.push_back("indicator");
        cols.push_back("residual");
        for (auto& n : cx.table(stem, cols, rows)) st.artifacts.push_back(n);
        const bool ok = !lost && arc.validated();
        arcs.push_back({{"theta", scx::to_json(theta)},
                        {"lost", lost},
                        {"validated", ok},
                        {"leading_residual", arc.leading_residual()},
                        {"n_samples", arc.samples.size()}});
        st.assertions.push_back({stem + "_validated", ok ? 1.0 : 0.0, 1.0, ok});
    }
    st.metrics["arcs"] = arcs;
    st.metrics["params"] = params.to_json();
    cx.report.headline["arcs"] = arcs;
}

void stage_glue(Context& cx, StageReport& st) {
    const auto& cfg = cx.cfg;
    cx.extension();
    PartitionOfUnity partition(cfg.domain, {cfg.ball});
    const auto probes = union_probe_grid(partition, 1000);
    const auto glued = glue_global(cx.u, partition, {cx.E}, probes);
    double sum_dev = 0.0, on_domain = 0.0;
    int range_bad = 0, support_bad = 0;
    std::vector<std::vector<double>> rows;
    for (const auto& y : probes) {
        const auto w = partition.weights(y);
        double s = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) {
            s += w[j];
            if (w[j] < 0.0 || w[j] > 1.0) ++range_bad;
            if (w[j] > 0.0 && !partition.in_element(j, y)) ++support_bad;
        }
        sum_dev = std::max(sum_dev, std::abs(s - 1.0));
        const double g = glued->value(y);
        if (cfg.domain.contains(y, Where::Closure)) on_domain = std::max(on_domain, std::abs(g - cx.u(y)));
        auto r = y.to_vector();
        r.insert(r.end(), w.begin(), w.end());
        r.push_back(g);
        rows.push_back(std::move(r));
    }
    auto cols = coord_columns(cfg.domain.dim());
    cols.push_back("w_ball");
    cols.push_back("w_domain");
    cols.push_back("value");
    for (auto& n : cx.table("glue", cols, rows)) st.artifacts.push_back(n);
    st.metrics["n_probes"] = probes.size();
    st.metrics["weight_sum_max_deviation"] = sum_dev;
    st.metrics["glued_vs_u_max_error"] = on_domain;
    st.assertions.push_back(check("weight_sum_max_deviation", sum_dev, 1e-12));
    st.assertions.push_back(check("weights_outside_unit_interval", range_bad, 0.0));
    st.assertions.push_back(check("weights_outside_element", support_bad, 0.0));
    st.assertions.push_back(check("glued_vs_u_max_error", on_domain, 1e-9));
    cx.report.headline["glued_vs_u_max_error"] = on_domain;
}

void stage_mollify(Context& cx, StageReport& st) {
    const auto& cfg = cx.cfg;
    auto& E = cx.extension();
    const BallRegion inner(cfg.ball.center, 0.5 * cfg.ball.radius);
    const auto base_vals = cx.grid("extend_inner", E, inner, cfg.knobs.mollify_spacing, st.artifacts);
    const double bound = E.constant_bound() + 0.05;
    json per_h = json::array();
    double prev = -1.0;
    for (int h : cfg.knobs.h_list) {
        auto M = std::make_shared<MollifiedApproximant>(cx.E, cfg.ball, h);
        const auto vals = cx.grid("mollify_h" + std::to_string(h), *M, inner, cfg.knobs.mollify_spacing, st.artifacts);
        double sup = 0.0;
        for (std::size_t i = 0; i < vals.size(); ++i) sup = std::max(sup, std::abs(vals[i] - base_vals[i]));
        const std::string tag = "h" + std::to_string(h);
        st.assertions.push_back(check("sup_error_" + tag, sup, cfg.expect.exact ? 1e-9 : 2.0 / h));
        json entry = {{"h", h}, {"sup_error", sup}};
        if (!cfg.expect.exact && prev > 0.0) {
            entry["ratio"] = sup / prev;
            st.assertions.push_back(check("ratio_" + tag, sup / prev, 0.6));
        }
        const auto cert = certify(FunctionSpec(M), DomainSpec::ball(inner.center, inner.radius), inner,
                                  ModulusParams(cfg.alpha, bound), cfg.knobs.triples, cfg.knobs.seed);
        st.artifacts.push_back(cx.document("certify_mollify_" + tag + ".json", cert.to_json()));
        entry["max_defect"] = cert.max_defect;
        st.assertions.push_back(check("witnesses_" + tag, static_cast<double>(cert.witnesses.size()), 0.0));
        per_h.push_back(entry);
        prev = sup;
    }
    st.metrics["per_h"] = per_h;
    st.metrics["constant"] = bound;
    cx.report.headline["mollify"] = per_h;
}

json assertion_json(const Assertion& a) {
    return {{"name", a.name}, {"value", a.value}, {"limit", a.limit}, {"passed", a.passed}};
}

}  // namespace

bool RunReport::passed() const {
    for (const auto& s : stages)
        if (s.status == "fail" || s.status == "error") return false;
    return true;
}

const StageReport* RunReport::stage(const std::string& name) const {
    for (const auto& s : stages)
        if (s.name == name) return &s;
    return nullptr;
}

json RunReport::to_json() const {
    json st = json::array();
    for (const auto& s : stages) {
        json a = json::array();
        for (const auto& x : s.assertions) a.push_back(assertion_json(x));
        st.push_back({{"name", s.name},
                      {"status", s.status},
                      {"wall_time_s", s.wall_time_s},
                      {"artifacts", s.artifacts},
                      {"metrics", s.metrics},
                      {"assertions", a},
                      {"message", s.message}});
    }
    return {{"tool", "scx"},       {"version", kToolVersion}, {"schema", kSchemaVersion},
            {"passed", passed()},  {"headline", headline},    {"stages", st},
            {"config", config.to_json()}};
}

RunReport run_scenario(const ScenarioConfig& config) {
    config.validate();
    RunReport report;
    report.config = config;
    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec) throw Error("cannot create " + config.out_dir.string() + ": " + ec.message());

    Context cx{config, FunctionSpec::from_json(config.function, config.domain.dim()), config.out_dir, report,
               {}, {}, {}, {}, {}, Vec(), {}};
    using StageFn = void (*)(Context&, StageReport&);
    const std::vector<std::pair<std::string, StageFn>> table{
        {"certify", stage_certify},     {"support", stage_support}, {"extend", stage_extend},
        {"gradients", stage_gradients}, {"condition", stage_condition}, {"trace", stage_trace},
        {"glue", stage_glue},           {"mollify", stage_mollify}};

    auto write_report = [&] { write_text(config.out_dir / "report.json", report.to_json().dump(2) + "\n"); };
    for (const auto& [name, fn] : table) {
        if (std::find(config.stages.begin(), config.stages.end(), name) == config.stages.end()) continue;
        StageReport st;
        st.name = name;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            fn(cx, st);
        } catch (const std::exception& e) {
            st.status = "error";
            st.message = e.what();
            st.wall_time_s = seconds_since(t0);
            report.stages.push_back(std::move(st));
            write_report();
            throw StageError(name, e.what());
        }
        st.wall_time_s = seconds_since(t0);
        if (st.status.empty()) {
            st.status = "pass";
            for (const auto& a : st.assertions)
                if (!a.passed) st.status = "fail";
        }
        report.stages.push_back(std::move(st));
    }
    write_report();
    return report;
}

std::vector<Vec> ball_grid(const BallRegion& region, double spacing) {
    if (!(spacing > 0.0)) throw InputError("grid spacing must be positive");
    return closure_grid(DomainSpec::ball(region.center, 2.0 * region.radius + spacing), region, spacing);
}

void emit_grid(const ScalarField& field, const BallRegion& region, double spacing, GridFormat format,
               const fs::path& path) {
    if (field.dim() != region.dim()) throw InputError("emit_grid: dimension mismatch");
    const auto nodes = ball_grid(region, spacing);
    std::vector<double> vals(nodes.size());
    field.values(nodes, vals);
    std::vector<std::vector<double>> rows;
    rows.reserve(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        auto r = nodes[i].to_vector();
        r.push_back(vals[i]);
        rows.push_back(std::move(r));
    }
    auto cols = coord_columns(region.dim());
    cols.push_back("value");
    write_text(path, format == GridFormat::Csv ? table_csv(cols, rows) : table_json(cols, rows));
}

std::pair<std::vector<Vec>, std::vector<double>> read_grid_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw Error(path.string() + ": empty file");
    const int d = static_cast<int>(std::count(line.begin(), line.end(), ','));
    std::vector<Vec> pts;
    std::vector<double> vals;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> r;
        while (std::getline(ss, cell, ',')) r.push_back(std::stod(cell));
        if (static_cast<int>(r.size()) != d + 1) throw Error(path.string() + ": ragged row");
        vals.push_back(r.back());
        r.pop_back();
        pts.push_back(Vec::from(r));
    }
    return {pts, vals};
}

}  // namespace scx
