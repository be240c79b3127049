#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "scx/scenario.hpp"

namespace scx {

namespace {

using nlohmann::json;

std::vector<Vec> vecs_from_json(const json& j) {
    if (!j.is_array()) throw InputError("expected an array of vectors");
    std::vector<Vec> out;
    for (const auto& v : j) out.push_back(vec_from_json(v));
    return out;
}

json vecs_to_json(const std::vector<Vec>& vs) {
    json a = json::array();
    for (const auto& v : vs) a.push_back(scx::to_json(v));
    return a;
}

// Line of the first occurrence of "key" in text, 0 when absent.
int line_of_key(const std::string& text, const std::string& key) {
    const auto pos = text.find("\"" + key + "\"");
    return pos == std::string::npos ? 0 : line_of_offset(text, pos);
}

[[noreturn]] void fail_field(const std::string& text, const std::string& key, const std::string& msg) {
    const int line = line_of_key(text, key);
    throw ConfigError((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + "\"" + key +
                      "\": " + msg);
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& text,
                const std::string& section) {
    if (!j.is_object()) fail_field(text, section, "expected an object");
    for (const auto& [k, _] : j.items())
        if (!allowed.contains(k)) fail_field(text, k, "unknown field in " + section);
}

// Runs f, converting parse failures into ConfigError tagged with key.
template <typename F>
void field(const std::string& text, const std::string& key, F&& f) {
    try {
        f();
    } catch (const ConfigError&) {
        throw;
    } catch (const json::exception& e) {
        fail_field(text, key, e.what());
    } catch (const Error& e) {
        fail_field(text, key, e.what());
    }
}

std::vector<std::string> stages_from_json(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "all") return all_stages();
        return {j.get<std::string>()};
    }
    return j.get<std::vector<std::string>>();
}

}  // namespace

int line_of_offset(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

json ScenarioKnobs::to_json() const {
    return {{"support_spacing", support_spacing}, {"grid_spacing", grid_spacing},
            {"mollify_spacing", mollify_spacing}, {"h_list", h_list},
            {"triples", triples},                 {"seed", seed},
            {"trace_ds", trace_ds},               {"trace_sigma", trace_sigma},
            {"eps_g", eps_g},                     {"gradient_tol", gradient_tol},
            {"theta_tol_deg", theta_tol_deg},     {"grid_tol", grid_tol}};
}

json ScenarioExpect::to_json() const {
    json j = {{"closed_form", closed_form},
              {"theta", vecs_to_json(theta)},
              {"trace_theta", vecs_to_json(trace_theta)},
              {"exact", exact}};
    j["condition_h"] = condition_h ? json(*condition_h) : json(nullptr);
    return j;
}

bool ScenarioConfig::is_builtin(const std::string& name) {
    return name == "example1" || name == "example2" || name == "example3" || name == "affine-sanity" ||
           name == "custom";
}

ScenarioConfig ScenarioConfig::builtin(const std::string& name) {
    ScenarioConfig c;
    c.scenario = name;
    c.out_dir = "scx-out/" + name;
    if (name == "example1" || name == "example2" || name == "example3") {
        static const char* ids[] = {"neg-norm", "neg-abs-x2", "neg-sqrt-x1p4-x2sq"};
        const int k = name.back() - '1';
        c.domain = DomainSpec::unit_half_disk();
        c.function = {{"id", ids[k]}};
        c.ball = BallRegion(Vec{0.0, 0.0}, 1.0);
        c.alpha = 1.0;
        c.C = 0.0;
        c.expect.closed_form = name;
        c.expect.condition_h = (k != 2);
        if (k == 0) c.expect.theta = {Vec{-1.0, 0.0}};
        if (k == 1) c.expect.theta = {Vec{-1.0, 0.0}, Vec{1.0, 0.0}};
        if (k == 2) c.expect.trace_theta = {Vec{-1.0, 0.0}};
        return c;
    }
    if (name == "affine-sanity") {
        c.domain = DomainSpec::ball(Vec{0.0, 0.0}, 1.0);
        c.function = {{"id", "affine"}, {"coefficients", {0.3, -0.7}}, {"offset", 0.25}};
        c.ball = BallRegion(Vec{0.0, 0.0}, 1.0);
        c.alpha = 1.0;
        c.C = 0.0;
        c.stages = {"certify", "support", "extend", "glue", "mollify"};
        c.knobs.support_spacing = 0.05;
        c.knobs.grid_spacing = 0.05;
        c.knobs.mollify_spacing = 0.1;
        c.knobs.triples = 2000;
        c.knobs.grid_tol = 1e-9;
        c.expect.closed_form = "affine";
        c.expect.exact = true;
        return c;
    }
    if (name == "custom") {
        c.function = json();
        return c;
    }
    throw ConfigError("unknown scenario \"" + name + "\" (built-ins: example1, example2, example3, "
                      "affine-sanity, custom)");
}

void ScenarioConfig::merge_json(const json& j, const std::string& text) {
    check_keys(j,
               {"schema", "scenario", "domain", "function", "ball", "modulus", "stages", "knobs", "expect",
                "output"},
               text, "config");
    field(text, "schema", [&] {
        if (j.contains("schema")) schema = j.at("schema").get<int>();
    });
    if (schema != kSchemaVersion)
        fail_field(text, "schema", "unsupported schema " + std::to_string(schema) + ", expected 1");
    field(text, "scenario", [&] {
        if (j.contains("scenario")) scenario = j.at("scenario").get<std::string>();
    });
    field(text, "domain", [&] {
        if (j.contains("domain")) domain = DomainSpec::from_json(j.at("domain"));
    });
    field(text, "function", [&] {
        if (j.contains("function")) {
            function = j.at("function");
            if (!function.is_object() || !function.contains("id")) throw InputError("missing \"id\"");
        }
    });
    field(text, "ball", [&] {
        if (j.contains("ball")) ball = ball_from_json(j.at("ball"));
    });
    if (j.contains("modulus")) {
        const json& m = j.at("modulus");
        check_keys(m, {"alpha", "C"}, text, "modulus");
        field(text, "alpha", [&] {
            if (m.contains("alpha")) alpha = m.at("alpha").get<double>();
        });
        field(text, "C", [&] {
            if (m.contains("C")) C = m.at("C").is_null() ? std::nullopt : std::optional(m.at("C").get<double>());
        });
    }
    field(text, "stages", [&] {
        if (j.contains("stages")) stages = stages_from_json(j.at("stages"));
    });
    if (j.contains("knobs")) {
        const json& k = j.at("knobs");
        check_keys(k,
                   {"support_spacing", "grid_spacing", "mollify_spacing", "h_list", "triples", "seed",
                    "trace_ds", "trace_sigma", "eps_g", "gradient_tol", "theta_tol_deg", "grid_tol"},
                   text, "knobs");
        auto num = [&](const char* key, auto& target) {
            field(text, key, [&] {
                if (k.contains(key)) target = k.at(key).get<std::decay_t<decltype(target)>>();
            });
        };
        num("support_spacing", knobs.support_spacing);
        num("grid_spacing", knobs.grid_spacing);
        num("mollify_spacing", knobs.mollify_spacing);
        num("h_list", knobs.h_list);
        num("triples", knobs.triples);
        num("seed", knobs.seed);
        num("trace_ds", knobs.trace_ds);
        num("trace_sigma", knobs.trace_sigma);
        num("eps_g", knobs.eps_g);
        num("gradient_tol", knobs.gradient_tol);
        num("theta_tol_deg", knobs.theta_tol_deg);
        num("grid_tol", knobs.grid_tol);
    }
    if (j.contains("expect")) {
        const json& e = j.at("expect");
        check_keys(e, {"closed_form", "condition_h", "theta", "trace_theta", "exact"}, text, "expect");
        field(text, "closed_form", [&] {
            if (e.contains("closed_form")) expect.closed_form = e.at("closed_form").get<std::string>();
        });
        field(text, "condition_h", [&] {
            if (e.contains("condition_h"))
                expect.condition_h = e.at("condition_h").is_null() ? std::nullopt
                                                                    : std::optional(e.at("condition_h").get<bool>());
        });
        field(text, "theta", [&] {
            if (e.contains("theta")) expect.theta = vecs_from_json(e.at("theta"));
        });
        field(text, "trace_theta", [&] {
            if (e.contains("trace_theta")) expect.trace_theta = vecs_from_json(e.at("trace_theta"));
        });
        field(text, "exact", [&] {
            if (e.contains("exact")) expect.exact = e.at("exact").get<bool>();
        });
    }
    if (j.contains("output")) {
        const json& o = j.at("output");
        check_keys(o, {"dir", "formats"}, text, "output");
        field(text, "dir", [&] {
            if (o.contains("dir")) out_dir = o.at("dir").get<std::string>();
        });
        field(text, "formats", [&] {
            if (o.contains("formats")) formats = o.at("formats").get<std::vector<std::string>>();
        });
    }
}

void ScenarioConfig::validate() const {
    // Messages start with the offending JSON field so loaders can locate its line.
    const auto bad = [](const std::string& key, const std::string& msg) {
        throw ConfigError("\"" + key + "\": " + msg);
    };
    if (schema != kSchemaVersion) bad("schema", "must be 1");
    if (!is_builtin(scenario)) bad("scenario", "unknown scenario \"" + scenario + "\"");
    if (function.is_null()) bad("function", "required for scenario " + scenario);
    const int d = domain.dim();
    if (ball.dim() != d) bad("ball", "dimension differs from the domain");
    if (!(ball.radius > 0.0)) bad("radius", "ball radius must be positive");
    try {
        (void)FunctionSpec::from_json(function, d);
    } catch (const Error& e) {
        bad("function", e.what());
    }
    if (!(alpha > 0.0 && alpha <= 1.0)) bad("alpha", "must lie in (0, 1]");
    if (C && !std::isfinite(*C)) bad("C", "must be finite");
    if (stages.empty()) bad("stages", "no stages requested");
    for (const auto& s : stages)
        if (std::find(all_stages().begin(), all_stages().end(), s) == all_stages().end())
            bad("stages", "unknown stage \"" + s + "\"");
    const auto positive = [&](double v, const char* key) {
        if (!(v > 0.0) || !std::isfinite(v)) bad(key, "must be positive");
    };
    positive(knobs.support_spacing, "support_spacing");
    positive(knobs.grid_spacing, "grid_spacing");
    positive(knobs.mollify_spacing, "mollify_spacing");
    positive(knobs.trace_ds, "trace_ds");
    positive(knobs.trace_sigma, "trace_sigma");
    positive(knobs.eps_g, "eps_g");
    positive(knobs.gradient_tol, "gradient_tol");
    positive(knobs.theta_tol_deg, "theta_tol_deg");
    positive(knobs.grid_tol, "grid_tol");
    if (knobs.triples < 1) bad("triples", "must be positive");
    if (knobs.seed == 0) bad("seed", "must be positive");
    for (int h : knobs.h_list)
        if (h < 1) bad("h_list", "entries must be positive");
    static const std::set<std::string> forms{"", "example1", "example2", "example3", "affine"};
    if (!forms.contains(expect.closed_form)) bad("closed_form", "unknown closed form \"" + expect.closed_form + "\"");
    for (const auto& t : expect.theta)
        if (t.dim() != d || norm(t) == 0.0) bad("theta", "entries must be nonzero vectors of the domain dimension");
    for (const auto& t : expect.trace_theta)
        if (t.dim() != d || norm(t) == 0.0) bad("trace_theta", "entries must be nonzero vectors of the domain dimension");
    if (formats.empty()) bad("formats", "no output formats");
    for (const auto& f : formats)
        if (f != "csv" && f != "json") bad("formats", "unknown format \"" + f + "\" (csv, json)");
    if (out_dir.empty()) bad("dir", "output dir is empty");
}

json ScenarioConfig::to_json() const {
    json j = {{"schema", schema},
              {"scenario", scenario},
              {"domain", domain.to_json()},
              {"function", function},
              {"ball", scx::to_json(ball)},
              {"stages", stages},
              {"knobs", knobs.to_json()},
              {"expect", expect.to_json()},
              {"output", {{"dir", out_dir.generic_string()}, {"formats", formats}}}};
    j["modulus"] = {{"alpha", alpha}, {"C", C ? json(*C) : json(nullptr)}};
    return j;
}

ScenarioConfig config_from_text(const std::string& text, const std::string& source) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(source + ":" + std::to_string(line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1)) +
                          ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError(source + ":1: top level must be an object");
    std::string name = "custom";
    if (j.contains("scenario") && j.at("scenario").is_string()) name = j.at("scenario").get<std::string>();
    ScenarioConfig c;
    try {
        c = ScenarioConfig::builtin(name);
        c.merge_json(j, text);
        c.validate();
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        // "line N: ..." becomes "source:N: ..."
        if (msg.rfind("line ", 0) == 0) {
            msg = msg.substr(5);
        } else {
            // Missing fields point at the enclosing object on line 1.
            int line = 0;
            if (msg.size() > 1 && msg[0] == '"') line = line_of_key(text, msg.substr(1, msg.find('"', 1) - 1));
            line = std::max(line, 1);
            msg = std::to_string(line) + ": " + msg;
        }
        throw ConfigError(source + ":" + msg);
    }
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path.string() + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return config_from_text(ss.str(), path.string());
}

}  // namespace scx
