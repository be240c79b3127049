#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "scx/format.hpp"
#include "scx/scenario.hpp"

using namespace scx;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("scx-test-" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_tool(const std::string& args) {
    const std::string cmd = std::string(SCX_TOOL_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

double example1_closed_form(const Vec& x) {
    return x[0] >= 0.0 ? -std::hypot(x[0], x[1]) : -std::abs(x[1]) + x[0] * x[0];
}

}  // namespace

TEST_CASE("format_double prints 17 significant digits and no negative zero") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(-0.0) == "0");
    CHECK(format_double(0.25) == "0.25");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("emit_grid: Example 2 field, spacing 0.5") {
    const auto dir = scratch("grid");
    const BallRegion b(Vec{0.0, 0.0}, 1.0);
    const auto E = build_extension(FunctionSpec::named("neg-abs-x2", 2), DomainSpec::unit_half_disk(), b, 1.0, 0.0,
                                   SupportOptions::for_ball(b, 0.01));
    emit_grid(*E, b, 0.5, GridFormat::Csv, dir / "g.csv");
    const std::string csv = slurp(dir / "g.csv");
    CHECK(csv.rfind("x1,x2,value\n", 0) == 0);
    CHECK(csv.find("\n-0.5,0,0.25\n") != std::string::npos);

    // Rows are in lexicographic node order.
    const auto [pts, vals] = read_grid_csv(dir / "g.csv");
    CHECK(pts.size() == 13);
    CHECK(std::is_sorted(pts.begin(), pts.end(), lex_less));

    emit_grid(*E, b, 0.5, GridFormat::Json, dir / "g.json");
    const auto j = nlohmann::json::parse(slurp(dir / "g.json"));
    CHECK(j.at("columns") == nlohmann::json({"x1", "x2", "value"}));
    CHECK(j.at("rows").size() == 13);
}

TEST_CASE("emit_grid: constant zero and determinism") {
    const auto dir = scratch("zero");
    const auto z = FunctionSpec::constant(2, 0.0);
    emit_grid(z.field(), BallRegion(Vec{0.0, 0.0}, 1.0), 0.25, GridFormat::Csv, dir / "a.csv");
    emit_grid(z.field(), BallRegion(Vec{0.0, 0.0}, 1.0), 0.25, GridFormat::Csv, dir / "b.csv");
    const std::string a = slurp(dir / "a.csv");
    CHECK(a == slurp(dir / "b.csv"));
    std::istringstream in(a);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) CHECK(line.substr(line.rfind(',') + 1) == "0");
    CHECK_THROWS_AS(emit_grid(z.field(), BallRegion(Vec{0.0, 0.0}, 1.0), 0.25, GridFormat::Csv, "/nonexistent/dir/x.csv"),
                    Error);
}

TEST_CASE("example1 scenario: closed form, round trip and determinism") {
    auto cfg = ScenarioConfig::builtin("example1");
    cfg.stages = {"support", "extend", "gradients", "condition", "trace"};
    cfg.knobs.triples = 2000;
    cfg.out_dir = scratch("ex1a");
    const auto r = run_scenario(cfg);
    CHECK(r.passed());
    const double reported = r.stage("extend")->metrics.at("envelope_sup_error").get<double>();
    CHECK(reported <= 0.02);

    // Recompute the metric from the emitted grid.
    const auto [pts, vals] = read_grid_csv(cfg.out_dir / "extend_grid.csv");
    double err = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) err = std::max(err, std::abs(vals[i] - example1_closed_form(pts[i])));
    CHECK(err == reported);

    const auto report = nlohmann::json::parse(slurp(cfg.out_dir / "report.json"));
    CHECK(report.at("headline").at("envelope_sup_error").get<double>() == reported);
    CHECK(report.at("config").at("scenario") == "example1");
    CHECK(report.at("version") == kToolVersion);

    const auto first = cfg.out_dir;
    cfg.out_dir = scratch("ex1b");
    (void)run_scenario(cfg);
    for (const char* f : {"extend_grid.csv", "extend_grid.json", "support.csv", "arc_1.csv", "gradients.json",
                          "condition.json", "certify_extension.json"})
        CHECK_MESSAGE(slurp(first / f) == slurp(cfg.out_dir / f), f);
}

TEST_CASE("example3 condition stage records condition_h = false") {
    auto cfg = ScenarioConfig::builtin("example3");
    cfg.stages = {"condition"};
    cfg.out_dir = scratch("ex3");
    const auto r = run_scenario(cfg);
    CHECK(r.passed());
    CHECK(r.stage("condition")->metrics.at("condition_h") == false);
}

TEST_CASE("affine-sanity scenario is exact") {
    auto cfg = ScenarioConfig::builtin("affine-sanity");
    cfg.out_dir = scratch("affine");
    cfg.knobs.h_list = {10};
    const auto r = run_scenario(cfg);
    CHECK(r.passed());
    CHECK(r.headline.at("envelope_sup_error").get<double>() <= 1e-9);
    CHECK(r.headline.at("glued_vs_u_max_error").get<double>() <= 1e-9);
    CHECK(r.headline.at("mollify")[0].at("sup_error").get<double>() <= 1e-9);
}

TEST_CASE("config parsing: layering and line-numbered errors") {
    const auto c = config_from_text(R"({"schema": 1, "scenario": "example2", "knobs": {"seed": 9}})");
    CHECK(c.knobs.seed == 9);
    CHECK(c.function.at("id") == "neg-abs-x2");
    CHECK(c.knobs.grid_spacing == 0.02);

    auto expect_line = [](const std::string& text, const std::string& line) {
        try {
            (void)config_from_text(text, "cfg.json");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK_MESSAGE(std::string(e.what()).rfind("cfg.json:" + line + ":", 0) == 0, std::string(e.what()));
        }
    };
    expect_line("{\n  \"schema\": 1,\n  \"knobs\": {\n    \"seed\": 3,,\n  }\n}\n", "4");
    expect_line("{\n \"scenario\": \"example2\",\n \"knobs\": {\n  \"sed\": 3\n }\n}\n", "4");
    expect_line("{\n \"scenario\": \"example2\",\n \"knobs\": {\n  \"seed\": 3,\n  \"grid_spacing\": -1\n }\n}\n", "5");
    expect_line("{\n \"schema\": 2\n}\n", "2");
    expect_line("{\n \"scenario\": \"custom\"\n}\n", "1");
    expect_line("{\n \"scenario\": \"example1\",\n \"stages\": [\"extend\", \"paint\"]\n}\n", "3");

    const auto round = config_from_text(ScenarioConfig::builtin("example3").to_json().dump());
    CHECK(round.to_json() == ScenarioConfig::builtin("example3").to_json());
}

TEST_CASE("scx tool exit codes and flag layering") {
    const auto dir = scratch("tool");
    CHECK(run_tool("--bogus") == 2);
    CHECK(run_tool("--scenario nope") == 2);
    CHECK(run_tool("") == 2);
    CHECK(run_tool("--scenario example3 --stages condition --out " + (dir / "ok").string()) == 0);

    // A config file sets the seed; the flag overrides it.
    std::ofstream(dir / "c.json") << R"({"schema": 1, "scenario": "example3", "stages": ["condition"],
                                         "knobs": {"seed": 5}})";
    CHECK(run_tool("--config " + (dir / "c.json").string() + " --seed 8 --out " + (dir / "layer").string()) == 0);
    const auto rep = nlohmann::json::parse(slurp(dir / "layer" / "report.json"));
    CHECK(rep.at("config").at("knobs").at("seed") == 8);

    // A wrong expectation is an assertion failure, not an error.
    std::ofstream(dir / "wrong.json") << R"({"schema": 1, "scenario": "example3", "stages": ["condition"],
                                             "expect": {"condition_h": true}})";
    CHECK(run_tool("--config " + (dir / "wrong.json").string() + " --out " + (dir / "wrong").string()) == 1);

    // h must exceed 2/delta: the mollify stage fails at runtime.
    CHECK(run_tool("--scenario affine-sanity --stages mollify --h-list 1 --out " + (dir / "rt").string()) == 3);
    CHECK(run_tool("--scenario affine-sanity --stages mollify --h-list x --out " + (dir / "rt").string()) == 2);
    CHECK(fs::exists(dir / "rt" / "report.json"));
}
