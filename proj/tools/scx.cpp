// scx: scenario runner for the semiconcave extension library.
//
// Exit codes: 0 every assertion passed, 1 some assertion failed,
// 2 usage or configuration error, 3 runtime error inside a stage.

#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "scx/format.hpp"
#include "scx/scenario.hpp"

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

void print_summary(const scx::RunReport& r) {
    for (const auto& s : r.stages) {
        std::printf("%-10s %-7s %8.2fs", s.name.c_str(), s.status.c_str(), s.wall_time_s);
        for (const auto& a : s.assertions)
            if (!a.passed)
                std::printf("  [%s = %s > %s]", a.name.c_str(), scx::format_double(a.value).c_str(),
                            scx::format_double(a.limit).c_str());
        if (!s.message.empty()) std::printf("  %s", s.message.c_str());
        std::printf("\n");
    }
    std::printf("%s: %s (report: %s)\n", r.config.scenario.c_str(), r.passed() ? "PASS" : "FAIL",
                (r.config.out_dir / "report.json").string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractionally semiconcave extension: certify, extend, mollify, trace singularities"};
    std::string scenario, config_path, out, stages, h_list, format;
    std::optional<double> alpha, spacing, delta;
    std::optional<int> triples;
    std::optional<std::uint64_t> seed;
    app.add_option("--scenario", scenario, "example1 | example2 | example3 | affine-sanity | custom");
    app.add_option("--config", config_path, "scenario JSON file (schema 1)")->check(CLI::ExistingFile);
    app.add_option("--out", out, "output directory");
    app.add_option("--stages", stages, "comma list or 'all': certify,support,extend,gradients,condition,trace,glue,mollify");
    app.add_option("--alpha", alpha, "modulus exponent in (0,1]");
    app.add_option("--spacing", spacing, "support-set lattice spacing");
    app.add_option("--delta", delta, "ball radius");
    app.add_option("--h-list", h_list, "comma list of mollifier parameters h");
    app.add_option("--triples", triples, "seeded triples per certificate");
    app.add_option("--seed", seed, "random seed");
    app.add_option("--format", format, "csv | json | both");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    scx::ScenarioConfig cfg;
    try {
        if (!config_path.empty()) {
            cfg = scx::load_config(config_path);
            if (!scenario.empty() && scenario != cfg.scenario)
                throw scx::ConfigError("--scenario " + scenario + " conflicts with the config's \"" + cfg.scenario + "\"");
        } else {
            if (scenario.empty()) throw scx::ConfigError("one of --scenario or --config is required");
            cfg = scx::ScenarioConfig::builtin(scenario);
        }
        if (!out.empty()) cfg.out_dir = out;
        if (!stages.empty()) cfg.stages = stages == "all" ? scx::all_stages() : split_list(stages);
        if (alpha) cfg.alpha = *alpha;
        if (spacing) cfg.knobs.support_spacing = *spacing;
        if (delta) cfg.ball.radius = *delta;
        if (triples) cfg.knobs.triples = *triples;
        if (seed) cfg.knobs.seed = *seed;
        if (!h_list.empty()) {
            cfg.knobs.h_list.clear();
            for (const auto& h : split_list(h_list)) {
                std::size_t used = 0;
                int v = 0;
                try {
                    v = std::stoi(h, &used);
                } catch (const std::exception&) {
                    used = 0;
                }
                if (used != h.size()) throw scx::ConfigError("--h-list: \"" + h + "\" is not an integer");
                cfg.knobs.h_list.push_back(v);
            }
        }
        if (!format.empty()) {
            if (format == "both") cfg.formats = {"csv", "json"};
            else cfg.formats = {format};
        }
        cfg.validate();
    } catch (const scx::ConfigError& e) {
        std::cerr << "scx: " << e.what() << "\n";
        return 2;
    }

    try {
        const auto report = scx::run_scenario(cfg);
        print_summary(report);
        return report.passed() ? 0 : 1;
    } catch (const scx::ConfigError& e) {
        std::cerr << "scx: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "scx: " << e.what() << "\n";
        return 3;
    }
}
