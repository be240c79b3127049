#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "scx/error.hpp"
#include "scx/extension.hpp"
#include "scx/geometry.hpp"

namespace scx {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

/// Pipeline stages in dependency order.
inline const std::vector<std::string>& all_stages() {
    static const std::vector<std::string> s{"certify", "support", "extend", "gradients", "condition",
                                            "trace",   "glue",    "mollify"};
    return s;
}

struct ScenarioKnobs {
    double support_spacing = 0.01;   ///< lattice spacing of the support set
    double grid_spacing = 0.02;      ///< envelope grid for the closed-form comparison
    double mollify_spacing = 0.05;   ///< grid of B_{delta/2} for the mollifier sup error
    std::vector<int> h_list{10, 20, 40};
    int triples = 10000;
    std::uint64_t seed = 1;
    double trace_ds = 0.05;
    double trace_sigma = 0.4;
    double eps_g = 0.01;
    double gradient_tol = 0.05;      ///< Hausdorff tolerance against the analytic set
    double theta_tol_deg = 5.0;
    double grid_tol = 0.02;          ///< closed-form tolerance, 1e-9 in exact scenarios

    nlohmann::json to_json() const;
};

struct ScenarioExpect {
    /// "example1", "example2", "example3", "affine" or empty.
    std::string closed_form;
    std::optional<bool> condition_h;
    std::vector<Vec> theta;        ///< expected propagation directions
    std::vector<Vec> trace_theta;  ///< directions traced when condition (h) fails
    bool exact = false;            ///< affine scenarios: every comparison at 1e-9

    nlohmann::json to_json() const;
};

struct ScenarioConfig {
    int schema = kSchemaVersion;
    std::string scenario = "custom";
    DomainSpec domain = DomainSpec::unit_half_disk();
    nlohmann::json function;  ///< descriptor accepted by FunctionSpec::from_json
    BallRegion ball{Vec{0.0, 0.0}, 1.0};
    double alpha = 1.0;
    std::optional<double> C;
    std::vector<std::string> stages = all_stages();
    ScenarioKnobs knobs;
    ScenarioExpect expect;
    std::filesystem::path out_dir = "scx-out";
    std::vector<std::string> formats{"csv", "json"};

    /// Built-in defaults: example1, example2, example3, affine-sanity, custom.
    static ScenarioConfig builtin(const std::string& name);
    static bool is_builtin(const std::string& name);

    /// Overlays the fields present in j onto this config. `text` is the source
    /// used to attach line numbers to validation messages.
    void merge_json(const nlohmann::json& j, const std::string& text = {});

    /// Throws ConfigError on the first invalid field.
    void validate() const;
    nlohmann::json to_json() const;
};

/// Parses a scenario file. Syntax errors and invalid fields raise ConfigError
/// with "path:line:" prefixes. The built-in named by the file's "scenario"
/// field (custom when absent) supplies the defaults.
ScenarioConfig load_config(const std::filesystem::path& path);
ScenarioConfig config_from_text(const std::string& text, const std::string& source = "<config>");

/// 1-based line of the byte offset in text.
int line_of_offset(const std::string& text, std::size_t offset);

/// A stage raised a library error.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error("stage " + stage + ": " + what), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

struct Assertion {
    std::string name;
    double value = 0.0;
    double limit = 0.0;
    bool passed = false;
};

struct StageReport {
    std::string name;
    std::string status;  ///< pass, fail, skipped, error
    double wall_time_s = 0.0;
    std::vector<std::string> artifacts;
    nlohmann::json metrics = nlohmann::json::object();
    std::vector<Assertion> assertions;
    std::string message;
};

struct RunReport {
    ScenarioConfig config;
    std::vector<StageReport> stages;
    nlohmann::json headline = nlohmann::json::object();

    bool passed() const;
    const StageReport* stage(const std::string& name) const;
    nlohmann::json to_json() const;
};

/// Runs the requested stages in dependency order and writes the artifacts and
/// report.json to config.out_dir. Throws StageError when a stage fails to run;
/// report.json is still written with the stage marked "error".
RunReport run_scenario(const ScenarioConfig& config);

enum class GridFormat { Csv, Json };

/// Evaluates the field at the lattice nodes region.center + spacing k inside
/// the closed ball, in lexicographic order, and writes them to path.
/// CSV header "x1,...,xn,value"; JSON {"columns": [...], "rows": [[...], ...]}.
/// Throws Error on I/O failure.
void emit_grid(const ScalarField& field, const BallRegion& region, double spacing, GridFormat format,
               const std::filesystem::path& path);

/// Lattice nodes of emit_grid, in row order.
std::vector<Vec> ball_grid(const BallRegion& region, double spacing);

/// Reads a CSV written by emit_grid back into (points, values).
std::pair<std::vector<Vec>, std::vector<double>> read_grid_csv(const std::filesystem::path& path);

}  // namespace scx
