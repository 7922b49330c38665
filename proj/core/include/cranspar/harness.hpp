// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cranspar/analysis.hpp"
#include "cranspar/detection.hpp"
#include "cranspar/optimizer.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cranspar::harness {

/// A fully resolved scenario: linear powers, enums parsed, defaults applied.
struct ScenarioConfig {
    NetworkConfig network;
    DistancePdf pdf;
    Estimator estimator = Estimator::LS;
    PilotKind pilot_kind = PilotKind::Orthogonal;
    optimizer::SolverSettings solver;
    int trials = 500;
    std::uint64_t seed = 0;

    analysis::BoundInputs bound_inputs() const { return {network, pdf, estimator, pilot_kind}; }
};

/// Parses a JSON configuration document. Keys ending in `_dbm` are converted
/// to milliwatts here and nowhere else. Throws ConfigError listing every
/// problem found.
ScenarioConfig parse_config(std::string_view json_text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Non-fatal remarks about a valid scenario (for example a contamination
/// probability 2(1 - tau/K) above 1). Empty for ordinary configurations.
std::vector<std::string> config_warnings(const ScenarioConfig& cfg);

/// Canonical JSON of a resolved scenario (linear units, sorted keys).
std::string resolved_config_json(const ScenarioConfig& cfg);

/// Git-style blob hash (SHA-1 over "blob <len>\0" + content), hex encoded.
std::string content_hash(std::string_view content);

/// "lo:hi:n" -> n evenly spaced values including both ends.
std::vector<double> parse_d0_grid(std::string_view text);
std::vector<double> linspace(double lo, double hi, int n);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

struct Sweep {
    std::string parameter;           // a configuration key; empty for no sweep
    std::vector<std::string> values; // JSON literals, e.g. "3.8" or "\"iut1\""
};

struct ExperimentSpec {
    std::string name; // fig2..fig9, bound, montecarlo, optimize, dnc-compare
    std::string base_config_json;
    Sweep sweep;
    std::vector<double> d0_grid; // empty selects the default grid
    int trials = 0;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir;
    int threads = 1;

    std::vector<std::string> violations() const;
};

/// Names accepted by run().
const std::vector<std::string>& experiment_names();

/// Builds the default sweep for a named figure from a base configuration.
/// Unknown names throw ConfigError.
ExperimentSpec figure_spec(const std::string& name, const std::string& base_config_json);

struct RunSummary {
    std::vector<std::filesystem::path> files;
    std::filesystem::path manifest;
    double wall_seconds = 0.0;
};

/// Runs an experiment and writes its CSV files plus `<name>_manifest.json`.
/// Curve experiments write one CSV per sweep value with the columns
///   d0_m,rho_bound,rho_empirical,rho_stderr,n1_mw,n2_mw,mubar_over_mu
/// (the empirical columns are empty when trials == 0). fig5, fig6 and
/// dnc-compare write one comparison CSV with one row per sweep value.
/// Throws ConfigError for invalid specs and IoError for unwritable outputs.
RunSummary run(const ExperimentSpec& spec);

/// Bound/empirical rows for one resolved scenario; exposed for tests.
struct CurveRow {
    double d0_m = 0.0;
    double rho_bound = 0.0;
    std::optional<FidelityEstimate> empirical;
    double n1_mw = 0.0;
    double n2_mw = 0.0;
    double mubar_over_mu = 0.0;
};
std::vector<CurveRow> compute_curve(const ScenarioConfig& cfg, const std::vector<double>& d0_grid,
                                    int trials, std::uint64_t seed, int threads);
std::string curve_csv(const std::vector<CurveRow>& rows);

struct DncComparison {
    double dinkelbach_d0_m = 0.0;
    double dnc_d0_m = 0.0;
    bool dnc_clamped = false;
    double rho_dinkelbach = 0.0;
    double rho_dnc = 0.0;
    int iterations = 0;
    bool converged = false;
};
DncComparison compare_with_dnc(const ScenarioConfig& cfg);

std::string trace_json(const optimizer::DinkelbachTrace& trace);

/// Loads a config, runs Dinkelbach, prints a short report to `out` and writes
/// the trace JSON to `trace_path` when given.
optimizer::DinkelbachTrace optimize_cmd(const std::filesystem::path& config_file, std::ostream& out,
                                        const std::optional<std::filesystem::path>& trace_path);

/// Worker count from CRANSPAR_THREADS (default 1).
int threads_from_env();

} // namespace cranspar::harness
