// SPDX-License-Identifier: Apache-2.0
#include "cranspar/harness.hpp"

#include "cranspar/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

namespace cranspar::harness {

using nlohmann::json;

namespace {

constexpr const char* kAveragingNote =
    "fidelity = (mean over trials of the per-trial user-mean sparse SINR) / "
    "(mean over trials of the per-trial user-mean full SINR); std error by the delta method with paired covariance";

constexpr int kBoundGridPoints = 200;
constexpr int kEmpiricalGridPoints = 10;

bool is_comparison(const std::string& name)
{
    return name == "fig5" || name == "fig6" || name == "dnc-compare";
}

json parse_object(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("malformed JSON: ") + e.what()});
    }
    if (!doc.is_object()) {
        throw ConfigError({"configuration must be a JSON object"});
    }
    return doc;
}

// Applies one sweep value to the raw base document. Setting a power in one
// unit drops any spelling of it in the other unit.
std::string apply_sweep(const std::string& base, const std::string& key, const std::string& literal)
{
    json doc = parse_object(base);
    if (key.empty()) {
        return doc.dump();
    }
    json value;
    try {
        value = json::parse(literal);
    } catch (const json::parse_error&) {
        throw ConfigError({"sweep value '" + literal + "' is not a JSON literal"});
    }
    for (const char* stem : {"data_power", "pilot_power", "noise_power"}) {
        const std::string dbm = std::string(stem) + "_dbm";
        const std::string mw = std::string(stem) + "_mw";
        if (key == dbm) {
            doc.erase(mw);
        } else if (key == mw) {
            doc.erase(dbm);
        }
    }
    doc[key] = value;
    return doc.dump();
}

bool is_config_key(const std::string& key)
{
    try {
        // A known key applied with a null value resolves to the defaults.
        json probe = json::object();
        probe[key] = nullptr;
        parse_config(probe.dump());
        return true;
    } catch (const ConfigError& e) {
        for (const auto& v : e.violations()) {
            if (v.rfind("unknown key", 0) == 0) {
                return false;
            }
        }
        return true;
    }
}

std::string slug(const std::string& literal)
{
    std::string out;
    for (char c : literal) {
        if (std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '.' || c == '-') {
            out += c;
        } else if (c != '"' && !out.empty() && out.back() != '_') {
            out += '_';
        }
    }
    while (!out.empty() && out.back() == '_') {
        out.pop_back();
    }
    return out.size() > 48 ? out.substr(0, 48) : out;
}

std::vector<double> grid_for(const ExperimentSpec& spec, const ScenarioConfig& cfg)
{
    if (!spec.d0_grid.empty()) {
        return spec.d0_grid;
    }
    const int n = spec.trials > 0 ? kEmpiricalGridPoints : kBoundGridPoints;
    return linspace(cfg.network.min_dist_m, cfg.network.radius_m, n);
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    file << content;
    file.flush();
    if (!file) {
        throw IoError("failed writing " + path.string());
    }
}

std::string comparison_csv(const std::string& parameter, const std::vector<std::string>& values,
                           const std::vector<DncComparison>& rows)
{
    std::ostringstream os;
    os << (parameter.empty() ? "case" : parameter)
       << ",dinkelbach_d0_m,dnc_d0_m,dnc_clamped,rho_dinkelbach,rho_dnc,iterations,converged\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const DncComparison& r = rows[i];
        os << (parameter.empty() ? std::string("base") : slug(values[i])) << ',' << format_double(r.dinkelbach_d0_m)
           << ',' << format_double(r.dnc_d0_m) << ',' << (r.dnc_clamped ? 1 : 0) << ','
           << format_double(r.rho_dinkelbach) << ',' << format_double(r.rho_dnc) << ',' << r.iterations << ','
           << (r.converged ? 1 : 0) << '\n';
    }
    return os.str();
}

json trace_to_json(const optimizer::DinkelbachTrace& trace)
{
    json steps = json::array();
    for (const auto& s : trace.iterations) {
        steps.push_back({{"index", s.index}, {"q", s.q}, {"d0_m", s.d0}, {"f_of_q", s.f_of_q}});
    }
    return {{"iterations", steps},
            {"converged", trace.converged},
            {"final_d0_m", trace.final_d0},
            {"final_q", trace.final_q},
            {"termination", optimizer::to_string(trace.termination)},
            {"diagnostics", trace.diagnostics}};
}

} // namespace

std::vector<std::string> ExperimentSpec::violations() const
{
    std::vector<std::string> v;
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
        v.push_back("unknown experiment '" + name + "'");
    }
    if (trials < 0 || trials == 1) {
        v.emplace_back("trials must be 0 (bound only) or >= 2");
    }
    if (name == "montecarlo" && trials < 2) {
        v.emplace_back("montecarlo needs trials >= 2");
    }
    if (threads < 1) {
        v.emplace_back("threads must be >= 1");
    }
    if (output_dir.empty()) {
        v.emplace_back("output directory is empty");
    }
    if (!sweep.parameter.empty() && !is_config_key(sweep.parameter)) {
        v.push_back("sweep parameter '" + sweep.parameter + "' is not a configuration key");
        return v;
    }
    if (!sweep.parameter.empty() && sweep.values.empty()) {
        v.emplace_back("sweep has no values");
    }

    const std::vector<std::string> values = sweep.parameter.empty() ? std::vector<std::string>{""} : sweep.values;
    for (const auto& value : values) {
        const std::string where = sweep.parameter.empty() ? "base config" : sweep.parameter + " = " + value;
        try {
            const ScenarioConfig cfg = parse_config(apply_sweep(base_config_json, sweep.parameter, value));
            for (double d0 : d0_grid) {
                if (!(d0 >= cfg.network.min_dist_m && d0 <= cfg.network.radius_m)) {
                    v.push_back(where + ": d0 grid value " + format_double(d0) + " outside [r0, r]");
                    break;
                }
            }
        } catch (const ConfigError& e) {
            for (const auto& msg : e.violations()) {
                v.push_back(where + ": " + msg);
            }
        }
    }
    return v;
}

const std::vector<std::string>& experiment_names()
{
    static const std::vector<std::string> names = {"bound", "montecarlo", "optimize", "fig2", "fig3", "fig4",
                                                   "fig5",  "fig6",       "fig7",     "fig8", "fig9", "dnc-compare"};
    return names;
}

ExperimentSpec figure_spec(const std::string& name, const std::string& base_config_json)
{
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
        throw ConfigError({"unknown experiment '" + name + "'"});
    }
    const ScenarioConfig base = parse_config(base_config_json);
    const NetworkConfig& net = base.network;

    ExperimentSpec spec;
    spec.name = name;
    spec.base_config_json = base_config_json;
    spec.trials = name == "bound" || name == "optimize" || is_comparison(name) ? 0 : base.trials;
    spec.seed = base.seed;
    spec.output_dir = ".";

    auto numbers = [](std::initializer_list<double> xs) {
        std::vector<std::string> out;
        for (double x : xs) {
            out.push_back(format_double(x));
        }
        return out;
    };
    const int k = net.num_ue;

    if (name == "fig2") {
        spec.sweep.parameter = "num_rrh";
        for (double f : {1.0, 1.0625, 1.25}) {
            spec.sweep.values.push_back(std::to_string(std::lround(f * k)));
        }
    } else if (name == "fig3" || name == "fig5" || name == "fig6") {
        spec.sweep = {"pathloss_exponent", numbers({3.0, 3.4, 3.8, 4.2})};
    } else if (name == "fig4") {
        spec.sweep = {"pdf", {"\"disc_approx\"", "\"iut1\"", "\"ppp\""}};
    } else if (name == "fig7") {
        spec.sweep.parameter = "data_power_mw";
        for (double scale : {1.0, 2.0, 4.0, 8.0}) {
            json powers = json::array();
            for (double p : net.data_power_mw) {
                powers.push_back(p * scale);
            }
            const bool uniform = std::all_of(net.data_power_mw.begin(), net.data_power_mw.end(),
                                             [&](double p) { return p == net.data_power_mw.front(); });
            spec.sweep.values.push_back(uniform ? format_double(net.data_power_mw.front() * scale) : powers.dump());
        }
    } else if (name == "fig8") {
        spec.sweep = {"pilot_power_dbm", numbers({23.0, 26.0, 30.0})};
    } else if (name == "fig9") {
        json doc = parse_object(base_config_json);
        doc["pilot_kind"] = "nonorthogonal";
        spec.base_config_json = doc.dump();
        spec.sweep.parameter = "training_length";
        for (double f : {0.95, 0.975, 0.9875}) {
            spec.sweep.values.push_back(std::to_string(std::lround(f * k)));
        }
    }
    return spec;
}

std::vector<CurveRow> compute_curve(const ScenarioConfig& cfg, const std::vector<double>& d0_grid, int trials,
                                    std::uint64_t seed, int threads)
{
    const analysis::BoundInputs inputs = cfg.bound_inputs();
    inputs.validate();
    const double mu = analysis::mean_gain(inputs);

    std::vector<CurveRow> rows(d0_grid.size());
    for (std::size_t i = 0; i < d0_grid.size(); ++i) {
        CurveRow& row = rows[i];
        row.d0_m = d0_grid[i];
        row.rho_bound = analysis::fidelity_lower_bound(inputs, row.d0_m);
        row.n1_mw = analysis::n1(inputs, row.d0_m);
        row.n2_mw = analysis::n2(inputs, row.d0_m);
        row.mubar_over_mu = analysis::kept_gain(inputs, row.d0_m) / mu;
    }
    if (trials > 0) {
        MonteCarloRequest request;
        request.cfg = cfg.network;
        request.pdf = cfg.pdf;
        request.estimator = cfg.estimator;
        request.pilot_kind = cfg.pilot_kind;
        request.trials = trials;
        request.seed = seed;
        request.threads = threads;
        const auto estimates = fidelity_curve(request, d0_grid);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            rows[i].empirical = estimates[i];
        }
    }
    return rows;
}

std::string curve_csv(const std::vector<CurveRow>& rows)
{
    std::ostringstream os;
    os << "d0_m,rho_bound,rho_empirical,rho_stderr,n1_mw,n2_mw,mubar_over_mu\n";
    for (const auto& r : rows) {
        os << format_double(r.d0_m) << ',' << format_double(r.rho_bound) << ',';
        if (r.empirical) {
            os << format_double(r.empirical->fidelity) << ',' << format_double(r.empirical->std_error);
        } else {
            os << ',';
        }
        os << ',' << format_double(r.n1_mw) << ',' << format_double(r.n2_mw) << ','
           << format_double(r.mubar_over_mu) << '\n';
    }
    return os.str();
}

DncComparison compare_with_dnc(const ScenarioConfig& cfg)
{
    const analysis::BoundInputs inputs = cfg.bound_inputs();
    const optimizer::DinkelbachTrace trace = optimizer::dinkelbach(inputs, cfg.solver);

    DncComparison out;
    out.dinkelbach_d0_m = trace.final_d0;
    out.rho_dinkelbach = analysis::fidelity_lower_bound(inputs, trace.final_d0);
    out.iterations = static_cast<int>(trace.iterations.size());
    out.converged = trace.converged;

    const analysis::DncThreshold dnc = analysis::dnc_threshold(cfg.network, out.rho_dinkelbach);
    out.dnc_d0_m = dnc.d0_m;
    out.dnc_clamped = dnc.clamped;
    out.rho_dnc = analysis::fidelity_lower_bound(inputs, dnc.d0_m);
    return out;
}

std::string trace_json(const optimizer::DinkelbachTrace& trace)
{
    return trace_to_json(trace).dump(2) + "\n";
}

RunSummary run(const ExperimentSpec& spec)
{
    const auto start = std::chrono::steady_clock::now();
    auto problems = spec.violations();
    if (!problems.empty()) {
        throw ConfigError(std::move(problems));
    }

    std::error_code ec;
    std::filesystem::create_directories(spec.output_dir, ec);
    if (ec || !std::filesystem::is_directory(spec.output_dir)) {
        throw IoError("cannot create output directory " + spec.output_dir.string());
    }

    const bool swept = !spec.sweep.parameter.empty();
    const std::vector<std::string> values = swept ? spec.sweep.values : std::vector<std::string>{""};

    RunSummary summary;
    json resolved = json::array();
    std::vector<DncComparison> comparisons;

    for (const auto& value : values) {
        const ScenarioConfig cfg = parse_config(apply_sweep(spec.base_config_json, spec.sweep.parameter, value));
        json entry = {{"config", json::parse(resolved_config_json(cfg))}};
        if (swept) {
            entry["sweep_value"] = json::parse(value);
        }

        if (is_comparison(spec.name)) {
            comparisons.push_back(compare_with_dnc(cfg));
        } else if (spec.name == "optimize") {
            const auto trace = optimizer::dinkelbach(cfg.bound_inputs(), cfg.solver);
            const std::string file = swept ? "optimize_" + spec.sweep.parameter + "_" + slug(value) + "_trace.json"
                                           : "optimize_trace.json";
            write_file(spec.output_dir / file, trace_json(trace));
            summary.files.push_back(spec.output_dir / file);
            entry["file"] = file;
        } else {
            const auto grid = grid_for(spec, cfg);
            const auto rows = compute_curve(cfg, grid, spec.trials, spec.seed, spec.threads);
            const std::string file =
                swept ? spec.name + "_" + spec.sweep.parameter + "_" + slug(value) + ".csv" : spec.name + ".csv";
            write_file(spec.output_dir / file, curve_csv(rows));
            summary.files.push_back(spec.output_dir / file);
            entry["file"] = file;
        }
        resolved.push_back(std::move(entry));
    }

    if (is_comparison(spec.name)) {
        const std::string file = spec.name + ".csv";
        write_file(spec.output_dir / file, comparison_csv(spec.sweep.parameter, values, comparisons));
        summary.files.push_back(spec.output_dir / file);
    }

    json inputs = {{"experiment", spec.name},
                   {"base_config", parse_object(spec.base_config_json)},
                   {"sweep_parameter", spec.sweep.parameter},
                   {"sweep_values", spec.sweep.values},
                   {"d0_grid", spec.d0_grid},
                   {"trials", spec.trials},
                   {"seed", spec.seed}};
    const std::string inputs_text = inputs.dump();

    summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json manifest = {{"experiment", spec.name},
                     {"seed", spec.seed},
                     {"trials", spec.trials},
                     {"inputs", inputs},
                     {"input_hash", content_hash(inputs_text)},
                     {"resolved", resolved},
                     {"averaging_order", kAveragingNote},
                     {"wall_seconds", summary.wall_seconds}};
    json files = json::array();
    for (const auto& f : summary.files) {
        files.push_back(f.filename().string());
    }
    manifest["files"] = files;

    summary.manifest = spec.output_dir / (spec.name + "_manifest.json");
    write_file(summary.manifest, manifest.dump(2) + "\n");
    return summary;
}

optimizer::DinkelbachTrace optimize_cmd(const std::filesystem::path& config_file, std::ostream& out,
                                        const std::optional<std::filesystem::path>& trace_path)
{
    const ScenarioConfig cfg = load_config(config_file);
    const optimizer::DinkelbachTrace trace = optimizer::dinkelbach(cfg.bound_inputs(), cfg.solver);

    out << "final_d0_m " << format_double(trace.final_d0) << '\n'
        << "final_q " << format_double(trace.final_q) << '\n'
        << "iterations " << trace.iterations.size() << '\n'
        << "termination " << optimizer::to_string(trace.termination) << '\n';
    for (const auto& d : trace.diagnostics) {
        out << "diagnostic " << d << '\n';
    }
    if (trace_path) {
        if (trace_path->has_parent_path()) {
            std::error_code ec;
            std::filesystem::create_directories(trace_path->parent_path(), ec);
        }
        write_file(*trace_path, trace_json(trace));
    }
    return trace;
}

int threads_from_env()
{
    const char* raw = std::getenv("CRANSPAR_THREADS");
    if (raw == nullptr || *raw == '\0') {
        return 1;
    }
    char* end = nullptr;
    const long v = std::strtol(raw, &end, 10);
    if (*end != '\0' || v < 1 || v > 1024) {
        throw ConfigError({std::string("CRANSPAR_THREADS must be an integer in [1, 1024], got '") + raw + "'"});
    }
    return static_cast<int>(v);
}

} // namespace cranspar::harness
