// SPDX-License-Identifier: Apache-2.0
// cranspar: command line front end for the sparsification experiments.
#include "cranspar/errors.hpp"
#include "cranspar/harness.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

enum ExitCode { kOk = 0, kOther = 1, kConfig = 2, kNumerical = 3 };

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::string out = "out";
    std::string d0_grid;
    bool full_scale = false;
};

std::string read_text(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw cranspar::IoError("cannot read configuration file " + path);
    }
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

// The full-size network: 1000 RRHs, 800 users, 1000 trials.
std::string apply_full_scale(const std::string& text)
{
    auto doc = nlohmann::json::parse(text);
    doc["num_rrh"] = 1000;
    doc["num_ue"] = 800;
    doc["training_length"] = 800;
    doc["trials"] = 1000;
    return doc.dump();
}

int run_experiment(const std::string& name, const Options& o)
{
    std::string base = read_text(o.config);
    if (o.full_scale) {
        base = apply_full_scale(base);
    }
    for (const auto& w : cranspar::harness::config_warnings(cranspar::harness::parse_config(base))) {
        std::cerr << "warning: " << w << '\n';
    }

    if (name == "optimize") {
        std::filesystem::path cfg_path = o.config;
        std::filesystem::path tmp;
        if (o.full_scale) {
            // optimize_cmd reads a file, so hand it the rewritten document
            tmp = std::filesystem::temp_directory_path() / "cranspar_full_scale.json";
            std::ofstream(tmp) << base;
            cfg_path = tmp;
        }
        cranspar::harness::optimize_cmd(cfg_path, std::cout,
                                                           std::filesystem::path(o.out) / "optimize_trace.json");
        if (!tmp.empty()) {
            std::filesystem::remove(tmp);
        }
        return kOk;
    }

    auto spec = cranspar::harness::figure_spec(name, base);
    if (o.seed) {
        spec.seed = *o.seed;
    }
    if (o.trials) {
        spec.trials = *o.trials;
    }
    if (!o.d0_grid.empty()) {
        spec.d0_grid = cranspar::harness::parse_d0_grid(o.d0_grid);
    }
    spec.output_dir = o.out;
    spec.threads = cranspar::harness::threads_from_env();

    const auto summary = cranspar::harness::run(spec);
    for (const auto& f : summary.files) {
        std::cout << f.string() << '\n';
    }
    std::cout << summary.manifest.string() << '\n';
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Distance-threshold channel sparsification experiments"};
    app.require_subcommand(1);

    Options opts;
    std::string chosen;
    for (const auto& name : cranspar::harness::experiment_names()) {
        auto* sub = app.add_subcommand(name, "run the '" + name + "' experiment");
        sub->add_option("--config", opts.config, "JSON configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", opts.seed, "master seed (overrides the config)");
        sub->add_option("--trials", opts.trials, "Monte Carlo trials (overrides the config)")
            ->check(CLI::NonNegativeNumber);
        sub->add_option("--out", opts.out, "output directory")->capture_default_str();
        sub->add_option("--d0-grid", opts.d0_grid, "threshold grid as lo:hi:n (metres)");
        sub->add_flag("--full-scale", opts.full_scale, "use N = 1000, K = 800 and 1000 trials");
        sub->callback([&chosen, name] { chosen = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        return run_experiment(chosen, opts);
    } catch (const cranspar::ConfigError& e) {
        std::cerr << "configuration error:\n";
        for (const auto& v : e.violations()) {
            std::cerr << "  - " << v << '\n';
        }
        return kConfig;
    } catch (const cranspar::DomainError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kConfig;
    } catch (const cranspar::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kNumerical;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kOther;
    }
}
