// SPDX-License-Identifier: Apache-2.0
#include "cranspar/errors.hpp"
#include "cranspar/harness.hpp"

#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "json.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace cranspar;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch_dir(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("cranspar_unit_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) {
            cells.push_back(cell);
        }
        if (!line.empty() && line.back() == ',') {
            cells.emplace_back();
        }
        rows.push_back(cells);
    }
    return rows;
}

const char* kDesk = R"({"num_rrh": 100, "num_ue": 80, "training_length": 80, "data_power_dbm": 23,
                        "pilot_power_dbm": 30, "noise_power_dbm": -174, "trials": 4, "seed": 9})";

} // namespace

TEST_CASE("config defaults and unit conversion")
{
    const auto cfg = harness::parse_config(R"({"data_power_dbm": 20, "pilot_power_dbm": 30})");
    CHECK(cfg.network.num_ue == 800);
    CHECK(cfg.network.data_power_mw.size() == 800);
    CHECK(cfg.network.data_power_mw.front() == Catch::Approx(100.0).epsilon(1e-14));
    CHECK(cfg.network.pilot_power_total_mw == Catch::Approx(1000.0).epsilon(1e-14));
    CHECK(cfg.solver.delta == 1e-4);
    CHECK(cfg.solver.n_max == 20);

    const auto list = harness::parse_config(R"({"num_ue": 2, "training_length": 2, "data_power_dbm": [0, 10]})");
    CHECK(list.network.data_power_mw == std::vector<double>{1.0, 10.0});
}

TEST_CASE("config errors are all reported")
{
    try {
        harness::parse_config(R"({"pathloss_exponent": 1.5, "num_rrh": 0, "bogus": 1, "estimator": "zf",
                                 "pilot_power_dbm": 30, "pilot_power_mw": 1000})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.violations().size() >= 5);
    }
    CHECK_THROWS_AS(harness::parse_config("[1, 2]"), ConfigError);
    CHECK_THROWS_AS(harness::parse_config("{"), ConfigError);
    CHECK_THROWS_AS(harness::parse_config(R"({"training_length": 700})"), ConfigError);
    CHECK_NOTHROW(harness::parse_config(R"({"training_length": 760, "pilot_kind": "nonorthogonal"})"));
}

TEST_CASE("resolved config parses back to the same scenario")
{
    const auto cfg = harness::parse_config(R"({"data_power_dbm": 21.7, "pdf": "ppp", "ppp_density": 1e-8,
                                              "estimator": "mmse", "error_variance_override": 1e-12})");
    const std::string text = harness::resolved_config_json(cfg);
    const auto back = harness::parse_config(text);
    CHECK(back.network.data_power_mw == cfg.network.data_power_mw);
    CHECK(back.network.noise_power_mw == cfg.network.noise_power_mw);
    CHECK(back.pdf.ppp_density == cfg.pdf.ppp_density);
    CHECK(back.estimator == Estimator::MMSE);
    CHECK(*back.network.error_variance_override == 1e-12);
    CHECK(harness::resolved_config_json(back) == text);
}

TEST_CASE("short training flags the contamination factor")
{
    CHECK(harness::config_warnings(harness::parse_config("{}")).empty());
    CHECK(harness::config_warnings(harness::parse_config(R"({"pilot_kind": "nonorthogonal", "training_length": 400})"))
              .empty());
    const auto w =
        harness::config_warnings(harness::parse_config(R"({"pilot_kind": "nonorthogonal", "training_length": 399})"));
    REQUIRE(w.size() == 1);
    CHECK(w.front().find("exceeds 1") != std::string::npos);
}

TEST_CASE("git-style content hash")
{
    // matches `printf 'hello\n' | git hash-object --stdin`
    CHECK(harness::content_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
    CHECK(harness::content_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST_CASE("doubles round-trip through their shortest form")
{
    for (double x : {0.1, 1.0 / 3.0, 3.98107170553497e-18, 5000.0, -2.5e300}) {
        CHECK(std::stod(harness::format_double(x)) == x);
    }
    CHECK(harness::format_double(0.1) == "0.1");
}

TEST_CASE("d0 grid parsing")
{
    const auto g = harness::parse_d0_grid("10:5000:10");
    CHECK(g.size() == 10);
    CHECK(g.front() == 10.0);
    CHECK(g.back() == 5000.0);
    CHECK(harness::parse_d0_grid("7:7:1") == std::vector<double>{7.0});
    CHECK_THROWS_AS(harness::parse_d0_grid("10:5000"), ConfigError);
    CHECK_THROWS_AS(harness::parse_d0_grid("a:5000:3"), ConfigError);
    CHECK_THROWS_AS(harness::parse_d0_grid("100:10:3"), ConfigError);
}

TEST_CASE("bound run writes an analysis-only CSV that round-trips")
{
    const fs::path dir = scratch_dir("bound");
    auto spec = harness::figure_spec("bound", kDesk);
    spec.output_dir = dir;
    spec.d0_grid = harness::linspace(10.0, 5000.0, 25);
    const auto summary = harness::run(spec);
    REQUIRE(summary.files.size() == 1);
    const auto rows = read_csv(summary.files.front());
    REQUIRE(rows.size() == 26);
    CHECK(rows[0] == std::vector<std::string>{"d0_m", "rho_bound", "rho_empirical", "rho_stderr", "n1_mw", "n2_mw",
                                              "mubar_over_mu"});

    const json manifest = json::parse(slurp(summary.manifest));
    const auto cfg = harness::parse_config(manifest["resolved"][0]["config"].dump());
    for (std::size_t i = 1; i < rows.size(); ++i) {
        REQUIRE(rows[i].size() == 7);
        CHECK(rows[i][2].empty());
        CHECK(rows[i][3].empty());
        const double d0 = std::stod(rows[i][0]);
        CHECK(std::stod(rows[i][1]) == analysis::fidelity_lower_bound(cfg.bound_inputs(), d0));
    }
    CHECK(manifest["input_hash"].get<std::string>().size() == 40);
    CHECK(manifest.contains("wall_seconds"));
    CHECK(manifest.contains("averaging_order"));
    fs::remove_all(dir);
}

TEST_CASE("montecarlo CSV is identical across worker counts")
{
    const fs::path a = scratch_dir("mc1");
    const fs::path b = scratch_dir("mc4");
    auto spec = harness::figure_spec("montecarlo", kDesk);
    spec.d0_grid = harness::linspace(10.0, 5000.0, 4);
    spec.output_dir = a;
    spec.threads = 1;
    const auto one = harness::run(spec);
    spec.output_dir = b;
    spec.threads = 4;
    const auto four = harness::run(spec);
    CHECK(slurp(one.files.front()) == slurp(four.files.front()));
    const auto rows = read_csv(one.files.front());
    CHECK_FALSE(rows[1][2].empty());
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("figure specs sweep the documented parameters")
{
    CHECK(harness::figure_spec("fig2", kDesk).sweep.values == std::vector<std::string>{"80", "85", "100"});
    CHECK(harness::figure_spec("fig3", kDesk).sweep.parameter == "pathloss_exponent");
    CHECK(harness::figure_spec("fig4", kDesk).sweep.values.size() == 3);
    CHECK(harness::figure_spec("fig8", kDesk).sweep.values == std::vector<std::string>{"23", "26", "30"});
    const auto fig9 = harness::figure_spec("fig9", kDesk);
    CHECK(fig9.sweep.values == std::vector<std::string>{"76", "78", "79"});
    CHECK(harness::parse_config(fig9.base_config_json).pilot_kind == PilotKind::NonOrthogonalSurrogate);
    CHECK_THROWS_AS(harness::figure_spec("fig10", kDesk), ConfigError);
}

TEST_CASE("figure runs produce one CSV per sweep value")
{
    const fs::path dir = scratch_dir("fig7");
    auto spec = harness::figure_spec("fig7", kDesk);
    spec.trials = 0;
    spec.output_dir = dir;
    const auto summary = harness::run(spec);
    CHECK(summary.files.size() == 4);
    // at any threshold the bound falls as the data power grows
    std::vector<double> at_mid;
    for (const auto& f : summary.files) {
        at_mid.push_back(std::stod(read_csv(f)[100][1]));
    }
    for (std::size_t i = 1; i < at_mid.size(); ++i) {
        CHECK(at_mid[i] < at_mid[i - 1]);
    }
    fs::remove_all(dir);
}

TEST_CASE("DNC comparison CSV")
{
    const fs::path dir = scratch_dir("fig5");
    auto spec = harness::figure_spec("fig5", "{}");
    spec.output_dir = dir;
    const auto summary = harness::run(spec);
    REQUIRE(summary.files.size() == 1);
    const auto rows = read_csv(summary.files.front());
    REQUIRE(rows.size() == 5);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(std::stod(rows[i][2]) <= std::stod(rows[i][1]));
        CHECK(std::stod(rows[i][5]) <= std::stod(rows[i][4]));
    }
    fs::remove_all(dir);
}

TEST_CASE("invalid specs list every violation")
{
    harness::ExperimentSpec spec;
    spec.name = "nope";
    spec.base_config_json = R"({"num_rrh": -3})";
    spec.trials = 1;
    spec.threads = 0;
    try {
        harness::run(spec);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.violations().size() >= 5);
    }

    auto bad_sweep = harness::figure_spec("bound", kDesk);
    bad_sweep.output_dir = scratch_dir("never");
    bad_sweep.sweep = {"warp_factor", {"9"}};
    CHECK_THROWS_AS(harness::run(bad_sweep), ConfigError);

    auto bad_grid = harness::figure_spec("bound", kDesk);
    bad_grid.output_dir = scratch_dir("never");
    bad_grid.d0_grid = {5.0, 100.0};
    CHECK_THROWS_AS(harness::run(bad_grid), ConfigError);
}

TEST_CASE("unwritable output directory is an I/O error")
{
    const fs::path file = scratch_dir("blocker");
    std::ofstream(file) << "x";
    auto spec = harness::figure_spec("bound", kDesk);
    spec.output_dir = file / "sub";
    CHECK_THROWS_AS(harness::run(spec), IoError);
    fs::remove_all(file);
}

TEST_CASE("optimize command output is reproducible")
{
    const fs::path dir = scratch_dir("opt");
    fs::create_directories(dir);
    std::ofstream(dir / "cfg.json") << "{}";
    std::ostringstream first;
    std::ostringstream second;
    const auto t = harness::optimize_cmd(dir / "cfg.json", first, dir / "a.json");
    harness::optimize_cmd(dir / "cfg.json", second, dir / "b.json");
    CHECK(first.str() == second.str());
    CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
    CHECK(t.converged);
    CHECK(t.iterations.size() <= 20);
    CHECK(first.str().find("final_d0_m") != std::string::npos);

    std::ofstream(dir / "perfect.json") << R"({"pilot_power_mw": 1e40})";
    std::ostringstream sink;
    const auto p = harness::optimize_cmd(dir / "perfect.json", sink, std::nullopt);
    CHECK(p.final_d0 == Catch::Approx(5000.0).epsilon(1e-6));
    CHECK_THROWS_AS(harness::optimize_cmd(dir / "missing.json", sink, std::nullopt), IoError);
    fs::remove_all(dir);
}

TEST_CASE("worker count from the environment")
{
    ::unsetenv("CRANSPAR_THREADS");
    CHECK(harness::threads_from_env() == 1);
    ::setenv("CRANSPAR_THREADS", "4", 1);
    CHECK(harness::threads_from_env() == 4);
    ::setenv("CRANSPAR_THREADS", "zero", 1);
    CHECK_THROWS_AS(harness::threads_from_env(), ConfigError);
    ::unsetenv("CRANSPAR_THREADS");
}
