// SPDX-License-Identifier: Apache-2.0
#include "cranspar/errors.hpp"
#include "cranspar/optimizer.hpp"

#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace cranspar;
using analysis::BoundInputs;
using optimizer::SolverSettings;

namespace {

BoundInputs table1()
{
    return {NetworkConfig::table1(), DistancePdf::disc_approx(), Estimator::LS, PilotKind::Orthogonal};
}

void check_trace(const optimizer::DinkelbachTrace& t)
{
    REQUIRE(!t.iterations.empty());
    CHECK(t.iterations.front().q == 0.0);
    for (std::size_t i = 1; i < t.iterations.size(); ++i) {
        CHECK(t.iterations[i].q > t.iterations[i - 1].q);
        CHECK(t.iterations[i].f_of_q < t.iterations[i - 1].f_of_q);
    }
    for (const auto& s : t.iterations) {
        CHECK(s.f_of_q >= 0.0);
    }
}

} // namespace

TEST_CASE("q = 0 maximizes the kept gain alone")
{
    CHECK(optimizer::solve_subproblem(table1(), 0.0, {}) == 5000.0);
    CHECK_THROWS_AS(optimizer::solve_subproblem(table1(), -0.1, {}), DomainError);
}

TEST_CASE("large q collapses onto the minimizer of F2")
{
    std::mt19937_64 gen(5);
    for (int i = 0; i < 5; ++i) {
        BoundInputs in = table1();
        in.cfg = oracle::random_network(gen);
        const double r0 = in.cfg.min_dist_m;
        const double r = in.cfg.radius_m;
        double best = r0;
        double best_f2 = optimizer::normalized_objective_parts(in, r0).f2;
        for (int j = 1; j <= 4000; ++j) {
            const double d = r0 + (r - r0) * j / 4000.0;
            const double f2 = optimizer::normalized_objective_parts(in, d).f2;
            if (f2 < best_f2) {
                best_f2 = f2;
                best = d;
            }
        }
        const double got = optimizer::solve_subproblem(in, 1e30, {});
        CHECK(std::abs(got - best) <= (r - r0) / 4000.0);
    }
    CHECK(optimizer::solve_subproblem(table1(), 1e30, {}) == 10.0);
}

TEST_CASE("normalized parts give the bound as their ratio")
{
    const auto in = table1();
    for (double d0 : {10.0, 55.0, 900.0, 5000.0}) {
        const auto p = optimizer::normalized_objective_parts(in, d0);
        CHECK(oracle::relative_difference(p.f1 / p.f2, analysis::fidelity_lower_bound(in, d0)) < 1e-12);
        const auto raw = analysis::objective_parts(in, d0);
        const auto raw_ref = analysis::objective_parts(in, 900.0);
        const auto p_ref = optimizer::normalized_objective_parts(in, 900.0);
        CHECK(oracle::relative_difference(raw.f1 / raw_ref.f1, p.f1 / p_ref.f1) < 1e-12);
        CHECK(oracle::relative_difference(raw.f2 / raw_ref.f2, p.f2 / p_ref.f2) < 1e-12);
    }
}

TEST_CASE("reference run")
{
    const auto in = table1();
    SolverSettings s;
    const auto t = optimizer::dinkelbach(in, s);
    CHECK(t.converged);
    CHECK(t.termination == optimizer::Termination::ConvergedBelowDelta);
    CHECK(t.iterations.size() <= 20);
    CHECK(t.diagnostics.empty());
    check_trace(t);
    const auto g = optimizer::grid_oracle(in, 10000);
    CHECK(std::abs(t.final_d0 - g.d0) <= (5000.0 - 10.0) / 1e4);
    const auto p = optimizer::normalized_objective_parts(in, t.final_d0);
    CHECK(std::abs(t.final_q - p.f1 / p.f2) <= s.delta);
    // at the optimal q the subproblem optimum is (numerically) zero
    const double d = optimizer::solve_subproblem(in, t.final_q, s);
    CHECK(std::abs(optimizer::subproblem_value(in, t.final_q, d)) < s.delta);
}

TEST_CASE("randomized runs agree with the grid oracle")
{
    std::mt19937_64 gen(17);
    for (int i = 0; i < 10; ++i) {
        BoundInputs in = table1();
        in.cfg = oracle::random_network(gen);
        const auto t = optimizer::dinkelbach(in, {});
        const auto g = optimizer::grid_oracle(in, 10000);
        INFO("config " << i << " final " << t.final_d0 << " grid " << g.d0);
        CHECK(t.converged);
        check_trace(t);
        CHECK(std::abs(t.final_d0 - g.d0) <= (in.cfg.radius_m - in.cfg.min_dist_m) / 1e4);
    }
}

TEST_CASE("other distance laws optimize consistently")
{
    for (const auto& pdf : {DistancePdf::iut1(), DistancePdf::poisson()}) {
        BoundInputs in = table1();
        in.pdf = pdf;
        in.cfg.error_variance_override = 1e-12;
        const auto t = optimizer::dinkelbach(in, {});
        const auto g = optimizer::grid_oracle(in, 2000);
        INFO(to_string(pdf.kind) << " final " << t.final_d0 << " grid " << g.d0);
        CHECK(t.converged);
        CHECK(std::abs(t.final_d0 - g.d0) <= (5000.0 - 10.0) / 1999.0);
    }
}

TEST_CASE("subproblem is concave")
{
    std::mt19937_64 gen(23);
    for (int i = 0; i < 10; ++i) {
        BoundInputs in = table1();
        in.cfg = oracle::random_network(gen);
        for (double q : {0.1, 0.5, 0.9}) {
            std::vector<double> g(200);
            for (int j = 0; j < 200; ++j) {
                const double d = in.cfg.min_dist_m + (in.cfg.radius_m - in.cfg.min_dist_m) * j / 199.0;
                g[static_cast<std::size_t>(j)] = optimizer::subproblem_value(in, q, d);
            }
            for (std::size_t j = 1; j + 1 < g.size(); ++j) {
                const double second = g[j + 1] - 2.0 * g[j] + g[j - 1];
                REQUIRE(second <= 1e-12 * std::abs(g[j]));
            }
        }
    }
}

TEST_CASE("argmax is invariant to a common power scale")
{
    BoundInputs in = table1();
    in.cfg.error_variance_override = 1e-11;
    const double before = optimizer::dinkelbach(in, {}).final_d0;
    for (auto& p : in.cfg.data_power_mw) {
        p *= 1e3;
    }
    in.cfg.noise_power_mw *= 1e3;
    const double after = optimizer::dinkelbach(in, {}).final_d0;
    CHECK(std::abs(after - before) <= 1e-3);
}

TEST_CASE("perfect CSI optimum is the grand cluster")
{
    BoundInputs in = table1();
    in.cfg.pilot_power_total_mw = 1e40;
    const auto t = optimizer::dinkelbach(in, {});
    CHECK(t.final_d0 == Catch::Approx(5000.0).epsilon(1e-6));
}

TEST_CASE("grid oracle basics")
{
    BoundInputs in = table1();
    in.cfg.error_variance_override = 0.0;
    CHECK(optimizer::grid_oracle(in, 1000).d0 == 5000.0);

    const auto two = optimizer::grid_oracle(table1(), 2);
    CHECK((two.d0 == 10.0 || two.d0 == 5000.0));

    std::mt19937_64 gen(41);
    BoundInputs r = table1();
    r.cfg = oracle::random_network(gen);
    double prev = 0.0;
    for (int n : {3, 5, 9, 17, 33, 65, 129}) {
        // nested grids: every refinement contains the previous points
        const double v = optimizer::grid_oracle(r, n).value;
        CHECK(v >= prev);
        prev = v;
    }
    CHECK_THROWS_AS(optimizer::grid_oracle(in, 1), ConfigError);
}

TEST_CASE("max-iteration outcome is reported, not thrown")
{
    SolverSettings s;
    s.n_max = 1;
    const auto t = optimizer::dinkelbach(table1(), s);
    CHECK_FALSE(t.converged);
    CHECK(t.termination == optimizer::Termination::MaxIterations);
    CHECK(t.iterations.size() == 1);
}

TEST_CASE("solver settings validation")
{
    SolverSettings s;
    s.delta = 0.0;
    s.n_max = 0;
    s.bisection_tol = -1.0;
    s.grid_points = 1;
    try {
        s.validate();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.violations().size() == 4);
    }
}
