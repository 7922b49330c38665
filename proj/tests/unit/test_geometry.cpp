// SPDX-License-Identifier: Apache-2.0
#include "cranspar/errors.hpp"
#include "cranspar/geometry.hpp"

#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace cranspar;

TEST_CASE("dBm conversion")
{
    CHECK(dbm_to_mw(0.0) == 1.0);
    CHECK(dbm_to_mw(30.0) == Catch::Approx(1000.0).epsilon(1e-14));
    CHECK(mw_to_dbm(dbm_to_mw(23.0)) == Catch::Approx(23.0).epsilon(1e-14));
}

TEST_CASE("reference defaults")
{
    const auto c = NetworkConfig::table1();
    CHECK(c.num_rrh == 1000);
    CHECK(c.num_ue == 800);
    CHECK(c.radius_m == 5000.0);
    CHECK(c.min_dist_m == 10.0);
    CHECK(c.alpha == 3.8);
    CHECK(mw_to_dbm(c.data_power_mw.front()) == Catch::Approx(23.0));
    CHECK(mw_to_dbm(c.noise_power_mw) == Catch::Approx(-174.0));
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("validation lists every violation")
{
    NetworkConfig c = NetworkConfig::table1();
    c.alpha = 1.5;
    c.num_rrh = 0;
    c.noise_power_mw = -1.0;
    try {
        c.validate();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.violations().size() == 3);
    }
}

TEST_CASE("disc pdf atom and density")
{
    const auto c = NetworkConfig::table1();
    const auto pdf = DistancePdf::disc_approx();
    const auto at_r0 = pdf_density(pdf, c, 10.0);
    CHECK(at_r0.atom == Catch::Approx(4e-6).epsilon(1e-12));
    const auto at_r = pdf_density(pdf, c, 5000.0);
    CHECK(at_r.density == Catch::Approx(2.0 / 5000.0).epsilon(1e-14));
    CHECK(at_r.atom == 0.0);
    CHECK_THROWS_AS(pdf_density(pdf, c, 9.0), DomainError);
    CHECK_THROWS_AS(pdf_density(pdf, c, 5001.0), DomainError);
}

TEST_CASE("poisson density")
{
    const auto c = NetworkConfig::table1();
    const double lambda = 1.0 / (std::numbers::pi * 5000.0 * 5000.0);
    for (double x : {10.0, 700.0, 4999.0}) {
        const double expect = 2.0 * std::numbers::pi * lambda * x * std::exp(-std::numbers::pi * lambda * x * x);
        CHECK(pdf_density(DistancePdf::poisson(), c, x).density == Catch::Approx(expect).epsilon(1e-13));
    }
}

TEST_CASE("expected gain against the quadrature oracle")
{
    auto c = NetworkConfig::table1();
    for (const auto& pdf : {DistancePdf::disc_approx(), DistancePdf::iut1(), DistancePdf::poisson()}) {
        for (double alpha : {2.5, 3.8, 4.5}) {
            c.alpha = alpha;
            for (double hi : {10.0, 11.0, 400.0, 5000.0}) {
                const double got = expected_gain(pdf, c, c.min_dist_m, hi);
                const double want = oracle::gain(pdf, c, c.min_dist_m, hi);
                INFO(to_string(pdf.kind) << " alpha " << alpha << " hi " << hi);
                if (want == 0.0) {
                    CHECK(got == 0.0);
                } else {
                    CHECK(oracle::relative_difference(got, want) < 1e-9);
                }
            }
        }
    }
}

TEST_CASE("expected gain is additive and monotone")
{
    const auto c = NetworkConfig::table1();
    const auto pdf = DistancePdf::disc_approx();
    const double mu = expected_gain(pdf, c, c.min_dist_m, c.radius_m);
    for (double d0 : {20.0, 1000.0, 4999.0, 5000.0}) {
        const double split = expected_gain(pdf, c, c.min_dist_m, d0) + expected_gain(pdf, c, d0, c.radius_m);
        CHECK(oracle::relative_difference(split, mu) < 1e-12);
    }
    // at d0 == r0 the upper piece starts on the atom, so only its continuous part adds up
    CHECK(oracle::relative_difference(expected_gain(pdf, c, 10.0, 10.0) + continuous_gain(pdf, c, 10.0, 5000.0), mu) <
          1e-12);
    // degenerate interval keeps only the atom
    CHECK(expected_gain(pdf, c, 10.0, 10.0) == Catch::Approx(std::pow(10.0, -3.8) * 4e-6).epsilon(1e-13));
    double prev = 0.0;
    for (double hi = 10.5; hi <= 5000.0; hi *= 1.3) {
        const double g = expected_gain(pdf, c, 10.0, hi);
        CHECK(g > prev);
        prev = g;
    }
    CHECK_THROWS_AS(expected_gain(pdf, c, 100.0, 50.0), DomainError);
}

TEST_CASE("sparsification mass")
{
    const auto c = NetworkConfig::table1();
    const auto pdf = DistancePdf::disc_approx();
    CHECK(sparsification_mass(pdf, c, 5000.0) == Catch::Approx(1.0).epsilon(1e-15));
    CHECK(sparsification_mass(pdf, c, 10.0) == Catch::Approx(4e-6).epsilon(1e-15));
    CHECK(sparsification_mass(pdf, c, 1000.0) == Catch::Approx(0.04).epsilon(1e-14));
    CHECK(std::abs(sparsification_mass(pdf, c, 5000.0) - 1.0) < 1e-9);
    for (double d0 : {100.0, 2500.0, 5000.0}) {
        CHECK(oracle::relative_difference(sparsification_mass(DistancePdf::iut1(), c, d0),
                                          oracle::mass(DistancePdf::iut1(), c, d0)) < 1e-9);
    }
}

TEST_CASE("layouts respect their invariants and are reproducible")
{
    auto c = NetworkConfig::desk_scale();
    const Layout a = sample_layout(c, 0);
    const Layout b = sample_layout(c, 0);
    CHECK(a.distances.rows() == 100);
    CHECK(a.distances.cols() == 80);
    CHECK(a.distances.minCoeff() >= 10.0);
    CHECK(a.distances.maxCoeff() <= 10000.0);
    CHECK(a.distances == b.distances);
    for (const auto& p : a.rrh_xy) {
        CHECK(std::hypot(p.x, p.y) <= 5000.0);
    }

    c.num_rrh = 1;
    c.num_ue = 1;
    c.training_len = 1;
    c.data_power_mw.assign(1, 1.0);
    const Layout one = sample_layout(c, 7);
    CHECK(one.distances(0, 0) >= 10.0);
    CHECK(one.distances(0, 0) <= 10000.0);
}

TEST_CASE("full-size layout has no pair below the minimum distance")
{
    const Layout l = sample_layout(NetworkConfig::table1(), 0);
    CHECK(l.distances.rows() == 1000);
    CHECK(l.distances.cols() == 800);
    CHECK(l.distances.minCoeff() >= 10.0);
}

TEST_CASE("sampled link distances follow the disc line-picking law")
{
    // Independent pairs (one RRH and one UE per layout) against the exact
    // line-picking CDF on [0, 2r]; the clamp at r0 moves a negligible mass.
    auto c = NetworkConfig::desk_scale();
    c.num_rrh = 1;
    c.num_ue = 1;
    c.training_len = 1;
    c.data_power_mw.assign(1, 1.0);
    auto cdf = [&](double x) {
        const double t = x / (2.0 * c.radius_m);
        if (t >= 1.0) {
            return 1.0;
        }
        return 1.0 + (2.0 / std::numbers::pi) *
                         ((4.0 * t * t - 1.0) * std::acos(t) - t * (1.0 + 2.0 * t * t) * std::sqrt(1.0 - t * t));
    };
    // the CDF must agree with the density used for the iut1 pdf
    for (double d0 : {500.0, 2500.0, 5000.0}) {
        CHECK(std::abs(cdf(d0) - cdf(c.min_dist_m) - oracle::mass(DistancePdf::iut1(), c, d0)) < 1e-10);
    }

    const int samples = 100000;
    std::vector<double> d(samples);
    for (int i = 0; i < samples; ++i) {
        d[static_cast<std::size_t>(i)] = sample_layout(c, static_cast<std::uint64_t>(i)).distances(0, 0);
    }
    std::sort(d.begin(), d.end());
    double ks = 0.0;
    const double n = samples;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double f = cdf(d[i]);
        ks = std::max({ks, std::abs(f - static_cast<double>(i) / n), std::abs(f - static_cast<double>(i + 1) / n)});
    }
    INFO("KS statistic " << ks);
    CHECK(ks < 1.63 / std::sqrt(n));
}
