// SPDX-License-Identifier: Apache-2.0
#include "cranspar/geometry.hpp"

#include "cranspar/errors.hpp"
#include "cranspar/quadrature.hpp"
#include "cranspar/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace cranspar {

namespace {

std::string join_violations(const std::vector<std::string>& v)
{
    std::ostringstream os;
    os << "invalid configuration:";
    for (const auto& s : v) {
        os << "\n  - " << s;
    }
    return os.str();
}

void check_within(const NetworkConfig& cfg, double x, const char* what)
{
    if (!(x >= cfg.min_dist_m && x <= cfg.radius_m)) {
        std::ostringstream os;
        os << what << " = " << x << " m outside [" << cfg.min_dist_m << ", " << cfg.radius_m << "]";
        throw DomainError(os.str());
    }
}

double ppp_lambda(const DistancePdf& pdf, const NetworkConfig& cfg)
{
    if (pdf.ppp_density > 0.0) {
        return pdf.ppp_density;
    }
    return 1.0 / (std::numbers::pi * cfg.radius_m * cfg.radius_m);
}

// Continuous density without domain checks.
double raw_density(const DistancePdf& pdf, const NetworkConfig& cfg, double x)
{
    const double r = cfg.radius_m;
    switch (pdf.kind) {
    case PdfKind::DiscApprox:
        return 2.0 * x / (r * r);
    case PdfKind::Iut1: {
        const double t = x / (2.0 * r);
        if (t >= 1.0) {
            return 0.0;
        }
        return 4.0 * x / (std::numbers::pi * r * r) * (std::acos(t) - t * std::sqrt(1.0 - t * t));
    }
    case PdfKind::PoissonPP: {
        const double lambda = ppp_lambda(pdf, cfg);
        return 2.0 * std::numbers::pi * lambda * x * std::exp(-std::numbers::pi * lambda * x * x);
    }
    }
    return 0.0;
}

// hi^beta - lo^beta without cancellation for nearby endpoints.
double power_difference(double lo, double hi, double beta)
{
    return std::pow(lo, beta) * std::expm1(beta * std::log1p((hi - lo) / lo));
}

quadrature::Tolerance gain_tolerance()
{
    return {0.0, 1e-10, 4000};
}

void check_interval(const NetworkConfig& cfg, double lo, double hi)
{
    check_within(cfg, lo, "lower limit");
    check_within(cfg, hi, "upper limit");
    if (lo > hi) {
        std::ostringstream os;
        os << "lower limit " << lo << " exceeds upper limit " << hi;
        throw DomainError(os.str());
    }
}

} // namespace

double dbm_to_mw(double dbm) noexcept { return std::pow(10.0, dbm / 10.0); }
double mw_to_dbm(double mw) noexcept { return 10.0 * std::log10(mw); }

double NetworkConfig::total_data_power() const noexcept
{
    return std::accumulate(data_power_mw.begin(), data_power_mw.end(), 0.0);
}

double NetworkConfig::mean_data_power() const noexcept
{
    return data_power_mw.empty() ? 0.0 : total_data_power() / static_cast<double>(data_power_mw.size());
}

std::vector<std::string> NetworkConfig::violations() const
{
    std::vector<std::string> v;
    auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
    if (!positive(min_dist_m)) {
        v.emplace_back("min_dist_m must be > 0");
    }
    if (!std::isfinite(radius_m) || !(radius_m > min_dist_m)) {
        v.emplace_back("radius_m must exceed min_dist_m");
    }
    if (!std::isfinite(alpha) || !(alpha > 2.0)) {
        v.emplace_back("alpha must be > 2");
    }
    if (num_rrh < 1) {
        v.emplace_back("num_rrh must be >= 1");
    }
    if (num_ue < 1) {
        v.emplace_back("num_ue must be >= 1");
    }
    if (training_len < 1) {
        v.emplace_back("training_len must be >= 1");
    }
    if (num_ue >= 1 && data_power_mw.size() != static_cast<std::size_t>(num_ue)) {
        v.emplace_back("data_power_mw must have one entry per UE (" + std::to_string(data_power_mw.size()) +
                       " given, " + std::to_string(num_ue) + " expected)");
    }
    for (std::size_t i = 0; i < data_power_mw.size(); ++i) {
        if (!positive(data_power_mw[i])) {
            v.emplace_back("data_power_mw[" + std::to_string(i) + "] must be > 0");
            break;
        }
    }
    if (!positive(pilot_power_total_mw)) {
        v.emplace_back("pilot_power_total_mw must be > 0");
    }
    if (!positive(noise_power_mw)) {
        v.emplace_back("noise_power_mw must be > 0");
    }
    if (error_variance_override && !(std::isfinite(*error_variance_override) && *error_variance_override >= 0.0)) {
        v.emplace_back("error_variance_override must be >= 0");
    }
    return v;
}

void NetworkConfig::validate() const
{
    auto v = violations();
    if (!v.empty()) {
        throw ConfigError(std::move(v));
    }
}

NetworkConfig NetworkConfig::table1()
{
    NetworkConfig cfg;
    cfg.radius_m = 5000.0;
    cfg.min_dist_m = 10.0;
    cfg.alpha = 3.8;
    cfg.num_rrh = 1000;
    cfg.num_ue = 800;
    cfg.data_power_mw.assign(800, dbm_to_mw(23.0));
    cfg.pilot_power_total_mw = dbm_to_mw(30.0);
    cfg.noise_power_mw = dbm_to_mw(-174.0);
    cfg.training_len = 800;
    return cfg;
}

NetworkConfig NetworkConfig::desk_scale()
{
    NetworkConfig cfg = table1();
    cfg.num_rrh = 100;
    cfg.num_ue = 80;
    cfg.training_len = 80;
    cfg.data_power_mw.assign(80, dbm_to_mw(23.0));
    return cfg;
}

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::invalid_argument(join_violations(violations)), violations_(std::move(violations))
{
}

std::string to_string(PdfKind kind)
{
    switch (kind) {
    case PdfKind::DiscApprox:
        return "disc_approx";
    case PdfKind::Iut1:
        return "iut1";
    case PdfKind::PoissonPP:
        return "ppp";
    }
    return "unknown";
}

PdfValue pdf_density(const DistancePdf& pdf, const NetworkConfig& cfg, double x)
{
    check_within(cfg, x, "x");
    PdfValue out;
    out.density = raw_density(pdf, cfg, x);
    if (x == cfg.min_dist_m) {
        out.atom = atom_mass(pdf, cfg);
    }
    return out;
}

double atom_mass(const DistancePdf& pdf, const NetworkConfig& cfg)
{
    if (pdf.kind != PdfKind::DiscApprox) {
        return 0.0;
    }
    const double ratio = cfg.min_dist_m / cfg.radius_m;
    return ratio * ratio;
}

double continuous_gain(const DistancePdf& pdf, const NetworkConfig& cfg, double lo, double hi)
{
    check_interval(cfg, lo, hi);
    if (lo == hi) {
        return 0.0;
    }
    const double r = cfg.radius_m;
    const double alpha = cfg.alpha;
    if (pdf.kind == PdfKind::DiscApprox) {
        const double beta = 2.0 - alpha;
        return 2.0 / (beta * r * r) * power_difference(lo, hi, beta);
    }
    auto integrand = [&](double x) { return std::pow(x, -alpha) * raw_density(pdf, cfg, x); };
    return quadrature::integrate(integrand, lo, hi, gain_tolerance()).value;
}

double continuous_mass(const DistancePdf& pdf, const NetworkConfig& cfg, double lo, double hi)
{
    check_interval(cfg, lo, hi);
    if (lo == hi) {
        return 0.0;
    }
    const double r = cfg.radius_m;
    if (pdf.kind == PdfKind::DiscApprox) {
        return (hi - lo) * (hi + lo) / (r * r);
    }
    auto integrand = [&](double x) { return raw_density(pdf, cfg, x); };
    return quadrature::integrate(integrand, lo, hi, gain_tolerance()).value;
}

double expected_gain(const DistancePdf& pdf, const NetworkConfig& cfg, double d_lo, double d_hi)
{
    check_interval(cfg, d_lo, d_hi);
    double gain = continuous_gain(pdf, cfg, d_lo, d_hi);
    if (d_lo == cfg.min_dist_m) {
        gain += std::pow(cfg.min_dist_m, -cfg.alpha) * atom_mass(pdf, cfg);
    }
    return gain;
}

double sparsification_mass(const DistancePdf& pdf, const NetworkConfig& cfg, double d0)
{
    check_within(cfg, d0, "d0");
    return atom_mass(pdf, cfg) + continuous_mass(pdf, cfg, cfg.min_dist_m, d0);
}

Layout sample_layout(const NetworkConfig& cfg, std::uint64_t seed)
{
    cfg.validate();
    Rng rng(seed);
    auto draw = [&](std::vector<Point>& pts, int count) {
        pts.resize(static_cast<std::size_t>(count));
        for (auto& p : pts) {
            const double rho = cfg.radius_m * std::sqrt(rng.uniform());
            const double theta = 2.0 * std::numbers::pi * rng.uniform();
            p = {rho * std::cos(theta), rho * std::sin(theta)};
        }
    };

    Layout layout;
    layout.radius_m = cfg.radius_m;
    layout.min_dist_m = cfg.min_dist_m;
    draw(layout.rrh_xy, cfg.num_rrh);
    draw(layout.ue_xy, cfg.num_ue);

    layout.distances.resize(cfg.num_rrh, cfg.num_ue);
    for (int n = 0; n < cfg.num_rrh; ++n) {
        for (int k = 0; k < cfg.num_ue; ++k) {
            const auto& a = layout.rrh_xy[static_cast<std::size_t>(n)];
            const auto& b = layout.ue_xy[static_cast<std::size_t>(k)];
            layout.distances(n, k) = std::max(std::hypot(a.x - b.x, a.y - b.y), cfg.min_dist_m);
        }
    }
    return layout;
}

} // namespace cranspar
