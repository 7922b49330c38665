// SPDX-License-Identifier: Apache-2.0
#include "cranspar/analysis.hpp"

#include "cranspar/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cranspar::analysis {

namespace {

void check_threshold(const NetworkConfig& cfg, double d0)
{
    if (!(d0 >= cfg.min_dist_m && d0 <= cfg.radius_m)) {
        std::ostringstream os;
        os << "d0 = " << d0 << " m outside [" << cfg.min_dist_m << ", " << cfg.radius_m << "]";
        throw DomainError(os.str());
    }
}

} // namespace

void BoundInputs::validate() const
{
    std::vector<std::string> v = cfg.violations();
    if (pilot_kind == PilotKind::Orthogonal && cfg.training_len < cfg.num_ue) {
        v.emplace_back("orthogonal pilots need training_len >= num_ue");
    }
    if (pilot_kind == PilotKind::NonOrthogonalSurrogate && cfg.training_len > cfg.num_ue) {
        v.emplace_back("non-orthogonal pilots need training_len <= num_ue");
    }
    if (pdf.kind == PdfKind::PoissonPP && pdf.ppp_density < 0.0) {
        v.emplace_back("ppp_density must be >= 0 (0 selects 1/(pi r^2))");
    }
    if (!v.empty()) {
        throw ConfigError(std::move(v));
    }
}

double mean_gain(const BoundInputs& in)
{
    return expected_gain(in.pdf, in.cfg, in.cfg.min_dist_m, in.cfg.radius_m);
}

double kept_gain(const BoundInputs& in, double d0)
{
    check_threshold(in.cfg, d0);
    return expected_gain(in.pdf, in.cfg, in.cfg.min_dist_m, d0);
}

ErrorStatistics retained_error(const BoundInputs& in)
{
    const NetworkConfig& c = in.cfg;
    return error_statistics(in.pilot_kind, in.estimator, c.num_ue, c.training_len, c.pilot_power_total_mw,
                            c.noise_power_mw, mean_gain(in), c.error_variance_override);
}

double n1(const BoundInputs& in, double d0)
{
    check_threshold(in.cfg, d0);
    // mu - mu_bar is the tail integral over (d0, r]; evaluating it directly
    // keeps N1(r) exactly zero and avoids cancellation near r.
    return in.cfg.total_data_power() * continuous_gain(in.pdf, in.cfg, d0, in.cfg.radius_m);
}

double n2(const BoundInputs& in, double d0)
{
    check_threshold(in.cfg, d0);
    return in.cfg.total_data_power() * retained_error(in).total_variance() * sparsification_mass(in.pdf, in.cfg, d0);
}

double fidelity_lower_bound(const BoundInputs& in, double d0)
{
    check_threshold(in.cfg, d0);
    const double n0 = in.cfg.noise_power_mw;
    return kept_gain(in, d0) / mean_gain(in) * n0 / (n0 + n1(in, d0) + n2(in, d0));
}

ObjectiveParts objective_parts(const BoundInputs& in, double d0)
{
    check_threshold(in.cfg, d0);
    const double n0 = in.cfg.noise_power_mw;
    const double full_mass = sparsification_mass(in.pdf, in.cfg, in.cfg.radius_m);
    return {n0 * kept_gain(in, d0), full_mass * (n0 + n1(in, d0) + n2(in, d0))};
}

StationarityCoefficients stationarity_coefficients(const BoundInputs& in)
{
    if (in.pdf.kind != PdfKind::DiscApprox) {
        throw DomainError("stationarity polynomial is only defined for the disc-approximation pdf");
    }
    const NetworkConfig& c = in.cfg;
    if (!(c.alpha > 2.0)) {
        throw DomainError("stationarity polynomial needs alpha > 2");
    }
    const double beta = 2.0 - c.alpha;
    const double r = c.radius_m;
    const double r0 = c.min_dist_m;
    const double r_b = std::pow(r, beta);
    const double r0_b = std::pow(r0, beta);

    StationarityCoefficients s;
    s.a_coef = c.noise_power_mw / (2.0 * (r_b - r0_b) + beta * r0_b);
    s.b_coef = 2.0 * c.total_data_power() / (beta * r * r);
    s.c_coef = c.total_data_power() * retained_error(in).total_variance() / (r * r);
    return s;
}

double stationarity_value(const BoundInputs& in, double d0)
{
    check_threshold(in.cfg, d0);
    const StationarityCoefficients s = stationarity_coefficients(in);
    const NetworkConfig& c = in.cfg;
    const double alpha = c.alpha;
    const double beta = 2.0 - alpha;
    const double r_b = std::pow(c.radius_m, beta);
    const double r0_b = std::pow(c.min_dist_m, beta);
    const double n0 = c.noise_power_mw;

    const double first = beta * s.a_coef * (2.0 * n0 + 2.0 * s.b_coef * r_b - alpha * s.b_coef * r0_b) *
                         std::pow(d0, 1.0 - alpha);
    const double second = 2.0 * alpha * s.a_coef * s.c_coef * (r0_b * d0 - std::pow(d0, 3.0 - alpha));
    return first + second;
}

DncThreshold dnc_threshold(const NetworkConfig& cfg, double target_fidelity)
{
    cfg.validate();
    if (!(target_fidelity > 0.0 && target_fidelity < 1.0)) {
        throw DomainError("target fidelity must lie in (0, 1)");
    }
    const double alpha = cfg.alpha;
    const double beta = 2.0 - alpha;
    const double r = cfg.radius_m;
    const double r0 = cfg.min_dist_m;
    const double n0 = cfg.noise_power_mw;
    const double rho = target_fidelity;
    const double r_b = std::pow(r, beta);
    const double spread = alpha * std::pow(r0, beta) - 2.0 * r_b;
    const double others = static_cast<double>(cfg.num_ue - 1) * cfg.mean_data_power();

    const double denominator = 2.0 * n0 + 2.0 * rho * spread * others / ((alpha - 2.0) * r * r);
    const double numerator = (1.0 - rho) * n0 * spread;
    if (!(denominator > 0.0) || !std::isfinite(denominator)) {
        std::ostringstream os;
        os << "DNC threshold: non-positive denominator " << denominator;
        throw NumericalError(os.str());
    }
    const double radicand = r_b + numerator / denominator;
    if (!(radicand > 0.0) || !std::isfinite(radicand)) {
        std::ostringstream os;
        os << "DNC threshold: radicand " << radicand << " (r^(2-alpha) = " << r_b
           << ", correction = " << numerator / denominator << ") is not positive";
        throw NumericalError(os.str());
    }

    DncThreshold out;
    out.unclamped_m = std::pow(radicand, 1.0 / beta);
    out.d0_m = std::clamp(out.unclamped_m, r0, r);
    out.clamped = out.d0_m != out.unclamped_m;
    return out;
}

} // namespace cranspar::analysis
