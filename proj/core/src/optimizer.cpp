// SPDX-License-Identifier: Apache-2.0
#include "cranspar/optimizer.hpp"

#include "cranspar/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cranspar::optimizer {

namespace {

// Caches the threshold-independent pieces so the inner bisection only pays
// for the interval integrals it actually needs.
class Objective {
public:
    explicit Objective(const analysis::BoundInputs& in)
        : in_(in),
          r0_(in.cfg.min_dist_m),
          r_(in.cfg.radius_m),
          n0_(in.cfg.noise_power_mw),
          mu_(analysis::mean_gain(in)),
          atom_gain_(std::pow(r0_, -in.cfg.alpha) * atom_mass(in.pdf, in.cfg)),
          atom_mass_(atom_mass(in.pdf, in.cfg)),
          sum_p_(in.cfg.total_data_power()),
          sum_p_var_(sum_p_ * analysis::retained_error(in).total_variance())
    {
        if (!(mu_ > 0.0) || !std::isfinite(mu_)) {
            throw NumericalError("mean channel gain is not positive");
        }
    }

    double r0() const { return r0_; }
    double r() const { return r_; }

    analysis::ObjectiveParts parts(double d0) const
    {
        const double kept = atom_gain_ + continuous_gain(in_.pdf, in_.cfg, r0_, d0);
        const double tail = continuous_gain(in_.pdf, in_.cfg, d0, r_);
        const double mass = atom_mass_ + continuous_mass(in_.pdf, in_.cfg, r0_, d0);
        return {kept / mu_, 1.0 + (sum_p_ * tail + sum_p_var_ * mass) / n0_};
    }

    double value(double q, double d0) const
    {
        const auto p = parts(d0);
        return p.f1 - q * p.f2;
    }

    // G(x + h) - G(x - h) from interval integrals, which stays accurate when
    // h is tiny compared with the magnitudes of F1 and F2.
    double difference(double q, double x, double h) const
    {
        const double lo = std::max(r0_, x - h);
        const double hi = std::min(r_, x + h);
        const double gain = continuous_gain(in_.pdf, in_.cfg, lo, hi);
        const double mass = continuous_mass(in_.pdf, in_.cfg, lo, hi);
        const double d_f1 = gain / mu_;
        const double d_f2 = (-sum_p_ * gain + sum_p_var_ * mass) / n0_;
        return d_f1 - q * d_f2;
    }

private:
    const analysis::BoundInputs& in_;
    double r0_;
    double r_;
    double n0_;
    double mu_;
    double atom_gain_;
    double atom_mass_;
    double sum_p_;
    double sum_p_var_;
};

double solve(const Objective& obj, double q, const SolverSettings& s)
{
    if (!(q >= 0.0) || !std::isfinite(q)) {
        throw DomainError("Dinkelbach parameter q must be finite and >= 0");
    }
    const double r0 = obj.r0();
    const double r = obj.r();
    if (q == 0.0) {
        return r;
    }
    const double h = std::min(std::max(s.bisection_tol, 1e-6 * r), 0.25 * (r - r0));

    double lo = r0 + h;
    double hi = r - h;
    const double left = obj.difference(q, lo, h);
    const double right = obj.difference(q, hi, h);
    if (left <= 0.0 && right <= 0.0) {
        return r0;
    }
    if (left >= 0.0 && right >= 0.0) {
        return r;
    }
    if (left < 0.0 && right > 0.0) {
        // Not concave on this interval; the maximum sits at an end point.
        return obj.value(q, r0) >= obj.value(q, r) ? r0 : r;
    }
    while (hi - lo > s.bisection_tol) {
        const double mid = 0.5 * (lo + hi);
        if (obj.difference(q, mid, h) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

void SolverSettings::validate() const
{
    std::vector<std::string> v;
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        v.emplace_back("delta must be > 0");
    }
    if (n_max < 1) {
        v.emplace_back("n_max must be >= 1");
    }
    if (!(bisection_tol > 0.0) || !std::isfinite(bisection_tol)) {
        v.emplace_back("bisection_tol must be > 0");
    }
    if (grid_points < 2) {
        v.emplace_back("grid_points must be >= 2");
    }
    if (!v.empty()) {
        throw ConfigError(std::move(v));
    }
}

std::string to_string(Termination t)
{
    return t == Termination::ConvergedBelowDelta ? "converged_below_delta" : "max_iterations";
}

analysis::ObjectiveParts normalized_objective_parts(const analysis::BoundInputs& in, double d0)
{
    in.validate();
    if (!(d0 >= in.cfg.min_dist_m && d0 <= in.cfg.radius_m)) {
        std::ostringstream os;
        os << "d0 = " << d0 << " m outside [" << in.cfg.min_dist_m << ", " << in.cfg.radius_m << "]";
        throw DomainError(os.str());
    }
    return Objective(in).parts(d0);
}

double subproblem_value(const analysis::BoundInputs& in, double q, double d0)
{
    const auto p = normalized_objective_parts(in, d0);
    return p.f1 - q * p.f2;
}

double solve_subproblem(const analysis::BoundInputs& in, double q, const SolverSettings& settings)
{
    in.validate();
    settings.validate();
    return solve(Objective(in), q, settings);
}

DinkelbachTrace dinkelbach(const analysis::BoundInputs& in, const SolverSettings& settings)
{
    in.validate();
    settings.validate();
    const Objective obj(in);

    DinkelbachTrace trace;
    double q = 0.0;
    for (int n = 1; n <= settings.n_max; ++n) {
        const double d0 = solve(obj, q, settings);
        const auto p = obj.parts(d0);
        const double f = p.f1 - q * p.f2;
        trace.iterations.push_back({n, q, d0, f});
        trace.final_d0 = d0;

        if (q >= 1.0) {
            std::ostringstream os;
            os << "iteration " << n << ": q = " << q << " is not below 1";
            trace.diagnostics.push_back(os.str());
        }
        if (f < 0.0) {
            std::ostringstream os;
            os << "iteration " << n << ": F(q) = " << f << " is negative (subproblem not solved to optimality)";
            trace.diagnostics.push_back(os.str());
        }
        if (f < settings.delta) {
            trace.converged = true;
            trace.termination = Termination::ConvergedBelowDelta;
            break;
        }
        q = p.f1 / p.f2;
    }
    if (!trace.converged) {
        trace.termination = Termination::MaxIterations;
    }
    const auto p = obj.parts(trace.final_d0);
    trace.final_q = p.f1 / p.f2;
    return trace;
}

GridOptimum grid_oracle(const analysis::BoundInputs& in, int grid_points)
{
    in.validate();
    if (grid_points < 2) {
        throw ConfigError({"grid oracle needs at least 2 points"});
    }
    const double r0 = in.cfg.min_dist_m;
    const double r = in.cfg.radius_m;
    const double step = (r - r0) / static_cast<double>(grid_points - 1);

    GridOptimum best{r0, analysis::fidelity_lower_bound(in, r0)};
    for (int i = 1; i < grid_points; ++i) {
        const double d0 = i + 1 == grid_points ? r : r0 + step * static_cast<double>(i);
        const double v = analysis::fidelity_lower_bound(in, d0);
        if (v > best.value) {
            best = {d0, v};
        }
    }
    return best;
}

} // namespace cranspar::optimizer
