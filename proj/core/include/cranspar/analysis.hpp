// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cranspar/channel.hpp"
#include "cranspar/geometry.hpp"

namespace cranspar::analysis {

/// Parameter tuple of the closed-form SINR-fidelity bound.
struct BoundInputs {
    NetworkConfig cfg;
    DistancePdf pdf;
    Estimator estimator = Estimator::LS;
    PilotKind pilot_kind = PilotKind::Orthogonal;

    /// Config invariants plus tau >= K for orthogonal pilots and tau <= K for
    /// the contamination surrogate (tau == K is its orthogonal limit).
    void validate() const;
};

/// mu = E|h|^2 over [r0, r].
double mean_gain(const BoundInputs& in);
/// mu_bar(d0) = E|h_bar|^2, the gain kept by the threshold.
double kept_gain(const BoundInputs& in, double d0);

/// Per-entry variance of the retained estimation error (before masking).
ErrorStatistics retained_error(const BoundInputs& in);

/// Residual power of discarded true channels, sum_j P_j (mu - mu_bar(d0)).
double n1(const BoundInputs& in, double d0);
/// Residual power of retained estimation error, sum_j P_j sigma_e^2 mass(d0).
double n2(const BoundInputs& in, double d0);

/// (mu_bar/mu) N0 / (N0 + N1 + N2), in (0, 1].
double fidelity_lower_bound(const BoundInputs& in, double d0);

struct ObjectiveParts {
    double f1 = 0.0;
    double f2 = 0.0;
};

/// Numerator and denominator of the fractional program, in raw units:
///   F1 = N0 mu_bar(d0)
///   F2 = mass(r) [N0 + N1(d0) + N2(d0)]
ObjectiveParts objective_parts(const BoundInputs& in, double d0);

/// Coefficients of the stationarity polynomial for the disc-approximation pdf.
struct StationarityCoefficients {
    double a_coef = 0.0; // N0 / [2(r^(2-a) - r0^(2-a)) + (2-a) r0^(2-a)]
    double b_coef = 0.0; // 2 P_S K / ((2-a) r^2)
    double c_coef = 0.0; // N2(d0) = C d0^2
};

/// Only defined for DistancePdf::DiscApprox; throws DomainError otherwise.
StationarityCoefficients stationarity_coefficients(const BoundInputs& in);

/// z(d0), which has the sign of d/dd0 of the bound. Requires r0 < d0 <= r.
double stationarity_value(const BoundInputs& in, double d0);

struct DncThreshold {
    double d0_m = 0.0;
    double unclamped_m = 0.0;
    bool clamped = false;
};

/// Closed-form threshold of dynamic nested clustering for a target fidelity
/// rho' under perfect CSI, clamped to [r0, r]. Solves
/// (mu_bar/mu) N0 / (N0 + (K-1) P_S (mu - mu_bar)) = rho'
/// for the disc-approximation pdf.
DncThreshold dnc_threshold(const NetworkConfig& cfg, double target_fidelity);

} // namespace cranspar::analysis
