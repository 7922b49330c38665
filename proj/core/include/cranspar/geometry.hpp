// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cranspar/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cranspar {

double dbm_to_mw(double dbm) noexcept;
double mw_to_dbm(double mw) noexcept;

/// Scalar parameters of one uplink scenario. Powers are linear milliwatts;
/// conversion from dBm happens once, at the configuration boundary.
struct NetworkConfig {
    double radius_m = 5000.0;
    double min_dist_m = 10.0;
    double alpha = 3.8;
    int num_rrh = 1000;
    int num_ue = 800;
    std::vector<double> data_power_mw; // one entry per UE
    double pilot_power_total_mw = 1000.0;
    double noise_power_mw = 0.0;
    int training_len = 800;
    /// Replaces the per-entry pilot-noise error variance K^2/(tau P_T) when set.
    std::optional<double> error_variance_override;

    double total_data_power() const noexcept;
    double mean_data_power() const noexcept;

    /// Every violated invariant, in a stable order; empty when valid.
    std::vector<std::string> violations() const;
    /// Throws ConfigError listing every violation.
    void validate() const;

    /// N = 1000, K = 800, alpha = 3.8, r = 5 km, r0 = 10 m, P = 23 dBm,
    /// P_T = 30 dBm, N0 = -174 dBm, tau = K.
    static NetworkConfig table1();
    /// table1() with N = 100, K = 80 and tau = 80.
    static NetworkConfig desk_scale();
};

enum class PdfKind { DiscApprox, Iut1, PoissonPP };

/// Link-distance distribution used by the closed forms.
///
/// DiscApprox: density 2x/r^2 on (r0, r] plus an explicit point mass r0^2/r^2
/// at x = r0.
/// Iut1: distance between two independent uniform points in the disc
/// (4x/(pi r^2)) [acos(x/2r) - (x/2r) sqrt(1 - x^2/4r^2)], restricted to
/// [r0, r]. No point mass.
/// PoissonPP: nearest-neighbour law 2 pi lambda x exp(-pi lambda x^2),
/// restricted to [r0, r]. No point mass.
struct DistancePdf {
    PdfKind kind = PdfKind::DiscApprox;
    /// Points per m^2; <= 0 selects the default 1/(pi r^2).
    double ppp_density = 0.0;

    static DistancePdf disc_approx() { return {PdfKind::DiscApprox, 0.0}; }
    static DistancePdf iut1() { return {PdfKind::Iut1, 0.0}; }
    static DistancePdf poisson(double density = 0.0) { return {PdfKind::PoissonPP, density}; }
};

std::string to_string(PdfKind kind);

struct PdfValue {
    double density = 0.0; // continuous part at x
    double atom = 0.0;    // point mass reported at x == r0 (DiscApprox only)
};

/// Density at x in [r0, r]; throws DomainError outside.
PdfValue pdf_density(const DistancePdf& pdf, const NetworkConfig& cfg, double x);

/// Point mass at r0 (r0^2/r^2 for DiscApprox, 0 otherwise).
double atom_mass(const DistancePdf& pdf, const NetworkConfig& cfg);

/// Integral of x^-alpha f(x) over [d_lo, d_hi], counting the atom when
/// d_lo == r0. Requires r0 <= d_lo <= d_hi <= r.
double expected_gain(const DistancePdf& pdf, const NetworkConfig& cfg, double d_lo, double d_hi);

/// Integral of f over [r0, d0] including the atom.
double sparsification_mass(const DistancePdf& pdf, const NetworkConfig& cfg, double d0);

/// Continuous parts only (no atom), over an arbitrary [lo, hi] within [r0, r].
/// Used for difference quotients where the atom must not enter.
double continuous_gain(const DistancePdf& pdf, const NetworkConfig& cfg, double lo, double hi);
double continuous_mass(const DistancePdf& pdf, const NetworkConfig& cfg, double lo, double hi);

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Positions of N RRHs and K UEs inside the disc and their N x K distance matrix.
struct Layout {
    std::vector<Point> rrh_xy;
    std::vector<Point> ue_xy;
    RMatrix distances; // N x K, metres, every entry >= min_dist_m
    double radius_m = 0.0;
    double min_dist_m = 0.0;
};

/// Uniform placement of RRHs and UEs in the disc. Pairs closer than r0 have
/// their distance clamped to r0. Deterministic in `seed`.
Layout sample_layout(const NetworkConfig& cfg, std::uint64_t seed);

} // namespace cranspar
