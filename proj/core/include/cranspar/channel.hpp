// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cranspar/geometry.hpp"
#include "cranspar/types.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace cranspar {

/// H = D (.) Gamma: path loss d^-alpha/2 times unit-variance Rayleigh fading.
struct ChannelRealization {
    Layout layout;
    CMatrix fading;  // Gamma, N x K
    CMatrix channel; // H, N x K
    double alpha = 0.0;
};

ChannelRealization build_channel(const Layout& layout, double alpha, std::uint64_t seed);

enum class PilotKind { Orthogonal, NonOrthogonalSurrogate };
enum class Estimator { LS, MMSE };

std::string to_string(PilotKind kind);
std::string to_string(Estimator estimator);

struct PilotScheme {
    PilotKind kind = PilotKind::Orthogonal;
    int training_len = 0;
    double total_power_mw = 0.0;

    /// Orthogonal needs tau >= K, the contamination surrogate needs tau < K.
    /// Throws ConfigError.
    void validate(int num_ue) const;

    static PilotScheme from_config(const NetworkConfig& cfg, PilotKind kind);
};

/// Per-entry variances of the estimation error model.
struct ErrorStatistics {
    double noise_variance = 0.0;         // K^2/(tau P_T) or the override
    double contamination_variance = 0.0; // 2(1 - tau/K) mu, surrogate only
    double estimator_scale = 1.0;        // (mu/(mu+N0))^2 for MMSE, 1 for LS
    /// 2(1 - tau/K) > 1, i.e. tau < K/2. The model is used as written.
    bool contamination_probability_exceeds_one = false;

    double total_variance() const noexcept
    {
        return estimator_scale * (noise_variance + contamination_variance);
    }
};

/// Error-variance model shared by the estimator surrogate and the closed forms.
/// `mean_gain` is mu = E|h|^2. Does not check tau against K; callers do.
ErrorStatistics error_statistics(PilotKind kind, Estimator estimator, int num_ue, int training_len,
                                 double pilot_power_mw, double noise_power_mw, double mean_gain,
                                 std::optional<double> noise_variance_override = std::nullopt);

struct EstimationRequest {
    PilotScheme pilots;
    Estimator estimator = Estimator::LS;
    double noise_power_mw = 0.0;
    double mean_gain = 0.0;
    std::optional<double> noise_variance_override;
};

/// Draws the N x K estimation error E (so H_est = H + E) at the statistical
/// surrogate level. The standard-normal draws depend only on `seed`, so LS and
/// MMSE requests with the same seed differ by an exact scale factor.
CMatrix estimate(const ChannelRealization& chan, const EstimationRequest& request, std::uint64_t seed);

/// Observed channel after distance-threshold sparsification.
struct EstimatedChannel {
    CMatrix observed;        // H^ = H_bar + E_bar
    BoolMatrix mask;         // true where the link is kept
    CMatrix sparse_true;     // H_bar
    CMatrix truncated_true;  // H~ (discarded true channel)
    CMatrix sparse_error;    // E_bar
    CMatrix discarded_error; // E~, diagnostics only
    double threshold = 0.0;
    Estimator estimator = Estimator::LS;
};

/// Keeps links with d <= d0. d0 == r is the "no sparsification" end of the
/// threshold range and keeps every link, including pairs farther apart than r.
/// Throws DomainError for d0 outside [r0, r].
EstimatedChannel sparsify(const ChannelRealization& chan, const CMatrix& error, double d0,
                          Estimator estimator = Estimator::LS);

} // namespace cranspar
