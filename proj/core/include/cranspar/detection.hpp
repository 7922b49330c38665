// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cranspar/channel.hpp"
#include "cranspar/geometry.hpp"
#include "cranspar/types.hpp"

#include <cstdint>
#include <vector>

namespace cranspar {

/// MMSE receive filters with and without sparsification.
///   sparse: v^_k = sqrt(P_k) A^-1 h^_k,  A^ = H^ P H^^H + (N1 + N2 + N0) I
///   full:   v_k  = sqrt(P_k) A^-1 h_k,   A  = H P H^H + N0 I
struct DetectorBundle {
    CMatrix sparse_detector;
    CMatrix full_detector;
    double floor_n1 = 0.0;
    double floor_n2 = 0.0;
    double sparse_residual = 0.0; // worst column residual of the sparse solve
};

/// Throws DomainError for negative floors and NumericalError when a system
/// cannot be solved.
DetectorBundle build_detectors(const ChannelRealization& chan, const EstimatedChannel& est,
                               const NetworkConfig& cfg, double n1, double n2);

/// Per-user SINR with the sparse detector, treating (h~_k - e_k) as
/// self-interference. A user whose links are all masked has a zero filter
/// and is reported with SINR 0.
double sinr_sparse(int k, const ChannelRealization& chan, const EstimatedChannel& est,
                   const DetectorBundle& bundle, const NetworkConfig& cfg);
double sinr_full(int k, const ChannelRealization& chan, const DetectorBundle& bundle,
                 const NetworkConfig& cfg);

/// All users at once (one K x K product instead of K separate ones).
std::vector<double> sinr_sparse_all(const ChannelRealization& chan, const EstimatedChannel& est,
                                    const CMatrix& sparse_detector, const NetworkConfig& cfg);
std::vector<double> sinr_full_all(const ChannelRealization& chan, const CMatrix& full_detector,
                                  const NetworkConfig& cfg);

/// SINR of user k for an arbitrary receive vector v against the true channel.
double sinr_for_filter(int k, const CVector& v, const ChannelRealization& chan, const NetworkConfig& cfg);

struct FidelityEstimate {
    double d0 = 0.0;
    double mean_sparse_sinr = 0.0;
    double mean_full_sinr = 0.0;
    double fidelity = 0.0; // ratio of the two means
    double std_error = 0.0; // delta-method standard error of the ratio
    int trials = 0;
};

struct MonteCarloRequest {
    NetworkConfig cfg;
    DistancePdf pdf;
    Estimator estimator = Estimator::LS;
    PilotKind pilot_kind = PilotKind::Orthogonal;
    int trials = 2;
    std::uint64_t seed = 0;
    int threads = 1;
};

/// Ratio-of-means fidelity at one threshold. Each trial draws a fresh layout,
/// fading and error from sub-streams of (seed, trial); per-user SINRs are
/// averaged over users first, then over trials.
FidelityEstimate fidelity_empirical(const MonteCarloRequest& request, double d0);

/// Same as fidelity_empirical for a whole grid; every threshold sees the same
/// per-trial realizations. Results are identical for any thread count.
std::vector<FidelityEstimate> fidelity_curve(const MonteCarloRequest& request,
                                             const std::vector<double>& d0_grid);

} // namespace cranspar
