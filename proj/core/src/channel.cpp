// SPDX-License-Identifier: Apache-2.0
#include "cranspar/channel.hpp"

#include "cranspar/errors.hpp"
#include "cranspar/random.hpp"

#include <cmath>
#include <sstream>

namespace cranspar {

std::string to_string(PilotKind kind)
{
    return kind == PilotKind::Orthogonal ? "orthogonal" : "nonorthogonal";
}

std::string to_string(Estimator estimator)
{
    return estimator == Estimator::LS ? "ls" : "mmse";
}

ChannelRealization build_channel(const Layout& layout, double alpha, std::uint64_t seed)
{
    const auto n_rrh = layout.distances.rows();
    const auto n_ue = layout.distances.cols();
    ChannelRealization out;
    out.layout = layout;
    out.alpha = alpha;
    out.fading.resize(n_rrh, n_ue);
    out.channel.resize(n_rrh, n_ue);

    Rng rng(seed);
    for (Eigen::Index n = 0; n < n_rrh; ++n) {
        for (Eigen::Index k = 0; k < n_ue; ++k) {
            const Complex g = rng.complex_normal(1.0);
            out.fading(n, k) = g;
            out.channel(n, k) = std::pow(layout.distances(n, k), -0.5 * alpha) * g;
        }
    }
    return out;
}

void PilotScheme::validate(int num_ue) const
{
    std::vector<std::string> v;
    if (training_len < 1) {
        v.emplace_back("training length must be >= 1");
    }
    if (!(total_power_mw > 0.0)) {
        v.emplace_back("pilot power must be > 0");
    }
    if (kind == PilotKind::Orthogonal && training_len < num_ue) {
        v.emplace_back("orthogonal pilots need training_length >= num_ue (" + std::to_string(training_len) +
                       " < " + std::to_string(num_ue) + ")");
    }
    if (kind == PilotKind::NonOrthogonalSurrogate && training_len >= num_ue) {
        v.emplace_back("non-orthogonal pilots need training_length < num_ue (" + std::to_string(training_len) +
                       " >= " + std::to_string(num_ue) + ")");
    }
    if (!v.empty()) {
        throw ConfigError(std::move(v));
    }
}

PilotScheme PilotScheme::from_config(const NetworkConfig& cfg, PilotKind kind)
{
    return {kind, cfg.training_len, cfg.pilot_power_total_mw};
}

ErrorStatistics error_statistics(PilotKind kind, Estimator estimator, int num_ue, int training_len,
                                 double pilot_power_mw, double noise_power_mw, double mean_gain,
                                 std::optional<double> noise_variance_override)
{
    const double users = static_cast<double>(num_ue);
    const double tau = static_cast<double>(training_len);

    ErrorStatistics s;
    s.noise_variance = noise_variance_override ? *noise_variance_override
                                               : users * users / (tau * pilot_power_mw);
    if (kind == PilotKind::NonOrthogonalSurrogate) {
        const double probability = 2.0 * (1.0 - tau / users);
        s.contamination_variance = probability * mean_gain;
        s.contamination_probability_exceeds_one = probability > 1.0;
    }
    if (estimator == Estimator::MMSE) {
        const double shrink = mean_gain / (mean_gain + noise_power_mw);
        s.estimator_scale = shrink * shrink;
    }
    return s;
}

CMatrix estimate(const ChannelRealization& chan, const EstimationRequest& request, std::uint64_t seed)
{
    const auto n_rrh = chan.channel.rows();
    const auto n_ue = chan.channel.cols();
    request.pilots.validate(static_cast<int>(n_ue));

    const ErrorStatistics stats = error_statistics(
        request.pilots.kind, request.estimator, static_cast<int>(n_ue), request.pilots.training_len,
        request.pilots.total_power_mw, request.noise_power_mw, request.mean_gain, request.noise_variance_override);

    const double scale = std::sqrt(stats.estimator_scale);
    const double noise_sd = std::sqrt(stats.noise_variance);
    const double contamination_sd = std::sqrt(stats.contamination_variance);
    const bool contaminated = request.pilots.kind == PilotKind::NonOrthogonalSurrogate;

    CMatrix error(n_rrh, n_ue);
    Rng rng(seed);
    for (Eigen::Index n = 0; n < n_rrh; ++n) {
        for (Eigen::Index k = 0; k < n_ue; ++k) {
            Complex e = noise_sd * rng.complex_normal(1.0);
            if (contaminated) {
                e += contamination_sd * rng.complex_normal(1.0);
            }
            error(n, k) = scale * e;
        }
    }
    return error;
}

EstimatedChannel sparsify(const ChannelRealization& chan, const CMatrix& error, double d0, Estimator estimator)
{
    const Layout& layout = chan.layout;
    if (!(d0 >= layout.min_dist_m && d0 <= layout.radius_m)) {
        std::ostringstream os;
        os << "d0 = " << d0 << " m outside [" << layout.min_dist_m << ", " << layout.radius_m << "]";
        throw DomainError(os.str());
    }
    if (error.rows() != chan.channel.rows() || error.cols() != chan.channel.cols()) {
        throw DomainError("error matrix shape does not match the channel");
    }

    const auto n_rrh = chan.channel.rows();
    const auto n_ue = chan.channel.cols();
    const bool keep_all = d0 >= layout.radius_m;

    EstimatedChannel est;
    est.threshold = d0;
    est.estimator = estimator;
    est.mask.resize(n_rrh, n_ue);
    est.observed = CMatrix::Zero(n_rrh, n_ue);
    est.sparse_true = CMatrix::Zero(n_rrh, n_ue);
    est.truncated_true = CMatrix::Zero(n_rrh, n_ue);
    est.sparse_error = CMatrix::Zero(n_rrh, n_ue);
    est.discarded_error = CMatrix::Zero(n_rrh, n_ue);

    for (Eigen::Index k = 0; k < n_ue; ++k) {
        for (Eigen::Index n = 0; n < n_rrh; ++n) {
            const bool keep = keep_all || layout.distances(n, k) <= d0;
            est.mask(n, k) = keep;
            if (keep) {
                est.sparse_true(n, k) = chan.channel(n, k);
                est.sparse_error(n, k) = error(n, k);
                est.observed(n, k) = chan.channel(n, k) + error(n, k);
            } else {
                est.truncated_true(n, k) = chan.channel(n, k);
                est.discarded_error(n, k) = error(n, k);
            }
        }
    }
    return est;
}

} // namespace cranspar
