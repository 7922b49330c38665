// SPDX-License-Identifier: Apache-2.0
#include "cranspar/detection.hpp"

#include "cranspar/analysis.hpp"
#include "cranspar/errors.hpp"
#include "cranspar/linalg.hpp"
#include "cranspar/random.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace cranspar {

namespace {

RVector power_vector(const NetworkConfig& cfg, Eigen::Index users)
{
    if (static_cast<Eigen::Index>(cfg.data_power_mw.size()) != users) {
        throw DomainError("data power vector length does not match the number of users");
    }
    return Eigen::Map<const RVector>(cfg.data_power_mw.data(), users);
}

// v_k = sqrt(P_k) (H P H^H + floor I)^-1 h_k for every column of h.
CMatrix mmse_filters(const CMatrix& h, const RVector& powers, double floor, double* residual = nullptr)
{
    const CMatrix gram = linalg::regularized_gram(h, powers, floor);
    const CVector sqrt_p = powers.cwiseSqrt().cast<Complex>();
    const CMatrix rhs = h * sqrt_p.asDiagonal();
    linalg::SolveReport report;
    CMatrix v = linalg::solve_hpd(gram, rhs, &report);
    if (residual != nullptr) {
        *residual = report.max_relative_residual;
    }
    return v;
}

double mean_of(const std::vector<double>& x)
{
    double s = 0.0;
    for (double v : x) {
        s += v;
    }
    return s / static_cast<double>(x.size());
}

} // namespace

DetectorBundle build_detectors(const ChannelRealization& chan, const EstimatedChannel& est,
                               const NetworkConfig& cfg, double n1, double n2)
{
    if (!(n1 >= 0.0 && std::isfinite(n1)) || !(n2 >= 0.0 && std::isfinite(n2))) {
        throw DomainError("detector floors N1 and N2 must be finite and >= 0");
    }
    const RVector powers = power_vector(cfg, chan.channel.cols());

    DetectorBundle bundle;
    bundle.floor_n1 = n1;
    bundle.floor_n2 = n2;
    bundle.sparse_detector = mmse_filters(est.observed, powers, n1 + n2 + cfg.noise_power_mw, &bundle.sparse_residual);
    bundle.full_detector = mmse_filters(chan.channel, powers, cfg.noise_power_mw);
    return bundle;
}

std::vector<double> sinr_sparse_all(const ChannelRealization& chan, const EstimatedChannel& est,
                                    const CMatrix& sparse_detector, const NetworkConfig& cfg)
{
    const Eigen::Index users = chan.channel.cols();
    const RVector powers = power_vector(cfg, users);
    const CMatrix cross = sparse_detector.adjoint() * chan.channel; // (k, j) = v^_k^H h_j
    const CMatrix self_error = est.truncated_true - est.sparse_error;

    std::vector<double> out(static_cast<std::size_t>(users));
    for (Eigen::Index k = 0; k < users; ++k) {
        const auto v = sparse_detector.col(k);
        const double signal = powers(k) * std::norm(v.dot(est.observed.col(k)));
        const double self = powers(k) * std::norm(v.dot(self_error.col(k)));
        double interference = 0.0;
        for (Eigen::Index j = 0; j < users; ++j) {
            if (j != k) {
                interference += powers(j) * std::norm(cross(k, j));
            }
        }
        const double noise = cfg.noise_power_mw * v.squaredNorm();
        // a user with every link masked gets a zero filter; it decodes nothing
        const double denom = self + interference + noise;
        out[static_cast<std::size_t>(k)] = denom > 0.0 ? signal / denom : 0.0;
    }
    return out;
}

std::vector<double> sinr_full_all(const ChannelRealization& chan, const CMatrix& full_detector,
                                  const NetworkConfig& cfg)
{
    const Eigen::Index users = chan.channel.cols();
    const RVector powers = power_vector(cfg, users);
    const CMatrix cross = full_detector.adjoint() * chan.channel;

    std::vector<double> out(static_cast<std::size_t>(users));
    for (Eigen::Index k = 0; k < users; ++k) {
        const auto v = full_detector.col(k);
        const double signal = powers(k) * std::norm(v.dot(chan.channel.col(k)));
        double interference = 0.0;
        for (Eigen::Index j = 0; j < users; ++j) {
            if (j != k) {
                interference += powers(j) * std::norm(cross(k, j));
            }
        }
        const double noise = cfg.noise_power_mw * v.squaredNorm();
        out[static_cast<std::size_t>(k)] = signal / (0.0 + interference + noise);
    }
    return out;
}

double sinr_sparse(int k, const ChannelRealization& chan, const EstimatedChannel& est,
                   const DetectorBundle& bundle, const NetworkConfig& cfg)
{
    if (k < 0 || k >= chan.channel.cols()) {
        throw DomainError("user index out of range");
    }
    return sinr_sparse_all(chan, est, bundle.sparse_detector, cfg)[static_cast<std::size_t>(k)];
}

double sinr_full(int k, const ChannelRealization& chan, const DetectorBundle& bundle, const NetworkConfig& cfg)
{
    if (k < 0 || k >= chan.channel.cols()) {
        throw DomainError("user index out of range");
    }
    return sinr_full_all(chan, bundle.full_detector, cfg)[static_cast<std::size_t>(k)];
}

double sinr_for_filter(int k, const CVector& v, const ChannelRealization& chan, const NetworkConfig& cfg)
{
    const Eigen::Index users = chan.channel.cols();
    if (k < 0 || k >= users) {
        throw DomainError("user index out of range");
    }
    const RVector powers = power_vector(cfg, users);
    const double signal = powers(k) * std::norm(v.dot(chan.channel.col(k)));
    double interference = 0.0;
    for (Eigen::Index j = 0; j < users; ++j) {
        if (j != k) {
            interference += powers(j) * std::norm(v.dot(chan.channel.col(j)));
        }
    }
    return signal / (interference + cfg.noise_power_mw * v.squaredNorm());
}

FidelityEstimate fidelity_empirical(const MonteCarloRequest& request, double d0)
{
    return fidelity_curve(request, {d0}).front();
}

std::vector<FidelityEstimate> fidelity_curve(const MonteCarloRequest& request, const std::vector<double>& d0_grid)
{
    const NetworkConfig& cfg = request.cfg;
    cfg.validate();
    if (request.trials < 2) {
        throw ConfigError({"Monte Carlo needs at least 2 trials"});
    }
    if (d0_grid.empty()) {
        return {};
    }

    const analysis::BoundInputs inputs{cfg, request.pdf, request.estimator, request.pilot_kind};
    const double mu = analysis::mean_gain(inputs);
    std::vector<double> floors(d0_grid.size());
    for (std::size_t i = 0; i < d0_grid.size(); ++i) {
        floors[i] = analysis::n1(inputs, d0_grid[i]) + analysis::n2(inputs, d0_grid[i]);
    }

    EstimationRequest est_request;
    est_request.pilots = PilotScheme::from_config(cfg, request.pilot_kind);
    est_request.estimator = request.estimator;
    est_request.noise_power_mw = cfg.noise_power_mw;
    est_request.mean_gain = mu;
    est_request.noise_variance_override = cfg.error_variance_override;
    est_request.pilots.validate(cfg.num_ue);

    const RVector powers = power_vector(cfg, cfg.num_ue);
    const auto trials = static_cast<std::size_t>(request.trials);
    const std::size_t points = d0_grid.size();
    std::vector<double> full_mean(trials);
    std::vector<double> sparse_mean(trials * points);

    auto run_trial = [&](std::size_t t) {
        const Layout layout = sample_layout(cfg, derive_seed(request.seed, "layout", t));
        const ChannelRealization chan = build_channel(layout, cfg.alpha, derive_seed(request.seed, "fading", t));
        const CMatrix error = estimate(chan, est_request, derive_seed(request.seed, "estimation", t));

        const CMatrix full = mmse_filters(chan.channel, powers, cfg.noise_power_mw);
        full_mean[t] = mean_of(sinr_full_all(chan, full, cfg));

        for (std::size_t i = 0; i < points; ++i) {
            const EstimatedChannel est = sparsify(chan, error, d0_grid[i], request.estimator);
            const CMatrix sparse = mmse_filters(est.observed, powers, floors[i] + cfg.noise_power_mw);
            sparse_mean[t * points + i] = mean_of(sinr_sparse_all(chan, est, sparse, cfg));
        }
    };

    const int workers = std::max(1, std::min<int>(request.threads, request.trials));
    if (workers == 1) {
        for (std::size_t t = 0; t < trials; ++t) {
            run_trial(t);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        {
            std::vector<std::jthread> pool;
            pool.reserve(static_cast<std::size_t>(workers));
            for (int w = 0; w < workers; ++w) {
                pool.emplace_back([&] {
                    for (std::size_t t = next++; t < trials; t = next++) {
                        try {
                            run_trial(t);
                        } catch (...) {
                            std::lock_guard lock(failure_mutex);
                            if (!failure) {
                                failure = std::current_exception();
                            }
                            next = trials;
                        }
                    }
                });
            }
        }
        if (failure) {
            std::rethrow_exception(failure);
        }
    }

    // Reduction in trial order, independent of the worker count.
    const double n = static_cast<double>(trials);
    std::vector<FidelityEstimate> out(points);
    double full_sum = 0.0;
    for (double f : full_mean) {
        full_sum += f;
    }
    const double full_avg = full_sum / n;
    double full_var = 0.0;
    for (double f : full_mean) {
        full_var += (f - full_avg) * (f - full_avg);
    }
    full_var /= (n - 1.0);

    for (std::size_t i = 0; i < points; ++i) {
        double sparse_sum = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
            sparse_sum += sparse_mean[t * points + i];
        }
        const double sparse_avg = sparse_sum / n;
        double sparse_var = 0.0;
        double covariance = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
            const double ds = sparse_mean[t * points + i] - sparse_avg;
            sparse_var += ds * ds;
            covariance += ds * (full_mean[t] - full_avg);
        }
        sparse_var /= (n - 1.0);
        covariance /= (n - 1.0);

        FidelityEstimate& e = out[i];
        e.d0 = d0_grid[i];
        e.trials = request.trials;
        e.mean_sparse_sinr = sparse_avg;
        e.mean_full_sinr = full_avg;
        e.fidelity = sparse_avg / full_avg;
        // Delta method for the ratio of two paired sample means.
        const double rel = sparse_var / (sparse_avg * sparse_avg) + full_var / (full_avg * full_avg) -
                           2.0 * covariance / (sparse_avg * full_avg);
        e.std_error = std::abs(e.fidelity) * std::sqrt(std::max(0.0, rel) / n);
    }
    return out;
}

} // namespace cranspar
