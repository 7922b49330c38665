// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string_view>

namespace cranspar {

/// Derives an independent sub-stream seed from a master seed, a fixed label
/// ("layout", "fading", "estimation", ...) and an index (usually the trial).
std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::uint64_t index = 0) noexcept;

/// Seeded generator with platform-independent variate conversions.
///
/// std::normal_distribution and friends are implementation-defined, so the
/// conversions from raw 64-bit words are done here to keep results
/// bit-identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on (0, 1].
    double uniform() noexcept;
    /// Standard normal (Box-Muller, both outputs used).
    double normal() noexcept;
    /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    std::complex<double> complex_normal(double variance = 1.0) noexcept;

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace cranspar
