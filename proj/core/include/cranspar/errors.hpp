// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cranspar {

/// An argument lies outside the mathematical domain of an operation
/// (for example a distance threshold outside [r0, r]).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A configuration failed validation. Carries every violation found, not just
/// the first one.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(std::vector<std::string> violations);

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// A linear solve or closed-form evaluation failed numerically.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double condition_estimate = 0.0)
        : std::runtime_error(what), condition_estimate_(condition_estimate) {}

    /// Reciprocal condition estimate of the offending system (0 when not applicable).
    double condition_estimate() const noexcept { return condition_estimate_; }

private:
    double condition_estimate_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace cranspar
