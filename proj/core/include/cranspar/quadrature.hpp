// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>

namespace cranspar::quadrature {

struct Tolerance {
    double absolute = 0.0;
    double relative = 1e-10;
    int max_intervals = 4000;
};

struct Result {
    double value = 0.0;
    double error_estimate = 0.0;
    int intervals = 0;
    bool converged = false;
};

/// Globally adaptive 15-point Gauss-Kronrod integration of f over [a, b].
/// The interval with the largest error estimate is bisected until the summed
/// estimate drops below max(absolute, relative * |value|).
Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Tolerance& tol = {});

} // namespace cranspar::quadrature
