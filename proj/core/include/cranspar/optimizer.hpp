// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cranspar/analysis.hpp"

#include <string>
#include <vector>

namespace cranspar::optimizer {

struct SolverSettings {
    double delta = 1e-4;
    int n_max = 20;
    double bisection_tol = 1e-4; // metres
    int grid_points = 10000;

    void validate() const;
};

/// F1 and F2 divided by N0 mu and N0 mass(r) respectively, so that
/// F1/F2 is the fidelity bound itself and Dinkelbach's parameter q lives in
/// [0, 1]. Positive constant scaling leaves the maximizer unchanged.
analysis::ObjectiveParts normalized_objective_parts(const analysis::BoundInputs& in, double d0);

/// G(d0) = F1 - q F2 on the normalized parts.
double subproblem_value(const analysis::BoundInputs& in, double q, double d0);

/// Maximizer of G over [r0, r] by bisection on the sign of a central
/// difference. q == 0 returns r directly (F1 is increasing).
double solve_subproblem(const analysis::BoundInputs& in, double q, const SolverSettings& settings);

struct DinkelbachStep {
    int index = 0;
    double q = 0.0;
    double d0 = 0.0;
    double f_of_q = 0.0;
};

enum class Termination { ConvergedBelowDelta, MaxIterations };
std::string to_string(Termination t);

struct DinkelbachTrace {
    std::vector<DinkelbachStep> iterations;
    bool converged = false;
    double final_d0 = 0.0;
    double final_q = 0.0; // F1/F2 at final_d0
    Termination termination = Termination::MaxIterations;
    std::vector<std::string> diagnostics;
};

DinkelbachTrace dinkelbach(const analysis::BoundInputs& in, const SolverSettings& settings);

struct GridOptimum {
    double d0 = 0.0;
    double value = 0.0;
};

/// Exhaustive evaluation of the bound on a uniform grid over [r0, r]; ties
/// go to the smaller threshold.
GridOptimum grid_oracle(const analysis::BoundInputs& in, int grid_points);

} // namespace cranspar::optimizer
