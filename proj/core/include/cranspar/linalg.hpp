// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cranspar/types.hpp"

namespace cranspar::linalg {

struct SolveReport {
    double reciprocal_condition = 0.0;
    double max_relative_residual = 0.0; // max over columns of |A x - b| / |b|
    bool used_pivoted_fallback = false;
    int refinement_steps = 0;
};

/// Solves A X = B for Hermitian positive (semi)definite A without forming an
/// inverse. Tries Cholesky first and falls back to pivoted LDL^T. One round of
/// iterative refinement is applied when any column residual exceeds
/// `residual_target`. Throws NumericalError (with the reciprocal condition
/// estimate) when the factorization breaks down, yields non-finite values or
/// leaves a relative residual above 1e-6.
CMatrix solve_hpd(const CMatrix& a, const CMatrix& b, SolveReport* report = nullptr,
                  double residual_target = 1e-10);

/// Returns H P H^H + floor * I for a diagonal power vector P.
CMatrix regularized_gram(const CMatrix& h, const RVector& powers, double floor);

} // namespace cranspar::linalg
