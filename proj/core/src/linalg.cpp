// SPDX-License-Identifier: Apache-2.0
#include "cranspar/linalg.hpp"

#include "cranspar/errors.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <sstream>

namespace cranspar::linalg {

namespace {

constexpr double kRejectResidual = 1e-6;

double worst_column_residual(const CMatrix& a, const CMatrix& x, const CMatrix& b, CMatrix& residual)
{
    residual = b - a * x;
    double worst = 0.0;
    for (Eigen::Index c = 0; c < b.cols(); ++c) {
        const double rhs = b.col(c).norm();
        const double res = residual.col(c).norm();
        worst = std::max(worst, rhs > 0.0 ? res / rhs : res);
    }
    return worst;
}

[[noreturn]] void fail(const char* stage, double rcond)
{
    std::ostringstream os;
    os << "Hermitian solve failed (" << stage << "), reciprocal condition estimate " << rcond;
    throw NumericalError(os.str(), rcond);
}

} // namespace

CMatrix solve_hpd(const CMatrix& a, const CMatrix& b, SolveReport* report, double residual_target)
{
    if (a.rows() != a.cols() || a.rows() != b.rows()) {
        throw NumericalError("solve_hpd: dimension mismatch");
    }

    SolveReport local;
    CMatrix x;

    Eigen::LLT<CMatrix> llt(a);
    Eigen::LDLT<CMatrix> ldlt;
    const bool cholesky_ok = llt.info() == Eigen::Success;
    if (cholesky_ok) {
        x = llt.solve(b);
        local.reciprocal_condition = llt.rcond();
    } else {
        ldlt.compute(a);
        local.used_pivoted_fallback = true;
        local.reciprocal_condition = ldlt.info() == Eigen::Success ? ldlt.rcond() : 0.0;
        if (ldlt.info() != Eigen::Success) {
            fail("LDLT factorization", local.reciprocal_condition);
        }
        x = ldlt.solve(b);
    }
    if (!x.allFinite()) {
        fail("non-finite solution", local.reciprocal_condition);
    }

    CMatrix residual;
    local.max_relative_residual = worst_column_residual(a, x, b, residual);
    if (local.max_relative_residual > residual_target) {
        const CMatrix correction = cholesky_ok ? CMatrix(llt.solve(residual)) : CMatrix(ldlt.solve(residual));
        if (correction.allFinite()) {
            CMatrix refined = x + correction;
            CMatrix refined_residual;
            const double refined_worst = worst_column_residual(a, refined, b, refined_residual);
            if (refined_worst < local.max_relative_residual) {
                x = std::move(refined);
                local.max_relative_residual = refined_worst;
                local.refinement_steps = 1;
            }
        }
    }

    if (report != nullptr) {
        *report = local;
    }
    // LDLT quietly pseudo-solves singular systems; reject what it cannot fix.
    if (local.max_relative_residual > kRejectResidual) {
        fail("residual too large", local.reciprocal_condition);
    }
    return x;
}

CMatrix regularized_gram(const CMatrix& h, const RVector& powers, double floor)
{
    const CVector p = powers.cast<Complex>();
    CMatrix gram = (h * p.asDiagonal()) * h.adjoint();
    for (Eigen::Index i = 0; i < gram.rows(); ++i) {
        gram(i, i) = Complex(gram(i, i).real() + floor, 0.0);
    }
    return gram;
}

} // namespace cranspar::linalg
