#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "advdiff/errors.hpp"

namespace advdiff::detail {

/// Dense LU with partial pivoting. Throws SolverFailureError when the
/// factorization is numerically singular.
inline Eigen::VectorXd solve_dense(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                   const std::string& what) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    const double rcond = lu.rcond();
    if (!std::isfinite(rcond) || rcond < 1e-15) {
        throw SolverFailureError(
            fmt::format("{}: matrix is singular to working precision (rcond = {:.3e})", what, rcond),
            rcond);
    }
    Eigen::VectorXd x = lu.solve(b);
    if (!x.allFinite()) {
        throw SolverFailureError(fmt::format("{}: non-finite solution", what), rcond);
    }
    return x;
}

} // namespace advdiff::detail
