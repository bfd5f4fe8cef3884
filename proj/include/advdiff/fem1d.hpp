#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "advdiff/bspline.hpp"
#include "advdiff/problem.hpp"

namespace advdiff {

enum class FemKind { galerkin, resmin, supg };

/// Residual representative r_m in the test space of a residual-minimization solve.
struct ResidualRepresentative {
    Eigen::VectorXd coefficients;
    double h1_norm = 0.0;
};

struct FemSolution1D {
    BSplineBasis1D basis;
    Eigen::VectorXd coefficients;
    FemKind kind = FemKind::galerkin;
    std::optional<ResidualRepresentative> residual;

    double operator()(double x) const { return eval(x, 0); }
    double eval(double x, int deriv_order) const;
};

/// Linear system of the 1D weak form, before the Dirichlet condition at x = 1
/// is applied. Row i belongs to test function i, column j to trial function j:
///   b(u, v) = int eps u' v' + u' v dx + u(0) v(0),   l(v) = v(0).
struct WeakSystem1D {
    Eigen::MatrixXd b;
    Eigen::VectorXd l;
};

WeakSystem1D assemble_weak_form_1d(const Problem1D& problem, const BSplineBasis1D& trial,
                                   const BSplineBasis1D& test, int quad_order);

/// H1 Gram matrix (v_i, v_j) + (v_i', v_j').
Eigen::MatrixXd assemble_h1_gram_1d(const BSplineBasis1D& basis, int quad_order);

/// quad_order <= 0 selects the default for the basis degrees.
FemSolution1D solve_galerkin(const Problem1D& problem, const BSplineBasis1D& basis,
                             int quad_order = 0);

FemSolution1D solve_resmin_1d(const Problem1D& problem, const BSplineBasis1D& trial,
                              const BSplineBasis1D& test, int quad_order = 0);

struct ErrorNorms {
    double l2 = 0.0;
    double max = 0.0;        ///< max |u - u_exact| over the sample grid
    double mse = 0.0;        ///< mean squared error over the sample grid
    int samples = 0;
};

/// Uniform grid of n points including both ends, used for MSE and max error.
std::vector<double> sample_grid_1d(int n = 1000);

/// Breakpoints fine enough to integrate the exact boundary-layer solution.
std::vector<double> error_integration_mesh(std::span<const double> breakpoints, double eps);

ErrorNorms error_norms(const std::function<double(double)>& approx, const Problem1D& problem,
                       std::span<const double> breakpoints, int quad_order = 10,
                       int n_samples = 1000);

ErrorNorms error_norms(const FemSolution1D& solution, const Problem1D& problem,
                       int n_samples = 1000);

/// Minimum of the solution over the sample grid and the element breakpoints.
double min_value(const FemSolution1D& solution, int n_samples = 10001);
double max_value(const FemSolution1D& solution, int n_samples = 10001);

} // namespace advdiff
