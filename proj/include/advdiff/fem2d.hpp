#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "advdiff/bspline.hpp"
#include "advdiff/fem1d.hpp"
#include "advdiff/mesh.hpp"
#include "advdiff/problem.hpp"

namespace advdiff {

/// Tensor-product spline field; coefficient (i, j) lives at index i * dim_y + j.
struct FemSolution2D {
    BSplineBasis1D basis_x;
    BSplineBasis1D basis_y;
    Eigen::VectorXd coefficients;
    FemKind kind = FemKind::galerkin;
    int trial_degree = 2;
    std::optional<ResidualRepresentative> residual;

    double operator()(double x, double y) const;
};

struct Fem2DOptions {
    /// Multiplies the 3 p^2 eps / h_K boundary penalty.
    double penalty_scale = 1.0;
    /// Adds the streamline residual term sum_K (R(u), tau beta.grad v)_K.
    bool supg = false;
};

/// Rows: test functions, columns: trial functions.
struct WeakSystem2D {
    Eigen::MatrixXd b;
    Eigen::VectorXd l;
};

/// Tensor B-spline space of the given degree with C^{degree-1} continuity on the mesh.
struct TensorSpace {
    BSplineBasis1D x;
    BSplineBasis1D y;

    int dimension() const { return x.dimension() * y.dimension(); }
};

TensorSpace make_tensor_space(const TensorMesh2D& mesh, int degree);

/// Weak form with Nitsche-type Dirichlet enforcement on the whole boundary:
///   b(u,v) = (beta.grad u, v) + eps (grad u, grad v)
///          - (eps du/dn, v)_G - (u, eps dv/dn)_G - (u, beta.n v)_{G-} + sum_K (sigma_K u, v)_{G_K}
///   l(v)   = - (g, eps dv/dn)_G - (g, beta.n v)_{G-} + sum_K (sigma_K g, v)_{G_K}
/// with sigma_K = 3 p^2 eps / h_K and G- the inflow part (beta.n < 0).
WeakSystem2D assemble_weak_form_2d(const ProblemEJ& problem, const TensorMesh2D& mesh,
                                   const TensorSpace& trial, const TensorSpace& test,
                                   int quad_order, const Fem2DOptions& options = {});

/// H1 Gram matrix (u,v) + (u_x,v_x) + (u_y,v_y) of a tensor space.
Eigen::MatrixXd assemble_h1_gram_2d(const TensorMesh2D& mesh, const TensorSpace& space,
                                    int quad_order);

/// SUPG stabilization parameter for an element of size hx by hy.
double supg_tau(const ProblemEJ& problem, double hx, double hy, int trial_degree);

/// Unstabilized Galerkin with the weak boundary terms.
FemSolution2D solve_nitsche_galerkin(const ProblemEJ& problem, const TensorMesh2D& mesh,
                                     int trial_degree, int quad_order = 0,
                                     const Fem2DOptions& options = {});

FemSolution2D solve_supg(const ProblemEJ& problem, const TensorMesh2D& mesh, int trial_degree,
                         int quad_order = 0, const Fem2DOptions& options = {});

FemSolution2D solve_resmin_2d(const ProblemEJ& problem, const TensorMesh2D& mesh,
                              int trial_degree, int test_degree, int quad_order = 0,
                              const Fem2DOptions& options = {});

/// Uniform n-by-n grid on the unit square, x-major.
std::vector<std::pair<double, double>> sample_grid_2d(int n = 101);

/// L2 by quadrature on a mesh graded towards x = 1; MSE and max error on the
/// n-by-n sample grid.
ErrorNorms error_norms_2d(const std::function<double(double, double)>& approx,
                          const ProblemEJ& problem, std::span<const double> breaks_x,
                          std::span<const double> breaks_y, int n_grid = 101);

ErrorNorms error_norms(const FemSolution2D& solution, const ProblemEJ& problem, int n_grid = 101);

/// max |u_h| over every element subdivided into `per_element` points per direction.
double max_norm(const FemSolution2D& solution, int per_element = 5);

/// L2 norm of u_h - g over the whole boundary.
double boundary_trace_error(const FemSolution2D& solution, const ProblemEJ& problem);

} // namespace advdiff
