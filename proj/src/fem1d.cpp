#include "advdiff/fem1d.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "advdiff/errors.hpp"
#include "advdiff/quadrature.hpp"
#include "linalg.hpp"

namespace advdiff {

namespace {

std::vector<double> merged_breakpoints(const BSplineBasis1D& a, const BSplineBasis1D& b) {
    std::set<double> s;
    for (double x : a.breakpoints()) {
        s.insert(x);
    }
    for (double x : b.breakpoints()) {
        s.insert(x);
    }
    return {s.begin(), s.end()};
}

void check_unit_interval(const BSplineBasis1D& basis) {
    if (basis.domain_min() != 0.0 || basis.domain_max() != 1.0) {
        throw InvalidMeshError("basis must span [0, 1]");
    }
}

// Drops the last row/column: the clamped last function is the only one
// nonzero at x = 1, so removing it imposes u(1) = 0 and v(1) = 0.
Eigen::MatrixXd drop_last(const Eigen::MatrixXd& m, bool rows, bool cols) {
    return m.topLeftCorner(m.rows() - (rows ? 1 : 0), m.cols() - (cols ? 1 : 0));
}

} // namespace

double FemSolution1D::eval(double x, int deriv_order) const {
    return eval_spline(basis, std::span<const double>(coefficients.data(), coefficients.size()), x,
                       deriv_order);
}

WeakSystem1D assemble_weak_form_1d(const Problem1D& problem, const BSplineBasis1D& trial,
                                   const BSplineBasis1D& test, int quad_order) {
    if (quad_order <= 0) {
        quad_order = default_quad_order(trial.degree(), test.degree());
    }
    const double eps = problem.eps;
    WeakSystem1D sys;
    sys.b = Eigen::MatrixXd::Zero(test.dimension(), trial.dimension());
    sys.l = Eigen::VectorXd::Zero(test.dimension());

    const auto breaks = merged_breakpoints(trial, test);
    for (std::size_t e = 0; e + 1 < breaks.size(); ++e) {
        const auto rule = gauss_rule(quad_order, breaks[e], breaks[e + 1]);
        for (int q = 0; q < rule.order(); ++q) {
            const double x = rule.nodes[q];
            const double w = rule.weights[q];
            const auto u = trial.eval_span(x, 1);
            const auto v = test.eval_span(x, 1);
            for (int i = 0; i < v.values.cols(); ++i) {
                for (int j = 0; j < u.values.cols(); ++j) {
                    sys.b(v.first + i, u.first + j) +=
                        w * (eps * u.values(1, j) * v.values(1, i) + u.values(1, j) * v.values(0, i));
                }
            }
        }
    }

    // Robin terms at x = 0: u(0) v(0) on the left, v(0) on the right.
    const auto u0 = trial.eval_span(0.0, 0);
    const auto v0 = test.eval_span(0.0, 0);
    for (int i = 0; i < v0.values.cols(); ++i) {
        sys.l(v0.first + i) += v0.values(0, i);
        for (int j = 0; j < u0.values.cols(); ++j) {
            sys.b(v0.first + i, u0.first + j) += u0.values(0, j) * v0.values(0, i);
        }
    }
    return sys;
}

Eigen::MatrixXd assemble_h1_gram_1d(const BSplineBasis1D& basis, int quad_order) {
    if (quad_order <= 0) {
        quad_order = default_quad_order(basis.degree(), basis.degree());
    }
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(basis.dimension(), basis.dimension());
    const auto breaks = basis.breakpoints();
    for (std::size_t e = 0; e + 1 < breaks.size(); ++e) {
        const auto rule = gauss_rule(quad_order, breaks[e], breaks[e + 1]);
        for (int q = 0; q < rule.order(); ++q) {
            const auto v = basis.eval_span(rule.nodes[q], 1);
            const double w = rule.weights[q];
            for (int i = 0; i < v.values.cols(); ++i) {
                for (int j = 0; j < v.values.cols(); ++j) {
                    g(v.first + i, v.first + j) +=
                        w * (v.values(0, i) * v.values(0, j) + v.values(1, i) * v.values(1, j));
                }
            }
        }
    }
    return g;
}

FemSolution1D solve_galerkin(const Problem1D& problem, const BSplineBasis1D& basis,
                             int quad_order) {
    check_unit_interval(basis);
    const auto sys = assemble_weak_form_1d(problem, basis, basis, quad_order);
    const Eigen::MatrixXd a = drop_last(sys.b, true, true);
    const Eigen::VectorXd rhs = sys.l.head(a.rows());
    const Eigen::VectorXd u = detail::solve_dense(a, rhs, "1D Galerkin");

    Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(basis.dimension());
    coeffs.head(u.size()) = u;
    return FemSolution1D{basis, std::move(coeffs), FemKind::galerkin, std::nullopt};
}

FemSolution1D solve_resmin_1d(const Problem1D& problem, const BSplineBasis1D& trial,
                              const BSplineBasis1D& test, int quad_order) {
    check_unit_interval(trial);
    check_unit_interval(test);
    if (test.dimension() < trial.dimension()) {
        throw UnderdeterminedError("test space must be at least as large as the trial space");
    }
    const auto sys = assemble_weak_form_1d(problem, trial, test, quad_order);
    const Eigen::MatrixXd b = drop_last(sys.b, true, true);
    const Eigen::VectorXd l = sys.l.head(b.rows());
    const Eigen::MatrixXd g = drop_last(assemble_h1_gram_1d(test, quad_order), true, true);

    const Eigen::Index m = b.rows();
    const Eigen::Index n = b.cols();
    // [G B; B^T 0] [r; u] = [l; 0]
    Eigen::MatrixXd saddle = Eigen::MatrixXd::Zero(m + n, m + n);
    saddle.topLeftCorner(m, m) = g;
    saddle.topRightCorner(m, n) = b;
    saddle.bottomLeftCorner(n, m) = b.transpose();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + n);
    rhs.head(m) = l;

    const Eigen::VectorXd sol = detail::solve_dense(saddle, rhs, "1D residual minimization");

    Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(trial.dimension());
    coeffs.head(n) = sol.tail(n);

    ResidualRepresentative res;
    res.coefficients = Eigen::VectorXd::Zero(test.dimension());
    res.coefficients.head(m) = sol.head(m);
    res.h1_norm = std::sqrt(std::max(0.0, sol.head(m).dot(g * sol.head(m))));
    return FemSolution1D{trial, std::move(coeffs), FemKind::resmin, std::move(res)};
}

std::vector<double> sample_grid_1d(int n) {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) {
        x[i] = static_cast<double>(i) / (n - 1);
    }
    return x;
}

std::vector<double> error_integration_mesh(std::span<const double> breakpoints, double eps) {
    std::set<double> s(breakpoints.begin(), breakpoints.end());
    for (double x : sample_grid_1d(1001)) {
        s.insert(x);
    }
    // Geometric grading towards x = 1 resolves exp((x-1)/eps).
    for (double d = 64.0 * eps; d > 1e-4 * eps; d /= 2.0) {
        if (d < 1.0) {
            s.insert(1.0 - d);
        }
    }
    return {s.begin(), s.end()};
}

ErrorNorms error_norms(const std::function<double(double)>& approx, const Problem1D& problem,
                       std::span<const double> breakpoints, int quad_order, int n_samples) {
    ErrorNorms out;
    const auto mesh = error_integration_mesh(breakpoints, problem.eps);
    double l2 = 0.0;
    for (std::size_t e = 0; e + 1 < mesh.size(); ++e) {
        const auto rule = gauss_rule(quad_order, mesh[e], mesh[e + 1]);
        for (int q = 0; q < rule.order(); ++q) {
            const double d = approx(rule.nodes[q]) - exact_solution_1d(problem, rule.nodes[q]);
            l2 += rule.weights[q] * d * d;
        }
    }
    out.l2 = std::sqrt(l2);

    double sq = 0.0;
    for (double x : sample_grid_1d(n_samples)) {
        const double d = approx(x) - exact_solution_1d(problem, x);
        sq += d * d;
        out.max = std::max(out.max, std::abs(d));
    }
    out.mse = sq / n_samples;
    out.samples = n_samples;
    return out;
}

ErrorNorms error_norms(const FemSolution1D& solution, const Problem1D& problem, int n_samples) {
    const auto breaks = solution.basis.breakpoints();
    return error_norms([&](double x) { return solution(x); }, problem, breaks, 10, n_samples);
}

double min_value(const FemSolution1D& solution, int n_samples) {
    double m = solution(0.0);
    for (double x : sample_grid_1d(n_samples)) {
        m = std::min(m, solution(x));
    }
    for (double x : solution.basis.breakpoints()) {
        m = std::min(m, solution(x));
    }
    return m;
}

double max_value(const FemSolution1D& solution, int n_samples) {
    double m = solution(0.0);
    for (double x : sample_grid_1d(n_samples)) {
        m = std::max(m, solution(x));
    }
    for (double x : solution.basis.breakpoints()) {
        m = std::max(m, solution(x));
    }
    return m;
}

} // namespace advdiff
