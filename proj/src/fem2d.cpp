#include "advdiff/fem2d.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "advdiff/errors.hpp"
#include "advdiff/quadrature.hpp"
#include "linalg.hpp"

namespace advdiff {

namespace {

// Values of a 1D basis at the Gauss points of one element.
struct ElementTable {
    QuadRule1D rule;
    std::vector<SpanValues> values;
};

std::vector<ElementTable> tabulate(const BSplineBasis1D& basis, const Mesh1D& mesh, int order,
                                   int max_deriv) {
    std::vector<ElementTable> out(mesh.elements());
    for (std::size_t e = 0; e < mesh.elements(); ++e) {
        out[e].rule = gauss_rule(order, mesh.breakpoints[e], mesh.breakpoints[e + 1]);
        for (double x : out[e].rule.nodes) {
            out[e].values.push_back(basis.eval_span(x, max_deriv));
        }
    }
    return out;
}

struct Edge {
    bool vertical;    // x = const
    double coord;     // fixed coordinate value
    double nx;
    double ny;
    double h;         // element width normal to the edge
};

std::vector<Edge> boundary_edges(const TensorMesh2D& mesh) {
    const auto& mx = mesh.mesh_x;
    const auto& my = mesh.mesh_y;
    return {
        {true, mx.breakpoints.front(), -1.0, 0.0, mx.width(0)},
        {true, mx.breakpoints.back(), 1.0, 0.0, mx.width(mx.elements() - 1)},
        {false, my.breakpoints.front(), 0.0, -1.0, my.width(0)},
        {false, my.breakpoints.back(), 0.0, 1.0, my.width(my.elements() - 1)},
    };
}

void check_unit_square(const TensorMesh2D& mesh) {
    for (const auto* m : {&mesh.mesh_x, &mesh.mesh_y}) {
        if (m->size() < 2 || m->breakpoints.front() != 0.0 || m->breakpoints.back() != 1.0) {
            throw InvalidMeshError("tensor mesh must cover the unit square");
        }
    }
}

FemSolution2D finish(const TensorSpace& space, Eigen::VectorXd coeffs, FemKind kind, int degree) {
    return FemSolution2D{space.x, space.y, std::move(coeffs), kind, degree, std::nullopt};
}

} // namespace

double FemSolution2D::operator()(double x, double y) const {
    const auto sx = basis_x.eval_span(x, 0);
    const auto sy = basis_y.eval_span(y, 0);
    const int ny = basis_y.dimension();
    double sum = 0.0;
    for (int a = 0; a < sx.values.cols(); ++a) {
        for (int b = 0; b < sy.values.cols(); ++b) {
            sum += coefficients[(sx.first + a) * ny + sy.first + b] * sx.values(0, a) *
                   sy.values(0, b);
        }
    }
    return sum;
}

TensorSpace make_tensor_space(const TensorMesh2D& mesh, int degree) {
    return {build_basis(degree, mesh.mesh_x.breakpoints, 1),
            build_basis(degree, mesh.mesh_y.breakpoints, 1)};
}

double supg_tau(const ProblemEJ& problem, double hx, double hy, int trial_degree) {
    const double p2 = static_cast<double>(trial_degree) * trial_degree;
    const double inv = std::abs(problem.beta_x()) / hx + std::abs(problem.beta_y()) / hy +
                       3.0 * p2 * problem.eps() / (hx * hx + hy * hy);
    return 1.0 / inv;
}

WeakSystem2D assemble_weak_form_2d(const ProblemEJ& problem, const TensorMesh2D& mesh,
                                   const TensorSpace& trial, const TensorSpace& test,
                                   int quad_order, const Fem2DOptions& options) {
    check_unit_square(mesh);
    if (quad_order <= 0) {
        quad_order = default_quad_order(trial.x.degree(), test.x.degree());
    }
    const double eps = problem.eps();
    const double bx = problem.beta_x();
    const double by = problem.beta_y();
    const int p = trial.x.degree();
    const int uny = trial.y.dimension();
    const int vny = test.y.dimension();

    WeakSystem2D sys;
    sys.b = Eigen::MatrixXd::Zero(test.dimension(), trial.dimension());
    sys.l = Eigen::VectorXd::Zero(test.dimension());

    const auto ux = tabulate(trial.x, mesh.mesh_x, quad_order, 2);
    const auto uy = tabulate(trial.y, mesh.mesh_y, quad_order, 2);
    const auto vx = tabulate(test.x, mesh.mesh_x, quad_order, 1);
    const auto vy = tabulate(test.y, mesh.mesh_y, quad_order, 1);

    for (std::size_t ex = 0; ex < mesh.mesh_x.elements(); ++ex) {
        for (std::size_t ey = 0; ey < mesh.mesh_y.elements(); ++ey) {
            const double tau =
                options.supg ? supg_tau(problem, mesh.mesh_x.width(ex), mesh.mesh_y.width(ey), p)
                             : 0.0;
            for (int qx = 0; qx < quad_order; ++qx) {
                const auto& Nx = ux[ex].values[qx];
                const auto& Mx = vx[ex].values[qx];
                for (int qy = 0; qy < quad_order; ++qy) {
                    const auto& Ny = uy[ey].values[qy];
                    const auto& My = vy[ey].values[qy];
                    const double w = ux[ex].rule.weights[qx] * uy[ey].rule.weights[qy];
                    for (int a = 0; a < Mx.values.cols(); ++a) {
                        for (int b = 0; b < My.values.cols(); ++b) {
                            const double v = Mx.values(0, a) * My.values(0, b);
                            const double v_x = Mx.values(1, a) * My.values(0, b);
                            const double v_y = Mx.values(0, a) * My.values(1, b);
                            const double streamline = bx * v_x + by * v_y;
                            const int row = (Mx.first + a) * vny + My.first + b;
                            for (int c = 0; c < Nx.values.cols(); ++c) {
                                for (int d = 0; d < Ny.values.cols(); ++d) {
                                    const double u_x = Nx.values(1, c) * Ny.values(0, d);
                                    const double u_y = Nx.values(0, c) * Ny.values(1, d);
                                    const double lap = Nx.values(2, c) * Ny.values(0, d) +
                                                       Nx.values(0, c) * Ny.values(2, d);
                                    const double adv = bx * u_x + by * u_y;
                                    double val = adv * v + eps * (u_x * v_x + u_y * v_y);
                                    if (options.supg) {
                                        val += tau * (adv - eps * lap) * streamline;
                                    }
                                    sys.b(row, (Nx.first + c) * uny + Ny.first + d) += w * val;
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    const double penalty_base = options.penalty_scale * 3.0 * p * p * eps;
    for (const auto& edge : boundary_edges(mesh)) {
        const double bn = bx * edge.nx + by * edge.ny;
        const double inflow = bn < 0.0 ? bn : 0.0;
        const double sigma = penalty_base / edge.h;

        // Fixed-coordinate evaluation on the edge, quadrature along it.
        const auto& along_mesh = edge.vertical ? mesh.mesh_y : mesh.mesh_x;
        const auto& u_fixed_basis = edge.vertical ? trial.x : trial.y;
        const auto& v_fixed_basis = edge.vertical ? test.x : test.y;
        const auto& u_along = edge.vertical ? uy : ux;
        const auto& v_along = edge.vertical ? vy : vx;
        const auto uf = u_fixed_basis.eval_span(edge.coord, 1);
        const auto vf = v_fixed_basis.eval_span(edge.coord, 1);
        const double n_fixed = edge.vertical ? edge.nx : edge.ny;

        for (std::size_t e = 0; e < along_mesh.elements(); ++e) {
            for (int q = 0; q < quad_order; ++q) {
                const auto& Ua = u_along[e].values[q];
                const auto& Va = v_along[e].values[q];
                const double w = u_along[e].rule.weights[q];
                const double s = u_along[e].rule.nodes[q];
                const double g = edge.vertical ? problem.g(edge.coord, s) : problem.g(s, edge.coord);
                for (int a = 0; a < vf.values.cols(); ++a) {
                    for (int b = 0; b < Va.values.cols(); ++b) {
                        const double v = vf.values(0, a) * Va.values(0, b);
                        // Only the fixed-coordinate derivative contributes to d/dn.
                        const double dvdn = n_fixed * vf.values(1, a) * Va.values(0, b);
                        const int row = edge.vertical ? (vf.first + a) * vny + Va.first + b
                                                      : (Va.first + b) * vny + vf.first + a;
                        sys.l(row) += w * (-eps * g * dvdn - inflow * g * v + sigma * g * v);
                        for (int c = 0; c < uf.values.cols(); ++c) {
                            for (int d = 0; d < Ua.values.cols(); ++d) {
                                const double u = uf.values(0, c) * Ua.values(0, d);
                                const double dudn = n_fixed * uf.values(1, c) * Ua.values(0, d);
                                const int col = edge.vertical ? (uf.first + c) * uny + Ua.first + d
                                                              : (Ua.first + d) * uny + uf.first + c;
                                sys.b(row, col) += w * (-eps * dudn * v - eps * u * dvdn -
                                                        inflow * u * v + sigma * u * v);
                            }
                        }
                    }
                }
            }
        }
    }
    return sys;
}

Eigen::MatrixXd assemble_h1_gram_2d(const TensorMesh2D& mesh, const TensorSpace& space,
                                    int quad_order) {
    if (quad_order <= 0) {
        quad_order = default_quad_order(space.x.degree(), space.x.degree());
    }
    const int ny = space.y.dimension();
    const auto tx = tabulate(space.x, mesh.mesh_x, quad_order, 1);
    const auto ty = tabulate(space.y, mesh.mesh_y, quad_order, 1);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(space.dimension(), space.dimension());
    for (std::size_t ex = 0; ex < mesh.mesh_x.elements(); ++ex) {
        for (std::size_t ey = 0; ey < mesh.mesh_y.elements(); ++ey) {
            for (int qx = 0; qx < quad_order; ++qx) {
                const auto& X = tx[ex].values[qx];
                for (int qy = 0; qy < quad_order; ++qy) {
                    const auto& Y = ty[ey].values[qy];
                    const double w = tx[ex].rule.weights[qx] * ty[ey].rule.weights[qy];
                    for (int a = 0; a < X.values.cols(); ++a) {
                        for (int b = 0; b < Y.values.cols(); ++b) {
                            const int row = (X.first + a) * ny + Y.first + b;
                            for (int c = 0; c < X.values.cols(); ++c) {
                                for (int d = 0; d < Y.values.cols(); ++d) {
                                    const int col = (X.first + c) * ny + Y.first + d;
                                    g(row, col) +=
                                        w * (X.values(0, a) * Y.values(0, b) * X.values(0, c) *
                                                 Y.values(0, d) +
                                             X.values(1, a) * Y.values(0, b) * X.values(1, c) *
                                                 Y.values(0, d) +
                                             X.values(0, a) * Y.values(1, b) * X.values(0, c) *
                                                 Y.values(1, d));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    return g;
}

FemSolution2D solve_nitsche_galerkin(const ProblemEJ& problem, const TensorMesh2D& mesh,
                                     int trial_degree, int quad_order,
                                     const Fem2DOptions& options) {
    const auto space = make_tensor_space(mesh, trial_degree);
    auto opts = options;
    opts.supg = false;
    const auto sys = assemble_weak_form_2d(problem, mesh, space, space, quad_order, opts);
    return finish(space, detail::solve_dense(sys.b, sys.l, "2D Galerkin"), FemKind::galerkin,
                  trial_degree);
}

FemSolution2D solve_supg(const ProblemEJ& problem, const TensorMesh2D& mesh, int trial_degree,
                         int quad_order, const Fem2DOptions& options) {
    if (trial_degree < 2) {
        throw UnsupportedDegreeError("SUPG needs trial degree >= 2 for the Laplacian of u_h");
    }
    const auto space = make_tensor_space(mesh, trial_degree);
    auto opts = options;
    opts.supg = true;
    const auto sys = assemble_weak_form_2d(problem, mesh, space, space, quad_order, opts);
    return finish(space, detail::solve_dense(sys.b, sys.l, "2D SUPG"), FemKind::supg,
                  trial_degree);
}

FemSolution2D solve_resmin_2d(const ProblemEJ& problem, const TensorMesh2D& mesh,
                              int trial_degree, int test_degree, int quad_order,
                              const Fem2DOptions& options) {
    const auto trial = make_tensor_space(mesh, trial_degree);
    const auto test = make_tensor_space(mesh, test_degree);
    if (test.dimension() < trial.dimension()) {
        throw UnderdeterminedError("test space must be at least as large as the trial space");
    }
    if (quad_order <= 0) {
        quad_order = default_quad_order(trial_degree, test_degree);
    }
    auto opts = options;
    opts.supg = false;
    const auto sys = assemble_weak_form_2d(problem, mesh, trial, test, quad_order, opts);
    const Eigen::MatrixXd g = assemble_h1_gram_2d(mesh, test, quad_order);

    const Eigen::Index m = sys.b.rows();
    const Eigen::Index n = sys.b.cols();
    Eigen::MatrixXd saddle = Eigen::MatrixXd::Zero(m + n, m + n);
    saddle.topLeftCorner(m, m) = g;
    saddle.topRightCorner(m, n) = sys.b;
    saddle.bottomLeftCorner(n, m) = sys.b.transpose();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + n);
    rhs.head(m) = sys.l;

    const Eigen::VectorXd sol = detail::solve_dense(saddle, rhs, "2D residual minimization");
    auto out = finish(trial, sol.tail(n), FemKind::resmin, trial_degree);
    ResidualRepresentative res;
    res.coefficients = sol.head(m);
    res.h1_norm = std::sqrt(std::max(0.0, res.coefficients.dot(g * res.coefficients)));
    out.residual = std::move(res);
    return out;
}

std::vector<std::pair<double, double>> sample_grid_2d(int n) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            pts.emplace_back(static_cast<double>(i) / (n - 1), static_cast<double>(j) / (n - 1));
        }
    }
    return pts;
}

ErrorNorms error_norms_2d(const std::function<double(double, double)>& approx,
                          const ProblemEJ& problem, std::span<const double> breaks_x,
                          std::span<const double> breaks_y, int n_grid) {
    const auto xs = error_integration_mesh(breaks_x, problem.eps());
    std::set<double> ys_set(breaks_y.begin(), breaks_y.end());
    for (double y : sample_grid_1d(41)) {
        ys_set.insert(y);
    }
    const std::vector<double> ys(ys_set.begin(), ys_set.end());

    constexpr int kOrder = 5;
    std::vector<QuadRule1D> ry;
    for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
        ry.push_back(gauss_rule(kOrder, ys[j], ys[j + 1]));
    }
    double l2 = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const auto rx = gauss_rule(kOrder, xs[i], xs[i + 1]);
        for (int qx = 0; qx < kOrder; ++qx) {
            for (const auto& r : ry) {
                for (int qy = 0; qy < kOrder; ++qy) {
                    const double x = rx.nodes[qx];
                    const double y = r.nodes[qy];
                    const double d = approx(x, y) - problem.exact(x, y);
                    l2 += rx.weights[qx] * r.weights[qy] * d * d;
                }
            }
        }
    }

    ErrorNorms out;
    out.l2 = std::sqrt(l2);
    double sq = 0.0;
    const auto grid = sample_grid_2d(n_grid);
    for (const auto& [x, y] : grid) {
        const double d = approx(x, y) - problem.exact(x, y);
        sq += d * d;
        out.max = std::max(out.max, std::abs(d));
    }
    out.samples = static_cast<int>(grid.size());
    out.mse = sq / out.samples;
    return out;
}

ErrorNorms error_norms(const FemSolution2D& solution, const ProblemEJ& problem, int n_grid) {
    const auto bx = solution.basis_x.breakpoints();
    const auto by = solution.basis_y.breakpoints();
    return error_norms_2d([&](double x, double y) { return solution(x, y); }, problem, bx, by,
                          n_grid);
}

double max_norm(const FemSolution2D& solution, int per_element) {
    auto refine = [per_element](const std::vector<double>& b) {
        std::vector<double> out;
        for (std::size_t e = 0; e + 1 < b.size(); ++e) {
            for (int k = 0; k < per_element; ++k) {
                out.push_back(b[e] + (b[e + 1] - b[e]) * k / per_element);
            }
        }
        out.push_back(b.back());
        return out;
    };
    const auto xs = refine(solution.basis_x.breakpoints());
    const auto ys = refine(solution.basis_y.breakpoints());
    double m = 0.0;
    for (double x : xs) {
        for (double y : ys) {
            m = std::max(m, std::abs(solution(x, y)));
        }
    }
    return m;
}

double boundary_trace_error(const FemSolution2D& solution, const ProblemEJ& problem) {
    double sum = 0.0;
    auto integrate = [&](const std::vector<double>& breaks, auto point) {
        for (std::size_t e = 0; e + 1 < breaks.size(); ++e) {
            const auto r = gauss_rule(8, breaks[e], breaks[e + 1]);
            for (int q = 0; q < r.order(); ++q) {
                const auto [x, y] = point(r.nodes[q]);
                const double d = solution(x, y) - problem.g(x, y);
                sum += r.weights[q] * d * d;
            }
        }
    };
    const auto bx = solution.basis_x.breakpoints();
    const auto by = solution.basis_y.breakpoints();
    integrate(by, [](double s) { return std::pair{0.0, s}; });
    integrate(by, [](double s) { return std::pair{1.0, s}; });
    integrate(bx, [](double s) { return std::pair{s, 0.0}; });
    integrate(bx, [](double s) { return std::pair{s, 1.0}; });
    return std::sqrt(sum);
}

} // namespace advdiff
