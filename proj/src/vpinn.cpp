#include "advdiff/vpinn.hpp"

#include "advdiff/errors.hpp"
#include "advdiff/quadrature.hpp"

namespace advdiff {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

TestSpace::SparseRows to_sparse(Eigen::Index rows, Eigen::Index cols, const Triplets& t) {
    TestSpace::SparseRows m(rows, cols);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

} // namespace

TestSpace TestSpace::make_1d(const Mesh1D& mesh, int degree, int quad_order) {
    if (quad_order <= 0) {
        quad_order = degree + 1;
    }
    const auto basis = build_basis(degree, mesh.breakpoints, 1);
    const auto rule = composite_rule(mesh.breakpoints, quad_order);
    const int n_test = basis.dimension() - 1;
    const auto q = static_cast<Eigen::Index>(rule.nodes.size());

    TestSpace s;
    s.dimension_ = 1;
    s.quad_order_ = quad_order;
    s.nodes_ = Eigen::Map<const Eigen::RowVectorXd>(rule.nodes.data(), q);
    Triplets tv;
    Triplets tdx;
    for (Eigen::Index k = 0; k < q; ++k) {
        const auto sv = basis.eval_span(rule.nodes[k], 1);
        for (int j = 0; j < sv.values.cols(); ++j) {
            const int i = sv.first + j;
            if (i < n_test) {
                tv.emplace_back(i, k, rule.weights[k] * sv.values(0, j));
                tdx.emplace_back(i, k, rule.weights[k] * sv.values(1, j));
            }
        }
    }
    s.weighted_value_ = to_sparse(n_test, q, tv);
    s.weighted_dx_ = to_sparse(n_test, q, tdx);
    s.weighted_dy_ = SparseRows(n_test, q);
    s.value_at_origin_ = Eigen::VectorXd::Zero(n_test);
    const auto s0 = basis.eval_span(mesh.breakpoints.front(), 0);
    for (int j = 0; j < s0.values.cols(); ++j) {
        if (s0.first + j < n_test) {
            s.value_at_origin_[s0.first + j] = s0.values(0, j);
        }
    }
    return s;
}

TestSpace TestSpace::make_2d(const TensorMesh2D& mesh, int degree, int quad_order) {
    if (quad_order <= 0) {
        quad_order = degree + 1;
    }
    const auto bx = build_basis(degree, mesh.mesh_x.breakpoints, 1);
    const auto by = build_basis(degree, mesh.mesh_y.breakpoints, 1);
    const auto rx = composite_rule(mesh.mesh_x.breakpoints, quad_order);
    const auto ry = composite_rule(mesh.mesh_y.breakpoints, quad_order);
    // Interior functions only: indices 1..dim-2 in each direction.
    const int nx = bx.dimension() - 2;
    const int ny = by.dimension() - 2;
    if (nx < 1 || ny < 1) {
        throw InvalidMeshError("2D test space has no interior functions");
    }
    const auto qx = static_cast<Eigen::Index>(rx.nodes.size());
    const auto qy = static_cast<Eigen::Index>(ry.nodes.size());

    std::vector<SpanValues> sx;
    std::vector<SpanValues> sy;
    for (double x : rx.nodes) {
        sx.push_back(bx.eval_span(x, 1));
    }
    for (double y : ry.nodes) {
        sy.push_back(by.eval_span(y, 1));
    }

    TestSpace s;
    s.dimension_ = 2;
    s.quad_order_ = quad_order;
    s.nodes_.resize(2, qx * qy);
    Triplets tv;
    Triplets tdx;
    Triplets tdy;
    for (Eigen::Index a = 0; a < qx; ++a) {
        for (Eigen::Index b = 0; b < qy; ++b) {
            const Eigen::Index k = a * qy + b;
            s.nodes_.col(k) << rx.nodes[a], ry.nodes[b];
            const double w = rx.weights[a] * ry.weights[b];
            const auto& X = sx[a];
            const auto& Y = sy[b];
            for (int i = 0; i < X.values.cols(); ++i) {
                const int gi = X.first + i - 1;
                if (gi < 0 || gi >= nx) {
                    continue;
                }
                for (int j = 0; j < Y.values.cols(); ++j) {
                    const int gj = Y.first + j - 1;
                    if (gj < 0 || gj >= ny) {
                        continue;
                    }
                    const int row = gi * ny + gj;
                    tv.emplace_back(row, k, w * X.values(0, i) * Y.values(0, j));
                    tdx.emplace_back(row, k, w * X.values(1, i) * Y.values(0, j));
                    tdy.emplace_back(row, k, w * X.values(0, i) * Y.values(1, j));
                }
            }
        }
    }
    const Eigen::Index n_test = static_cast<Eigen::Index>(nx) * ny;
    s.weighted_value_ = to_sparse(n_test, qx * qy, tv);
    s.weighted_dx_ = to_sparse(n_test, qx * qy, tdx);
    s.weighted_dy_ = to_sparse(n_test, qx * qy, tdy);
    s.value_at_origin_ = Eigen::VectorXd::Zero(n_test);
    return s;
}

VpinnLoss::VpinnLoss(PinnProblem problem, TestSpace space, VpinnMode mode, double gamma)
    : problem_(std::move(problem)), space_(std::move(space)), mode_(mode), gamma_(gamma) {
    if (space_.dimension() != problem_.dimension) {
        throw InvalidArgumentError("test space and problem dimensions differ");
    }
    if (space_.size() == 0) {
        throw InvalidArgumentError("test space is empty");
    }
    const Eigen::Index q = space_.nodes().cols();
    bc_ = BoundaryTerms(problem_, q);
    std::vector<Eigen::MatrixXd> blocks{space_.nodes(), bc_.points()};
    if (problem_.dimension == 1) {
        origin_index_ = q + bc_.count();
        blocks.push_back(Eigen::MatrixXd::Zero(1, 1));
    }
    points_ = hstack(blocks, problem_.dimension);
}

Eigen::VectorXd VpinnLoss::strong_residual(const JetBatch& outputs, Eigen::RowVectorXd& r) const {
    const Eigen::Index q = space_.nodes().cols();
    const double eps = problem_.eps;
    r = outputs.d1[0].head(q) - eps * outputs.d2[0].head(q);
    if (problem_.dimension == 2) {
        r -= eps * outputs.d2[1].head(q);
    }
    // l_strong = 0
    return space_.weighted_value() * r.transpose();
}

Eigen::VectorXd VpinnLoss::weak_residual(const JetBatch& outputs) const {
    const Eigen::Index q = space_.nodes().cols();
    const double eps = problem_.eps;
    const Eigen::VectorXd ux = outputs.d1[0].head(q).transpose();
    Eigen::VectorXd b = eps * (space_.weighted_dx() * ux) + space_.weighted_value() * ux;
    if (problem_.dimension == 2) {
        const Eigen::VectorXd uy = outputs.d1[1].head(q).transpose();
        b += eps * (space_.weighted_dy() * uy);
        // l(v) = 0
        return gamma_ * b;
    }
    // 1D: + u(0) v(0) on the left, l(v) = v(0).
    b += outputs.value[origin_index_] * space_.value_at_origin();
    return gamma_ * b - space_.value_at_origin();
}

VariationalResiduals VpinnLoss::residuals(const JetBatch& outputs) const {
    Eigen::RowVectorXd r;
    return {strong_residual(outputs, r), weak_residual(outputs)};
}

std::vector<LossComponent> VpinnLoss::evaluate(const JetBatch& outputs, JetBatch* adjoint) const {
    const auto n = static_cast<double>(space_.size());
    const Eigen::Index q = space_.nodes().cols();
    const double eps = problem_.eps;
    std::vector<LossComponent> out;

    if (mode_ == VpinnMode::strong || mode_ == VpinnMode::both) {
        Eigen::RowVectorXd r;
        const Eigen::VectorXd res = strong_residual(outputs, r);
        out.push_back({"strong", res.squaredNorm() / n});
        if (adjoint != nullptr) {
            const Eigen::RowVectorXd rbar =
                (space_.weighted_value().transpose() * (2.0 / n * res)).transpose();
            adjoint->d1[0].head(q) += rbar;
            adjoint->d2[0].head(q) -= eps * rbar;
            if (problem_.dimension == 2) {
                adjoint->d2[1].head(q) -= eps * rbar;
            }
        }
    }
    if (mode_ == VpinnMode::weak || mode_ == VpinnMode::both) {
        const Eigen::VectorXd res = weak_residual(outputs);
        out.push_back({"weak", res.squaredNorm() / n});
        if (adjoint != nullptr) {
            const Eigen::VectorXd bbar = gamma_ * 2.0 / n * res;
            const Eigen::VectorXd ux_bar = eps * (space_.weighted_dx().transpose() * bbar) +
                                           space_.weighted_value().transpose() * bbar;
            adjoint->d1[0].head(q) += ux_bar.transpose();
            if (problem_.dimension == 2) {
                adjoint->d1[1].head(q) +=
                    (eps * (space_.weighted_dy().transpose() * bbar)).transpose();
            } else {
                adjoint->value[origin_index_] += space_.value_at_origin().dot(bbar);
            }
        }
    }
    bc_.evaluate(outputs, adjoint, out);
    return out;
}

LossReport vpinn_strong_loss(const MlpNetwork& net, const TestSpace& space,
                             const PinnProblem& problem) {
    return loss_gradient(net, VpinnLoss(problem, space, VpinnMode::strong));
}

LossReport vpinn_weak_loss(const MlpNetwork& net, const TestSpace& space,
                           const PinnProblem& problem, double gamma) {
    return loss_gradient(net, VpinnLoss(problem, space, VpinnMode::weak, gamma));
}

LossReport vpinn_combined_loss(const MlpNetwork& net, const TestSpace& space,
                               const PinnProblem& problem, double gamma) {
    return loss_gradient(net, VpinnLoss(problem, space, VpinnMode::both, gamma));
}

} // namespace advdiff
