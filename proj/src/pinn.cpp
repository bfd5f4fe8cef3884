#include "advdiff/pinn.hpp"

#include <cmath>
#include <numbers>

#include "advdiff/errors.hpp"

namespace advdiff {

Eigen::MatrixXd hstack(const std::vector<Eigen::MatrixXd>& blocks, int rows) {
    Eigen::Index cols = 0;
    for (const auto& b : blocks) {
        cols += b.cols();
    }
    Eigen::MatrixXd out(rows, cols);
    Eigen::Index c = 0;
    for (const auto& b : blocks) {
        if (b.cols() > 0) {
            out.middleCols(c, b.cols()) = b;
            c += b.cols();
        }
    }
    return out;
}

PinnProblem make_pinn_problem_1d(double eps, const Mesh1D& mesh) {
    if (!(eps > 0.0)) {
        throw InvalidArgumentError("eps must be positive");
    }
    const auto pts = collocation_points(mesh);
    PinnProblem p;
    p.dimension = 1;
    p.eps = eps;
    p.interior = Eigen::Map<const Eigen::RowVectorXd>(pts.interior.data(),
                                                      static_cast<Eigen::Index>(pts.interior.size()));
    p.boundary.push_back({"bc0", Eigen::MatrixXd::Constant(1, 1, pts.left),
                          Eigen::VectorXd::Constant(1, 1.0), true});
    p.boundary.push_back({"bc1", Eigen::MatrixXd::Constant(1, 1, pts.right),
                          Eigen::VectorXd::Zero(1), false});
    return p;
}

PinnProblem make_pinn_problem_2d(double eps, const TensorMesh2D& mesh) {
    if (!(eps > 0.0)) {
        throw InvalidArgumentError("eps must be positive");
    }
    const auto pts = collocation_points(mesh);
    PinnProblem p;
    p.dimension = 2;
    p.eps = eps;
    p.interior = pts.interior;
    Eigen::VectorXd inflow(pts.x0.cols());
    for (Eigen::Index k = 0; k < pts.x0.cols(); ++k) {
        inflow[k] = std::sin(std::numbers::pi * pts.x0(1, k));
    }
    p.boundary.push_back({"bc_x0", pts.x0, inflow, false});
    p.boundary.push_back({"bc_x1", pts.x1, Eigen::VectorXd::Zero(pts.x1.cols()), false});
    p.boundary.push_back({"bc_y0", pts.y0, Eigen::VectorXd::Zero(pts.y0.cols()), false});
    p.boundary.push_back({"bc_y1", pts.y1, Eigen::VectorXd::Zero(pts.y1.cols()), false});
    return p;
}

BoundaryTerms::BoundaryTerms(const PinnProblem& problem, Eigen::Index offset)
    : dimension_(problem.dimension),
      eps_(problem.eps),
      weight_(problem.bc_weight),
      sets_(problem.boundary),
      offset_(offset) {
    for (const auto& set : problem.boundary) {
        if (set.points.rows() != problem.dimension || set.points.cols() != set.target.size()) {
            throw InvalidArgumentError("boundary set " + set.name + " is malformed");
        }
        if (set.points.cols() == 0) {
            throw InvalidArgumentError("boundary set " + set.name + " is empty");
        }
    }
}

Eigen::MatrixXd BoundaryTerms::points() const {
    std::vector<Eigen::MatrixXd> blocks;
    for (const auto& set : sets_) {
        blocks.push_back(set.points);
    }
    return hstack(blocks, dimension_);
}

Eigen::Index BoundaryTerms::count() const {
    Eigen::Index n = 0;
    for (const auto& set : sets_) {
        n += set.points.cols();
    }
    return n;
}

void BoundaryTerms::evaluate(const JetBatch& outputs, JetBatch* adjoint,
                             std::vector<LossComponent>& components) const {
    const double eps = eps_;
    const double w = weight_;
    Eigen::Index k = offset_;
    for (const auto& set : sets_) {
        const auto n = set.points.cols();
        double sum = 0.0;
        for (Eigen::Index i = 0; i < n; ++i, ++k) {
            const double u = outputs.value[k];
            const double r = set.robin ? (-eps * outputs.d1[0][k] + u - set.target[i])
                                       : (u - set.target[i]);
            sum += r * r;
            if (adjoint != nullptr) {
                const double g = w * 2.0 * r / n;
                adjoint->value[k] += g;
                if (set.robin) {
                    adjoint->d1[0][k] += -eps * g;
                }
            }
        }
        components.push_back({set.name, w * sum / n});
    }
}

PinnLoss::PinnLoss(PinnProblem problem) : problem_(std::move(problem)) {
    if (problem_.dimension != 1 && problem_.dimension != 2) {
        throw InvalidArgumentError("PINN problem dimension must be 1 or 2");
    }
    if (problem_.interior.cols() == 0 || problem_.interior.rows() != problem_.dimension) {
        throw InvalidArgumentError("PINN problem needs a nonempty interior point set");
    }
    bc_ = BoundaryTerms(problem_, problem_.interior.cols());
    points_ = hstack({problem_.interior, bc_.points()}, problem_.dimension);
}

std::vector<LossComponent> PinnLoss::evaluate(const JetBatch& outputs, JetBatch* adjoint) const {
    const double eps = problem_.eps;
    const Eigen::Index n = problem_.interior.cols();
    double sum = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        // 1D: -eps u'' + u'.  2D: u_x - eps (u_xx + u_yy).
        double r = outputs.d1[0][k] - eps * outputs.d2[0][k];
        if (problem_.dimension == 2) {
            r -= eps * outputs.d2[1][k];
        }
        sum += r * r;
        if (adjoint != nullptr) {
            const double g = 2.0 * r / n;
            adjoint->d1[0][k] += g;
            adjoint->d2[0][k] += -eps * g;
            if (problem_.dimension == 2) {
                adjoint->d2[1][k] += -eps * g;
            }
        }
    }
    std::vector<LossComponent> out{{"pde", sum / n}};
    bc_.evaluate(outputs, adjoint, out);
    return out;
}

LossReport pinn_loss_1d(const MlpNetwork& net, const PinnProblem& problem) {
    if (problem.dimension != 1) {
        throw InvalidArgumentError("pinn_loss_1d needs a 1D problem");
    }
    return loss_gradient(net, PinnLoss(problem));
}

LossReport pinn_loss_2d(const MlpNetwork& net, const PinnProblem& problem) {
    if (problem.dimension != 2) {
        throw InvalidArgumentError("pinn_loss_2d needs a 2D problem");
    }
    return loss_gradient(net, PinnLoss(problem));
}

JetBatch exact_jets_1d(const Problem1D& problem, const Eigen::MatrixXd& points) {
    JetBatch b = JetBatch::zeros(1, points.cols());
    for (Eigen::Index k = 0; k < points.cols(); ++k) {
        const auto j = exact_jet_1d(problem, points(0, k));
        b.value[k] = j.value;
        b.d1[0][k] = j.dx;
        b.d2[0][k] = j.dxx;
    }
    return b;
}

JetBatch exact_jets_ej(const ProblemEJ& problem, const Eigen::MatrixXd& points) {
    JetBatch b = JetBatch::zeros(2, points.cols());
    for (Eigen::Index k = 0; k < points.cols(); ++k) {
        const auto j = problem.exact_jet(points(0, k), points(1, k));
        b.value[k] = j.value;
        b.d1[0][k] = j.dx;
        b.d1[1][k] = j.dy;
        b.d2[0][k] = j.dxx;
        b.d2[1][k] = j.dyy;
    }
    return b;
}

} // namespace advdiff
