#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "advdiff/mesh.hpp"
#include "advdiff/neural.hpp"
#include "advdiff/problem.hpp"

namespace advdiff {

/// Boundary points with target data. Robin sets penalize (-eps u' + u - target)^2,
/// Dirichlet sets (u - target)^2; each component is a mean over its points.
struct BoundarySet {
    std::string name;
    Eigen::MatrixXd points;
    Eigen::VectorXd target;
    bool robin = false;
};

struct PinnProblem {
    int dimension = 1;
    double eps = 1.0;
    Eigen::MatrixXd interior;          ///< dimension x N, PDE residual points
    std::vector<BoundarySet> boundary;
    double bc_weight = 1.0;            ///< multiplies every boundary component
};

/// Interior breakpoints for the PDE term, x = 0 (Robin) and x = 1 (Dirichlet).
PinnProblem make_pinn_problem_1d(double eps, const Mesh1D& mesh);

/// Interior grid for the PDE term and the four edges; sin(pi y) on x = 0.
PinnProblem make_pinn_problem_2d(double eps, const TensorMesh2D& mesh);

/// Evaluates and differentiates the boundary components of a problem for
/// boundary points stored in a batch starting at `offset`.
class BoundaryTerms {
public:
    BoundaryTerms() = default;
    BoundaryTerms(const PinnProblem& problem, Eigen::Index offset);

    /// Boundary points stacked in problem order.
    Eigen::MatrixXd points() const;
    Eigen::Index count() const;

    void evaluate(const JetBatch& outputs, JetBatch* adjoint,
                  std::vector<LossComponent>& components) const;

private:
    int dimension_ = 1;
    double eps_ = 1.0;
    double weight_ = 1.0;
    std::vector<BoundarySet> sets_;
    Eigen::Index offset_ = 0;
};

/// Mean squared strong residual plus boundary penalties.
class PinnLoss : public LossFunctional {
public:
    explicit PinnLoss(PinnProblem problem);

    int dimension() const override { return problem_.dimension; }
    const Eigen::MatrixXd& points() const override { return points_; }
    std::vector<LossComponent> evaluate(const JetBatch& outputs, JetBatch* adjoint) const override;

    const PinnProblem& problem() const { return problem_; }

private:
    PinnProblem problem_;
    Eigen::MatrixXd points_;
    BoundaryTerms bc_;
};

LossReport pinn_loss_1d(const MlpNetwork& net, const PinnProblem& problem);
LossReport pinn_loss_2d(const MlpNetwork& net, const PinnProblem& problem);

/// Jets of the exact solutions, for oracle evaluation of any loss.
JetBatch exact_jets_1d(const Problem1D& problem, const Eigen::MatrixXd& points);
JetBatch exact_jets_ej(const ProblemEJ& problem, const Eigen::MatrixXd& points);

/// Concatenate point sets column-wise.
Eigen::MatrixXd hstack(const std::vector<Eigen::MatrixXd>& blocks, int rows);

} // namespace advdiff
