#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "advdiff/bspline.hpp"
#include "advdiff/mesh.hpp"
#include "advdiff/neural.hpp"
#include "advdiff/pinn.hpp"

namespace advdiff {

inline constexpr int kTestDegree = 3;

/// Test functions for the variational losses together with the quadrature
/// used to integrate against them.
///
/// 1D: the clamped basis minus its last function (the only one with v(1) != 0).
/// 2D: tensor functions that vanish on the whole boundary.
class TestSpace {
public:
    using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;

    static TestSpace make_1d(const Mesh1D& mesh, int degree = kTestDegree, int quad_order = 0);
    static TestSpace make_2d(const TensorMesh2D& mesh, int degree = kTestDegree,
                             int quad_order = 0);

    int dimension() const { return dimension_; }
    Eigen::Index size() const { return weighted_value_.rows(); }
    int quad_order() const { return quad_order_; }

    /// dimension x Q quadrature nodes.
    const Eigen::MatrixXd& nodes() const { return nodes_; }

    /// Row i: w_q v_i(x_q), w_q dv_i/dx(x_q), w_q dv_i/dy(x_q).
    const SparseRows& weighted_value() const { return weighted_value_; }
    const SparseRows& weighted_dx() const { return weighted_dx_; }
    const SparseRows& weighted_dy() const { return weighted_dy_; }

    /// v_i(0), 1D only.
    const Eigen::VectorXd& value_at_origin() const { return value_at_origin_; }

private:
    int dimension_ = 1;
    int quad_order_ = 0;
    Eigen::MatrixXd nodes_;
    SparseRows weighted_value_;
    SparseRows weighted_dx_;
    SparseRows weighted_dy_;
    Eigen::VectorXd value_at_origin_;
};

enum class VpinnMode { strong, weak, both };

/// Variational residuals b(v) - l(v) per test function.
struct VariationalResiduals {
    Eigen::VectorXd strong;
    Eigen::VectorXd weak;
};

class VpinnLoss : public LossFunctional {
public:
    VpinnLoss(PinnProblem problem, TestSpace space, VpinnMode mode, double gamma = 1.0);

    int dimension() const override { return problem_.dimension; }
    const Eigen::MatrixXd& points() const override { return points_; }
    std::vector<LossComponent> evaluate(const JetBatch& outputs, JetBatch* adjoint) const override;

    VariationalResiduals residuals(const JetBatch& outputs) const;

    const TestSpace& space() const { return space_; }

private:
    Eigen::VectorXd strong_residual(const JetBatch& outputs, Eigen::RowVectorXd& r) const;
    Eigen::VectorXd weak_residual(const JetBatch& outputs) const;

    PinnProblem problem_;
    TestSpace space_;
    VpinnMode mode_;
    double gamma_;
    Eigen::MatrixXd points_;
    BoundaryTerms bc_;
    Eigen::Index origin_index_ = -1;   // 1D: batch column holding x = 0
};

LossReport vpinn_strong_loss(const MlpNetwork& net, const TestSpace& space,
                             const PinnProblem& problem);
LossReport vpinn_weak_loss(const MlpNetwork& net, const TestSpace& space,
                           const PinnProblem& problem, double gamma = 1.0);
LossReport vpinn_combined_loss(const MlpNetwork& net, const TestSpace& space,
                               const PinnProblem& problem, double gamma = 1.0);

} // namespace advdiff
