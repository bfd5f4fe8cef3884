#include <gtest/gtest.h>

#include "advdiff/errors.hpp"
#include "advdiff/mesh.hpp"
#include "advdiff/pinn.hpp"
#include "advdiff/vpinn.hpp"

using namespace advdiff;

namespace {

MlpNetwork zero_net(int dim) {
    const std::vector<int> widths = {dim, 5, 5, 1};
    return MlpNetwork(widths, Eigen::VectorXd::Zero(MlpNetwork::count_parameters(widths)));
}

MlpNetwork identity_net() { return MlpNetwork({1, 1}, (Eigen::VectorXd(2) << 1.0, 0.0).finished()); }

MlpNetwork smooth_net(int dim, std::uint64_t seed) { return init_network({dim, 8, 8, 1}, seed); }

} // namespace

TEST(Vpinn, TestSpaceSizes) {
    const auto s1 = TestSpace::make_1d(uniform_mesh(11));
    // Cubic, maximal smoothness on 10 elements: 13 functions, the last dropped.
    EXPECT_EQ(s1.size(), 12);
    EXPECT_EQ(s1.nodes().cols(), 10 * 4);
    EXPECT_EQ(s1.value_at_origin()[0], 1.0);
    EXPECT_EQ(s1.value_at_origin().tail(11).cwiseAbs().maxCoeff(), 0.0);

    const auto s2 = TestSpace::make_2d(uniform_tensor_mesh(6), 3, 2);
    EXPECT_EQ(s2.size(), 6 * 6);
    EXPECT_EQ(s2.nodes().cols(), 10 * 10);
}

TEST(Vpinn, ZeroNetwork1D) {
    const auto mesh = uniform_mesh(11);
    const auto prob = make_pinn_problem_1d(0.01, mesh);
    const auto space = TestSpace::make_1d(mesh);
    const auto s = vpinn_strong_loss(zero_net(1), space, prob);
    EXPECT_EQ(s.component("strong"), 0.0);
    const auto w = vpinn_weak_loss(zero_net(1), space, prob);
    // Only the first test function sees l(v) = v(0) = 1.
    EXPECT_NEAR(w.component("weak"), 1.0 / static_cast<double>(space.size()), 1e-15);
    EXPECT_EQ(w.component("bc0"), 1.0);
}

TEST(Vpinn, ZeroNetwork2D) {
    const auto mesh = uniform_tensor_mesh(7);
    const auto prob = make_pinn_problem_2d(0.01, mesh);
    const auto space = TestSpace::make_2d(mesh);
    const auto r = vpinn_combined_loss(zero_net(2), space, prob);
    EXPECT_EQ(r.component("strong"), 0.0);
    EXPECT_EQ(r.component("weak"), 0.0);
    EXPECT_NEAR(r.total, r.component("bc_x0"), 1e-15);
    EXPECT_NEAR(r.total, 6.0 / 14.0, 1e-14);
}

TEST(Vpinn, IdentityNetworkStrongResidualIsTestIntegral) {
    // r = u' - eps u'' = 1, so the residuals are the integrals of the test
    // functions. They sum to 1 minus the integral of the dropped function, h / 4.
    const auto mesh = uniform_mesh(11);
    const auto prob = make_pinn_problem_1d(0.3, mesh);
    const VpinnLoss loss(prob, TestSpace::make_1d(mesh), VpinnMode::strong);
    const auto res = loss.residuals(forward(identity_net(), loss.points()).output);
    EXPECT_NEAR(res.strong.sum(), 1.0 - 0.1 / 4.0, 1e-14);
    EXPECT_GT(res.strong.minCoeff(), 0.0);
}

TEST(Vpinn, ExactSolutionHasTinyLoss) {
    for (double eps : {0.1, 0.01}) {
        const auto mesh = adaptive_mesh(60, eps);
        const VpinnLoss loss(make_pinn_problem_1d(eps, mesh), TestSpace::make_1d(mesh),
                             VpinnMode::both);
        EXPECT_LT(loss_value(loss, exact_jets_1d(Problem1D{eps}, loss.points())).total, 1e-8)
            << "eps " << eps;
    }
    for (double eps : {0.1, 0.01}) {
        const auto mesh = adaptive_tensor_mesh(16, eps);
        const VpinnLoss loss(make_pinn_problem_2d(eps, mesh), TestSpace::make_2d(mesh),
                             VpinnMode::both);
        EXPECT_LT(loss_value(loss, exact_jets_ej(ProblemEJ(eps), loss.points())).total, 1e-8)
            << "eps " << eps;
    }
}

TEST(Vpinn, CombinedIsStrongPlusWeak) {
    for (int dim : {1, 2}) {
        const auto net = smooth_net(dim, 3);
        const auto prob = dim == 1 ? make_pinn_problem_1d(0.05, uniform_mesh(9))
                                   : make_pinn_problem_2d(0.05, uniform_tensor_mesh(6));
        const auto space =
            dim == 1 ? TestSpace::make_1d(uniform_mesh(9)) : TestSpace::make_2d(uniform_tensor_mesh(6));
        const auto s = vpinn_strong_loss(net, space, prob);
        const auto w = vpinn_weak_loss(net, space, prob);
        const auto c = vpinn_combined_loss(net, space, prob);
        EXPECT_NEAR(c.component("strong"), s.component("strong"), 1e-15);
        EXPECT_NEAR(c.component("weak"), w.component("weak"), 1e-15);
        const double bc = s.total - s.component("strong");
        EXPECT_NEAR(c.total, s.component("strong") + w.component("weak") + bc, 1e-14);
        // Without boundary terms the combined gradient is the sum of the two.
        auto interior_only = prob;
        interior_only.bc_weight = 0.0;
        const auto s0 = vpinn_strong_loss(net, space, interior_only);
        const auto w0 = vpinn_weak_loss(net, space, interior_only);
        const auto c0 = vpinn_combined_loss(net, space, interior_only);
        EXPECT_LT((c0.gradient - s0.gradient - w0.gradient).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Vpinn, QuadratureRefinementBarelyChangesResiduals) {
    for (int dim : {1, 2}) {
        const auto net = smooth_net(dim, 4);
        if (dim == 1) {
            const auto mesh = uniform_mesh(9);
            const auto prob = make_pinn_problem_1d(0.05, mesh);
            const VpinnLoss a(prob, TestSpace::make_1d(mesh, 3, 5), VpinnMode::both);
            const VpinnLoss b(prob, TestSpace::make_1d(mesh, 3, 10), VpinnMode::both);
            const auto ra = a.residuals(forward(net, a.points()).output);
            const auto rb = b.residuals(forward(net, b.points()).output);
            EXPECT_LT((ra.strong - rb.strong).cwiseAbs().maxCoeff(), 1e-8);
            EXPECT_LT((ra.weak - rb.weak).cwiseAbs().maxCoeff(), 1e-8);
        } else {
            const auto mesh = uniform_tensor_mesh(6);
            const auto prob = make_pinn_problem_2d(0.05, mesh);
            const VpinnLoss a(prob, TestSpace::make_2d(mesh, 3, 5), VpinnMode::both);
            const VpinnLoss b(prob, TestSpace::make_2d(mesh, 3, 10), VpinnMode::both);
            const auto ra = a.residuals(forward(net, a.points()).output);
            const auto rb = b.residuals(forward(net, b.points()).output);
            EXPECT_LT((ra.strong - rb.strong).cwiseAbs().maxCoeff(), 1e-8);
            EXPECT_LT((ra.weak - rb.weak).cwiseAbs().maxCoeff(), 1e-8);
        }
    }
}

TEST(Vpinn, IntegrationByPartsLinksStrongAndWeak1D) {
    // weak - strong = v(0) (-eps u'(0) + u(0) - 1), the Robin residual.
    const double eps = 0.07;
    const auto net = smooth_net(1, 9);
    const auto mesh = uniform_mesh(9);
    const VpinnLoss loss(make_pinn_problem_1d(eps, mesh), TestSpace::make_1d(mesh, 3, 10),
                         VpinnMode::both);
    const auto res = loss.residuals(forward(net, loss.points()).output);
    const auto j = eval_with_input_derivs(net, 0.0);
    const double robin = -eps * j.dx + j.value - 1.0;
    const Eigen::VectorXd expected = robin * loss.space().value_at_origin();
    EXPECT_LT((res.weak - res.strong - expected).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Vpinn, IntegrationByPartsLinksStrongAndWeak2D) {
    // Test functions vanish on the boundary, so both forms agree.
    const auto net = smooth_net(2, 10);
    const auto mesh = uniform_tensor_mesh(5);
    const VpinnLoss loss(make_pinn_problem_2d(0.07, mesh), TestSpace::make_2d(mesh, 3, 10),
                         VpinnMode::both);
    const auto res = loss.residuals(forward(net, loss.points()).output);
    EXPECT_LT((res.weak - res.strong).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Vpinn, GradientMatchesFiniteDifferences) {
    for (int dim : {1, 2}) {
        const auto net = smooth_net(dim, 12);
        const auto prob = dim == 1 ? make_pinn_problem_1d(0.05, uniform_mesh(9))
                                   : make_pinn_problem_2d(0.05, uniform_tensor_mesh(5));
        const auto space =
            dim == 1 ? TestSpace::make_1d(uniform_mesh(9)) : TestSpace::make_2d(uniform_tensor_mesh(5));
        const VpinnLoss loss(prob, space, VpinnMode::both, 1.5);
        const auto r = loss_gradient(net, loss);
        for (Eigen::Index i = 0; i < net.parameter_count(); i += 3) {
            const double h = 1e-6;
            Eigen::VectorXd p = net.parameters();
            p[i] += h;
            const double up = loss_gradient(MlpNetwork(net.widths(), p), loss).total;
            p[i] -= 2 * h;
            const double dn = loss_gradient(MlpNetwork(net.widths(), p), loss).total;
            const double fd = (up - dn) / (2 * h);
            EXPECT_LT(std::abs(fd - r.gradient[i]) / std::max(1e-4, std::abs(fd)), 1e-5)
                << "dim " << dim << " param " << i;
        }
    }
}

TEST(Vpinn, MismatchedDimensionsAreRejected) {
    const auto prob = make_pinn_problem_1d(0.1, uniform_mesh(5));
    EXPECT_THROW(VpinnLoss(prob, TestSpace::make_2d(uniform_tensor_mesh(5)), VpinnMode::strong),
                 InvalidArgumentError);
}
