#include <gtest/gtest.h>

#include <cmath>

#include "advdiff/errors.hpp"
#include "advdiff/fem2d.hpp"
#include "advdiff/mesh.hpp"

using namespace advdiff;

TEST(Fem2D, TensorSpaceDimension) {
    const auto space = make_tensor_space(uniform_tensor_mesh(9), 2);
    EXPECT_EQ(space.x.dimension(), 10);
    EXPECT_EQ(space.dimension(), 100);
}

TEST(Fem2D, SupgApproachesGalerkinWhenDiffusionDominates) {
    const ProblemEJ p(1e6);
    const auto mesh = uniform_tensor_mesh(5);
    const auto space = make_tensor_space(mesh, 2);
    Fem2DOptions supg;
    supg.supg = true;
    const auto a = assemble_weak_form_2d(p, mesh, space, space, 5, {});
    const auto b = assemble_weak_form_2d(p, mesh, space, space, 5, supg);
    const double rel = (a.b - b.b).cwiseAbs().maxCoeff() / a.b.cwiseAbs().maxCoeff();
    EXPECT_LT(rel, 1e-3);
}

TEST(Fem2D, SupgTauFormula) {
    const ProblemEJ p(0.01);
    const double hx = 0.1;
    const double hy = 0.2;
    const double expected = 1.0 / (1.0 / hx + 3.0 * 4.0 * 0.01 / (hx * hx + hy * hy));
    EXPECT_NEAR(supg_tau(p, hx, hy, 2), expected, 1e-15);
}

TEST(Fem2D, SmoothRegimeBothSolversAccurate) {
    const ProblemEJ p(0.1);
    const auto mesh = uniform_tensor_mesh(17);
    const auto supg = solve_supg(p, mesh, 2);
    EXPECT_LT(error_norms(supg, p).l2, 1e-2);
    const auto rm = solve_resmin_2d(p, mesh, 2, 3);
    EXPECT_LT(error_norms(rm, p).l2, 1e-2);
}

TEST(Fem2D, ResminCoarseSmoothRegime) {
    const ProblemEJ p(0.1);
    const auto sol = solve_resmin_2d(p, uniform_tensor_mesh(9), 2, 3);
    EXPECT_LT(error_norms(sol, p).l2, 0.05);
    ASSERT_TRUE(sol.residual.has_value());
    EXPECT_GT(sol.residual->h1_norm, 0.0);
}

TEST(Fem2D, ResminWithEqualSpacesIsGalerkin) {
    for (double eps : {0.1, 0.01}) {
        const ProblemEJ p(eps);
        const auto mesh = uniform_tensor_mesh(7);
        const auto g = solve_nitsche_galerkin(p, mesh, 2);
        const auto r = solve_resmin_2d(p, mesh, 2, 2);
        EXPECT_LT((g.coefficients - r.coefficients).cwiseAbs().maxCoeff(), 1e-9);
        EXPECT_LT(r.residual->h1_norm, 1e-10);
    }
}

TEST(Fem2D, SupgBoundedOnAdaptedMeshForThinLayer) {
    const ProblemEJ p(1e-3);
    for (int n : {16, 24, 32}) {
        const auto sol = solve_supg(p, adaptive_tensor_mesh(n, 1e-3), 2);
        EXPECT_LE(max_norm(sol), 1.2) << n << " points";
    }
}

TEST(Fem2D, SupgErrorDecreasesUnderRefinementOfAdaptedMesh) {
    // Coarsest admissible adapted mesh for eps = 1e-3, then two bisections.
    const ProblemEJ p(1e-3);
    auto mesh = adaptive_tensor_mesh(13, 1e-3);
    double prev = error_norms(solve_supg(p, mesh, 2), p).l2;
    for (int level = 1; level <= 2; ++level) {
        mesh = refine(mesh);
        const auto sol = solve_supg(p, mesh, 2);
        const double l2 = error_norms(sol, p).l2;
        EXPECT_LT(l2, prev) << "refinement " << level;
        EXPECT_LE(max_norm(sol), 1.2) << "refinement " << level;
        prev = l2;
    }
}

TEST(Fem2D, ResminMaxNormAboveSupgOnCoarsestAdaptedMesh) {
    const ProblemEJ p(1e-3);
    const auto mesh = adaptive_tensor_mesh(13, 1e-3);
    EXPECT_GT(max_norm(solve_resmin_2d(p, mesh, 2, 3)), max_norm(solve_supg(p, mesh, 2)));
}

TEST(Fem2D, LargerPenaltyReducesBoundaryTraceError) {
    const ProblemEJ p(0.1);
    const auto mesh = uniform_tensor_mesh(9);
    double prev = 1e300;
    for (double scale : {1.0, 2.0, 4.0, 8.0}) {
        Fem2DOptions opts;
        opts.penalty_scale = scale;
        const double err = boundary_trace_error(solve_nitsche_galerkin(p, mesh, 2, 0, opts), p);
        EXPECT_LT(err, prev) << "penalty scale " << scale;
        prev = err;
    }
}

TEST(Fem2D, SupgNeedsQuadraticTrial) {
    const ProblemEJ p(0.1);
    EXPECT_THROW(solve_supg(p, uniform_tensor_mesh(5), 1), UnsupportedDegreeError);
}

TEST(Fem2D, ResminNeedsLargeEnoughTestSpace) {
    const ProblemEJ p(0.1);
    EXPECT_THROW(solve_resmin_2d(p, uniform_tensor_mesh(5), 3, 2), UnderdeterminedError);
}

TEST(Fem2D, ErrorNormsOfExactSolutionVanish) {
    const ProblemEJ p(0.01);
    const auto mesh = adaptive_tensor_mesh(20, 0.01);
    const auto e = error_norms_2d([&](double x, double y) { return p.exact(x, y); }, p,
                                  mesh.mesh_x.breakpoints, mesh.mesh_y.breakpoints);
    EXPECT_LT(e.l2, 1e-12);
    EXPECT_LT(e.mse, 1e-12);
    EXPECT_EQ(e.samples, 101 * 101);
}

TEST(Fem2D, SampleGridIsXMajor) {
    const auto g = sample_grid_2d(3);
    ASSERT_EQ(g.size(), 9u);
    EXPECT_EQ(g[1].first, 0.0);
    EXPECT_EQ(g[1].second, 0.5);
    EXPECT_EQ(g[3].first, 0.5);
}
