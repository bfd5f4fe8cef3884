#include "advdiff/mesh.hpp"

#include <fmt/format.h>

#include "advdiff/errors.hpp"

namespace advdiff {

Mesh1D uniform_mesh(int n_points) {
    if (n_points < 2) {
        throw InsufficientPointsError("uniform mesh needs at least 2 points");
    }
    Mesh1D mesh;
    mesh.kind = MeshKind::uniform;
    mesh.breakpoints.resize(n_points);
    const double n = n_points - 1;
    for (int i = 0; i < n_points; ++i) {
        mesh.breakpoints[i] = i / n;
    }
    return mesh;
}

Mesh1D adaptive_mesh(int n_points, double eps) {
    if (!(eps > 0.0 && eps < 0.5)) {
        throw InvalidArgumentError(fmt::format("adaptive mesh needs 0 < eps < 0.5, got {}", eps));
    }
    std::vector<double> x{0.0, 0.5};
    while (1.0 - x.back() >= eps) {
        const auto n = x.size();
        x.push_back(x[n - 1] + (x[n - 1] - x[n - 2]) / 2.0);
    }
    const int prefix = static_cast<int>(x.size());
    const int fill = n_points - prefix;
    if (fill < 2) {
        throw InsufficientPointsError(fmt::format(
            "adaptive mesh with eps = {} needs at least {} points, got {}", eps, prefix + 2,
            n_points));
    }
    // The last prefix point already lies in [1 - eps, 1); the fill continues
    // from there with equal spacing and ends exactly at 1.
    const double start = x.back();
    const double step = (1.0 - start) / fill;
    for (int k = 1; k < fill; ++k) {
        x.push_back(start + k * step);
    }
    x.push_back(1.0);

    Mesh1D mesh;
    mesh.breakpoints = std::move(x);
    mesh.kind = MeshKind::adaptive;
    mesh.eps = eps;
    mesh.geometric_prefix = prefix;
    return mesh;
}

TensorMesh2D adaptive_tensor_mesh(int n_points, double eps) {
    return {adaptive_mesh(n_points, eps), uniform_mesh(n_points)};
}

TensorMesh2D uniform_tensor_mesh(int n_points) {
    return {uniform_mesh(n_points), uniform_mesh(n_points)};
}

Mesh1D refine(const Mesh1D& mesh) {
    Mesh1D out = mesh;
    out.breakpoints.clear();
    out.breakpoints.reserve(2 * mesh.size() - 1);
    for (std::size_t e = 0; e < mesh.elements(); ++e) {
        out.breakpoints.push_back(mesh.breakpoints[e]);
        out.breakpoints.push_back(0.5 * (mesh.breakpoints[e] + mesh.breakpoints[e + 1]));
    }
    out.breakpoints.push_back(mesh.breakpoints.back());
    return out;
}

TensorMesh2D refine(const TensorMesh2D& mesh) { return {refine(mesh.mesh_x), refine(mesh.mesh_y)}; }

CollocationSet1D collocation_points(const Mesh1D& mesh) {
    CollocationSet1D out;
    out.left = mesh.breakpoints.front();
    out.right = mesh.breakpoints.back();
    out.interior.assign(mesh.breakpoints.begin() + 1, mesh.breakpoints.end() - 1);
    return out;
}

CollocationSet2D collocation_points(const TensorMesh2D& mesh) {
    const auto& xs = mesh.mesh_x.breakpoints;
    const auto& ys = mesh.mesh_y.breakpoints;
    const auto nx = static_cast<Eigen::Index>(xs.size());
    const auto ny = static_cast<Eigen::Index>(ys.size());

    CollocationSet2D out;
    out.interior.resize(2, (nx - 2) * (ny - 2));
    out.x0.resize(2, ny);
    out.x1.resize(2, ny);
    out.y0.resize(2, nx - 2);
    out.y1.resize(2, nx - 2);

    for (Eigen::Index j = 0; j < ny; ++j) {
        out.x0.col(j) << xs.front(), ys[j];
        out.x1.col(j) << xs.back(), ys[j];
    }
    Eigen::Index k = 0;
    for (Eigen::Index i = 1; i + 1 < nx; ++i) {
        out.y0.col(i - 1) << xs[i], ys.front();
        out.y1.col(i - 1) << xs[i], ys.back();
        for (Eigen::Index j = 1; j + 1 < ny; ++j) {
            out.interior.col(k++) << xs[i], ys[j];
        }
    }
    return out;
}

std::string to_string(MeshKind kind) {
    return kind == MeshKind::uniform ? "uniform" : "adaptive";
}

} // namespace advdiff
