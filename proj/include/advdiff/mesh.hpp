#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace advdiff {

enum class MeshKind { uniform, adaptive };

/// Strictly increasing breakpoints from 0 to 1.
struct Mesh1D {
    std::vector<double> breakpoints;
    MeshKind kind = MeshKind::uniform;
    double eps = 0.0;              ///< layer width for adaptive meshes
    int geometric_prefix = 0;      ///< number of points produced by the halving recurrence

    std::size_t size() const noexcept { return breakpoints.size(); }
    std::size_t elements() const noexcept { return breakpoints.size() - 1; }
    double width(std::size_t e) const { return breakpoints[e + 1] - breakpoints[e]; }
};

struct TensorMesh2D {
    Mesh1D mesh_x;
    Mesh1D mesh_y;
};

/// Human-readable form of the recurrence used by `adaptive_mesh`.
inline constexpr const char* kAdaptiveRecurrence = "x_i = x_{i-1} + (x_{i-1} - x_{i-2})/2";

Mesh1D uniform_mesh(int n_points);

/// 0, 0.5, 0.75, ... (halving increments) until 1 - x_i < eps, then the remaining
/// points spaced uniformly up to 1. The outflow layer sits at x = 1.
Mesh1D adaptive_mesh(int n_points, double eps);

/// Boundary-layer mesh in x, uniform in y with the same point count.
TensorMesh2D adaptive_tensor_mesh(int n_points, double eps);
TensorMesh2D uniform_tensor_mesh(int n_points);

/// Nested refinement: every element split at its midpoint.
Mesh1D refine(const Mesh1D& mesh);
TensorMesh2D refine(const TensorMesh2D& mesh);

struct CollocationSet1D {
    std::vector<double> interior;
    double left = 0.0;
    double right = 1.0;
};

/// Grid points split into the interior and the four edges. Corners belong
/// to the x = 0 and x = 1 edges. Each matrix holds one point per column.
struct CollocationSet2D {
    Eigen::Matrix2Xd interior;
    Eigen::Matrix2Xd x0;
    Eigen::Matrix2Xd x1;
    Eigen::Matrix2Xd y0;
    Eigen::Matrix2Xd y1;

    Eigen::Index total() const {
        return interior.cols() + x0.cols() + x1.cols() + y0.cols() + y1.cols();
    }
};

CollocationSet1D collocation_points(const Mesh1D& mesh);
CollocationSet2D collocation_points(const TensorMesh2D& mesh);

std::string to_string(MeshKind kind);

} // namespace advdiff
