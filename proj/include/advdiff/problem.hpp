#pragma once

#include <cmath>
#include <numbers>

namespace advdiff {

/// -eps u'' + u' = 0 on (0,1), -eps u'(0) + u(0) = 1, u(1) = 0.
struct Problem1D {
    double eps = 1.0;
};

/// Value and derivatives of a scalar field at one point.
struct PointJet {
    double value = 0.0;
    double dx = 0.0;
    double dy = 0.0;
    double dxx = 0.0;
    double dyy = 0.0;
};

/// u(x) = 1 - exp((x-1)/eps).
PointJet exact_jet_1d(const Problem1D& problem, double x);

inline double exact_solution_1d(const Problem1D& problem, double x) {
    return exact_jet_1d(problem, x).value;
}

/// Eriksson-Johnson: beta = (1, 0), -eps Lap(u) + u_x = 0 on the unit square,
/// u = sin(pi y) on x = 0 and u = 0 on the rest of the boundary.
class ProblemEJ {
public:
    explicit ProblemEJ(double eps);

    double eps() const noexcept { return eps_; }
    double beta_x() const noexcept { return 1.0; }
    double beta_y() const noexcept { return 0.0; }

    /// Characteristic roots (1 +- sqrt(1 + 4 eps^2 pi^2)) / (2 eps).
    double r1() const noexcept { return r1_; }
    double r2() const noexcept { return r2_; }

    /// Dirichlet data on the boundary.
    double g(double x, double y) const {
        return x == 0.0 ? std::sin(std::numbers::pi * y) : 0.0;
    }

    PointJet exact_jet(double x, double y) const;
    double exact(double x, double y) const { return exact_jet(x, y).value; }

private:
    double eps_;
    double r1_;
    double r2_;
    double denom_;
};

inline double exact_solution_ej(const ProblemEJ& problem, double x, double y) {
    return problem.exact(x, y);
}

} // namespace advdiff
