#pragma once

#include <span>
#include <vector>

namespace advdiff {

/// Gauss-Legendre rule mapped to an interval.
struct QuadRule1D {
    std::vector<double> nodes;
    std::vector<double> weights;

    int order() const noexcept { return static_cast<int>(nodes.size()); }
};

struct QuadPoint2D {
    double x;
    double y;
    double weight;
};

struct QuadRule2D {
    std::vector<QuadPoint2D> points;
};

/// `order`-point Gauss-Legendre rule on [a, b]; exact for polynomials of degree 2*order-1.
QuadRule1D gauss_rule(int order, double a, double b);

QuadRule2D tensor_rule(const QuadRule1D& rule_x, const QuadRule1D& rule_y);

/// Composite rule: `order` Gauss points on each interval between consecutive breakpoints.
QuadRule1D composite_rule(std::span<const double> breakpoints, int order);

/// Points per element that integrate products of degree p and q polynomials exactly.
inline int default_quad_order(int trial_degree, int test_degree) {
    return trial_degree + test_degree + 1;
}

} // namespace advdiff
