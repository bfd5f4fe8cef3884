#include "advdiff/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "advdiff/errors.hpp"

namespace advdiff {

namespace {

// Roots of P_n by Newton iteration from the Chebyshev-like initial guess.
void legendre_reference(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = 0.0;
            for (int k = 1; k <= n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-14) {
                break;
            }
        }
        // Recompute the derivative at the converged root for the weight.
        double p0 = 1.0;
        double p1 = 0.0;
        for (int k = 1; k <= n; ++k) {
            const double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
        }
        dp = n * (z * p0 - p1) / (z * z - 1.0);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    if (n % 2 == 1) {
        x[n / 2] = 0.0;
    }
}

} // namespace

QuadRule1D gauss_rule(int order, double a, double b) {
    if (order < 1) {
        throw InvalidArgumentError("quadrature order must be at least 1");
    }
    if (!(a < b)) {
        throw InvalidArgumentError("invalid interval: a must be less than b");
    }
    std::vector<double> x;
    std::vector<double> w;
    legendre_reference(order, x, w);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    QuadRule1D rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    for (int i = 0; i < order; ++i) {
        rule.nodes[i] = mid + half * x[i];
        rule.weights[i] = half * w[i];
    }
    return rule;
}

QuadRule2D tensor_rule(const QuadRule1D& rule_x, const QuadRule1D& rule_y) {
    QuadRule2D rule;
    rule.points.reserve(rule_x.nodes.size() * rule_y.nodes.size());
    for (std::size_t i = 0; i < rule_x.nodes.size(); ++i) {
        for (std::size_t j = 0; j < rule_y.nodes.size(); ++j) {
            rule.points.push_back(
                {rule_x.nodes[i], rule_y.nodes[j], rule_x.weights[i] * rule_y.weights[j]});
        }
    }
    return rule;
}

QuadRule1D composite_rule(std::span<const double> breakpoints, int order) {
    QuadRule1D out;
    for (std::size_t e = 0; e + 1 < breakpoints.size(); ++e) {
        const auto r = gauss_rule(order, breakpoints[e], breakpoints[e + 1]);
        out.nodes.insert(out.nodes.end(), r.nodes.begin(), r.nodes.end());
        out.weights.insert(out.weights.end(), r.weights.begin(), r.weights.end());
    }
    return out;
}

} // namespace advdiff
