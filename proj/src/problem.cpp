#include "advdiff/problem.hpp"

#include "advdiff/errors.hpp"

namespace advdiff {

PointJet exact_jet_1d(const Problem1D& problem, double x) {
    const double eps = problem.eps;
    const double e = std::exp((x - 1.0) / eps);
    PointJet j;
    j.value = 1.0 - e;
    j.dx = -e / eps;
    j.dxx = -e / (eps * eps);
    return j;
}

ProblemEJ::ProblemEJ(double eps) : eps_(eps) {
    if (!(eps > 0.0)) {
        throw InvalidArgumentError("eps must be positive");
    }
    const double pi = std::numbers::pi;
    const double root = std::sqrt(1.0 + 4.0 * eps * eps * pi * pi);
    r1_ = (1.0 + root) / (2.0 * eps);
    // r1 * r2 = -pi^2; avoids the cancellation in (1 - root) for small eps.
    r2_ = -pi * pi / r1_;
    denom_ = std::exp(-r1_) - std::exp(-r2_);
}

PointJet ProblemEJ::exact_jet(double x, double y) const {
    const double pi = std::numbers::pi;
    const double e1 = std::exp(r1_ * (x - 1.0));
    const double e2 = std::exp(r2_ * (x - 1.0));
    const double s = std::sin(pi * y);
    const double c = std::cos(pi * y);
    const double fx = (e1 - e2) / denom_;
    const double fx1 = (r1_ * e1 - r2_ * e2) / denom_;
    const double fx2 = (r1_ * r1_ * e1 - r2_ * r2_ * e2) / denom_;
    PointJet j;
    j.value = fx * s;
    j.dx = fx1 * s;
    j.dxx = fx2 * s;
    j.dy = fx * pi * c;
    j.dyy = -pi * pi * fx * s;
    return j;
}

} // namespace advdiff
