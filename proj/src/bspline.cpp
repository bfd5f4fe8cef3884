#include "advdiff/bspline.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "advdiff/errors.hpp"

namespace advdiff {

KnotVector::KnotVector(std::vector<double> values, int degree)
    : values_(std::move(values)), degree_(degree) {
    if (degree_ < 0) {
        throw InvalidArgumentError("knot vector degree must be nonnegative");
    }
    const auto n = values_.size();
    if (n < static_cast<std::size_t>(2 * (degree_ + 1))) {
        throw InvalidMeshError("knot vector too short for its degree");
    }
    if (!std::is_sorted(values_.begin(), values_.end())) {
        throw InvalidMeshError("knot vector must be nondecreasing");
    }
    if (!(values_.front() < values_.back())) {
        throw InvalidMeshError("knot vector spans an empty interval");
    }
    auto count = [&](double v) { return std::count(values_.begin(), values_.end(), v); };
    if (count(values_.front()) != degree_ + 1 || count(values_.back()) != degree_ + 1) {
        throw InvalidMeshError("knot vector must be clamped (end multiplicity degree+1)");
    }
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && values_[j] == values_[i]) {
            ++j;
        }
        if (j - i > static_cast<std::size_t>(degree_ + 1)) {
            throw InvalidContinuityError("knot multiplicity exceeds degree+1");
        }
        i = j;
    }
}

std::vector<double> KnotVector::breakpoints() const {
    std::vector<double> out;
    std::unique_copy(values_.begin(), values_.end(), std::back_inserter(out));
    return out;
}

BSplineBasis1D::BSplineBasis1D(KnotVector knots)
    : knots_(std::move(knots)),
      dimension_(static_cast<int>(knots_.size()) - knots_.degree() - 1) {}

void BSplineBasis1D::check_domain(double x) const {
    if (!(x >= domain_min() && x <= domain_max())) {
        throw OutOfDomainError(
            fmt::format("x = {} outside [{}, {}]", x, domain_min(), domain_max()));
    }
}

int BSplineBasis1D::find_span(double x) const {
    check_domain(x);
    const auto& u = knots_.values();
    if (x >= domain_max()) {
        return dimension_ - 1;
    }
    // Last knot <= x; guarantees u[span] <= x < u[span+1].
    auto it = std::upper_bound(u.begin(), u.end(), x);
    return static_cast<int>(std::distance(u.begin(), it)) - 1;
}

SpanValues BSplineBasis1D::eval_span(double x, int max_order) const {
    const int p = degree();
    const int span = find_span(x);
    const auto& u = knots_.values();
    const int nd = std::min(max_order, p);

    // Derivatives of the nonzero basis functions via the triangular
    // table of lower-degree values (Piegl & Tiller, A2.3).
    Eigen::MatrixXd ndu(p + 1, p + 1);
    std::vector<double> left(p + 1), right(p + 1);
    ndu(0, 0) = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = x - u[span + 1 - j];
        right[j] = u[span + j] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu(j, r) = right[r + 1] + left[j - r];
            const double temp = ndu(r, j - 1) / ndu(j, r);
            ndu(r, j) = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu(j, j) = saved;
    }

    SpanValues out;
    out.first = span - p;
    out.values = Eigen::MatrixXd::Zero(max_order + 1, p + 1);
    for (int j = 0; j <= p; ++j) {
        out.values(0, j) = ndu(j, p);
    }

    Eigen::MatrixXd a(2, p + 1);
    for (int r = 0; r <= p; ++r) {
        int s1 = 0;
        int s2 = 1;
        a(0, 0) = 1.0;
        for (int k = 1; k <= nd; ++k) {
            double d = 0.0;
            const int rk = r - k;
            const int pk = p - k;
            if (r >= k) {
                a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
                d = a(s2, 0) * ndu(rk, pk);
            }
            const int j1 = rk >= -1 ? 1 : -rk;
            const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
            for (int j = j1; j <= j2; ++j) {
                a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
                d += a(s2, j) * ndu(rk + j, pk);
            }
            if (r <= pk) {
                a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
                d += a(s2, k) * ndu(r, pk);
            }
            out.values(k, r) = d;
            std::swap(s1, s2);
        }
    }

    double factor = p;
    for (int k = 1; k <= nd; ++k) {
        out.values.row(k) *= factor;
        factor *= (p - k);
    }
    return out;
}

std::vector<BasisEntry> BSplineBasis1D::eval(double x, int deriv_order) const {
    if (deriv_order < 0 || deriv_order > 2) {
        throw InvalidArgumentError("derivative order must be 0, 1 or 2");
    }
    if (deriv_order > degree()) {
        throw InvalidArgumentError("derivative order exceeds the basis degree");
    }
    const auto sv = eval_span(x, deriv_order);
    std::vector<BasisEntry> out;
    out.reserve(sv.values.cols());
    for (int j = 0; j < sv.values.cols(); ++j) {
        const double v = sv.values(deriv_order, j);
        if (v != 0.0) {
            out.push_back({sv.first + j, v});
        }
    }
    return out;
}

double BSplineBasis1D::eval_function(int index, double x, int deriv_order) const {
    const auto sv = eval_span(x, deriv_order);
    const int j = index - sv.first;
    if (j < 0 || j >= sv.values.cols()) {
        return 0.0;
    }
    return sv.values(deriv_order, j);
}

BSplineBasis1D build_basis(int degree, std::span<const double> breakpoints,
                           int interior_multiplicity) {
    if (degree < 1) {
        throw InvalidArgumentError("degree must be at least 1");
    }
    if (breakpoints.size() < 2) {
        throw InvalidMeshError("need at least two breakpoints");
    }
    for (std::size_t i = 1; i < breakpoints.size(); ++i) {
        if (!(breakpoints[i] > breakpoints[i - 1])) {
            throw InvalidMeshError("breakpoints must be strictly increasing");
        }
    }
    if (interior_multiplicity < 1 || interior_multiplicity > degree) {
        throw InvalidContinuityError(
            fmt::format("interior multiplicity {} not in [1, {}]", interior_multiplicity, degree));
    }

    std::vector<double> knots;
    knots.reserve(2 * (degree + 1) + (breakpoints.size() - 2) * interior_multiplicity);
    knots.insert(knots.end(), degree + 1, breakpoints.front());
    for (std::size_t i = 1; i + 1 < breakpoints.size(); ++i) {
        knots.insert(knots.end(), interior_multiplicity, breakpoints[i]);
    }
    knots.insert(knots.end(), degree + 1, breakpoints.back());
    return BSplineBasis1D(KnotVector(std::move(knots), degree));
}

double eval_spline(const BSplineBasis1D& basis, std::span<const double> coefficients, double x,
                   int deriv_order) {
    const auto sv = basis.eval_span(x, deriv_order);
    double sum = 0.0;
    for (int j = 0; j < sv.values.cols(); ++j) {
        sum += coefficients[sv.first + j] * sv.values(deriv_order, j);
    }
    return sum;
}

} // namespace advdiff
