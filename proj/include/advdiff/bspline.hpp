#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace advdiff {

/// Clamped knot vector: first and last knot repeat degree+1 times.
class KnotVector {
public:
    KnotVector(std::vector<double> values, int degree);

    int degree() const noexcept { return degree_; }
    const std::vector<double>& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    double front() const { return values_.front(); }
    double back() const { return values_.back(); }

    /// Distinct knot values, i.e. the element boundaries.
    std::vector<double> breakpoints() const;

private:
    std::vector<double> values_;
    int degree_;
};

/// Basis function values and derivatives on one knot span.
///
/// `values(k, j)` is the k-th derivative of basis function `first + j`.
struct SpanValues {
    int first = 0;
    Eigen::MatrixXd values;
};

struct BasisEntry {
    int index;
    double value;
};

class BSplineBasis1D {
public:
    explicit BSplineBasis1D(KnotVector knots);

    const KnotVector& knots() const noexcept { return knots_; }
    int degree() const noexcept { return knots_.degree(); }
    int dimension() const noexcept { return dimension_; }
    double domain_min() const { return knots_.front(); }
    double domain_max() const { return knots_.back(); }
    std::vector<double> breakpoints() const { return knots_.breakpoints(); }

    /// Index of the knot span containing x. Interior knots use the right
    /// limit; the right end of the domain uses the left limit.
    int find_span(double x) const;

    /// All derivatives up to `max_order` of the degree+1 functions supported on x's span.
    SpanValues eval_span(double x, int max_order) const;

    /// Nonzero entries of the `deriv_order`-th derivative at x.
    std::vector<BasisEntry> eval(double x, int deriv_order) const;

    /// Dense evaluation of a single function, mostly for tests.
    double eval_function(int index, double x, int deriv_order) const;

private:
    void check_domain(double x) const;

    KnotVector knots_;
    int dimension_;
};

/// Clamped basis over `breakpoints` where every interior breakpoint is
/// repeated `interior_multiplicity` times (continuity C^{degree - multiplicity}).
BSplineBasis1D build_basis(int degree, std::span<const double> breakpoints, int interior_multiplicity);

/// Evaluate sum_i coefficients[i] * B_i^{(deriv_order)}(x).
double eval_spline(const BSplineBasis1D& basis, std::span<const double> coefficients, double x,
                   int deriv_order = 0);

} // namespace advdiff
