#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "cssplines/common.hpp"

namespace css {

/// Univariate polynomial in the monomial basis with trimmed degree.
class Poly1 {
  public:
    Poly1() : c_{0.0} {}
    explicit Poly1(std::vector<double> coeffs) : c_(std::move(coeffs)) { trim(); }
    static Poly1 constant(double v) { return Poly1({v}); }
    static Poly1 linear(double c0, double c1) { return Poly1({c0, c1}); }

    int degree() const { return int(c_.size()) - 1; }
    double coeff(int i) const { return (i >= 0 && i < int(c_.size())) ? c_[i] : 0.0; }
    const std::vector<double>& coeffs() const { return c_; }

    double operator()(double x) const;
    Poly1 derivative() const;
    /// Exact integral over [0,1].
    double integral01() const;

    Poly1 operator+(const Poly1& o) const;
    Poly1 operator-(const Poly1& o) const;
    Poly1 operator*(const Poly1& o) const;
    Poly1 operator*(double s) const;
    Poly1 pow(int e) const;
    bool is_zero(double tol = 0.0) const;

  private:
    void trim();
    std::vector<double> c_;  // c_[i] multiplies x^i
};

/// Piecewise polynomial over the uniform mesh {m/(k+1)}, one Bernstein
/// coefficient vector of length degree+1 per knot span.
class PiecewisePoly {
  public:
    PiecewisePoly() = default;
    PiecewisePoly(int degree, int elements);
    /// Restrict a global polynomial to each span of a uniform mesh.
    static PiecewisePoly from_poly(const Poly1& p, int degree, int elements);

    int degree() const { return degree_; }
    int elements() const { return elements_; }
    double mesh_size() const { return 1.0 / elements_; }

    double& coeff(int element, int i) { return c_[element * (degree_ + 1) + i]; }
    double coeff(int element, int i) const { return c_[element * (degree_ + 1) + i]; }

    double eval(double x, int deriv = 0) const;
    PiecewisePoly derivative() const;
    PiecewisePoly raised(int new_degree) const;
    /// Exact integral over [0,1].
    double integral01() const;
    double max_abs_coeff() const;

    PiecewisePoly operator+(const PiecewisePoly& o) const;
    PiecewisePoly operator-(const PiecewisePoly& o) const;
    PiecewisePoly operator*(const PiecewisePoly& o) const;
    PiecewisePoly operator*(double s) const;

    /// Derivative jump across inner knot m (between elements m-1 and m) at the
    /// given order, from the Bernstein representation.
    double knot_jump(int knot, int order) const;

  private:
    int degree_ = 0;
    int elements_ = 1;
    std::vector<double> c_;
};

/// Univariate B-spline space of degree p and inner-knot regularity r on the
/// uniform open knot vector with k distinct inner knots.
class SplineSpace1D {
  public:
    SplineSpace1D(int p, int r, int k);

    int degree() const { return p_; }
    int regularity() const { return r_; }
    int inner_knots() const { return k_; }
    int dim() const { return n_; }
    double mesh_size() const { return 1.0 / (k_ + 1); }
    const std::vector<double>& knots() const { return knots_; }

    /// d-th derivative of basis function j at x; right-continuous at inner
    /// knots, left limit at x = 1.
    double eval(int j, double x, int d = 0) const;

    /// Values or derivatives of all p+1 basis functions that are nonzero on
    /// the element containing x. Returns the first active index.
    int eval_active(double x, int d, double* out) const;

    /// Element index of x in [0,1] (right-continuous; last element at x = 1).
    int element_of(double x) const;
    /// First active basis index on an element.
    int first_active(int element) const { return element * (p_ - r_); }

    PiecewisePoly to_bezier(const Eigen::VectorXd& coeffs) const;
    /// Inverse of to_bezier. Throws SmoothnessError when the input is not C^r
    /// across some inner knot (relative tolerance smooth_tol).
    Eigen::VectorXd from_bezier(const PiecewisePoly& pp, double smooth_tol = 1e-9) const;

    /// Gram matrix of the basis, by exact per-element Bernstein integration.
    Eigen::MatrixXd gram() const;

  private:
    int p_, r_, k_, n_;
    std::vector<double> knots_;
    // Per element: (p+1) x (p+1) matrix mapping active spline coefficients to
    // Bernstein coefficients on that element.
    std::vector<Eigen::MatrixXd> extraction_;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> fit_qr_;  // for from_bezier

    void build_extraction();
};

/// Shared, memoized spaces: the builders request the same (p, r, k) many times.
const SplineSpace1D& space_cache(int p, int r, int k);

SplineSpace1D make_space(int p, int r, int k);

}  // namespace css
