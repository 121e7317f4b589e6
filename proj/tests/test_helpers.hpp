#pragma once

#include <random>
#include <sstream>
#include <string>

#include "cssplines/bspline.hpp"
#include "cssplines/geometry.hpp"

namespace css::testing {

inline MultiPatchDomain domain_from_json(const std::string& text) {
    std::istringstream in(text);
    return load_geometry(in);
}

inline MultiPatchDomain mirror_squares() {
    return domain_from_json(R"({"patches": [
        {"corners": [[-1,0],[0,0],[-1,1],[0,1]]},
        {"corners": [[0,0],[1,0],[0,1],[1,1]]}]})");
}

inline MultiPatchDomain skew_two_patch() {
    return domain_from_json(R"({"patches": [
        {"corners": [[-1.05,-0.08],[0,0],[-0.9,1.1],[0.15,1.05]]},
        {"corners": [[0,0],[1.1,0.1],[0.15,1.05],[1.25,1.15]]}]})");
}

inline MultiPatchDomain three_patch_fan() {
    return domain_from_json(R"({"patches": [
        {"corners": [[0,0],[0,1],[-0.9526279,-0.55],[-1.0825318,0.625]]},
        {"corners": [[0,0],[-0.9526279,-0.55],[0.8227241,-0.475],[0,-1.15]]},
        {"corners": [[0,0],[0.8227241,-0.475],[0,1],[1.0392305,0.6]]}]})");
}

/// Random regular bilinear two-patch domain sharing the edge (0,0)-(e1x,~1).
inline MultiPatchDomain random_two_patch(std::mt19937& rng) {
    std::uniform_real_distribution<double> jitter(-0.25, 0.25);
    for (int attempt = 0; attempt < 100; ++attempt) {
        double e1x = jitter(rng) * 0.8;
        double e1y = 1.0 + jitter(rng) * 0.5;
        std::ostringstream os;
        os.precision(17);
        os << R"({"patches": [{"corners": [[)" << -1.0 + jitter(rng) << "," << jitter(rng)
           << "],[0,0],[" << -1.0 + jitter(rng) << "," << 1.0 + jitter(rng) << "],[" << e1x << ","
           << e1y << R"(]]}, {"corners": [[0,0],[)" << 1.0 + jitter(rng) << "," << jitter(rng)
           << "],[" << e1x << "," << e1y << "],[" << 1.0 + jitter(rng) << "," << 1.0 + jitter(rng)
           << "]]}]}";
        try {
            auto d = domain_from_json(os.str());
            auto t = extract_topology(d);
            if (t.inner_edges.size() == 1) return d;
        } catch (const GeometryError&) {
            continue;
        }
    }
    throw std::runtime_error("random_two_patch failed to find a regular sample");
}

/// Dense bivariate polynomial sum_{a,b} c(a,b) x^a y^b, used as a brute-force
/// oracle for pullbacks through bilinear maps.
struct Poly2 {
    Eigen::MatrixXd c;  // (deg1+1) x (deg2+1)

    static Poly2 zero(int d1, int d2) { return {Eigen::MatrixXd::Zero(d1 + 1, d2 + 1)}; }
    static Poly2 constant(double v) {
        Poly2 p = zero(0, 0);
        p.c(0, 0) = v;
        return p;
    }
    double eval(double x, double y) const {
        double s = 0.0;
        for (int a = 0; a < c.rows(); ++a)
            for (int b = 0; b < c.cols(); ++b) s += c(a, b) * std::pow(x, a) * std::pow(y, b);
        return s;
    }
    Poly2 operator*(const Poly2& o) const {
        Poly2 r = zero(int(c.rows() + o.c.rows()) - 2, int(c.cols() + o.c.cols()) - 2);
        for (int a = 0; a < c.rows(); ++a)
            for (int b = 0; b < c.cols(); ++b)
                for (int u = 0; u < o.c.rows(); ++u)
                    for (int v = 0; v < o.c.cols(); ++v) r.c(a + u, b + v) += c(a, b) * o.c(u, v);
        return r;
    }
    Poly2 operator+(const Poly2& o) const {
        Poly2 r = zero(std::max<int>(c.rows(), o.c.rows()) - 1,
                       std::max<int>(c.cols(), o.c.cols()) - 1);
        r.c.topLeftCorner(c.rows(), c.cols()) += c;
        r.c.topLeftCorner(o.c.rows(), o.c.cols()) += o.c;
        return r;
    }
    Poly2 operator*(double s) const {
        Poly2 r = *this;
        r.c *= s;
        return r;
    }
    Poly2 pow(int e) const {
        Poly2 r = constant(1.0);
        for (int i = 0; i < e; ++i) r = r * (*this);
        return r;
    }
};

/// q(F(z1,z2)) expanded as a bivariate polynomial in (z1,z2).
inline Poly2 pullback(const Poly2& q, const BilinearPatch& F) {
    // components of F as Poly2 in (z1, z2)
    Poly2 X = Poly2::zero(1, 1), Y = Poly2::zero(1, 1);
    X.c(0, 0) = F.coef_a()[0];
    X.c(1, 0) = F.coef_b()[0];
    X.c(0, 1) = F.coef_c()[0];
    X.c(1, 1) = F.coef_d()[0];
    Y.c(0, 0) = F.coef_a()[1];
    Y.c(1, 0) = F.coef_b()[1];
    Y.c(0, 1) = F.coef_c()[1];
    Y.c(1, 1) = F.coef_d()[1];
    Poly2 out = Poly2::zero(0, 0);
    for (int a = 0; a < q.c.rows(); ++a)
        for (int b = 0; b < q.c.cols(); ++b) {
            if (q.c(a, b) == 0.0) continue;
            out = out + X.pow(a) * Y.pow(b) * q.c(a, b);
        }
    return out;
}

/// Exact tensor-product spline coefficients of a bivariate polynomial whose
/// bidegree fits in the space.
inline Eigen::MatrixXd spline_coeffs(const SplineSpace1D& sp, const Poly2& q) {
    const int n = sp.dim();
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    for (int a = 0; a < q.c.rows(); ++a) {
        std::vector<double> mono(a + 1, 0.0);
        mono[a] = 1.0;
        Eigen::VectorXd u =
            sp.from_bezier(PiecewisePoly::from_poly(Poly1(mono), sp.degree(), sp.inner_knots() + 1));
        std::vector<double> row(q.c.cols());
        for (int b = 0; b < q.c.cols(); ++b) row[b] = q.c(a, b);
        Eigen::VectorXd w =
            sp.from_bezier(PiecewisePoly::from_poly(Poly1(row), sp.degree(), sp.inner_knots() + 1));
        D += u * w.transpose();
    }
    return D;
}

}  // namespace css::testing
