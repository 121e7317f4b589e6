#include "cssplines/bspline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace css {

// ---------------------------------------------------------------- Poly1

void Poly1::trim() {
    while (c_.size() > 1 && c_.back() == 0.0) c_.pop_back();
    if (c_.empty()) c_.push_back(0.0);
}

double Poly1::operator()(double x) const {
    double r = 0.0;
    for (int i = int(c_.size()) - 1; i >= 0; --i) r = r * x + c_[i];
    return r;
}

Poly1 Poly1::derivative() const {
    if (c_.size() <= 1) return Poly1();
    std::vector<double> d(c_.size() - 1);
    for (size_t i = 1; i < c_.size(); ++i) d[i - 1] = double(i) * c_[i];
    return Poly1(std::move(d));
}

double Poly1::integral01() const {
    double r = 0.0;
    for (size_t i = 0; i < c_.size(); ++i) r += c_[i] / double(i + 1);
    return r;
}

Poly1 Poly1::operator+(const Poly1& o) const {
    std::vector<double> r(std::max(c_.size(), o.c_.size()), 0.0);
    for (size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
    for (size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
    return Poly1(std::move(r));
}

Poly1 Poly1::operator-(const Poly1& o) const { return *this + o * (-1.0); }

Poly1 Poly1::operator*(const Poly1& o) const {
    std::vector<double> r(c_.size() + o.c_.size() - 1, 0.0);
    for (size_t i = 0; i < c_.size(); ++i)
        for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
    return Poly1(std::move(r));
}

Poly1 Poly1::operator*(double s) const {
    std::vector<double> r = c_;
    for (double& v : r) v *= s;
    return Poly1(std::move(r));
}

Poly1 Poly1::pow(int e) const {
    Poly1 r = Poly1::constant(1.0);
    for (int i = 0; i < e; ++i) r = r * (*this);
    return r;
}

bool Poly1::is_zero(double tol) const {
    for (double v : c_)
        if (std::abs(v) > tol) return false;
    return true;
}

// ---------------------------------------------------------- PiecewisePoly

PiecewisePoly::PiecewisePoly(int degree, int elements)
    : degree_(degree), elements_(elements), c_(size_t(elements) * (degree + 1), 0.0) {}

PiecewisePoly PiecewisePoly::from_poly(const Poly1& p, int degree, int elements) {
    if (p.degree() > degree) throw ParameterError("from_poly: degree too small");
    PiecewisePoly out(degree, elements);
    const double h = 1.0 / elements;
    for (int e = 0; e < elements; ++e) {
        // Taylor coefficients in the local variable t = (x - e*h)/h.
        std::vector<double> mono(degree + 1, 0.0);
        Poly1 q = p;
        double fact = 1.0;
        for (int m = 0; m <= degree; ++m) {
            if (m > 0) {
                q = q.derivative();
                fact *= m;
            }
            mono[m] = q(e * h) * std::pow(h, m) / fact;
        }
        for (int i = 0; i <= degree; ++i) {
            double b = 0.0;
            for (int m = 0; m <= i; ++m) b += mono[m] * binomial(i, m) / binomial(degree, m);
            out.coeff(e, i) = b;
        }
    }
    return out;
}

double PiecewisePoly::eval(double x, int deriv) const {
    int e = std::clamp(int(std::floor(x * elements_)), 0, elements_ - 1);
    double t = x * elements_ - e;
    std::vector<double> b(c_.begin() + size_t(e) * (degree_ + 1),
                          c_.begin() + size_t(e + 1) * (degree_ + 1));
    int deg = degree_;
    double scale = 1.0;
    for (int d = 0; d < deriv; ++d) {
        if (deg == 0) return 0.0;
        for (int i = 0; i < deg; ++i) b[i] = deg * (b[i + 1] - b[i]);
        b.resize(deg);
        scale *= elements_;
        --deg;
    }
    for (int j = deg; j >= 1; --j)
        for (int i = 0; i < j; ++i) b[i] = (1.0 - t) * b[i] + t * b[i + 1];
    return b[0] * scale;
}

PiecewisePoly PiecewisePoly::derivative() const {
    if (degree_ == 0) return PiecewisePoly(0, elements_);
    PiecewisePoly out(degree_ - 1, elements_);
    for (int e = 0; e < elements_; ++e)
        for (int i = 0; i < degree_; ++i)
            out.coeff(e, i) = degree_ * elements_ * (coeff(e, i + 1) - coeff(e, i));
    return out;
}

PiecewisePoly PiecewisePoly::raised(int new_degree) const {
    if (new_degree < degree_) throw ParameterError("raised: cannot lower degree");
    PiecewisePoly out = *this;
    while (out.degree_ < new_degree) {
        PiecewisePoly up(out.degree_ + 1, elements_);
        int q = out.degree_ + 1;
        for (int e = 0; e < elements_; ++e) {
            up.coeff(e, 0) = out.coeff(e, 0);
            up.coeff(e, q) = out.coeff(e, q - 1);
            for (int i = 1; i < q; ++i)
                up.coeff(e, i) =
                    (double(i) / q) * out.coeff(e, i - 1) + (1.0 - double(i) / q) * out.coeff(e, i);
        }
        out = std::move(up);
    }
    return out;
}

double PiecewisePoly::integral01() const {
    double s = 0.0;
    for (const double v : c_) s += v;
    return s / (elements_ * (degree_ + 1));
}

double PiecewisePoly::max_abs_coeff() const {
    double m = 0.0;
    for (double v : c_) m = std::max(m, std::abs(v));
    return m;
}

PiecewisePoly PiecewisePoly::operator+(const PiecewisePoly& o) const {
    if (elements_ != o.elements_) throw ParameterError("mesh mismatch");
    int deg = std::max(degree_, o.degree_);
    PiecewisePoly a = raised(deg), b = o.raised(deg);
    for (size_t i = 0; i < a.c_.size(); ++i) a.c_[i] += b.c_[i];
    return a;
}

PiecewisePoly PiecewisePoly::operator-(const PiecewisePoly& o) const { return *this + o * (-1.0); }

PiecewisePoly PiecewisePoly::operator*(const PiecewisePoly& o) const {
    if (elements_ != o.elements_) throw ParameterError("mesh mismatch");
    int pa = degree_, pb = o.degree_;
    PiecewisePoly out(pa + pb, elements_);
    for (int e = 0; e < elements_; ++e)
        for (int k = 0; k <= pa + pb; ++k) {
            double s = 0.0;
            for (int i = std::max(0, k - pb); i <= std::min(pa, k); ++i)
                s += binomial(pa, i) * binomial(pb, k - i) * coeff(e, i) * o.coeff(e, k - i);
            out.coeff(e, k) = s / binomial(pa + pb, k);
        }
    return out;
}

PiecewisePoly PiecewisePoly::operator*(double s) const {
    PiecewisePoly out = *this;
    for (double& v : out.c_) v *= s;
    return out;
}

double PiecewisePoly::knot_jump(int knot, int order) const {
    // One-sided derivatives of order `order` at the knot between elements
    // knot-1 and knot, from Bernstein endpoint formulas.
    const int e_left = knot - 1, e_right = knot;
    const double hinv = double(elements_);
    double fac = 1.0;
    for (int m = 0; m < order; ++m) fac *= (degree_ - m) * hinv;
    double left = 0.0, right = 0.0;
    for (int j = 0; j <= order; ++j) {
        double w = ((order - j) % 2 ? -1.0 : 1.0) * binomial(order, j);
        left += w * coeff(e_left, degree_ - order + j);
        right += w * coeff(e_right, j);
    }
    return fac * (right - left);
}

// ---------------------------------------------------------- SplineSpace1D

SplineSpace1D::SplineSpace1D(int p, int r, int k) : p_(p), r_(r), k_(k) {
    if (p < 1) throw ParameterError("spline degree must be >= 1, got " + std::to_string(p));
    if (r < -1 || r > p - 1)
        throw ParameterError("regularity must satisfy -1 <= r <= p-1, got r=" + std::to_string(r) +
                             " for p=" + std::to_string(p));
    if (k < 0) throw ParameterError("inner knot count must be >= 0");
    n_ = p + 1 + k * (p - r);
    knots_.reserve(2 * (p + 1) + size_t(k) * (p - r));
    for (int i = 0; i <= p; ++i) knots_.push_back(0.0);
    for (int m = 1; m <= k; ++m)
        for (int i = 0; i < p - r; ++i) knots_.push_back(double(m) / (k + 1));
    for (int i = 0; i <= p; ++i) knots_.push_back(1.0);
    build_extraction();
}

int SplineSpace1D::element_of(double x) const {
    return std::clamp(int(std::floor(x * (k_ + 1))), 0, k_);
}

int SplineSpace1D::eval_active(double x, int d, double* out) const {
    const int e = element_of(x);
    const int span = p_ + e * (p_ - r_);  // knots_[span] <= x < knots_[span+1]
    const int p = p_;
    const auto& U = knots_;

    // Basis functions and derivatives on the span (The NURBS Book, A2.3).
    std::vector<double> left(p + 1), right(p + 1);
    Eigen::MatrixXd ndu(p + 1, p + 1);
    ndu(0, 0) = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = x - U[span + 1 - j];
        right[j] = U[span + j] - x;
        double saved = 0.0;
        for (int rr = 0; rr < j; ++rr) {
            ndu(j, rr) = right[rr + 1] + left[j - rr];
            double temp = ndu(rr, j - 1) / ndu(j, rr);
            ndu(rr, j) = saved + right[rr + 1] * temp;
            saved = left[j - rr] * temp;
        }
        ndu(j, j) = saved;
    }
    if (d == 0) {
        for (int j = 0; j <= p; ++j) out[j] = ndu(j, p);
        return span - p;
    }
    if (d > p) {
        for (int j = 0; j <= p; ++j) out[j] = 0.0;
        return span - p;
    }
    Eigen::MatrixXd a(2, p + 1);
    for (int j = 0; j <= p; ++j) {
        int s1 = 0, s2 = 1;
        a(0, 0) = 1.0;
        double dval = 0.0;
        for (int kk = 1; kk <= d; ++kk) {
            dval = 0.0;
            int rk = j - kk, pk = p - kk;
            if (j >= kk) {
                a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
                dval = a(s2, 0) * ndu(rk, pk);
            }
            int j1 = (rk >= -1) ? 1 : -rk;
            int j2 = (j - 1 <= pk) ? kk - 1 : p - j;
            for (int jj = j1; jj <= j2; ++jj) {
                a(s2, jj) = (a(s1, jj) - a(s1, jj - 1)) / ndu(pk + 1, rk + jj);
                dval += a(s2, jj) * ndu(rk + jj, pk);
            }
            if (j <= pk) {
                a(s2, kk) = -a(s1, kk - 1) / ndu(pk + 1, j);
                dval += a(s2, kk) * ndu(j, pk);
            }
            std::swap(s1, s2);
        }
        out[j] = dval;
    }
    double fac = 1.0;
    for (int kk = 0; kk < d; ++kk) fac *= (p - kk);
    for (int j = 0; j <= p; ++j) out[j] *= fac;
    return span - p;
}

double SplineSpace1D::eval(int j, double x, int d) const {
    if (j < 0 || j >= n_) throw ParameterError("basis index out of range");
    if (x < -1e-12 || x > 1.0 + 1e-12) throw ParameterError("evaluation point outside [0,1]");
    x = std::clamp(x, 0.0, 1.0);
    std::vector<double> buf(p_ + 1);
    int first = eval_active(x, d, buf.data());
    if (j < first || j > first + p_) return 0.0;
    return buf[j - first];
}

void SplineSpace1D::build_extraction() {
    const double h = mesh_size();
    extraction_.resize(k_ + 1);
    std::vector<double> ders((p_ + 1));
    for (int e = 0; e <= k_; ++e) {
        Eigen::MatrixXd E = Eigen::MatrixXd::Zero(p_ + 1, p_ + 1);
        // Taylor data at the element start, then monomial -> Bernstein.
        Eigen::MatrixXd mono(p_ + 1, p_ + 1);  // (m, local basis)
        const double a = e * h;
        double fact = 1.0;
        for (int m = 0; m <= p_; ++m) {
            if (m > 0) fact *= m;
            eval_active(a, m, ders.data());
            for (int l = 0; l <= p_; ++l) mono(m, l) = ders[l] * std::pow(h, m) / fact;
        }
        for (int i = 0; i <= p_; ++i)
            for (int l = 0; l <= p_; ++l) {
                double b = 0.0;
                for (int m = 0; m <= i; ++m)
                    b += mono(m, l) * binomial(i, m) / binomial(p_, m);
                E(i, l) = b;
            }
        extraction_[e] = E;
    }
    // Least-squares operator for from_bezier.
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero((k_ + 1) * (p_ + 1), n_);
    for (int e = 0; e <= k_; ++e)
        for (int i = 0; i <= p_; ++i)
            for (int l = 0; l <= p_; ++l) B(e * (p_ + 1) + i, first_active(e) + l) = extraction_[e](i, l);
    fit_qr_ = Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(B);
}

PiecewisePoly SplineSpace1D::to_bezier(const Eigen::VectorXd& coeffs) const {
    if (coeffs.size() != n_) throw ParameterError("coefficient length mismatch");
    PiecewisePoly out(p_, k_ + 1);
    for (int e = 0; e <= k_; ++e) {
        Eigen::VectorXd local = coeffs.segment(first_active(e), p_ + 1);
        Eigen::VectorXd b = extraction_[e] * local;
        for (int i = 0; i <= p_; ++i) out.coeff(e, i) = b[i];
    }
    return out;
}

Eigen::VectorXd SplineSpace1D::from_bezier(const PiecewisePoly& pp, double smooth_tol) const {
    if (pp.elements() != k_ + 1) throw ParameterError("mesh mismatch in from_bezier");
    PiecewisePoly q = (pp.degree() == p_) ? pp : pp.raised(p_);

    // Smoothness precheck: C^r across every inner knot, relative to the
    // largest one-sided derivative magnitude of the same order.
    double worst_rel = 0.0;
    int worst_knot = -1, worst_order = -1;
    for (int d = 0; d <= r_; ++d) {
        double mag = 1.0;
        {
            PiecewisePoly der = q;
            for (int m = 0; m < d; ++m) der = der.derivative();
            mag = std::max(1.0, der.max_abs_coeff());
        }
        for (int m = 1; m <= k_; ++m) {
            double rel = std::abs(q.knot_jump(m, d)) / mag;
            if (rel > worst_rel) {
                worst_rel = rel;
                worst_knot = m;
                worst_order = d;
            }
        }
    }
    if (worst_rel > smooth_tol)
        throw SmoothnessError("piecewise polynomial is not C^" + std::to_string(r_) +
                                  ": relative jump " + std::to_string(worst_rel) + " at knot " +
                                  std::to_string(worst_knot) + ", derivative order " +
                                  std::to_string(worst_order),
                              worst_knot, worst_order);

    Eigen::VectorXd rhs((k_ + 1) * (p_ + 1));
    for (int e = 0; e <= k_; ++e)
        for (int i = 0; i <= p_; ++i) rhs[e * (p_ + 1) + i] = q.coeff(e, i);
    Eigen::VectorXd c = fit_qr_.solve(rhs);
    // residual check (guards against inputs that are smooth but not splines)
    double resid = 0.0, scale = std::max(1.0, rhs.lpNorm<Eigen::Infinity>());
    {
        Eigen::VectorXd back((k_ + 1) * (p_ + 1));
        for (int e = 0; e <= k_; ++e) {
            Eigen::VectorXd b = extraction_[e] * c.segment(first_active(e), p_ + 1);
            back.segment(e * (p_ + 1), p_ + 1) = b;
        }
        resid = (back - rhs).lpNorm<Eigen::Infinity>();
    }
    if (resid > 1e-9 * scale)
        throw SmoothnessError("piecewise polynomial does not lie in the spline space (residual " +
                                  std::to_string(resid / scale) + ")",
                              -1, -1);
    return c;
}

Eigen::MatrixXd SplineSpace1D::gram() const {
    // Exact: per element, integral of products of Bernstein polynomials.
    Eigen::MatrixXd W(p_ + 1, p_ + 1);
    for (int a = 0; a <= p_; ++a)
        for (int b = 0; b <= p_; ++b)
            W(a, b) =
                binomial(p_, a) * binomial(p_, b) / ((2.0 * p_ + 1.0) * binomial(2 * p_, a + b));
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n_, n_);
    const double h = mesh_size();
    for (int e = 0; e <= k_; ++e) {
        const int f = first_active(e);
        for (int l1 = 0; l1 <= p_; ++l1)
            for (int l2 = l1; l2 <= p_; ++l2) {
                double s = 0.0;
                for (int a = 0; a <= p_; ++a)
                    for (int b = 0; b <= p_; ++b)
                        s += extraction_[e](a, l1) * W(a, b) * extraction_[e](b, l2);
                G(f + l1, f + l2) += s * h;
                if (l1 != l2) G(f + l2, f + l1) += s * h;
            }
    }
    return G;
}

SplineSpace1D make_space(int p, int r, int k) { return SplineSpace1D(p, r, k); }

const SplineSpace1D& space_cache(int p, int r, int k) {
    static std::map<std::tuple<int, int, int>, std::unique_ptr<SplineSpace1D>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_tuple(p, r, k);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_unique<SplineSpace1D>(p, r, k)).first;
    return *it->second;
}

}  // namespace css
