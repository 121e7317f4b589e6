#include "cssplines/gluing.hpp"

#include <cmath>
#include <functional>

namespace css {

// ------------------------------------------------------------ compute_gluing

GluingData compute_gluing(const MultiPatchDomain& domain, const EdgeFrame& frame) {
    std::array<Poly1, 2> d;          // interface Jacobian determinant, linear
    std::array<Poly1, 2> num_shear;  // numerator of the shear, linear
    std::array<double, 2> tang2;     // squared tangent length, constant
    for (int t = 0; t < 2; ++t) {
        BilinearPatch g = frame.framed_patch(domain, t);
        Vec2 b = g.coef_b(), c = g.coef_c(), dd = g.coef_d();
        // d1 g(0,xi) = b + dd*xi,  d2 g(0,xi) = c
        d[t] = Poly1::linear(b[0] * c[1] - b[1] * c[0], dd[0] * c[1] - dd[1] * c[0]);
        num_shear[t] = Poly1::linear(b.dot(c), dd.dot(c));
        tang2[t] = c.squaredNorm();
    }

    GluingData g;
    double numer = (d[1] - d[0]).integral01();
    double denom = (d[0] * d[0] + d[1] * d[1]).integral01();
    g.lambda1 = numer / denom;
    for (int t = 0; t < 2; ++t) {
        g.alpha[t] = d[t] * g.lambda1;
        g.beta_side[t] = num_shear[t] * (1.0 / tang2[t]);
    }
    for (double xi : {0.0, 1.0}) {
        if (!(g.alpha[0](xi) < 0.0))
            throw GeometryError("gluing sign condition violated: alpha0(" + std::to_string(xi) +
                                ") = " + std::to_string(g.alpha[0](xi)) + " is not negative");
        if (!(g.alpha[1](xi) > 0.0))
            throw GeometryError("gluing sign condition violated: alpha1(" + std::to_string(xi) +
                                ") = " + std::to_string(g.alpha[1](xi)) + " is not positive");
    }

    BilinearPatch g0 = frame.framed_patch(domain, 0);
    BilinearPatch g1 = frame.framed_patch(domain, 1);
    Vec2 b0 = g0.coef_b(), d0 = g0.coef_d(), b1 = g1.coef_b(), d1 = g1.coef_d();
    // det(d1 g0(0,xi), d1 g1(0,xi)) is quadratic in xi
    Poly1 cr({b0[0] * b1[1] - b0[1] * b1[0],
              b0[0] * d1[1] - b0[1] * d1[0] + d0[0] * b1[1] - d0[1] * b1[0],
              d0[0] * d1[1] - d0[1] * d1[0]});
    g.beta = cr * g.lambda1;

    Poly1 split = g.alpha[0] * g.beta_side[1] - g.alpha[1] * g.beta_side[0];
    Poly1 diff = g.beta - split;
    double scale = 1.0;
    for (int i = 0; i <= g.beta.degree(); ++i) scale = std::max(scale, std::abs(g.beta.coeff(i)));
    for (int i = 0; i <= diff.degree(); ++i)
        if (std::abs(diff.coeff(i)) > 1e-12 * scale)
            throw NumericalError("gluing split identity violated beyond tolerance");
    return g;
}

// --------------------------------------------------------------- RationalJet

double RationalJet::eval(double x) const {
    return num(x) / std::pow(den_base(x), den_pow);
}

RationalJet RationalJet::operator*(const RationalJet& o) const {
    return {num * o.num, den_base, den_pow + o.den_pow};
}

RationalJet RationalJet::operator*(double s) const { return {num * s, den_base, den_pow}; }

RationalJet RationalJet::operator+(const RationalJet& o) const {
    int p = std::max(den_pow, o.den_pow);
    Poly1 a = num, b = o.num;
    for (int i = den_pow; i < p; ++i) a = a * den_base;
    for (int i = o.den_pow; i < p; ++i) b = b * den_base;
    return {a + b, den_base, p};
}

// --------------------------------------------------------------------- jets

namespace {

RationalJet log_slope_factor(const GluingData& g) {  // -alpha0'/alpha0
    return {g.alpha[0].derivative() * (-1.0), g.alpha[0], 1};
}

RationalJet shear_slope_factor(const GluingData& g) {
    // -(alpha0*beta0' - alpha0'*beta0)/alpha0
    Poly1 w = g.alpha[0] * g.beta_side[0].derivative() - g.alpha[0].derivative() * g.beta_side[0];
    return {w * (-1.0), g.alpha[0], 1};
}

}  // namespace

std::vector<ReparamJet> jets_recursive(const GluingData& g, int s) {
    if (s < 1) throw ParameterError("jet order must be >= 1");
    std::vector<ReparamJet> jets;
    jets.push_back({{g.alpha[1], g.alpha[0], 1}, {g.beta, g.alpha[0], 1}});
    RationalJet th = log_slope_factor(g);
    RationalJet mu = shear_slope_factor(g);
    for (int l = 2; l <= s; ++l) {
        RationalJet cl = RationalJet::zero(g.alpha[0]);
        for (int i = 1; i <= l - 1; ++i)
            cl = cl + jets[i - 1].transversal * jets[l - i - 1].tangential * binomial(l, i);
        jets.push_back({th * cl, mu * cl});
    }
    return jets;
}

double narayana(int m1, int m2) {
    return binomial(m1, m2) * binomial(m1, m2 - 1) / double(m1);
}

ReparamJet jets_closed_form(const GluingData& g, int l) {
    if (l < 2) throw ParameterError("closed form applies to orders >= 2");
    const Poly1& a0 = g.alpha[0];
    const Poly1& a1 = g.alpha[1];
    Poly1 th_num = a0.derivative() * (-1.0);  // log-slope numerator, over alpha0
    Poly1 mu_num =
        (a0 * g.beta_side[0].derivative() - a0.derivative() * g.beta_side[0]) * (-1.0);
    // sum_j N(l-1, j+1) (mu a1)^j (th beta)^(l-2-j), folded over alpha0^(l-2)
    Poly1 sum;
    for (int j = 0; j <= l - 2; ++j) {
        Poly1 term = Poly1::constant(narayana(l - 1, j + 1));
        term = term * (mu_num * a1).pow(j);
        term = term * (th_num * g.beta).pow(l - 2 - j);
        sum = sum + term;
    }
    Poly1 lead = a1 * g.beta * factorial(l);
    RationalJet tr{lead * th_num * sum, a0, 2 * l - 1};
    RationalJet tg{lead * mu_num * sum, a0, 2 * l - 1};
    return {tr, tg};
}

ChainRuleCoefficients chain_rule_coefficients(const std::vector<ReparamJet>& jets, int l) {
    if (int(jets.size()) < l) throw ParameterError("jets available up to insufficient order");
    const Poly1& base = jets[0].transversal.den_base;
    ChainRuleCoefficients out;

    // Enumerate multiplicity vectors (i_1..i_l), (j_1..j_l) >= 0 with
    // sum rho*(i_rho + j_rho) = l, by depth-first search over rho.
    std::vector<int> iv(l + 1, 0), jv(l + 1, 0);
    std::function<void(int, int)> rec = [&](int rho, int remaining) {
        if (rho > l) {
            if (remaining != 0) return;
            int s1 = 0, s2 = 0;
            double denom = 1.0;
            RationalJet prod{Poly1::constant(1.0), base, 0};
            for (int r = 1; r <= l; ++r) {
                s1 += iv[r];
                s2 += jv[r];
                denom *= std::pow(factorial(r), iv[r] + jv[r]) * factorial(iv[r]) * factorial(jv[r]);
                for (int m = 0; m < iv[r]; ++m) prod = prod * jets[r - 1].transversal;
                for (int m = 0; m < jv[r]; ++m) prod = prod * jets[r - 1].tangential;
            }
            if (s1 + s2 == 0) return;
            prod = prod * (factorial(l) / denom);
            auto key = std::make_pair(s1, s2);
            auto it = out.find(key);
            if (it == out.end())
                out.emplace(key, prod);
            else
                it->second = it->second + prod;
            return;
        }
        for (int i = 0; rho * i <= remaining; ++i)
            for (int j = 0; rho * (i + j) <= remaining; ++j) {
                iv[rho] = i;
                jv[rho] = j;
                rec(rho + 1, remaining - rho * (i + j));
            }
        iv[rho] = jv[rho] = 0;
    };
    rec(1, l);
    return out;
}

InterfaceJets make_interface_jets(const MultiPatchDomain& domain, const EdgeFrame& frame, int s) {
    InterfaceJets ij;
    ij.gluing = compute_gluing(domain, frame);
    ij.jets = jets_recursive(ij.gluing, std::max(1, s));
    for (int l = 1; l <= std::max(1, s); ++l)
        ij.chain.push_back(chain_rule_coefficients(ij.jets, l));
    return ij;
}

// ----------------------------------------------------------------- residual

double interface_partial(const SplineSpace1D& sp, const Eigen::MatrixXd& coef, int a, int b,
                         double u) {
    const int p = sp.degree();
    std::vector<double> row(p + 1), col(p + 1);
    int f0 = sp.eval_active(0.0, a, row.data());
    int fu = sp.eval_active(u, b, col.data());
    double sum = 0.0;
    for (int i = 0; i <= p; ++i) {
        if (row[i] == 0.0) continue;
        double inner = 0.0;
        for (int j = 0; j <= p; ++j) inner += coef(f0 + i, fu + j) * col[j];
        sum += row[i] * inner;
    }
    return sum;
}

ResidualSample gs_residual(const SplineSpace1D& sp, const Eigen::MatrixXd& f0,
                           const Eigen::MatrixXd& f1, const InterfaceJets& ij, int l, double u) {
    ResidualSample out;
    if (l == 0) {
        double v1 = interface_partial(sp, f1, 0, 0, u);
        double v0 = interface_partial(sp, f0, 0, 0, u);
        out.residual = v1 - v0;
        out.scale = std::max(std::abs(v1), std::abs(v0));
        return out;
    }
    double lhs = interface_partial(sp, f1, l, 0, u);
    out.scale = std::abs(lhs);
    double sum = 0.0;
    for (const auto& [key, coefficient] : ij.chain[l - 1]) {
        double term = coefficient.eval(u) * interface_partial(sp, f0, key.first, key.second, u);
        out.scale = std::max(out.scale, std::abs(term));
        sum += term;
    }
    out.residual = lhs - sum;
    return out;
}

std::vector<double> chebyshev_samples(int count) {
    std::vector<double> xs(count);
    for (int i = 0; i < count; ++i)
        xs[i] = 0.5 - 0.5 * std::cos(M_PI * (2.0 * i + 1.0) / (2.0 * count));
    return xs;
}

}  // namespace css
