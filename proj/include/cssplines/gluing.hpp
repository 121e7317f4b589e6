#pragma once

#include <Eigen/Dense>
#include <map>
#include <vector>

#include "cssplines/bspline.hpp"
#include "cssplines/geometry.hpp"

namespace css {

/// Per-interface gluing polynomials in the edge frame. Side 0 is the patch
/// with the negative interface Jacobian determinant, so alpha[0] < 0 and
/// alpha[1] > 0 on [0,1].
struct GluingData {
    std::array<Poly1, 2> alpha;      // linear, scaled Jacobian determinants
    std::array<Poly1, 2> beta_side;  // linear interface shear per side
    Poly1 beta;                      // quadratic, alpha0*beta1 - alpha1*beta0
    double lambda1 = 1.0;
};

GluingData compute_gluing(const MultiPatchDomain& domain, const EdgeFrame& frame);

/// Rational function num / alpha0^den_pow on [0,1]; the denominator base
/// never vanishes there for regular gluing data.
struct RationalJet {
    Poly1 num;
    Poly1 den_base;
    int den_pow = 0;

    double eval(double x) const;
    RationalJet operator*(const RationalJet& o) const;
    RationalJet operator*(double s) const;
    RationalJet operator+(const RationalJet& o) const;
    static RationalJet zero(const Poly1& base) { return {Poly1(), base, 0}; }
};

/// Transversal jets of the interface reparameterization at one order:
/// derivatives of the two components of the reparameterization map.
struct ReparamJet {
    RationalJet transversal;  // jet of the crossing coordinate
    RationalJet tangential;   // jet of the along-edge coordinate
};

/// Orders 1..s via the recursion built on the gluing polynomials.
std::vector<ReparamJet> jets_recursive(const GluingData& g, int s);

/// Narayana-number closed form for one order l >= 2.
ReparamJet jets_closed_form(const GluingData& g, int l);

double narayana(int m1, int m2);

/// Coefficients of the pure transversal derivative of order l of a
/// composition with the reparameterization, keyed by the mixed-partial
/// multi-index (s1, s2), 1 <= s1+s2 <= l (generalized chain rule).
using ChainRuleCoefficients = std::map<std::pair<int, int>, RationalJet>;
ChainRuleCoefficients chain_rule_coefficients(const std::vector<ReparamJet>& jets, int l);

/// Everything needed to test order-l matching across one interface.
struct InterfaceJets {
    GluingData gluing;
    std::vector<ReparamJet> jets;                 // orders 1..s
    std::vector<ChainRuleCoefficients> chain;     // chain[l-1] for l = 1..s
};
InterfaceJets make_interface_jets(const MultiPatchDomain& domain, const EdgeFrame& frame, int s);

/// d1^a d2^b f(0, u) for a tensor-product spline coefficient matrix
/// (row index = transversal direction).
double interface_partial(const SplineSpace1D& sp, const Eigen::MatrixXd& coef, int a, int b,
                         double u);

struct ResidualSample {
    double residual = 0.0;
    double scale = 0.0;  // largest magnitude among the matched terms
};

/// Order-l matching residual at parameter u: zero iff the two edge-frame
/// coefficient matrices glue with order-l geometric continuity at u.
ResidualSample gs_residual(const SplineSpace1D& sp, const Eigen::MatrixXd& f0,
                           const Eigen::MatrixXd& f1, const InterfaceJets& ij, int l, double u);

/// Chebyshev-distributed interior sample points, avoiding the endpoints.
std::vector<double> chebyshev_samples(int count);

}  // namespace css
