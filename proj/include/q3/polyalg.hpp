#pragma once

#include "q3/kpoly.hpp"

#include <array>
#include <string>
#include <vector>

namespace q3 {

/// F = y^3 + A2 y^2 + A1 y + A0 with deg A2 <= 2, deg A1 <= 3, deg A0 <= 4.
struct QuarticCurve {
    FieldPtr K;
    KPoly A2, A1, A0;
};

/// Validates degrees, Δ_F != 0 and the absence of a root of F in K(x).
void check_curve(const QuarticCurve& C);

/// Element c0 + c1 y + c2 y^2 of S = K[x, y]/(F).
struct SElem {
    std::array<KPoly, 3> c;
};

/// num / F_y^k.
struct SFrac {
    SElem num;
    int k = 0;
};

/// Rational function num/den with den monic and gcd(num, den) = 1.
struct RatFunc {
    KPoly num, den;
};

namespace sring {
SElem zero();
SElem constant(const KPoly& a);
SElem y(const InputField& K);
SElem add(const QuarticCurve& C, const SElem& a, const SElem& b);
SElem sub(const QuarticCurve& C, const SElem& a, const SElem& b);
SElem mul(const QuarticCurve& C, const SElem& a, const SElem& b);
SElem scale(const QuarticCurve& C, const SElem& a, const KPoly& p);
bool is_zero(const SElem& a);
/// Reduces a polynomial in y (any degree, K[x] coefficients) modulo F.
SElem reduce(const QuarticCurve& C, std::vector<KPoly> ycoeffs);
SElem Fy(const QuarticCurve& C);
SElem Fx(const QuarticCurve& C);
/// Normalizes the denominator exponent by cancelling exact factors of F_y.
SFrac normalize(const QuarticCurve& C, SFrac g);
/// Value at a point (x0, y0) of the curve in a tower.
TElem eval(const QuarticCurve& C, const SFrac& g, const TElem& x0, const TElem& y0, long W);
TElem eval(const QuarticCurve& C, const SElem& g, const TElem& x0, const TElem& y0, long W);
}  // namespace sring

/// Res_y(f, g) for f monic in y; inputs are coefficient lists in y.
KPoly resultant_y(const InputField& K, const std::vector<KPoly>& f, const std::vector<KPoly>& g);
/// Δ_F by the cubic discriminant formula; throws NotGenericallyEtale if zero.
KPoly discriminant_y(const QuarticCurve& C);
RatFunc norm_cubic(const QuarticCurve& C, const SFrac& g);
/// Roots in K of a univariate polynomial over K with a squarefree image in
/// the completion (found there and reconstructed with bounded height).
std::vector<KElem> roots_in_field(const InputField& K, const std::vector<KElem>& f,
                                  const mpz_class& height = mpz_class(1000000));
RatFunc ratfunc_mul(const InputField& K, const RatFunc& a, const RatFunc& b);

/// Coefficients a_l, b_l, c_l of H(T) = F(x + t, T + u), u = y - (F_x/F_y) t.
struct TailTransform {
    std::array<SFrac, 3> a;
    std::array<SFrac, 4> b;
    std::array<SFrac, 5> c;
};

TailTransform transform_tail(const QuarticCurve& C);

struct InteriorOptions {
    long W = 64;
    bool alt = false;          // alternate choice of y0 and v
    bool at_branch = false;    // x0 is a root of Δ_F
    int depth_cap = 3;
};

/// z-polynomial z^3 + A z^2 + B z + C around a point p0 = (x0, y0).
struct InteriorTransform {
    TPoly A, B, C;  // in t = x - x0
    TElem x0, y0, v;
    int fiber_multiplicity = 1;
    std::string convention;  // "z=(y-y0)-v*t" or "z=(y-y0)+v*t"
};

InteriorTransform transform_interior(const QuarticCurve& C, const TElem& x0, const InteriorOptions& opt);

}  // namespace q3
