#include "q3/polyalg.hpp"

#include "q3/errors.hpp"

#include <functional>

namespace q3 {

namespace sring {

SElem zero() { return SElem{}; }

SElem constant(const KPoly& a) {
    SElem r;
    r.c[0] = a;
    return r;
}

SElem y(const InputField& K) {
    SElem r;
    r.c[1] = kpoly::constant(K, K.one());
    return r;
}

bool is_zero(const SElem& a) { return a.c[0].empty() && a.c[1].empty() && a.c[2].empty(); }

SElem reduce(const QuarticCurve& C, std::vector<KPoly> yc) {
    const InputField& K = *C.K;
    while (yc.size() > 3) {
        size_t n = yc.size() - 1;
        KPoly top = yc.back();
        yc.pop_back();
        if (top.empty()) continue;
        yc[n - 1] = kpoly::sub(K, yc[n - 1], kpoly::mul(K, top, C.A2));
        yc[n - 2] = kpoly::sub(K, yc[n - 2], kpoly::mul(K, top, C.A1));
        yc[n - 3] = kpoly::sub(K, yc[n - 3], kpoly::mul(K, top, C.A0));
    }
    SElem r;
    for (size_t i = 0; i < yc.size(); ++i) {
        kpoly::trim(K, yc[i]);
        r.c[i] = yc[i];
    }
    return r;
}

SElem add(const QuarticCurve& C, const SElem& a, const SElem& b) {
    SElem r;
    for (int i = 0; i < 3; ++i) r.c[i] = kpoly::add(*C.K, a.c[i], b.c[i]);
    return r;
}

SElem sub(const QuarticCurve& C, const SElem& a, const SElem& b) {
    SElem r;
    for (int i = 0; i < 3; ++i) r.c[i] = kpoly::sub(*C.K, a.c[i], b.c[i]);
    return r;
}

SElem scale(const QuarticCurve& C, const SElem& a, const KPoly& p) {
    SElem r;
    for (int i = 0; i < 3; ++i) r.c[i] = kpoly::mul(*C.K, a.c[i], p);
    return r;
}

SElem mul(const QuarticCurve& C, const SElem& a, const SElem& b) {
    std::vector<KPoly> p(5);
    for (int i = 0; i < 3; ++i) {
        if (a.c[i].empty()) continue;
        for (int j = 0; j < 3; ++j) {
            if (b.c[j].empty()) continue;
            p[i + j] = kpoly::add(*C.K, p[i + j], kpoly::mul(*C.K, a.c[i], b.c[j]));
        }
    }
    return reduce(C, p);
}

SElem Fy(const QuarticCurve& C) {
    const InputField& K = *C.K;
    SElem r;
    r.c[0] = C.A1;
    r.c[1] = kpoly::scale(K, C.A2, K.from_mpq(2));
    r.c[2] = kpoly::constant(K, K.from_mpq(3));
    return r;
}

SElem Fx(const QuarticCurve& C) {
    const InputField& K = *C.K;
    SElem r;
    r.c[0] = kpoly::derivative(K, C.A0);
    r.c[1] = kpoly::derivative(K, C.A1);
    r.c[2] = kpoly::derivative(K, C.A2);
    return r;
}

}  // namespace sring

namespace {

using KMat = std::vector<std::vector<KPoly>>;

KPoly det(const InputField& K, const KMat& M) {
    size_t n = M.size();
    if (n == 1) return M[0][0];
    if (n == 2) return kpoly::sub(K, kpoly::mul(K, M[0][0], M[1][1]), kpoly::mul(K, M[0][1], M[1][0]));
    KPoly r;
    for (size_t j = 0; j < n; ++j) {
        if (M[0][j].empty()) continue;
        KMat minor;
        for (size_t i = 1; i < n; ++i) {
            std::vector<KPoly> row;
            for (size_t k = 0; k < n; ++k)
                if (k != j) row.push_back(M[i][k]);
            minor.push_back(row);
        }
        KPoly t = kpoly::mul(K, M[0][j], det(K, minor));
        r = (j % 2 == 0) ? kpoly::add(K, r, t) : kpoly::sub(K, r, t);
    }
    return r;
}

// Reduction of a polynomial in y modulo a monic f (coefficient lists in y).
std::vector<KPoly> reduce_mod(const InputField& K, std::vector<KPoly> g, const std::vector<KPoly>& f) {
    size_t n = f.size() - 1;
    while (g.size() > n) {
        KPoly top = g.back();
        g.pop_back();
        size_t m = g.size();  // index of the removed term
        if (top.empty()) continue;
        for (size_t j = 0; j < n; ++j) g[m - n + j] = kpoly::sub(K, g[m - n + j], kpoly::mul(K, top, f[j]));
    }
    g.resize(n);
    return g;
}

KMat mult_matrix(const InputField& K, const std::vector<KPoly>& f, const std::vector<KPoly>& g) {
    size_t n = f.size() - 1;
    KMat M(n, std::vector<KPoly>(n));
    std::vector<KPoly> cur = reduce_mod(K, g, f);
    for (size_t j = 0; j < n; ++j) {
        for (size_t i = 0; i < n; ++i) M[i][j] = cur[i];
        // multiply by y
        std::vector<KPoly> nx(n + 1);
        for (size_t i = 0; i < n; ++i) nx[i + 1] = cur[i];
        cur = reduce_mod(K, nx, f);
    }
    return M;
}

std::vector<KPoly> curve_ycoeffs(const QuarticCurve& C) {
    return {C.A0, C.A1, C.A2, kpoly::constant(*C.K, C.K->one())};
}

std::vector<KPoly> svec(const SElem& s) { return {s.c[0], s.c[1], s.c[2]}; }

}  // namespace

KPoly resultant_y(const InputField& K, const std::vector<KPoly>& f, const std::vector<KPoly>& g) {
    if (f.size() < 2) throw InvalidUse("resultant with a constant polynomial");
    const KPoly& lc = f.back();
    if (!(lc.size() == 1 && lc[0] == K.one())) throw InvalidUse("resultant_y requires f monic in y");
    std::vector<KPoly> gg = g;
    if (gg.empty()) gg.push_back(KPoly{});
    return det(K, mult_matrix(K, f, gg));
}

KPoly discriminant_y(const QuarticCurve& C) {
    const InputField& K = *C.K;
    auto m = [&](const KPoly& a, const KPoly& b) { return kpoly::mul(K, a, b); };
    auto s = [&](const KPoly& a, long q) { return kpoly::scale(K, a, K.from_mpq(q)); };
    const KPoly &a = C.A2, &b = C.A1, &c = C.A0;
    KPoly d = s(m(m(a, b), c), 18);
    d = kpoly::sub(K, d, s(m(m(m(a, a), a), c), 4));
    d = kpoly::add(K, d, m(m(a, a), m(b, b)));
    d = kpoly::sub(K, d, s(m(m(b, b), b), 4));
    d = kpoly::sub(K, d, s(m(c, c), 27));
    if (d.empty()) throw NotGenericallyEtale("the discriminant of F in y vanishes identically");
    return d;
}

namespace sring {

SFrac normalize(const QuarticCurve& C, SFrac g) {
    const InputField& K = *C.K;
    if (is_zero(g.num)) return SFrac{zero(), 0};
    if (g.k == 0) return g;
    KMat M = mult_matrix(K, curve_ycoeffs(C), svec(Fy(C)));
    KPoly nm = det(K, M);
    // adjugate column 0: cofactors of row 0
    SElem Dstar;
    for (int i = 0; i < 3; ++i) {
        KMat minor;
        for (int r = 1; r < 3; ++r) {
            std::vector<KPoly> row;
            for (int k = 0; k < 3; ++k)
                if (k != i) row.push_back(M[r][k]);
            minor.push_back(row);
        }
        KPoly cf = det(K, minor);
        Dstar.c[i] = (i % 2 == 0) ? cf : kpoly::neg(K, cf);
    }
    while (g.k > 0) {
        SElem t = mul(C, g.num, Dstar);
        SElem q;
        bool ok = true;
        for (int i = 0; i < 3 && ok; ++i) {
            KPoly qq, rr;
            kpoly::divrem(K, t.c[i], nm, qq, rr);
            if (!rr.empty()) ok = false;
            q.c[i] = qq;
        }
        if (!ok) break;
        g.num = q;
        --g.k;
    }
    return g;
}

TElem eval(const QuarticCurve& C, const SElem& g, const TElem& x0, const TElem& y0, long W) {
    TowerPtr t = common_tower(x0.tower(), y0.tower());
    TElem r(t), yp = TElem::from_int(t, 1);
    for (int i = 0; i < 3; ++i) {
        if (!g.c[i].empty()) r += tpoly::eval(kpoly::embed(*C.K, g.c[i], t, W), x0) * yp;
        if (i < 2) yp = yp * y0;
    }
    return r;
}

TElem eval(const QuarticCurve& C, const SFrac& g, const TElem& x0, const TElem& y0, long W) {
    TElem n = eval(C, g.num, x0, y0, W);
    if (g.k == 0) return n;
    TElem d = eval(C, Fy(C), x0, y0, W);
    return n * d.inverse(W + 4 * g.k * std::abs(d.val().ceil_long()) + 8).pow(g.k);
}

}  // namespace sring

RatFunc ratfunc_mul(const InputField& K, const RatFunc& a, const RatFunc& b) {
    RatFunc r{kpoly::mul(K, a.num, b.num), kpoly::mul(K, a.den, b.den)};
    if (r.num.empty()) return RatFunc{{}, kpoly::constant(K, K.one())};
    KPoly g = kpoly::gcd(K, r.num, r.den);
    r.num = kpoly::exact_quo(K, r.num, g);
    r.den = kpoly::exact_quo(K, r.den, g);
    KElem li = K.inv(r.den.back());
    r.num = kpoly::scale(K, r.num, li);
    r.den = kpoly::scale(K, r.den, li);
    return r;
}

RatFunc norm_cubic(const QuarticCurve& C, const SFrac& g) {
    const InputField& K = *C.K;
    KPoly n = resultant_y(K, curve_ycoeffs(C), svec(g.num));
    KPoly d = kpoly::constant(K, K.one());
    if (g.k > 0) d = kpoly::pow(K, resultant_y(K, curve_ycoeffs(C), svec(sring::Fy(C))), g.k);
    return ratfunc_mul(K, RatFunc{n, kpoly::constant(K, K.one())}, RatFunc{kpoly::constant(K, K.one()), d});
}

namespace {

using TS = std::vector<SElem>;  // polynomial in t over S

TS ts_add(const QuarticCurve& C, const TS& a, const TS& b) {
    TS r(std::max(a.size(), b.size()));
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] = sring::add(C, r[i], b[i]);
    return r;
}

TS ts_mul(const QuarticCurve& C, const TS& a, const TS& b) {
    TS r(a.size() + b.size() - 1);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] = sring::add(C, r[i + j], sring::mul(C, a[i], b[j]));
    return r;
}

TS ts_smul(const QuarticCurve& C, const SElem& s, const TS& a) {
    TS r;
    for (const auto& x : a) r.push_back(sring::mul(C, s, x));
    return r;
}

TS ts_taylor(const QuarticCurve& C, const KPoly& p, int maxdeg) {
    TS r;
    for (int l = 0; l <= maxdeg; ++l) r.push_back(sring::constant(kpoly::taylor_coeff(*C.K, p, l)));
    return r;
}

SElem sconst(const QuarticCurve& C, long n) { return sring::constant(kpoly::constant(*C.K, C.K->from_mpq(n))); }

}  // namespace

TailTransform transform_tail(const QuarticCurve& C) {
    SElem D = sring::Fy(C), P = sring::Fx(C);
    SElem Y;
    Y = sring::y(*C.K);
    TS U{sring::mul(C, Y, D), sring::sub(C, sring::zero(), P)};
    TS A2 = ts_taylor(C, C.A2, 2), A1 = ts_taylor(C, C.A1, 3), A0 = ts_taylor(C, C.A0, 4);
    SElem D2 = sring::mul(C, D, D), D3 = sring::mul(C, D2, D);
    TS U2 = ts_mul(C, U, U), U3 = ts_mul(C, U2, U);
    // Ã = (3U + D Ã2)/D
    TS Ah = ts_add(C, ts_smul(C, sconst(C, 3), U), ts_smul(C, D, A2));
    // B̃ = (3U^2 + 2 U D Ã2 + D^2 Ã1)/D^2
    TS Bh = ts_add(C, ts_smul(C, sconst(C, 3), U2), ts_smul(C, sring::mul(C, sconst(C, 2), D), ts_mul(C, U, A2)));
    Bh = ts_add(C, Bh, ts_smul(C, D2, A1));
    // C̃ = (U^3 + Ã2 U^2 D + Ã1 U D^2 + Ã0 D^3)/D^3
    TS Ch = ts_add(C, U3, ts_smul(C, D, ts_mul(C, A2, U2)));
    Ch = ts_add(C, Ch, ts_smul(C, D2, ts_mul(C, A1, U)));
    Ch = ts_add(C, Ch, ts_smul(C, D3, A0));
    TailTransform tt;
    auto get = [](const TS& v, size_t i) { return i < v.size() ? v[i] : SElem{}; };
    for (int l = 0; l < 3; ++l) tt.a[l] = sring::normalize(C, SFrac{get(Ah, l), 1});
    for (int l = 0; l < 4; ++l) tt.b[l] = sring::normalize(C, SFrac{get(Bh, l), 2});
    for (int l = 0; l < 5; ++l) tt.c[l] = sring::normalize(C, SFrac{get(Ch, l), 3});
    return tt;
}

std::vector<KElem> roots_in_field(const InputField& K, const std::vector<KElem>& f, const mpz_class& height) {
    std::vector<KElem> out;
    long W = 64;
    TPoly fp;
    for (const auto& c : f) fp.push_back(tpoly::exact_rep(K.embed(c, K.completion(), W), W));
    RootOptions ro;
    ro.W = W;
    for (const auto& lf : factor_completion(fp, ro)) {
        if (tpoly::degree(lf.chi) != 1) continue;
        TElem c = -lf.chi[0];
        if (c.is_exact()) c = c.with_guarantee(ValRational(W));
        auto r = K.reconstruct(c, height);
        if (!r) continue;
        KElem acc = K.zero();
        for (size_t i = f.size(); i-- > 0;) acc = K.add(K.mul(acc, *r), f[i]);
        if (K.is_zero(acc)) out.push_back(*r);
    }
    return out;
}

namespace {

// A root g of F in K(x) lies in K[x] (F is monic) and has degree <= 2.
// It is interpolated from roots of fibres over three rational points.
void check_no_root(const QuarticCurve& C, const KPoly& disc) {
    const InputField& K = *C.K;
    std::vector<KElem> xs;
    std::vector<std::vector<KElem>> rs;
    for (long a = 0; xs.size() < 3; a = a > 0 ? -a : -a + 1) {
        KElem xa = K.from_mpq(a);
        if (K.is_zero(kpoly::eval(K, disc, xa))) continue;
        std::vector<KElem> fib{kpoly::eval(K, C.A0, xa), kpoly::eval(K, C.A1, xa), kpoly::eval(K, C.A2, xa), K.one()};
        auto r = roots_in_field(K, fib);
        if (r.empty()) return;
        xs.push_back(xa);
        rs.push_back(r);
    }
    KPoly X = kpoly::x(K);
    for (const auto& r0 : rs[0])
        for (const auto& r1 : rs[1])
            for (const auto& r2 : rs[2]) {
                const KElem* rv[3] = {&r0, &r1, &r2};
                KPoly g;
                for (int i = 0; i < 3; ++i) {
                    KPoly li = kpoly::constant(K, *rv[i]);
                    for (int j = 0; j < 3; ++j) {
                        if (j == i) continue;
                        KPoly lin = kpoly::sub(K, X, kpoly::constant(K, xs[j]));
                        li = kpoly::scale(K, kpoly::mul(K, li, lin), K.inv(K.sub(xs[i], xs[j])));
                    }
                    g = kpoly::add(K, g, li);
                }
                KPoly v = kpoly::add(K, kpoly::mul(K, kpoly::add(K, g, C.A2), kpoly::mul(K, g, g)),
                                     kpoly::add(K, kpoly::mul(K, C.A1, g), C.A0));
                if (v.empty())
                    throw ReducibleCover("F has the root y = " + kpoly::str(K, g) + " in K(x)");
            }
}

}  // namespace

void check_curve(const QuarticCurve& C) {
    if (kpoly::deg(C.A2) > 2 || kpoly::deg(C.A1) > 3 || kpoly::deg(C.A0) > 4)
        throw ParseError("normal form degrees must satisfy deg A2 <= 2, deg A1 <= 3, deg A0 <= 4");
    check_no_root(C, discriminant_y(C));
}

namespace {

// Certifies that x is zero at current precision and replaces it by exact zero.
void force_zero(TElem& x, const char* what) {
    if (x.certified() && !x.rep_is_zero())
        throw TransformFailed(std::string("expected vanishing of ") + what + " is contradicted");
    x = TElem(x.tower());
}

TPoly tp_add(const TPoly& a, const TPoly& b) {
    TowerPtr t = common_tower(tpoly::tower_of(a), tpoly::tower_of(b));
    TPoly r(std::max(a.size(), b.size()), TElem(t));
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return r;
}

TPoly tp_scale(const TPoly& a, const TElem& c) {
    TPoly r;
    for (const auto& x : a) r.push_back(x * c);
    return r;
}

TPoly tp_mono(const TElem& c, int k) {
    TPoly r(k + 1, TElem(c.tower()));
    r[k] = c;
    return r;
}

}  // namespace

InteriorTransform transform_interior(const QuarticCurve& C, const TElem& x0, const InteriorOptions& opt) {
    const InputField& K = *C.K;
    long W = opt.W;
    TowerPtr T = common_tower(K.completion(), x0.tower());
    TElem x = x0.promote(T);
    TPoly A2 = tpoly::taylor_shift(kpoly::embed(K, C.A2, T, W), x);
    TPoly A1 = tpoly::taylor_shift(kpoly::embed(K, C.A1, T, W), x);
    TPoly A0 = tpoly::taylor_shift(kpoly::embed(K, C.A0, T, W), x);
    A2.resize(3, TElem(T));
    A1.resize(4, TElem(T));
    A0.resize(5, TElem(T));
    InteriorTransform it;
    it.x0 = x;
    TElem y0;
    if (opt.at_branch) {
        TElem a = A2[0], b = A1[0], c = A0[0];
        TElem q = a * a - b.mul_z3(z3_from_mpz(3));
        if (q.certified() && !q.rep_is_zero()) {
            TElem num = c.mul_z3(z3_from_mpz(9)) - a * b;
            y0 = num * q.mul_z3(z3_from_mpz(2)).inverse(W + 2 * std::abs(q.val().ceil_long()) + 8);
            it.fiber_multiplicity = 2;
        } else {
            y0 = a.mul_z3(Z3{-1, -1});
            it.fiber_multiplicity = 3;
        }
    } else {
        TPoly fib{A0[0], A1[0], A2[0], TElem::from_int(T, 1)};
        RootOptions ro;
        ro.W = W;
        ro.alt = opt.alt;
        ro.depth_cap = opt.depth_cap;
        ro.label = "y";
        y0 = adjoin_root(fib, ro);
    }
    TowerPtr T1 = y0.tower();
    A2 = tpoly::promote(A2, T1);
    A1 = tpoly::promote(A1, T1);
    A0 = tpoly::promote(A0, T1);
    TElem three = TElem::from_int(T1, 3);
    // A = 3y0 + Ã2, B = 3y0^2 + 2y0 Ã2 + Ã1, C = F(x0 + t, y0)
    TPoly A = A2;
    A[0] += three * y0;
    TPoly B = tp_add(tp_scale(A2, y0.mul_z3(z3_from_mpz(2))), A1);
    B[0] += three * y0 * y0;
    TPoly Cc = tp_add(tp_add(tp_scale(A2, y0 * y0), tp_scale(A1, y0)), A0);
    Cc[0] += y0 * y0 * y0;
    force_zero(Cc[0], "F(x0, y0)");
    if (it.fiber_multiplicity >= 2) force_zero(B[0], "F_y(x0, y0)");
    if (it.fiber_multiplicity >= 3) force_zero(A[0], "F_yy(x0, y0)/2");
    // v^3 + a1 v^2 + b2 v + c3 = 0
    TElem v;
    if (!Cc[3].certified() || Cc[3].rep_is_zero()) {
        v = TElem(T1);
    } else {
        TPoly vc{Cc[3], B[2], A[1], TElem::from_int(T1, 1)};
        RootOptions ro;
        ro.W = W;
        ro.alt = opt.alt;
        ro.depth_cap = opt.depth_cap;
        ro.label = "v";
        v = adjoin_root(vc, ro);
    }
    TowerPtr T2 = v.tower();
    A = tpoly::promote(A, T2);
    B = tpoly::promote(B, T2);
    Cc = tpoly::promote(Cc, T2);
    // T = Z + v t
    TElem v2 = v * v;
    TPoly An = tp_add(A, tp_mono(v.mul_z3(z3_from_mpz(3)), 1));
    TPoly Bn = tp_add(tp_add(B, tp_scale(tpoly::mul(A, tp_mono(v, 1)), TElem::from_int(T2, 2))),
                      tp_mono(v2.mul_z3(z3_from_mpz(3)), 2));
    TPoly Cn = tp_add(tp_add(Cc, tpoly::mul(B, tp_mono(v, 1))),
                      tp_add(tpoly::mul(A, tp_mono(v2, 2)), tp_mono(v2 * v, 3)));
    An.resize(3, TElem(T2));
    Bn.resize(4, TElem(T2));
    Cn.resize(5, TElem(T2));
    force_zero(Cn[0], "C(0)");
    force_zero(Cn[3], "the t^3 coefficient of C");
    it.A = An;
    it.B = Bn;
    it.C = Cn;
    it.y0 = y0.promote(T2);
    it.v = v;
    it.x0 = x.promote(T2);
    it.convention = "z=(y-y0)-v*t";
    return it;
}

}  // namespace q3
