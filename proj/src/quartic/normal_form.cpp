#include "q3/errors.hpp"
#include "q3/quartic.hpp"

#include <map>

namespace q3 {

int TernaryQuartic::index(int i, int j) {
    // blocks for i = 4, 3, ..., 0 have sizes 1, 2, ..., 5
    int start = 0;
    for (int ii = 4; ii > i; --ii) start += 5 - ii;
    return start + (4 - i - j);
}

namespace {

using Mono = std::array<int, 3>;
using TriPoly = std::map<Mono, KElem>;

void tri_add(const InputField& K, TriPoly& acc, const Mono& m, const KElem& c) {
    if (K.is_zero(c)) return;
    auto it = acc.find(m);
    if (it == acc.end()) {
        acc.emplace(m, c);
        return;
    }
    it->second = K.add(it->second, c);
    if (K.is_zero(it->second)) acc.erase(it);
}

TriPoly tri_mul(const InputField& K, const TriPoly& a, const TriPoly& b) {
    TriPoly r;
    for (const auto& [ma, ca] : a)
        for (const auto& [mb, cb] : b)
            tri_add(K, r, Mono{ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2]}, K.mul(ca, cb));
    return r;
}

TriPoly linear(const InputField& K, const std::array<KElem, 3>& row) {
    TriPoly r;
    for (int v = 0; v < 3; ++v) {
        Mono m{0, 0, 0};
        m[v] = 1;
        tri_add(K, r, m, row[v]);
    }
    return r;
}

using Mat = std::array<std::array<KElem, 3>, 3>;

// F(M v) as a polynomial in the new variables.
TriPoly substitute(const InputField& K, const TriPoly& F, const Mat& M) {
    std::array<TriPoly, 3> L;
    for (int r = 0; r < 3; ++r) L[r] = linear(K, M[r]);
    TriPoly out;
    for (const auto& [m, c] : F) {
        TriPoly term{{Mono{0, 0, 0}, c}};
        for (int v = 0; v < 3; ++v)
            for (int e = 0; e < m[v]; ++e) term = tri_mul(K, term, L[v]);
        for (const auto& [mm, cc] : term) tri_add(K, out, mm, cc);
    }
    return out;
}

Mat mat_mul(const InputField& K, const Mat& a, const Mat& b) {
    Mat r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            KElem s = K.zero();
            for (int k = 0; k < 3; ++k) s = K.add(s, K.mul(a[i][k], b[k][j]));
            r[i][j] = s;
        }
    return r;
}

KElem det3(const InputField& K, const Mat& m) {
    auto t = [&](int a, int b, int c) { return K.mul(m[0][a], K.mul(m[1][b], m[2][c])); };
    KElem s = K.add(t(0, 1, 2), K.add(t(1, 2, 0), t(2, 0, 1)));
    return K.sub(s, K.add(t(2, 1, 0), K.add(t(0, 2, 1), t(1, 0, 2))));
}

KElem coeff(const InputField& K, const TriPoly& F, int i, int j, int k) {
    auto it = F.find(Mono{i, j, k});
    return it == F.end() ? K.zero() : it->second;
}

Mat identity(const InputField& K) {
    Mat m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = i == j ? K.one() : K.zero();
    return m;
}

TriPoly to_tri(const TernaryQuartic& q) {
    TriPoly F;
    for (int i = 4; i >= 0; --i)
        for (int j = 4 - i; j >= 0; --j) tri_add(*q.K, F, Mono{i, j, 4 - i - j}, q.at(i, j));
    return F;
}

}  // namespace

KElem ternary_eval(const TernaryQuartic& q, const std::array<KElem, 3>& p) {
    const InputField& K = *q.K;
    KElem s = K.zero();
    for (int i = 4; i >= 0; --i)
        for (int j = 4 - i; j >= 0; --j) {
            KElem t = q.at(i, j);
            t = K.mul(t, K.mul(K.pow(p[0], i), K.mul(K.pow(p[1], j), K.pow(p[2], 4 - i - j))));
            s = K.add(s, t);
        }
    return s;
}

NormalForm normal_form(const TernaryQuartic& q, const std::array<KElem, 3>& P) {
    const InputField& K = *q.K;
    if (K.is_zero(P[0]) && K.is_zero(P[1]) && K.is_zero(P[2])) throw ParseError("point [0:0:0]");
    if (!K.is_zero(ternary_eval(q, P))) throw PointNotOnCurve("the point does not lie on the quartic");

    // columns (e_a, P, e_b) with the first invertible choice
    Mat M;
    const int choices[6][2] = {{0, 2}, {1, 2}, {0, 1}, {2, 0}, {1, 0}, {2, 1}};
    bool ok = false;
    for (const auto& ch : choices) {
        for (int r = 0; r < 3; ++r) {
            M[r][0] = r == ch[0] ? K.one() : K.zero();
            M[r][1] = P[r];
            M[r][2] = r == ch[1] ? K.one() : K.zero();
        }
        if (!K.is_zero(det3(K, M))) {
            ok = true;
            break;
        }
    }
    if (!ok) throw InvalidUse("normal_form: no invertible completion");
    TriPoly G = substitute(K, to_tri(q), M);

    KElem a130 = coeff(K, G, 1, 3, 0), a031 = coeff(K, G, 0, 3, 1);
    NormalForm nf;
    Mat M2 = identity(K);
    if (!K.is_zero(a031)) {
        // z ↦ z − (a130/a031) x
        M2[2][0] = K.neg(K.mul(a130, K.inv(a031)));
        nf.description = "point to [0:1:0], z -> z - (" + K.str(K.mul(a130, K.inv(a031))) + ")x";
    } else if (!K.is_zero(a130)) {
        M2 = Mat{};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) M2[i][j] = K.zero();
        M2[0][2] = K.one();
        M2[1][1] = K.one();
        M2[2][0] = K.one();
        nf.swapped = true;
        nf.description = "point to [0:1:0], swap x and z";
    } else {
        throw SingularAtPoint("the quartic is singular at the point");
    }
    G = substitute(K, G, M2);
    nf.M = mat_mul(K, M, M2);
    nf.scale = coeff(K, G, 0, 3, 1);
    if (!K.is_zero(coeff(K, G, 0, 4, 0)) || !K.is_zero(coeff(K, G, 1, 3, 0)))
        throw InvalidUse("normal_form: y^4 or x y^3 term survived");
    KElem inv = K.inv(nf.scale);
    std::array<KPoly, 3> A;  // coefficients of y^0, y^1, y^2
    for (int j = 0; j < 3; ++j) {
        KPoly p(5 - j, K.zero());
        for (int i = 0; i <= 4 - j; ++i) p[i] = K.mul(coeff(K, G, i, j, 4 - i - j), inv);
        kpoly::trim(K, p);
        A[j] = p;
    }
    nf.curve = QuarticCurve{q.K, A[2], A[1], A[0]};
    return nf;
}

}  // namespace q3
