#include "q3/kpoly.hpp"

#include "q3/errors.hpp"

#include <algorithm>

namespace q3::kpoly {

void trim(const InputField& K, KPoly& a) {
    while (!a.empty() && K.is_zero(a.back())) a.pop_back();
}

int deg(const KPoly& a) { return static_cast<int>(a.size()) - 1; }

KPoly from_rationals(const InputField& K, const std::vector<mpq_class>& c) {
    KPoly r;
    for (const auto& q : c) r.push_back(K.from_mpq(q));
    trim(K, r);
    return r;
}

KPoly constant(const InputField& K, const KElem& c) {
    KPoly r{c};
    trim(K, r);
    return r;
}

KPoly x(const InputField& K) { return KPoly{K.zero(), K.one()}; }

KPoly add(const InputField& K, const KPoly& a, const KPoly& b) {
    KPoly r(std::max(a.size(), b.size()), K.zero());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] = K.add(r[i], b[i]);
    trim(K, r);
    return r;
}

KPoly sub(const InputField& K, const KPoly& a, const KPoly& b) { return add(K, a, neg(K, b)); }

KPoly neg(const InputField& K, const KPoly& a) {
    KPoly r;
    for (const auto& c : a) r.push_back(K.neg(c));
    return r;
}

KPoly mul(const InputField& K, const KPoly& a, const KPoly& b) {
    if (a.empty() || b.empty()) return {};
    KPoly r(a.size() + b.size() - 1, K.zero());
    for (size_t i = 0; i < a.size(); ++i) {
        if (K.is_zero(a[i])) continue;
        for (size_t j = 0; j < b.size(); ++j) r[i + j] = K.add(r[i + j], K.mul(a[i], b[j]));
    }
    trim(K, r);
    return r;
}

KPoly scale(const InputField& K, const KPoly& a, const KElem& c) {
    KPoly r;
    for (const auto& x : a) r.push_back(K.mul(x, c));
    trim(K, r);
    return r;
}

KPoly pow(const InputField& K, const KPoly& a, unsigned n) {
    KPoly r{K.one()}, b = a;
    while (n) {
        if (n & 1) r = mul(K, r, b);
        n >>= 1;
        if (n) b = mul(K, b, b);
    }
    return r;
}

void divrem(const InputField& K, const KPoly& a, const KPoly& b0, KPoly& q, KPoly& r) {
    KPoly b = b0;
    trim(K, b);
    if (b.empty()) throw InvalidUse("polynomial division by zero");
    r = a;
    trim(K, r);
    int db = deg(b);
    q.assign(std::max(deg(r) - db + 1, 0), K.zero());
    KElem li = K.inv(b.back());
    for (int k = deg(r); k >= db; --k) {
        if (K.is_zero(r[k])) continue;
        KElem c = K.mul(r[k], li);
        q[k - db] = c;
        for (int j = 0; j <= db; ++j) r[k - db + j] = K.sub(r[k - db + j], K.mul(c, b[j]));
    }
    trim(K, r);
    trim(K, q);
}

bool divides(const InputField& K, const KPoly& b, const KPoly& a) {
    KPoly q, r;
    divrem(K, a, b, q, r);
    return r.empty();
}

KPoly exact_quo(const InputField& K, const KPoly& a, const KPoly& b) {
    KPoly q, r;
    divrem(K, a, b, q, r);
    if (!r.empty()) throw InvalidUse("inexact polynomial division");
    return q;
}

KPoly monic(const InputField& K, const KPoly& a) {
    if (a.empty()) return a;
    return scale(K, a, K.inv(a.back()));
}

KPoly gcd(const InputField& K, const KPoly& a0, const KPoly& b0) {
    KPoly a = a0, b = b0;
    trim(K, a);
    trim(K, b);
    while (!b.empty()) {
        KPoly q, r;
        divrem(K, a, b, q, r);
        a = std::move(b);
        b = std::move(r);
    }
    return monic(K, a);
}

KPoly derivative(const InputField& K, const KPoly& a) {
    KPoly r;
    for (size_t i = 1; i < a.size(); ++i) r.push_back(K.scale(a[i], mpq_class(static_cast<long>(i))));
    trim(K, r);
    return r;
}

KPoly taylor_coeff(const InputField& K, const KPoly& a, int l) {
    KPoly r;
    for (int i = l; i <= deg(a); ++i) {
        mpz_class b;
        mpz_bin_uiui(b.get_mpz_t(), i, l);
        r.push_back(K.scale(a[i], mpq_class(b)));
    }
    trim(K, r);
    return r;
}

KElem eval(const InputField& K, const KPoly& a, const KElem& x) {
    KElem r = K.zero();
    for (size_t i = a.size(); i-- > 0;) r = K.add(K.mul(r, x), a[i]);
    return r;
}

KPoly squarefree_part(const InputField& K, const KPoly& a) {
    KPoly g = gcd(K, a, derivative(K, a));
    return monic(K, exact_quo(K, a, g));
}

TPoly embed(const InputField& K, const KPoly& a, const TowerPtr& t, long W) {
    TPoly r;
    for (const auto& c : a) r.push_back(K.embed(c, t, W));
    if (r.empty()) r.push_back(TElem(t));
    return r;
}

bool equal(const KPoly& a, const KPoly& b) { return a == b; }

std::string str(const InputField& K, const KPoly& a, const std::string& var) {
    std::string s;
    for (int i = deg(a); i >= 0; --i) {
        if (K.is_zero(a[i])) continue;
        std::string c = K.str(a[i]);
        bool compound = !K.is_rational_elem(a[i]);
        std::string mon = i == 0 ? "" : (i == 1 ? var : var + "^" + std::to_string(i));
        std::string term;
        if (i == 0) {
            term = compound ? "(" + c + ")" : c;
        } else if (c == "1") {
            term = mon;
        } else if (c == "-1") {
            term = "-" + mon;
        } else {
            term = (compound ? "(" + c + ")" : c) + "*" + mon;
        }
        if (!s.empty() && term[0] != '-') s += "+";
        s += term;
    }
    return s.empty() ? "0" : s;
}

std::vector<std::string> coeff_strings(const InputField& K, const KPoly& a) {
    std::vector<std::string> r;
    for (const auto& c : a) r.push_back(K.str(c));
    return r;
}

}  // namespace q3::kpoly
