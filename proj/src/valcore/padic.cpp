#include "q3/padic.hpp"

#include "q3/errors.hpp"

#include <vector>

namespace q3 {

const mpz_class& pow3(long k) {
    if (k < 0) throw InvalidUse("negative power of 3 requested");
    thread_local std::vector<mpz_class> cache{mpz_class(1)};
    while (static_cast<long>(cache.size()) <= k) cache.push_back(cache.back() * 3);
    return cache[k];
}

void normalize(Z3& a) {
    if (a.u == 0) {
        a.v = 0;
        return;
    }
    if (mpz_divisible_ui_p(a.u.get_mpz_t(), 3)) {
        mpz_class three(3);
        a.v += static_cast<long>(mpz_remove(a.u.get_mpz_t(), a.u.get_mpz_t(), three.get_mpz_t()));
    }
}

Z3 z3_from_mpz(const mpz_class& n) {
    Z3 r{n, 0};
    normalize(r);
    return r;
}

Z3 z3_from_mpq(const mpq_class& q, long absprec, bool& exact) {
    exact = true;
    if (q == 0) return Z3{};
    Z3 num = z3_from_mpz(q.get_num());
    Z3 den = z3_from_mpz(q.get_den());
    Z3 r{num.u, num.v - den.v};
    if (den.u == 1) return r;
    exact = false;
    long rel = absprec - r.v;
    if (rel <= 0) return Z3{};
    const mpz_class& m = pow3(rel);
    mpz_class inv;
    mpz_invert(inv.get_mpz_t(), den.u.get_mpz_t(), m.get_mpz_t());
    r.u = r.u * inv;
    mpz_fdiv_r(r.u.get_mpz_t(), r.u.get_mpz_t(), m.get_mpz_t());
    normalize(r);
    return r;
}

mpq_class z3_to_mpq(const Z3& a) {
    if (a.u == 0) return 0;
    if (a.v >= 0) return mpq_class(a.u * pow3(a.v));
    mpq_class r(a.u, pow3(-a.v));
    r.canonicalize();
    return r;
}

Z3 z3_add(const Z3& a, const Z3& b) {
    Z3 r = a;
    z3_add_to(r, b);
    return r;
}

Z3 z3_sub(const Z3& a, const Z3& b) {
    Z3 r = a;
    z3_sub_from(r, b);
    return r;
}

Z3 z3_neg(const Z3& a) { return Z3{-a.u, a.v}; }

Z3 z3_mul(const Z3& a, const Z3& b) {
    if (a.u == 0 || b.u == 0) return Z3{};
    return Z3{a.u * b.u, a.v + b.v};
}

void z3_add_to(Z3& acc, const Z3& b) {
    if (b.u == 0) return;
    if (acc.u == 0) {
        acc = b;
        return;
    }
    if (acc.v == b.v) {
        acc.u += b.u;
    } else if (acc.v < b.v) {
        acc.u += b.u * pow3(b.v - acc.v);
    } else {
        acc.u = acc.u * pow3(acc.v - b.v) + b.u;
        acc.v = b.v;
    }
    normalize(acc);
}

void z3_sub_from(Z3& acc, const Z3& b) {
    if (b.u == 0) return;
    Z3 nb{-b.u, b.v};
    z3_add_to(acc, nb);
}

void z3_truncate(Z3& a, long M) {
    if (a.u == 0) return;
    if (a.v >= M) {
        a = Z3{};
        return;
    }
    const mpz_class& m = pow3(M - a.v);
    if (mpz_cmpabs(a.u.get_mpz_t(), m.get_mpz_t()) >= 0) {
        mpz_fdiv_r(a.u.get_mpz_t(), a.u.get_mpz_t(), m.get_mpz_t());
        // symmetric representative
        mpz_class twice = 2 * a.u;
        if (twice > m) a.u -= m;
    }
}

int z3_residue(const Z3& a) {
    if (a.u == 0 || a.v > 0) return 0;
    if (a.v < 0) throw InvalidUse("residue of an element of negative valuation");
    return static_cast<int>(mpz_fdiv_ui(a.u.get_mpz_t(), 3));
}

Z3 z3_inverse(const Z3& a, long relprec) {
    if (a.u == 0) throw InvalidUse("inverse of zero");
    if (relprec < 1) relprec = 1;
    const mpz_class& m = pow3(relprec);
    mpz_class inv;
    mpz_invert(inv.get_mpz_t(), a.u.get_mpz_t(), m.get_mpz_t());
    return Z3{inv, -a.v};
}

std::string z3_str(const Z3& a) {
    if (a.u == 0) return "0";
    return a.u.get_str() + "*3^" + std::to_string(a.v);
}

}  // namespace q3
