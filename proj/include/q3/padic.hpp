#pragma once

#include <gmpxx.h>

#include <climits>
#include <string>

namespace q3 {

constexpr long kValInf = LONG_MAX / 4;

/// Rational number u * 3^v with 3 not dividing u (or u == 0).
struct Z3 {
    mpz_class u;
    long v = 0;

    bool is_zero() const { return u == 0; }
    long val() const { return u == 0 ? kValInf : v; }
};

const mpz_class& pow3(long k);

void normalize(Z3& a);
Z3 z3_from_mpz(const mpz_class& n);
/// Exact when the denominator is a power of 3; otherwise the result is
/// correct modulo 3^absprec and `exact` is cleared.
Z3 z3_from_mpq(const mpq_class& q, long absprec, bool& exact);
mpq_class z3_to_mpq(const Z3& a);

Z3 z3_add(const Z3& a, const Z3& b);
Z3 z3_sub(const Z3& a, const Z3& b);
Z3 z3_neg(const Z3& a);
Z3 z3_mul(const Z3& a, const Z3& b);
void z3_add_to(Z3& acc, const Z3& b);
void z3_sub_from(Z3& acc, const Z3& b);
/// Reduces modulo 3^M (absolute).
void z3_truncate(Z3& a, long M);
/// Residue mod 3 of an element of valuation >= 0.
int z3_residue(const Z3& a);
/// Inverse of a unit modulo 3^absprec.
Z3 z3_inverse(const Z3& a, long relprec);

std::string z3_str(const Z3& a);

}  // namespace q3
