#pragma once

#include <gmpxx.h>

#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace q3 {

/// Digits over F_3, length equal to the absolute degree of the field.
using FElem = std::vector<int>;
/// Polynomial over a finite field, lowest coefficient first, no trailing zeros.
using FPoly = std::vector<FElem>;

class FField;
using FFPtr = std::shared_ptr<const FField>;

/// Finite field of characteristic 3 built as a tower of simple extensions.
class FField {
public:
    static FFPtr prime();
    /// Extension of `base` by a monic irreducible `modulus` (coefficients over base).
    static FFPtr extend(const FFPtr& base, const FPoly& modulus);

    int degree() const { return deg_; }
    int rel_degree() const { return f_; }
    const FFPtr& base() const { return base_; }
    const FPoly& modulus() const { return modulus_; }
    mpz_class order() const;

    FElem zero() const { return FElem(deg_, 0); }
    FElem one() const;
    FElem from_int(long n) const;
    /// Class of the adjoined variable.
    FElem gen() const;

    bool is_zero(const FElem& a) const;
    bool is_one(const FElem& a) const { return a == one(); }
    FElem add(const FElem& a, const FElem& b) const;
    FElem sub(const FElem& a, const FElem& b) const;
    FElem neg(const FElem& a) const;
    FElem mul(const FElem& a, const FElem& b) const;
    FElem inv(const FElem& a) const;
    FElem pow(const FElem& a, const mpz_class& n) const;
    FElem cube_root(const FElem& a) const;
    FElem random(std::mt19937_64& rng) const;

    /// Embeds an element of an ancestor field (or of this field).
    FElem embed(const FField& from, const FElem& a) const;
    bool has_ancestor(const FField& a) const;

    /// Block k of an element: coefficient of gen^k over the base.
    FElem block(const FElem& a, int k) const;
    FElem from_blocks(const std::vector<FElem>& blocks) const;

    std::string str(const FElem& a) const;

private:
    FField() = default;
    FFPtr base_;
    FPoly modulus_;
    int f_ = 1;
    int deg_ = 1;
};

// Polynomial arithmetic over a finite field.
namespace fpoly {

void trim(FPoly& a, const FField& F);
int deg(const FPoly& a);
FPoly add(const FField& F, const FPoly& a, const FPoly& b);
FPoly sub(const FField& F, const FPoly& a, const FPoly& b);
FPoly mul(const FField& F, const FPoly& a, const FPoly& b);
FPoly scale(const FField& F, const FPoly& a, const FElem& c);
void divrem(const FField& F, const FPoly& a, const FPoly& b, FPoly& q, FPoly& r);
FPoly rem(const FField& F, const FPoly& a, const FPoly& b);
FPoly quo(const FField& F, const FPoly& a, const FPoly& b);
FPoly monic(const FField& F, const FPoly& a);
FPoly gcd(const FField& F, const FPoly& a, const FPoly& b);
/// Monic gcd g with s*a + t*b = g.
FPoly xgcd(const FField& F, const FPoly& a, const FPoly& b, FPoly& s, FPoly& t);
FPoly derivative(const FField& F, const FPoly& a);
FPoly powmod(const FField& F, const FPoly& a, const mpz_class& n, const FPoly& m);
FElem eval(const FField& F, const FPoly& a, const FElem& x);
bool less(const FPoly& a, const FPoly& b);

/// Monic irreducible factors with multiplicities, sorted by (degree, coefficients).
std::vector<std::pair<FPoly, int>> factor(const FField& F, const FPoly& a);
bool is_irreducible(const FField& F, const FPoly& a);

}  // namespace fpoly

}  // namespace q3
