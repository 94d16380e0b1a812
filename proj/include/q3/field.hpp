#pragma once

#include "q3/tower.hpp"

#include <gmpxx.h>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace q3 {

/// Element of K as coefficients on 1, γ, ..., γ^{d-1}.
using KElem = std::vector<mpq_class>;
/// Dense polynomial over Q, lowest degree first.
using QPoly = std::vector<mpq_class>;

/// p/q with |p|, |q| <= height and q prime to 3 congruent to r modulo 3^M.
std::optional<mpq_class> rational_reconstruct(const mpz_class& r, long M, const mpz_class& height);

namespace qpoly {
void trim(QPoly& a);
int deg(const QPoly& a);
QPoly mul(const QPoly& a, const QPoly& b);
void divrem(const QPoly& a, const QPoly& b, QPoly& q, QPoly& r);
/// Inverse of a modulo m (gcd must be 1).
QPoly inv_mod(const QPoly& a, const QPoly& m);
}  // namespace qpoly

class InputField;
using FieldPtr = std::shared_ptr<const InputField>;

/// Q or Q(γ) with γ a root of a monic integral polynomial that stays
/// irreducible over Q_3 (certified by a single-slope step after a shift).
class InputField {
public:
    static FieldPtr rationals();
    /// Throws InvalidBase when the certificate fails.
    static FieldPtr from_minpoly(const std::vector<mpq_class>& monic_low_to_high);

    int degree() const { return d_; }
    bool is_rational() const { return d_ == 1; }
    const QPoly& minpoly() const { return m_; }
    long shift() const { return shift_; }

    KElem zero() const { return KElem(d_, 0); }
    KElem one() const;
    KElem from_mpq(const mpq_class& q) const;
    KElem gamma() const;
    bool is_zero(const KElem& a) const;
    bool is_rational_elem(const KElem& a) const;
    KElem add(const KElem& a, const KElem& b) const;
    KElem sub(const KElem& a, const KElem& b) const;
    KElem neg(const KElem& a) const;
    KElem mul(const KElem& a, const KElem& b) const;
    KElem scale(const KElem& a, const mpq_class& q) const;
    KElem inv(const KElem& a) const;
    KElem pow(const KElem& a, unsigned n) const;

    /// Tower of the completion.
    const TowerPtr& completion() const { return tower_; }
    /// γ in the completion tower (exact).
    const TElem& gamma_hat() const { return gamma_hat_; }
    /// Image of a in the tower t (which must contain the completion).
    TElem embed(const KElem& a, const TowerPtr& t, long W) const;
    /// Exact 3-adic valuation of a nonzero element.
    ValRational val(const KElem& a) const;

    /// Element of K of height at most `height` whose image agrees with `a`
    /// to the guarantee of `a`; a must lie in the completion up to that guarantee.
    std::optional<KElem> reconstruct(const TElem& a, const mpz_class& height) const;

    std::string str(const KElem& a, const std::string& gname = "g") const;
    std::string gamma_name() const { return "g"; }

private:
    InputField() = default;
    int d_ = 1;
    QPoly m_;
    long shift_ = 0;
    TowerPtr tower_;
    TElem gamma_hat_;
};

}  // namespace q3
