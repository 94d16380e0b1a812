#pragma once

#include <gmpxx.h>

#include <iosfwd>
#include <string>

namespace q3 {

/// Element of Q ∪ {+∞}. Used for valuations, radii and guarantees.
class ValRational {
public:
    ValRational() : q_(0) {}
    ValRational(long n) : q_(n) {}
    ValRational(long n, long d) : q_(n, d) { q_.canonicalize(); }
    explicit ValRational(const mpq_class& q) : q_(q) { q_.canonicalize(); }

    static ValRational infinity() {
        ValRational r;
        r.inf_ = true;
        return r;
    }
    /// Accepts "n", "n/d", "-n/d", "inf" and "infinity".
    static ValRational parse(const std::string& s);

    bool is_inf() const { return inf_; }
    const mpq_class& q() const;
    mpz_class num() const { return q().get_num(); }
    mpz_class den() const { return q().get_den(); }
    bool is_integer() const { return !inf_ && q_.get_den() == 1; }

    mpz_class floor() const;
    mpz_class ceil() const;
    long floor_long() const;
    long ceil_long() const;
    double to_double() const;

    std::string str() const;

    ValRational operator-() const;
    ValRational& operator+=(const ValRational& o);
    ValRational& operator-=(const ValRational& o);
    ValRational& operator*=(const ValRational& o);
    ValRational& operator/=(const ValRational& o);

    friend ValRational operator+(ValRational a, const ValRational& b) { return a += b; }
    friend ValRational operator-(ValRational a, const ValRational& b) { return a -= b; }
    friend ValRational operator*(ValRational a, const ValRational& b) { return a *= b; }
    friend ValRational operator/(ValRational a, const ValRational& b) { return a /= b; }

    friend bool operator==(const ValRational& a, const ValRational& b);
    friend bool operator<(const ValRational& a, const ValRational& b);
    friend bool operator!=(const ValRational& a, const ValRational& b) { return !(a == b); }
    friend bool operator>(const ValRational& a, const ValRational& b) { return b < a; }
    friend bool operator<=(const ValRational& a, const ValRational& b) { return !(b < a); }
    friend bool operator>=(const ValRational& a, const ValRational& b) { return !(a < b); }

private:
    mpq_class q_;
    bool inf_ = false;
};

inline const ValRational& vmin(const ValRational& a, const ValRational& b) { return b < a ? b : a; }
inline const ValRational& vmax(const ValRational& a, const ValRational& b) { return a < b ? b : a; }

std::ostream& operator<<(std::ostream& os, const ValRational& v);

/// Canonical "n" or "n/d" form of a rational.
std::string qstr(const mpq_class& q);
/// Parses "n" or "n/d"; throws ParseError on anything else (decimals included).
mpq_class parse_rational(const std::string& s);

}  // namespace q3
