#include "q3/valrational.hpp"

#include "q3/errors.hpp"

#include <cctype>
#include <climits>
#include <ostream>

namespace q3 {

namespace {

bool is_int_token(const std::string& s) {
    size_t i = 0;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

}  // namespace

mpq_class parse_rational(const std::string& raw) {
    std::string s;
    for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    auto slash = s.find('/');
    std::string n = s.substr(0, slash);
    std::string d = slash == std::string::npos ? "1" : s.substr(slash + 1);
    if (!is_int_token(n) || !is_int_token(d) || d[0] == '-' || d[0] == '+')
        throw ParseError("not a rational number: '" + raw + "'");
    if (n[0] == '+') n.erase(0, 1);
    mpz_class zn(n), zd(d);
    if (zd == 0) throw ParseError("zero denominator: '" + raw + "'");
    mpq_class q(zn, zd);
    q.canonicalize();
    return q;
}

std::string qstr(const mpq_class& q) {
    mpq_class c(q);
    c.canonicalize();
    return c.get_str();
}

ValRational ValRational::parse(const std::string& s) {
    if (s == "inf" || s == "infinity" || s == "+inf" || s == "oo") return infinity();
    return ValRational(parse_rational(s));
}

const mpq_class& ValRational::q() const {
    if (inf_) throw InvalidUse("finite value requested from infinite ValRational");
    return q_;
}

mpz_class ValRational::floor() const {
    const mpq_class& v = q();
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
    return r;
}

mpz_class ValRational::ceil() const {
    const mpq_class& v = q();
    mpz_class r;
    mpz_cdiv_q(r.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
    return r;
}

long ValRational::floor_long() const {
    if (inf_) return LONG_MAX / 4;
    return floor().get_si();
}

long ValRational::ceil_long() const {
    if (inf_) return LONG_MAX / 4;
    return ceil().get_si();
}

double ValRational::to_double() const {
    if (inf_) return 1e300;
    return q_.get_d();
}

std::string ValRational::str() const { return inf_ ? std::string("inf") : qstr(q_); }

ValRational ValRational::operator-() const {
    if (inf_) throw InvalidUse("negating infinity");
    return ValRational(mpq_class(-q_));
}

ValRational& ValRational::operator+=(const ValRational& o) {
    if (inf_ || o.inf_) {
        inf_ = true;
        q_ = 0;
    } else {
        q_ += o.q_;
    }
    return *this;
}

ValRational& ValRational::operator-=(const ValRational& o) {
    if (o.inf_) throw InvalidUse("subtracting infinity");
    if (!inf_) q_ -= o.q_;
    return *this;
}

ValRational& ValRational::operator*=(const ValRational& o) {
    if (inf_ || o.inf_) {
        const ValRational& fin = inf_ ? o : *this;
        if (!fin.inf_ && fin.q_ <= 0) throw InvalidUse("infinity times non-positive");
        inf_ = true;
        q_ = 0;
    } else {
        q_ *= o.q_;
    }
    return *this;
}

ValRational& ValRational::operator/=(const ValRational& o) {
    if (o.inf_) throw InvalidUse("division by infinity");
    if (o.q_ == 0) throw InvalidUse("division by zero");
    if (inf_) {
        if (o.q_ < 0) throw InvalidUse("infinity divided by negative");
    } else {
        q_ /= o.q_;
    }
    return *this;
}

bool operator==(const ValRational& a, const ValRational& b) {
    if (a.inf_ || b.inf_) return a.inf_ == b.inf_;
    return a.q_ == b.q_;
}

bool operator<(const ValRational& a, const ValRational& b) {
    if (a.inf_) return false;
    if (b.inf_) return true;
    return a.q_ < b.q_;
}

std::ostream& operator<<(std::ostream& os, const ValRational& v) { return os << v.str(); }

}  // namespace q3
