#include "q3/field.hpp"

#include "q3/errors.hpp"

#include <algorithm>

namespace q3 {

namespace qpoly {

void trim(QPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

int deg(const QPoly& a) { return static_cast<int>(a.size()) - 1; }

QPoly mul(const QPoly& a, const QPoly& b) {
    if (a.empty() || b.empty()) return {};
    QPoly r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    trim(r);
    return r;
}

void divrem(const QPoly& a, const QPoly& b, QPoly& q, QPoly& r) {
    r = a;
    trim(r);
    QPoly bb = b;
    trim(bb);
    if (bb.empty()) throw InvalidUse("division by zero polynomial");
    int db = deg(bb);
    q.assign(std::max(deg(r) - db + 1, 0), 0);
    for (int k = deg(r); k >= db; --k) {
        if (r[k] == 0) continue;
        mpq_class c = r[k] / bb[db];
        q[k - db] = c;
        for (int j = 0; j <= db; ++j) r[k - db + j] -= c * bb[j];
    }
    trim(r);
    trim(q);
}

QPoly inv_mod(const QPoly& a, const QPoly& m) {
    QPoly r0 = m, r1 = a, t0, t1{1};
    QPoly q, r;
    divrem(r1, m, q, r1);
    while (!r1.empty()) {
        divrem(r0, r1, q, r);
        QPoly qt = mul(q, t1);
        QPoly t2(std::max(t0.size(), qt.size()), 0);
        for (size_t i = 0; i < t0.size(); ++i) t2[i] += t0[i];
        for (size_t i = 0; i < qt.size(); ++i) t2[i] -= qt[i];
        trim(t2);
        r0 = std::move(r1);
        r1 = std::move(r);
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    if (deg(r0) != 0) throw InvalidUse("element not invertible");
    for (auto& c : t0) c /= r0[0];
    divrem(t0, m, q, r);
    return r;
}

}  // namespace qpoly

std::optional<mpq_class> rational_reconstruct(const mpz_class& r, long M, const mpz_class& height) {
    const mpz_class& m = pow3(M);
    if (2 * height * height >= m) return std::nullopt;
    mpz_class r0 = m, r1 = r % m, t0 = 0, t1 = 1;
    if (r1 < 0) r1 += m;
    while (r1 > height) {
        mpz_class q = r0 / r1;
        mpz_class r2 = r0 - q * r1, t2 = t0 - q * t1;
        r0 = r1;
        r1 = r2;
        t0 = t1;
        t1 = t2;
    }
    if (abs(t1) > height || t1 == 0) return std::nullopt;
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), t1.get_mpz_t(), m.get_mpz_t());
    if (g != 1) return std::nullopt;
    mpq_class out(r1, t1);
    out.canonicalize();
    return out;
}

FieldPtr InputField::rationals() {
    static const FieldPtr q = [] {
        std::shared_ptr<InputField> f(new InputField());
        f->d_ = 1;
        f->m_ = {0, 1};
        f->tower_ = Tower::base();
        f->gamma_hat_ = TElem(f->tower_);
        return std::shared_ptr<const InputField>(f);
    }();
    return q;
}

FieldPtr InputField::from_minpoly(const std::vector<mpq_class>& m0) {
    QPoly m = m0;
    qpoly::trim(m);
    if (m.size() < 2) throw InvalidBase("minimal polynomial must have positive degree");
    if (m.back() != 1) throw InvalidBase("minimal polynomial must be monic");
    for (const auto& c : m)
        if (c.get_den() != 1) throw InvalidBase("minimal polynomial must have integer coefficients");
    if (qpoly::deg(m) == 1) return rationals();
    // irreducibility over Q_3 (certified below) implies irreducibility over Q
    int d = qpoly::deg(m);
    TowerPtr base = Tower::base();
    for (long c : {0L, 1L, -1L}) {
        // coefficients of m(t + c)
        QPoly s = m;
        for (int i = 0; i < d; ++i)
            for (int j = d - 1; j >= i; --j) s[j] += c * s[j + 1];
        std::vector<TElem> low;
        for (int i = 0; i < d; ++i) low.push_back(TElem::from_mpz(base, s[i].get_num()));
        TowerPtr t = Tower::extend(base, low, "g");
        if (!t) continue;
        std::shared_ptr<InputField> f(new InputField());
        f->d_ = d;
        f->m_ = m;
        f->shift_ = c;
        f->tower_ = t;
        f->gamma_hat_ = TElem::gen(t, 1) + TElem::from_int(t, c);
        return f;
    }
    throw InvalidBase("minimal polynomial is not certified irreducible over Q_3");
}

KElem InputField::one() const {
    KElem r = zero();
    r[0] = 1;
    return r;
}

KElem InputField::from_mpq(const mpq_class& q) const {
    KElem r = zero();
    r[0] = q;
    return r;
}

KElem InputField::gamma() const {
    KElem r = zero();
    if (d_ == 1) throw InvalidUse("gamma of the rationals");
    r[1] = 1;
    return r;
}

bool InputField::is_zero(const KElem& a) const {
    return std::all_of(a.begin(), a.end(), [](const mpq_class& x) { return x == 0; });
}

bool InputField::is_rational_elem(const KElem& a) const {
    return std::all_of(a.begin() + 1, a.end(), [](const mpq_class& x) { return x == 0; });
}

KElem InputField::add(const KElem& a, const KElem& b) const {
    KElem r(d_);
    for (int i = 0; i < d_; ++i) r[i] = a[i] + b[i];
    return r;
}

KElem InputField::sub(const KElem& a, const KElem& b) const {
    KElem r(d_);
    for (int i = 0; i < d_; ++i) r[i] = a[i] - b[i];
    return r;
}

KElem InputField::neg(const KElem& a) const {
    KElem r(d_);
    for (int i = 0; i < d_; ++i) r[i] = -a[i];
    return r;
}

KElem InputField::scale(const KElem& a, const mpq_class& q) const {
    KElem r(d_);
    for (int i = 0; i < d_; ++i) r[i] = a[i] * q;
    return r;
}

KElem InputField::mul(const KElem& a, const KElem& b) const {
    if (d_ == 1) return KElem{a[0] * b[0]};
    std::vector<mpq_class> p(2 * d_ - 1, 0);
    for (int i = 0; i < d_; ++i) {
        if (a[i] == 0) continue;
        for (int j = 0; j < d_; ++j) p[i + j] += a[i] * b[j];
    }
    for (int k = 2 * d_ - 2; k >= d_; --k) {
        if (p[k] == 0) continue;
        for (int j = 0; j < d_; ++j) p[k - d_ + j] -= p[k] * m_[j];
        p[k] = 0;
    }
    p.resize(d_);
    return p;
}

KElem InputField::inv(const KElem& a) const {
    if (is_zero(a)) throw InvalidUse("inverse of zero in K");
    if (d_ == 1) return KElem{1 / a[0]};
    QPoly ap = a;
    qpoly::trim(ap);
    QPoly r = qpoly::inv_mod(ap, m_);
    r.resize(d_, 0);
    return r;
}

KElem InputField::pow(const KElem& a, unsigned n) const {
    KElem r = one(), b = a;
    while (n) {
        if (n & 1) r = mul(r, b);
        n >>= 1;
        if (n) b = mul(b, b);
    }
    return r;
}

TElem InputField::embed(const KElem& a, const TowerPtr& t, long W) const {
    TElem r(t);
    TElem gp = TElem::from_int(t, 1);
    for (int i = 0; i < d_; ++i) {
        if (a[i] != 0) r += TElem::from_mpq(t, a[i], W) * gp;
        if (i + 1 < d_) gp = gp * gamma_hat_;
    }
    return r;
}

ValRational InputField::val(const KElem& a) const {
    if (is_zero(a)) return ValRational::infinity();
    for (long W = 32;; W *= 2) {
        TElem e = embed(a, tower_, W);
        if (e.certified()) return e.val();
        if (W > (1L << 20)) throw PrecisionExhausted("valuation of a field element");
    }
}

std::optional<KElem> InputField::reconstruct(const TElem& a, const mpz_class& height) const {
    if (!tower_->is_prefix_of(*a.tower()))
        throw InvalidUse("reconstruct: element does not live over the completion");
    const Tower& T = *a.tower();
    int n = T.dim(tower_->levels());
    const ValRational& N = a.guarantee();
    if (N.is_inf()) {
        for (size_t j = n; j < a.coeffs().size(); ++j)
            if (!a.coeffs()[j].is_zero()) return std::nullopt;
    } else {
        TElem rest = a;
        for (int j = 0; j < n; ++j) rest.coeffs_mut()[j] = Z3{};
        if (rest.certified()) return std::nullopt;
    }
    // coordinates on theta^j, theta = gamma - shift
    std::vector<mpq_class> b(n, 0);
    for (int j = 0; j < n; ++j) {
        const Z3& c = a.coeffs()[j];
        if (N.is_inf()) {
            b[j] = z3_to_mpq(c);
            continue;
        }
        long M = (N - T.basis_val(j)).floor_long();
        if (c.is_zero() || c.v >= M) continue;
        long s = c.v < 0 ? -c.v : 0;
        mpz_class r = c.u * pow3(c.v + s);
        auto q = rational_reconstruct(r, M + s, height);
        if (!q) return std::nullopt;
        b[j] = *q / mpq_class(pow3(s));
    }
    KElem out = zero();
    KElem th = one(), step = sub(d_ == 1 ? zero() : gamma(), from_mpq(shift_));
    for (int j = 0; j < n; ++j) {
        out = add(out, scale(th, b[j]));
        if (j + 1 < n) th = mul(th, step);
    }
    if (N.is_inf()) return out;
    long W = N.ceil_long() + 8;
    TElem diff = embed(out, a.tower(), W) - a;
    if (diff.certified() && !diff.rep_is_zero()) return std::nullopt;
    return out;
}

std::string InputField::str(const KElem& a, const std::string& g) const {
    std::string s;
    for (int i = d_ - 1; i >= 0; --i) {
        if (a[i] == 0) continue;
        std::string c = qstr(a[i]);
        std::string term;
        if (i == 0) {
            term = c;
        } else {
            std::string mon = i == 1 ? g : g + "^" + std::to_string(i);
            if (a[i] == 1)
                term = mon;
            else if (a[i] == -1)
                term = "-" + mon;
            else
                term = c + "*" + mon;
        }
        if (!s.empty() && term[0] != '-') s += "+";
        s += term;
    }
    return s.empty() ? "0" : s;
}

}  // namespace q3
