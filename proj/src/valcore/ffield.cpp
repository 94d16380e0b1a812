#include "q3/ffield.hpp"

#include "q3/errors.hpp"

#include <algorithm>
#include <functional>

namespace q3 {

namespace {

int m3(int x) {
    x %= 3;
    return x < 0 ? x + 3 : x;
}

}  // namespace

FFPtr FField::prime() {
    static const FFPtr p = [] {
        std::shared_ptr<FField> f(new FField());
        return std::shared_ptr<const FField>(f);
    }();
    return p;
}

FFPtr FField::extend(const FFPtr& base, const FPoly& modulus) {
    if (!base) throw InvalidUse("extension of a null field");
    int f = fpoly::deg(modulus);
    if (f < 1 || !base->is_one(modulus.back())) throw InvalidUse("modulus must be monic of positive degree");
    std::shared_ptr<FField> r(new FField());
    r->base_ = base;
    r->modulus_ = modulus;
    r->f_ = f;
    r->deg_ = f * base->deg_;
    return r;
}

mpz_class FField::order() const {
    mpz_class q;
    mpz_ui_pow_ui(q.get_mpz_t(), 3, deg_);
    return q;
}

FElem FField::one() const {
    FElem r(deg_, 0);
    r[0] = 1;
    return r;
}

FElem FField::from_int(long n) const {
    FElem r(deg_, 0);
    r[0] = m3(static_cast<int>(n % 3));
    return r;
}

FElem FField::gen() const {
    if (!base_) return one();
    FElem r(deg_, 0);
    if (f_ == 1) {
        // linear modulus x + c: the generator is -c
        return neg(embed(*base_, modulus_[0]));
    }
    r[base_->deg_] = 1;
    return r;
}

bool FField::is_zero(const FElem& a) const {
    for (int d : a)
        if (d != 0) return false;
    return true;
}

FElem FField::add(const FElem& a, const FElem& b) const {
    FElem r(deg_);
    for (int i = 0; i < deg_; ++i) r[i] = m3(a[i] + b[i]);
    return r;
}

FElem FField::sub(const FElem& a, const FElem& b) const {
    FElem r(deg_);
    for (int i = 0; i < deg_; ++i) r[i] = m3(a[i] - b[i]);
    return r;
}

FElem FField::neg(const FElem& a) const {
    FElem r(deg_);
    for (int i = 0; i < deg_; ++i) r[i] = m3(-a[i]);
    return r;
}

FElem FField::block(const FElem& a, int k) const {
    int bd = base_ ? base_->deg_ : 1;
    return FElem(a.begin() + k * bd, a.begin() + (k + 1) * bd);
}

FElem FField::from_blocks(const std::vector<FElem>& blocks) const {
    FElem r;
    r.reserve(deg_);
    for (int k = 0; k < f_; ++k) {
        if (k < static_cast<int>(blocks.size()))
            r.insert(r.end(), blocks[k].begin(), blocks[k].end());
        else
            r.insert(r.end(), base_ ? base_->deg_ : 1, 0);
    }
    return r;
}

FElem FField::mul(const FElem& a, const FElem& b) const {
    if (!base_) return FElem{m3(a[0] * b[0])};
    const FField& B = *base_;
    if (f_ == 1) return B.mul(a, b);
    std::vector<FElem> prod(2 * f_ - 1, B.zero());
    std::vector<FElem> ab(f_), bb(f_);
    for (int i = 0; i < f_; ++i) {
        ab[i] = block(a, i);
        bb[i] = block(b, i);
    }
    for (int i = 0; i < f_; ++i) {
        if (B.is_zero(ab[i])) continue;
        for (int j = 0; j < f_; ++j) {
            if (B.is_zero(bb[j])) continue;
            prod[i + j] = B.add(prod[i + j], B.mul(ab[i], bb[j]));
        }
    }
    for (int m = 2 * f_ - 2; m >= f_; --m) {
        if (B.is_zero(prod[m])) continue;
        for (int k = 0; k < f_; ++k) {
            if (B.is_zero(modulus_[k])) continue;
            prod[m - f_ + k] = B.sub(prod[m - f_ + k], B.mul(prod[m], modulus_[k]));
        }
    }
    prod.resize(f_);
    return from_blocks(prod);
}

FElem FField::pow(const FElem& a, const mpz_class& n) const {
    FElem r = one();
    FElem b = a;
    size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
    for (size_t i = 0; i < bits; ++i) {
        if (mpz_tstbit(n.get_mpz_t(), i)) r = mul(r, b);
        if (i + 1 < bits) b = mul(b, b);
    }
    return r;
}

FElem FField::inv(const FElem& a) const {
    if (is_zero(a)) throw InvalidUse("inverse of zero in finite field");
    return pow(a, order() - 2);
}

FElem FField::cube_root(const FElem& a) const { return pow(a, order() / 3); }

FElem FField::random(std::mt19937_64& rng) const {
    FElem r(deg_);
    for (int i = 0; i < deg_; ++i) r[i] = static_cast<int>(rng() % 3);
    return r;
}

bool FField::has_ancestor(const FField& a) const {
    for (const FField* f = this; f; f = f->base_.get())
        if (f == &a) return true;
    return false;
}

FElem FField::embed(const FField& from, const FElem& a) const {
    if (&from == this) return a;
    if (!base_) throw InvalidUse("finite field embedding from a non-ancestor");
    FElem b = base_->embed(from, a);
    std::vector<FElem> blocks{b};
    return from_blocks(blocks);
}

std::string FField::str(const FElem& a) const {
    std::string s = "[";
    for (size_t i = 0; i < a.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(a[i]);
    }
    return s + "]";
}

namespace fpoly {

void trim(FPoly& a, const FField& F) {
    while (!a.empty() && F.is_zero(a.back())) a.pop_back();
}

int deg(const FPoly& a) { return static_cast<int>(a.size()) - 1; }

FPoly add(const FField& F, const FPoly& a, const FPoly& b) {
    FPoly r(std::max(a.size(), b.size()), F.zero());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] = F.add(r[i], b[i]);
    trim(r, F);
    return r;
}

FPoly sub(const FField& F, const FPoly& a, const FPoly& b) {
    FPoly r(std::max(a.size(), b.size()), F.zero());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] = F.sub(r[i], b[i]);
    trim(r, F);
    return r;
}

FPoly mul(const FField& F, const FPoly& a, const FPoly& b) {
    if (a.empty() || b.empty()) return {};
    FPoly r(a.size() + b.size() - 1, F.zero());
    for (size_t i = 0; i < a.size(); ++i) {
        if (F.is_zero(a[i])) continue;
        for (size_t j = 0; j < b.size(); ++j) r[i + j] = F.add(r[i + j], F.mul(a[i], b[j]));
    }
    trim(r, F);
    return r;
}

FPoly scale(const FField& F, const FPoly& a, const FElem& c) {
    FPoly r;
    r.reserve(a.size());
    for (const auto& x : a) r.push_back(F.mul(x, c));
    trim(r, F);
    return r;
}

void divrem(const FField& F, const FPoly& a, const FPoly& b, FPoly& q, FPoly& r) {
    if (b.empty()) throw InvalidUse("polynomial division by zero");
    r = a;
    trim(r, F);
    int db = deg(b);
    if (deg(r) < db) {
        q.clear();
        return;
    }
    q.assign(r.size() - b.size() + 1, F.zero());
    FElem lcinv = F.inv(b.back());
    for (int m = deg(r); m >= db; --m) {
        if (F.is_zero(r[m])) continue;
        FElem c = F.mul(r[m], lcinv);
        q[m - db] = c;
        for (int k = 0; k <= db; ++k) r[m - db + k] = F.sub(r[m - db + k], F.mul(c, b[k]));
    }
    trim(r, F);
    trim(q, F);
}

FPoly rem(const FField& F, const FPoly& a, const FPoly& b) {
    FPoly q, r;
    divrem(F, a, b, q, r);
    return r;
}

FPoly quo(const FField& F, const FPoly& a, const FPoly& b) {
    FPoly q, r;
    divrem(F, a, b, q, r);
    return q;
}

FPoly monic(const FField& F, const FPoly& a) {
    if (a.empty()) return a;
    return scale(F, a, F.inv(a.back()));
}

FPoly gcd(const FField& F, const FPoly& a0, const FPoly& b0) {
    FPoly a = a0, b = b0;
    trim(a, F);
    trim(b, F);
    while (!b.empty()) {
        FPoly r = rem(F, a, b);
        a = std::move(b);
        b = std::move(r);
    }
    return monic(F, a);
}

FPoly xgcd(const FField& F, const FPoly& a0, const FPoly& b0, FPoly& s, FPoly& t) {
    FPoly r0 = a0, r1 = b0;
    trim(r0, F);
    trim(r1, F);
    FPoly s0{F.one()}, s1, t0, t1{F.one()};
    while (!r1.empty()) {
        FPoly q, r;
        divrem(F, r0, r1, q, r);
        FPoly s2 = sub(F, s0, mul(F, q, s1));
        FPoly t2 = sub(F, t0, mul(F, q, t1));
        r0 = std::move(r1);
        r1 = std::move(r);
        s0 = std::move(s1);
        s1 = std::move(s2);
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    if (r0.empty()) {
        s.clear();
        t.clear();
        return r0;
    }
    FElem li = F.inv(r0.back());
    s = scale(F, s0, li);
    t = scale(F, t0, li);
    return scale(F, r0, li);
}

FPoly derivative(const FField& F, const FPoly& a) {
    FPoly r;
    for (size_t i = 1; i < a.size(); ++i) r.push_back(F.mul(a[i], F.from_int(static_cast<long>(i))));
    trim(r, F);
    return r;
}

FPoly powmod(const FField& F, const FPoly& a, const mpz_class& n, const FPoly& m) {
    FPoly r{F.one()};
    r = rem(F, r, m);
    FPoly b = rem(F, a, m);
    size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
    for (size_t i = 0; i < bits; ++i) {
        if (mpz_tstbit(n.get_mpz_t(), i)) r = rem(F, mul(F, r, b), m);
        if (i + 1 < bits) b = rem(F, mul(F, b, b), m);
    }
    return r;
}

FElem eval(const FField& F, const FPoly& a, const FElem& x) {
    FElem r = F.zero();
    for (size_t i = a.size(); i-- > 0;) r = F.add(F.mul(r, x), a[i]);
    return r;
}

bool less(const FPoly& a, const FPoly& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (size_t i = a.size(); i-- > 0;)
        if (a[i] != b[i]) return a[i] < b[i];
    return false;
}

namespace {

FPoly cube_root_poly(const FField& F, const FPoly& a) {
    FPoly r;
    for (size_t i = 0; i < a.size(); i += 3) r.push_back(F.cube_root(a[i]));
    trim(r, F);
    return r;
}

void squarefree(const FField& F, const FPoly& f, int mult, std::vector<std::pair<FPoly, int>>& out) {
    if (deg(f) < 1) return;
    FPoly df = derivative(F, f);
    FPoly c = gcd(F, f, df);
    FPoly w = quo(F, f, c);
    int i = 1;
    while (deg(w) > 0) {
        FPoly y = gcd(F, w, c);
        FPoly z = quo(F, w, y);
        if (deg(z) > 0) out.emplace_back(monic(F, z), i * mult);
        ++i;
        w = y;
        c = quo(F, c, y);
    }
    if (deg(c) > 0) squarefree(F, monic(F, cube_root_poly(F, c)), mult * 3, out);
}

void edf(const FField& F, const FPoly& g, int d, std::mt19937_64& rng, std::vector<FPoly>& out) {
    int n = deg(g);
    if (n == d) {
        out.push_back(g);
        return;
    }
    mpz_class e;
    mpz_pow_ui(e.get_mpz_t(), F.order().get_mpz_t(), d);
    e = (e - 1) / 2;
    for (;;) {
        FPoly a;
        for (int i = 0; i < n; ++i) a.push_back(F.random(rng));
        trim(a, F);
        if (deg(a) < 1) continue;
        FPoly b = powmod(F, a, e, g);
        b = sub(F, b, FPoly{F.one()});
        FPoly h = gcd(F, b, g);
        if (deg(h) > 0 && deg(h) < n) {
            edf(F, h, d, rng, out);
            edf(F, quo(F, g, h), d, rng, out);
            return;
        }
    }
}

}  // namespace

std::vector<std::pair<FPoly, int>> factor(const FField& F, const FPoly& a0) {
    FPoly a = a0;
    trim(a, F);
    if (deg(a) < 1) return {};
    std::vector<std::pair<FPoly, int>> sqf;
    squarefree(F, monic(F, a), 1, sqf);
    std::vector<std::pair<FPoly, int>> out;
    std::mt19937_64 rng(0x5eed3u);
    FPoly X{F.zero(), F.one()};
    mpz_class q = F.order();
    for (auto& [f0, m] : sqf) {
        FPoly f = f0;
        FPoly h = rem(F, X, f);
        for (int d = 1; 2 * d <= deg(f); ++d) {
            h = powmod(F, h, q, f);
            FPoly g = gcd(F, sub(F, h, X), f);
            if (deg(g) > 0) {
                std::vector<FPoly> parts;
                edf(F, g, d, rng, parts);
                for (auto& p : parts) out.emplace_back(p, m);
                f = quo(F, f, g);
                h = rem(F, h, f);
            }
        }
        if (deg(f) > 0) out.emplace_back(monic(F, f), m);
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        if (less(x.first, y.first)) return true;
        if (less(y.first, x.first)) return false;
        return x.second < y.second;
    });
    // merge equal factors coming from different squarefree parts
    std::vector<std::pair<FPoly, int>> merged;
    for (auto& p : out) {
        if (!merged.empty() && merged.back().first == p.first)
            merged.back().second += p.second;
        else
            merged.push_back(p);
    }
    return merged;
}

bool is_irreducible(const FField& F, const FPoly& a) {
    auto fs = factor(F, a);
    return fs.size() == 1 && fs[0].second == 1 && deg(fs[0].first) == deg(a);
}

}  // namespace fpoly

}  // namespace q3
