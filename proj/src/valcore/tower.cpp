#include "q3/tower.hpp"

#include "q3/errors.hpp"

#include <algorithm>
#include <sstream>

namespace q3 {

namespace {

bool flat_zero(const Z3* a, int n) {
    for (int i = 0; i < n; ++i)
        if (!a[i].is_zero()) return false;
    return true;
}

// Smallest e >= 1 with e*lambda in (1/E)Z.
int ram_needed(const ValRational& lambda, long E) {
    mpq_class t = lambda.q() * E;
    t.canonicalize();
    return static_cast<int>(t.get_den().get_si());
}

}  // namespace

TowerPtr Tower::base() {
    static const TowerPtr b = [] { return std::shared_ptr<const Tower>(new Tower()); }();
    return b;
}

const FFPtr& Tower::residue_field() const {
    static const FFPtr p = FField::prime();
    return steps_.empty() ? p : steps_.back()->res;
}

TowerPtr Tower::prefix(int level) const {
    if (level < 0 || level > levels()) throw InvalidUse("bad tower level");
    if (level == levels()) return shared_from_this();
    const Tower* t = this;
    while (t->levels() > level + 1) t = t->parent_.get();
    return t->parent_;
}

bool Tower::is_prefix_of(const Tower& other) const {
    if (levels() > other.levels()) return false;
    for (int i = 0; i < levels(); ++i)
        if (steps_[i] != other.steps_[i]) return false;
    return true;
}

std::string Tower::describe() const {
    std::ostringstream os;
    os << "Q3";
    for (const auto& s : steps_) os << "(" << s->label << ":e" << s->e << "f" << s->f << ")";
    return os.str();
}

TowerPtr Tower::make_child(const TowerPtr& parent, std::shared_ptr<Step> step) {
    std::shared_ptr<Tower> t(new Tower());
    t->parent_ = parent;
    t->steps_ = parent->steps_;
    t->steps_.push_back(step);
    t->dims_ = parent->dims_;
    t->eprod_ = parent->eprod_;
    int Dp = parent->degree();
    long Ep = parent->ram_index();
    long En = Ep * step->e;
    t->dims_.push_back(Dp * step->d);
    t->eprod_.push_back(En);
    mpq_class lamE = step->lambda.q() * En;
    lamE.canonicalize();
    if (lamE.get_den() != 1) throw InvalidUse("step slope outside the value group");
    long lE = lamE.get_num().get_si();
    t->wE_.assign(Dp * step->d, 0);
    for (int j = 0; j < step->d; ++j)
        for (int low = 0; low < Dp; ++low) t->wE_[j * Dp + low] = parent->wE_[low] * step->e + j * lE;
    return t;
}

TowerPtr Tower::extend(const TowerPtr& parent, const std::vector<TElem>& low, const std::string& label) {
    int d = static_cast<int>(low.size());
    if (d < 2) return nullptr;
    for (const auto& c : low)
        if (!c.is_exact()) throw InvalidUse("extend requires exact coefficients");
    if (low[0].rep_is_zero()) return nullptr;
    ValRational v0 = low[0].val();
    ValRational lambda = v0 / ValRational(d);
    for (int i = 1; i < d; ++i)
        if (!low[i].rep_is_zero() && low[i].val() < lambda * ValRational(d - i)) return nullptr;
    int e = ram_needed(lambda, parent->ram_index());
    if (d % e != 0) return nullptr;
    int f = d / e;
    TElem g = TElem::monomial(parent, lambda * ValRational(e));
    TElem ginv = g.inverse(g.val().ceil_long() + 8);
    const FField& PR = *parent->residue_field();
    FPoly R(f + 1, PR.zero());
    for (int k = 0; k <= f; ++k) {
        TElem c = k == f ? TElem::from_int(parent, 1) : low[e * k];
        if (c.rep_is_zero()) continue;
        TElem t = c * ginv.pow(f - k);
        R[k] = t.residue();
    }
    fpoly::trim(R, PR);
    if (fpoly::deg(R) != f || PR.is_zero(R[0]) || !fpoly::is_irreducible(PR, R)) return nullptr;
    auto st = std::make_shared<Step>();
    st->label = label;
    st->d = d;
    st->e = e;
    st->f = f;
    st->lambda = lambda;
    for (const auto& c : low) st->p.push_back(c.promote(parent).coeffs());
    st->g = g.coeffs();
    if (f > 1) {
        st->res = FField::extend(parent->residue_field(), R);
        st->rho = st->res->gen();
    } else {
        st->res = parent->residue_field();
        st->rho = PR.neg(R[0]);
    }
    return make_child(parent, st);
}

TowerPtr Tower::adjoin_unramified(const TowerPtr& parent, const FPoly& phi, const std::string& label) {
    int f = fpoly::deg(phi);
    if (f < 2) throw InvalidUse("unramified step needs degree >= 2");
    auto st = std::make_shared<Step>();
    st->label = label;
    st->d = f;
    st->e = 1;
    st->f = f;
    st->lambda = ValRational(0);
    for (int k = 0; k < f; ++k) st->p.push_back(TElem::lift(parent, phi[k]).coeffs());
    st->g = TElem::from_int(parent, 1).coeffs();
    st->res = FField::extend(parent->residue_field(), phi);
    st->rho = st->res->gen();
    return make_child(parent, st);
}

TowerPtr Tower::adjoin_ramified(const TowerPtr& parent, int e, const TElem& g, const TElem& u,
                                const std::string& label) {
    if (e < 2) throw InvalidUse("ramified step needs e >= 2");
    ValRational lambda = g.val() / ValRational(e);
    if (ram_needed(lambda, parent->ram_index()) != e) throw InvalidUse("ramified step is not irreducible");
    auto st = std::make_shared<Step>();
    st->label = label;
    st->d = e;
    st->e = e;
    st->f = 1;
    st->lambda = lambda;
    TElem p0 = -(g.promote(parent) * u.promote(parent));
    st->p.push_back(p0.coeffs());
    for (int k = 1; k < e; ++k) st->p.push_back(Flat(parent->degree()));
    st->g = g.promote(parent).coeffs();
    st->res = parent->residue_field();
    st->rho = u.promote(parent).residue();
    return make_child(parent, st);
}

void Tower::mul_flat(int level, const Z3* a, const Z3* b, Z3* out) const {
    if (level == 0) {
        out[0] = z3_mul(a[0], b[0]);
        return;
    }
    const Step& s = step(level);
    const int d = s.d;
    const int Dl = dims_[level - 1];
    std::vector<Z3> tmp(static_cast<size_t>(2 * d - 1) * Dl);
    std::vector<Z3> prod(Dl);
    std::vector<char> anz(d), bnz(d);
    for (int i = 0; i < d; ++i) {
        anz[i] = !flat_zero(a + i * Dl, Dl);
        bnz[i] = !flat_zero(b + i * Dl, Dl);
    }
    for (int i = 0; i < d; ++i) {
        if (!anz[i]) continue;
        for (int j = 0; j < d; ++j) {
            if (!bnz[j]) continue;
            mul_flat(level - 1, a + i * Dl, b + j * Dl, prod.data());
            Z3* dst = tmp.data() + (i + j) * Dl;
            for (int k = 0; k < Dl; ++k) z3_add_to(dst[k], prod[k]);
        }
    }
    for (int m = 2 * d - 2; m >= d; --m) {
        const Z3* hi = tmp.data() + m * Dl;
        if (flat_zero(hi, Dl)) continue;
        for (int k = 0; k < d; ++k) {
            const Flat& pk = s.p[k];
            if (flat_zero(pk.data(), Dl)) continue;
            mul_flat(level - 1, hi, pk.data(), prod.data());
            Z3* dst = tmp.data() + (m - d + k) * Dl;
            for (int t = 0; t < Dl; ++t) z3_sub_from(dst[t], prod[t]);
        }
    }
    for (int k = 0; k < d * Dl; ++k) out[k] = std::move(tmp[k]);
}

TElem Tower::theta_inverse(int level, long W) const {
    if (level < levels()) return prefix(level)->theta_inverse(level, W).promote(shared_from_this());
    {
        std::lock_guard<std::mutex> lk(cache_mu_);
        auto it = inv_cache_.find(level);
        if (it != inv_cache_.end() && it->second.first >= W) return *it->second.second;
    }
    const Step& s = step(level);
    TowerPtr self = shared_from_this();
    TElem p0(parent_);
    p0.coeffs_mut() = s.p[0];
    long Wp = W + p0.val().ceil_long() + 2;
    TElem p0inv = p0.inverse(Wp).promote(self);
    TElem th = TElem::gen(self, level);
    TElem S = TElem::from_int(self, 0);
    TElem pw = TElem::from_int(self, 1);
    for (int k = 1; k <= s.d; ++k) {
        TElem coef = TElem::from_int(self, 1);
        if (k < s.d) {
            TElem pk(parent_);
            pk.coeffs_mut() = s.p[k];
            coef = pk.promote(self);
        }
        S += coef * pw;
        pw = pw * th;
    }
    TElem r = -(S * p0inv);
    std::lock_guard<std::mutex> lk(cache_mu_);
    inv_cache_[level] = {W, std::make_shared<TElem>(r)};
    return r;
}

TowerPtr common_tower(const TowerPtr& a, const TowerPtr& b) {
    if (a == b) return a;
    if (a->is_prefix_of(*b)) return b;
    if (b->is_prefix_of(*a)) return a;
    throw InvalidUse("elements live in unrelated towers: " + a->describe() + " vs " + b->describe());
}

// ---------------------------------------------------------------------------

namespace {

FElem res_flat(const Tower& T, int level, const Z3* a) {
    if (level == 0) return FElem{z3_residue(a[0])};
    const Step& s = T.step(level);
    const int Dl = T.dim(level - 1);
    std::vector<FElem> blocks;
    Flat y(Dl), tmp(Dl);
    for (int k = 0; k < s.f; ++k) {
        const Z3* b = a + s.e * k * Dl;
        std::copy(b, b + Dl, y.begin());
        for (int r = 0; r < k; ++r) {
            T.mul_flat(level - 1, y.data(), s.g.data(), tmp.data());
            y.swap(tmp);
        }
        blocks.push_back(res_flat(T, level - 1, y.data()));
    }
    if (s.f == 1) return blocks[0];
    return s.res->from_blocks(blocks);
}

void lift_flat(const Tower& T, int level, const FElem& r, Z3* out) {
    if (level == 0) {
        int x = r[0] == 2 ? -1 : r[0];
        out[0] = z3_from_mpz(x);
        return;
    }
    const Step& s = T.step(level);
    const int Dl = T.dim(level - 1);
    if (s.f == 1) {
        lift_flat(T, level - 1, r, out);
        return;
    }
    bool scalar = std::all_of(s.g.begin() + 1, s.g.end(), [](const Z3& z) { return z.is_zero(); });
    if (!scalar || !(s.g[0].u == 1 || s.g[0].u == -1))
        throw InvalidUse("residue lift through a step with a non-scalar monomial");
    Z3 ginv{s.g[0].u, -s.g[0].v};
    Z3 gk{1, 0};
    for (int k = 0; k < s.f; ++k) {
        FElem ck = s.res->block(r, k);
        Z3* dst = out + s.e * k * Dl;
        lift_flat(T, level - 1, ck, dst);
        if (k > 0)
            for (int t = 0; t < Dl; ++t) dst[t] = z3_mul(dst[t], gk);
        gk = z3_mul(gk, ginv);
    }
}

}  // namespace

TElem::TElem(TowerPtr t) : tower_(std::move(t)), c_(tower_->degree()) {}

TElem TElem::from_int(const TowerPtr& t, long n) { return from_mpz(t, mpz_class(n)); }

TElem TElem::from_mpz(const TowerPtr& t, const mpz_class& n) {
    TElem r(t);
    r.c_[0] = z3_from_mpz(n);
    return r;
}

TElem TElem::from_mpq(const TowerPtr& t, const mpq_class& q, long W) {
    TElem r(t);
    bool exact = true;
    r.c_[0] = z3_from_mpq(q, W, exact);
    if (!exact) r.N_ = ValRational(W);
    return r;
}

TElem TElem::from_z3(const TowerPtr& t, const Z3& a) {
    TElem r(t);
    r.c_[0] = a;
    return r;
}

TElem TElem::gen(const TowerPtr& t, int level) {
    TElem r(t);
    r.c_[t->dim(level - 1)] = Z3{1, 0};
    return r;
}

TElem TElem::monomial(const TowerPtr& t, const ValRational& w0) {
    mpq_class w = w0.q();
    int idx = 0;
    for (int i = t->levels(); i >= 1; --i) {
        const Step& s = t->step(i);
        long Ep = t->ram_index(i - 1);
        int found = -1;
        for (int n = 0; n < s.e; ++n) {
            mpq_class rest = (w - n * s.lambda.q()) * Ep;
            rest.canonicalize();
            if (rest.get_den() == 1) {
                found = n;
                break;
            }
        }
        if (found < 0) throw InvalidUse("valuation " + w0.str() + " outside the value group");
        w -= found * s.lambda.q();
        idx += found * t->dim(i - 1);
    }
    w.canonicalize();
    if (w.get_den() != 1) throw InvalidUse("valuation outside the value group");
    TElem r(t);
    r.c_[idx] = Z3{1, w.get_num().get_si()};
    return r;
}

TElem TElem::lift(const TowerPtr& t, const FElem& r) {
    TElem x(t);
    FElem rr = t->residue_field()->degree() == static_cast<int>(r.size()) ? r : FElem{};
    if (rr.empty()) throw InvalidUse("lift of a residue from a different field");
    lift_flat(*t, t->levels(), rr, x.c_.data());
    return x;
}

bool TElem::rep_is_zero() const { return flat_zero(c_.data(), static_cast<int>(c_.size())); }

ValRational TElem::rep_val() const {
    long best = kValInf;
    bool any = false;
    long E = tower_->ram_index();
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i].is_zero()) continue;
        long w = c_[i].v * E + tower_->wE(static_cast<int>(i));
        if (!any || w < best) best = w;
        any = true;
    }
    if (!any) return ValRational::infinity();
    return ValRational(best, E);
}

ValRational TElem::val() const {
    ValRational rv = rep_val();
    if (rv < N_) return rv;
    if (rv.is_inf() && N_.is_inf()) return rv;
    throw PrecisionExhausted("valuation not certified (guarantee " + N_.str() + ")");
}

FElem TElem::residue() const {
    ValRational rv = rep_val();
    if (rv < ValRational(0)) {
        if (rv < N_) throw InvalidUse("residue of an element of negative valuation");
        throw PrecisionExhausted("residue not determined");
    }
    if (N_ <= ValRational(0)) throw PrecisionExhausted("residue not determined");
    return res_flat(*tower_, tower_->levels(), c_.data());
}

TElem TElem::promote(const TowerPtr& t) const {
    if (tower_ == t) return *this;
    if (!tower_->is_prefix_of(*t)) throw InvalidUse("promotion into an unrelated tower");
    TElem r(t);
    std::copy(c_.begin(), c_.end(), r.c_.begin());
    r.N_ = N_;
    return r;
}

void TElem::set_guarantee(const ValRational& n) {
    N_ = n;
    truncate();
}

TElem TElem::with_guarantee(const ValRational& n) const {
    TElem r = *this;
    r.N_ = vmin(N_, n);
    r.truncate();
    return r;
}

void TElem::truncate() {
    if (N_.is_inf()) return;
    long E = tower_->ram_index();
    mpq_class NE = N_.q() * E;
    NE.canonicalize();
    long a = NE.get_num().get_si();
    long b = NE.get_den().get_si();
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i].is_zero()) continue;
        // M = ceil((N*E - wE) / E)
        long num = a - b * tower_->wE(static_cast<int>(i));
        long den = b * E;
        long M = num >= 0 ? (num + den - 1) / den : -((-num) / den);
        z3_truncate(c_[i], M);
    }
}

TElem TElem::operator-() const {
    TElem r = *this;
    for (auto& z : r.c_) z.u = -z.u;
    return r;
}

TElem& TElem::operator+=(const TElem& o) {
    TowerPtr t = common_tower(tower_, o.tower_);
    if (t != tower_) *this = promote(t);
    const TElem& oo = o.tower_ == t ? o : o.promote(t);
    for (size_t i = 0; i < c_.size(); ++i) z3_add_to(c_[i], oo.c_[i]);
    N_ = vmin(N_, oo.N_);
    truncate();
    return *this;
}

TElem& TElem::operator-=(const TElem& o) { return *this += -o; }

TElem operator*(const TElem& a0, const TElem& b0) {
    TowerPtr t = common_tower(a0.tower_, b0.tower_);
    const TElem a = a0.promote(t);
    const TElem b = b0.promote(t);
    TElem r(t);
    if (!a.rep_is_zero() && !b.rep_is_zero()) t->mul_flat(t->levels(), a.c_.data(), b.c_.data(), r.c_.data());
    r.N_ = vmin(a.lb() + b.N_, b.lb() + a.N_);
    r.truncate();
    return r;
}

TElem TElem::mul_z3(const Z3& s) const {
    TElem r = *this;
    for (auto& z : r.c_) z = z3_mul(z, s);
    if (!N_.is_inf()) r.N_ = s.is_zero() ? ValRational::infinity() : N_ + ValRational(s.v);
    r.truncate();
    return r;
}

TElem TElem::shift(long k) const {
    TElem r = *this;
    for (auto& z : r.c_)
        if (!z.is_zero()) z.v += k;
    if (!N_.is_inf()) r.N_ = N_ + ValRational(k);
    return r;
}

TElem TElem::pow(unsigned long n) const {
    TElem r = from_int(tower_, 1);
    TElem b = *this;
    while (n) {
        if (n & 1) r = r * b;
        n >>= 1;
        if (n) b = b * b;
    }
    return r;
}

bool TElem::is_scalar() const {
    for (size_t i = 1; i < c_.size(); ++i)
        if (!c_[i].is_zero()) return false;
    return true;
}

namespace {

TElem unit_inverse(const TElem& u, long W) {
    const TowerPtr& t = u.tower();
    const FField& RF = *t->residue_field();
    TElem r = TElem::lift(t, RF.inv(u.residue()));
    ValRational target = vmin(u.guarantee(), ValRational(W));
    TElem one = TElem::from_int(t, 1);
    ValRational last(-1);
    for (int it = 0; it < 200; ++it) {
        TElem e = one - u * r;
        ValRational le = e.lb();
        if (le >= target || le <= last) {
            r.set_guarantee(vmin(le, target));
            return r;
        }
        last = le;
        r = r + r * e;
        // keep r as a plain representative, reduced below the target
        TElem rr(t);
        rr.coeffs_mut() = r.coeffs();
        rr.set_guarantee(target + ValRational(1));
        r = TElem(t);
        r.coeffs_mut() = rr.coeffs();
    }
    throw PrecisionExhausted("unit inverse did not converge");
}

}  // namespace

TElem TElem::inverse(long W) const {
    ValRational v = val();
    if (v.is_inf()) throw InvalidUse("inverse of zero");
    if (is_scalar()) {
        const Z3& a = c_[0];
        TElem r(tower_);
        if (N_.is_inf() && (a.u == 1 || a.u == -1)) {
            r.c_[0] = Z3{a.u, -a.v};
            return r;
        }
        ValRational Nr = vmin(N_.is_inf() ? ValRational::infinity() : N_ - ValRational(2 * a.v), ValRational(W));
        long rel = Nr.ceil_long() + a.v + 1;
        r.c_[0] = z3_inverse(a, rel);
        r.set_guarantee(Nr);
        return r;
    }
    TElem M = monomial(tower_, v);
    long Wi = W + 2 * std::abs(v.ceil_long()) + 4;
    // decompose M back into generator exponents
    TElem Minv = from_int(tower_, 1);
    int idx = 0;
    for (size_t i = 0; i < M.c_.size(); ++i)
        if (!M.c_[i].is_zero()) idx = static_cast<int>(i);
    long n0 = M.c_[idx].v;
    for (int lvl = tower_->levels(); lvl >= 1; --lvl) {
        int stride = tower_->dim(lvl - 1);
        int n = idx / stride;
        idx %= stride;
        if (n > 0) Minv = Minv * tower_->theta_inverse(lvl, Wi).pow(n);
    }
    Minv = Minv.shift(-n0);
    TElem u = *this * Minv;
    TElem ui = unit_inverse(u, Wi);
    TElem r = ui * Minv;
    return r.with_guarantee(ValRational(W));
}

std::string TElem::str() const {
    std::ostringstream os;
    bool first = true;
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i].is_zero()) continue;
        if (!first) os << " + ";
        first = false;
        os << z3_to_mpq(c_[i]).get_str() << "*e" << i;
    }
    if (first) os << "0";
    os << " [N=" << N_.str() << "]";
    return os.str();
}

}  // namespace q3
