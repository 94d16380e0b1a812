#include "q3/berktree.hpp"
#include "q3/errors.hpp"

#include <algorithm>
#include <sstream>

namespace q3 {

std::string RInterval::str() const {
    return "[" + (lo ? lo->str() : std::string("-inf")) + ", " + hi.str() + "]";
}

bool intervals_contain(const std::vector<RInterval>& s, const ValRational& r) {
    for (const auto& i : s)
        if (i.contains(r)) return true;
    return false;
}

PiecewiseAffine PiecewiseAffine::affine(const ValRational& slope, const ValRational& intercept) {
    PiecewiseAffine f;
    f.slopes_ = {slope};
    f.icpts_ = {intercept};
    return f;
}

PiecewiseAffine PiecewiseAffine::infinite() {
    PiecewiseAffine f;
    f.inf_ = true;
    return f;
}

size_t PiecewiseAffine::piece(const ValRational& r) const {
    return static_cast<size_t>(std::upper_bound(bps_.begin(), bps_.end(), r) - bps_.begin());
}

ValRational PiecewiseAffine::eval(const ValRational& r) const {
    if (inf_) return ValRational::infinity();
    if (r.is_inf()) throw InvalidUse("PiecewiseAffine::eval at infinity");
    size_t i = piece(r);
    return slopes_[i] * r + icpts_[i];
}

ValRational PiecewiseAffine::slope_at(const ValRational& r) const {
    if (inf_) return ValRational(0);
    return slopes_[piece(r)];
}

void PiecewiseAffine::simplify() {
    std::vector<ValRational> b, s{slopes_[0]}, c{icpts_[0]};
    for (size_t i = 0; i < bps_.size(); ++i) {
        if (slopes_[i + 1] == s.back() && icpts_[i + 1] == c.back()) continue;
        b.push_back(bps_[i]);
        s.push_back(slopes_[i + 1]);
        c.push_back(icpts_[i + 1]);
    }
    bps_ = std::move(b);
    slopes_ = std::move(s);
    icpts_ = std::move(c);
}

namespace {

// A point inside the open interval between two consecutive cut points.
ValRational sample(const std::optional<ValRational>& lo, const std::optional<ValRational>& hi) {
    if (lo && hi) return (*lo + *hi) / ValRational(2);
    if (lo) return *lo + ValRational(1);
    if (hi) return *hi - ValRational(1);
    return ValRational(0);
}

std::vector<ValRational> merged(const std::vector<ValRational>& a, const std::vector<ValRational>& b) {
    std::vector<ValRational> r(a);
    r.insert(r.end(), b.begin(), b.end());
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    return r;
}

}  // namespace

// op: 0 = min, 1 = max, 2 = sum.
PiecewiseAffine combine(const PiecewiseAffine& a, const PiecewiseAffine& b, int op) {
    if (a.inf_ || b.inf_) {
        if (op == 0) return a.inf_ ? b : a;
        return PiecewiseAffine::infinite();
    }
    std::vector<ValRational> cuts = merged(a.bps_, b.bps_);
    if (op != 2) {
        // add crossing points inside each cell
        std::vector<ValRational> extra;
        for (size_t k = 0; k <= cuts.size(); ++k) {
            std::optional<ValRational> lo, hi;
            if (k > 0) lo = cuts[k - 1];
            if (k < cuts.size()) hi = cuts[k];
            ValRational s = sample(lo, hi);
            size_t ia = a.piece(s), ib = b.piece(s);
            if (a.slopes_[ia] == b.slopes_[ib]) continue;
            ValRational x = (b.icpts_[ib] - a.icpts_[ia]) / (a.slopes_[ia] - b.slopes_[ib]);
            if ((!lo || *lo < x) && (!hi || x < *hi)) extra.push_back(x);
        }
        cuts = merged(cuts, extra);
    }
    PiecewiseAffine r;
    r.bps_ = cuts;
    r.slopes_.clear();
    r.icpts_.clear();
    for (size_t k = 0; k <= cuts.size(); ++k) {
        std::optional<ValRational> lo, hi;
        if (k > 0) lo = cuts[k - 1];
        if (k < cuts.size()) hi = cuts[k];
        ValRational s = sample(lo, hi);
        size_t ia = a.piece(s), ib = b.piece(s);
        if (op == 2) {
            r.slopes_.push_back(a.slopes_[ia] + b.slopes_[ib]);
            r.icpts_.push_back(a.icpts_[ia] + b.icpts_[ib]);
        } else {
            ValRational va = a.slopes_[ia] * s + a.icpts_[ia];
            ValRational vb = b.slopes_[ib] * s + b.icpts_[ib];
            bool take_a = op == 0 ? va <= vb : va >= vb;
            r.slopes_.push_back(take_a ? a.slopes_[ia] : b.slopes_[ib]);
            r.icpts_.push_back(take_a ? a.icpts_[ia] : b.icpts_[ib]);
        }
    }
    r.simplify();
    return r;
}

PiecewiseAffine pa_min(const PiecewiseAffine& a, const PiecewiseAffine& b) { return combine(a, b, 0); }
PiecewiseAffine pa_max(const PiecewiseAffine& a, const PiecewiseAffine& b) { return combine(a, b, 1); }
PiecewiseAffine operator+(const PiecewiseAffine& a, const PiecewiseAffine& b) { return combine(a, b, 2); }

PiecewiseAffine PiecewiseAffine::scale(const ValRational& q) const {
    if (inf_) {
        if (q <= ValRational(0)) throw InvalidUse("scaling +inf by a non-positive factor");
        return *this;
    }
    PiecewiseAffine r = *this;
    for (auto& s : r.slopes_) s = s * q;
    for (auto& c : r.icpts_) c = c * q;
    r.simplify();
    return r;
}

PiecewiseAffine PiecewiseAffine::compose(const PiecewiseAffine& g) const {
    if (inf_ || g.inf_) return infinite();
    std::vector<ValRational> cuts = g.bps_;
    for (size_t k = 0; k < g.slopes_.size(); ++k) {
        if (g.slopes_[k] < ValRational(0)) throw InvalidUse("compose: inner map is decreasing");
        if (g.slopes_[k] == ValRational(0)) continue;
        for (const auto& b : bps_) {
            ValRational x = (b - g.icpts_[k]) / g.slopes_[k];
            if ((k == 0 || g.bps_[k - 1] < x) && (k == g.bps_.size() || x < g.bps_[k])) cuts.push_back(x);
        }
    }
    cuts = merged(cuts, {});
    PiecewiseAffine r;
    r.bps_ = cuts;
    r.slopes_.clear();
    r.icpts_.clear();
    for (size_t k = 0; k <= cuts.size(); ++k) {
        std::optional<ValRational> lo, hi;
        if (k > 0) lo = cuts[k - 1];
        if (k < cuts.size()) hi = cuts[k];
        ValRational s = sample(lo, hi);
        size_t ig = g.piece(s);
        size_t jf = piece(g.slopes_[ig] * s + g.icpts_[ig]);
        r.slopes_.push_back(slopes_[jf] * g.slopes_[ig]);
        r.icpts_.push_back(slopes_[jf] * g.icpts_[ig] + icpts_[jf]);
    }
    r.simplify();
    return r;
}

std::vector<RInterval> PiecewiseAffine::where_ge(const ValRational& c) const {
    if (inf_) return {RInterval{std::nullopt, ValRational::infinity()}};
    std::vector<RInterval> out;
    auto push = [&](std::optional<ValRational> lo, ValRational hi) {
        if (lo && hi < *lo) return;
        if (!out.empty() && lo && out.back().hi >= *lo) {
            out.back().hi = vmax(out.back().hi, hi);
            return;
        }
        out.push_back({lo, hi});
    };
    for (size_t k = 0; k < slopes_.size(); ++k) {
        std::optional<ValRational> lo;
        if (k > 0) lo = bps_[k - 1];
        ValRational hi = k < bps_.size() ? bps_[k] : ValRational::infinity();
        const ValRational &m = slopes_[k], &b = icpts_[k];
        if (m == ValRational(0)) {
            if (b >= c) push(lo, hi);
        } else {
            ValRational x = (c - b) / m;
            if (m > ValRational(0)) {
                if (x < hi) push(lo ? std::optional<ValRational>(vmax(*lo, x)) : std::optional<ValRational>(x), hi);
                else if (x == hi && !hi.is_inf()) push(hi, hi);
            } else {
                if (!lo || x >= *lo) push(lo, vmin(hi, x));
            }
        }
    }
    return out;
}

std::vector<RInterval> PiecewiseAffine::where_le(const ValRational& c) const {
    if (inf_) return {};
    return scale(ValRational(-1)).where_ge(-c);
}

std::string PiecewiseAffine::str() const {
    if (inf_) return "+inf";
    std::ostringstream os;
    for (size_t k = 0; k < slopes_.size(); ++k) {
        if (k) os << " | " << bps_[k - 1] << " | ";
        os << slopes_[k] << "*r+" << icpts_[k];
    }
    return os.str();
}

PiecewiseAffine gauss_profile(const std::vector<std::pair<int, ValRational>>& cv) {
    PiecewiseAffine f = PiecewiseAffine::infinite();
    for (const auto& [i, v] : cv) {
        if (v.is_inf()) continue;
        f = pa_min(f, PiecewiseAffine::affine(ValRational(i), v));
    }
    return f;
}

PiecewiseAffine gauss_profile(const TPoly& f, std::vector<RInterval>* trust) {
    std::vector<std::pair<int, ValRational>> cert;
    std::vector<std::pair<int, ValRational>> loose;
    for (size_t i = 0; i < f.size(); ++i) {
        if (f[i].is_exact() && f[i].rep_is_zero()) continue;
        if (f[i].certified()) cert.push_back({static_cast<int>(i), f[i].val()});
        else loose.push_back({static_cast<int>(i), f[i].lb()});
    }
    PiecewiseAffine p = gauss_profile(cert);
    if (trust) {
        std::vector<RInterval> t{RInterval{std::nullopt, ValRational::infinity()}};
        if (p.is_infinite() && !loose.empty()) t.clear();
        for (const auto& [i, n] : loose) {
            if (p.is_infinite()) break;
            // uncertified term stays above the profile
            auto ok = (PiecewiseAffine::affine(ValRational(i), n) + p.scale(ValRational(-1))).where_ge(ValRational(0));
            std::vector<RInterval> nt;
            for (const auto& a : t)
                for (const auto& b : ok) {
                    std::optional<ValRational> lo = a.lo;
                    if (b.lo && (!lo || *lo < *b.lo)) lo = b.lo;
                    ValRational hi = vmin(a.hi, b.hi);
                    if (!lo || *lo <= hi) nt.push_back({lo, hi});
                }
            t = nt;
        }
        *trust = t;
    }
    return p;
}

Theta::Theta(int degree, std::vector<ValRational> distances) : deg_(degree), d_(std::move(distances)) {
    std::sort(d_.begin(), d_.end());
    if (static_cast<int>(d_.size()) != deg_ - 1) throw InvalidUse("theta: need deg-1 distances");
    for (const auto& d : d_)
        if (d.is_inf()) throw InvalidUse("theta: repeated root");
}

int Theta::cluster(const ValRational& r) const {
    int c = 1;
    for (const auto& d : d_)
        if (d >= r) ++c;
    return c;
}

ValRational Theta::eval(const ValRational& r) const {
    if (r.is_inf()) return r;
    ValRational s = r * ValRational(cluster(r));
    for (const auto& d : d_)
        if (d < r) s += d;
    return s;
}

ValRational Theta::inverse(const ValRational& s) const {
    if (s.is_inf()) return s;
    std::vector<ValRational> u = d_;
    u.erase(std::unique(u.begin(), u.end()), u.end());
    if (u.empty() || s <= eval(u[0])) return s / ValRational(deg_);
    for (size_t k = 0; k < u.size(); ++k) {
        ValRational tk = eval(u[k]);
        int slope = 1;
        for (const auto& d : d_)
            if (d > u[k]) ++slope;
        if (k + 1 == u.size() || s <= eval(u[k + 1])) return u[k] + (s - tk) / ValRational(slope);
    }
    throw InvalidUse("theta inverse");
}

PiecewiseAffine Theta::function() const {
    // θ(r) = r + Σ_d min(r, d)
    PiecewiseAffine g = PiecewiseAffine::affine(ValRational(1), ValRational(0));
    for (const auto& d : d_)
        g = g + pa_min(PiecewiseAffine::affine(ValRational(1), ValRational(0)), PiecewiseAffine::constant(d));
    return g;
}

std::pair<int, ValRational> Theta::split(const ValRational& s) const {
    ValRational r = inverse(s);
    int c = cluster(r);
    if (deg_ % c != 0) throw InvalidUse("theta: cluster size does not divide the degree");
    return {deg_ / c, r};
}

}  // namespace q3
