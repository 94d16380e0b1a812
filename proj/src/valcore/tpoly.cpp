#include "q3/tpoly.hpp"

#include "q3/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <functional>

namespace q3 {

namespace tpoly {

TowerPtr tower_of(const TPoly& f) {
    if (f.empty()) throw InvalidUse("empty polynomial");
    TowerPtr t = f[0].tower();
    for (const auto& c : f) t = common_tower(t, c.tower());
    return t;
}

TPoly promote(const TPoly& f, const TowerPtr& t) {
    TPoly r;
    r.reserve(f.size());
    for (const auto& c : f) r.push_back(c.promote(t));
    return r;
}

TPoly from_ints(const TowerPtr& t, const std::vector<long>& c) {
    TPoly r;
    for (long x : c) r.push_back(TElem::from_int(t, x));
    return r;
}

int degree(const TPoly& f) { return static_cast<int>(f.size()) - 1; }

TElem eval(const TPoly& f, const TElem& x) {
    TowerPtr t = common_tower(tower_of(f), x.tower());
    TElem r(t);
    for (size_t i = f.size(); i-- > 0;) r = r * x + f[i];
    return r;
}

TPoly derivative(const TPoly& f) {
    TPoly r;
    for (size_t i = 1; i < f.size(); ++i) r.push_back(f[i].mul_z3(z3_from_mpz(static_cast<long>(i))));
    if (r.empty()) r.push_back(TElem(tower_of(f)));
    return r;
}

TPoly taylor_shift(const TPoly& f, const TElem& c) {
    TowerPtr t = common_tower(tower_of(f), c.tower());
    TPoly b = promote(f, t);
    int n = degree(b);
    for (int i = 0; i < n; ++i)
        for (int j = n - 1; j >= i; --j) b[j] += c * b[j + 1];
    return b;
}

TPoly mul(const TPoly& a, const TPoly& b) {
    TowerPtr t = common_tower(tower_of(a), tower_of(b));
    TPoly r(a.size() + b.size() - 1, TElem(t));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

TPoly rem_monic(const TPoly& a, const TPoly& m) {
    TPoly r = promote(a, common_tower(tower_of(a), tower_of(m)));
    int dm = degree(m);
    for (int k = degree(r); k >= dm; --k) {
        TElem c = r[k];
        for (int j = 0; j <= dm; ++j) r[k - dm + j] -= c * m[j];
    }
    r.resize(std::max(dm, 1), TElem(r[0].tower()));
    return r;
}

void divrem_monic(const TPoly& a, const TPoly& m, TPoly& q, TPoly& r) {
    r = promote(a, common_tower(tower_of(a), tower_of(m)));
    TowerPtr t = r[0].tower();
    int dm = degree(m);
    int da = degree(r);
    q.assign(std::max(da - dm + 1, 1), TElem(t));
    for (int k = da; k >= dm; --k) {
        TElem c = r[k];
        q[k - dm] = c;
        for (int j = 0; j <= dm; ++j) r[k - dm + j] -= c * m[j];
    }
    r.resize(std::max(dm, 1), TElem(t));
}

TElem exact_rep(const TElem& x, long W) {
    TElem r = x;
    r.set_guarantee(ValRational(W));
    TElem e(r.tower());
    e.coeffs_mut() = r.coeffs();
    return e;
}

}  // namespace tpoly

namespace {

bool exact_zero(const TElem& a) { return a.is_exact() && a.rep_is_zero(); }

struct Pt {
    int i;
    ValRational v;
};

// Lower convex hull of points sorted by i; returns vertex indices into pts.
std::vector<size_t> lower_hull(const std::vector<Pt>& pts) {
    std::vector<size_t> h;
    auto cross_bad = [&](size_t a, size_t b, size_t c) {
        // b is not strictly below the segment a-c
        const Pt &A = pts[a], &B = pts[b], &C = pts[c];
        mpq_class lhs = (B.v.q() - A.v.q()) * (C.i - A.i);
        mpq_class rhs = (C.v.q() - A.v.q()) * (B.i - A.i);
        return lhs >= rhs;
    };
    for (size_t k = 0; k < pts.size(); ++k) {
        while (h.size() >= 2 && cross_bad(h[h.size() - 2], h.back(), k)) h.pop_back();
        h.push_back(k);
    }
    return h;
}

// Hull over coefficients [start, n]; vertices must be certified.
std::vector<NPSegment> hull_segments(const TPoly& f, int start) {
    std::vector<Pt> pts;
    std::vector<bool> cert;
    for (int i = start; i < static_cast<int>(f.size()); ++i) {
        if (exact_zero(f[i])) continue;
        pts.push_back({i, f[i].lb()});
        cert.push_back(f[i].certified());
    }
    std::vector<NPSegment> segs;
    if (pts.empty()) return segs;
    for (const auto& p : pts)
        if (p.v.is_inf()) throw PrecisionExhausted("coefficient with unbounded guarantee");
    auto h = lower_hull(pts);
    for (size_t k : h)
        if (!cert[k])
            throw PrecisionExhausted("Newton polygon vertex at degree " + std::to_string(pts[k].i) +
                                     " is not certified");
    for (size_t k = 0; k + 1 < h.size(); ++k) {
        const Pt &A = pts[h[k]], &B = pts[h[k + 1]];
        NPSegment s;
        s.i0 = A.i;
        s.i1 = B.i;
        s.length = B.i - A.i;
        s.slope = (A.v - B.v) / ValRational(s.length);
        segs.push_back(s);
    }
    return segs;
}

}  // namespace

NewtonPolygon newton_polygon(const TPoly& f0) {
    TPoly f = f0;
    while (!f.empty() && exact_zero(f.back())) f.pop_back();
    if (f.size() < 2) return {};
    if (!f.back().certified()) throw PrecisionExhausted("leading coefficient not certified");
    NewtonPolygon np;
    while (np.zero_order < static_cast<int>(f.size()) && exact_zero(f[np.zero_order])) ++np.zero_order;
    np.segments = hull_segments(f, np.zero_order);
    return np;
}

namespace {

// Newton refinement of a simple root separated from the others by more than `sep`.
TElem newton_refine(const TPoly& P0, const TElem& x0, const ValRational& sep, long W) {
    TowerPtr t = common_tower(tpoly::tower_of(P0), x0.tower());
    TPoly P = tpoly::promote(P0, t);
    TPoly dP = tpoly::derivative(P);
    TElem x = tpoly::exact_rep(x0.promote(t), W + 8);
    for (int it = 0; it < 80; ++it) {
        TElem Px = tpoly::eval(P, x);
        TElem dPx = tpoly::eval(dP, x);
        if (exact_zero(Px)) return x;
        if (!dPx.certified() || exact_zero(dPx)) throw PrecisionExhausted("Newton step: derivative not certified");
        ValRational vd = dPx.val();
        if (!Px.certified()) {
            ValRational G = Px.lb() - vd;
            if (G <= sep) throw PrecisionExhausted("root not separated at current precision");
            x.set_guarantee(G);
            return x;
        }
        ValRational G = Px.val() - vd;
        if (G >= ValRational(W)) {
            if (G <= sep) throw PrecisionExhausted("root not separated at current precision");
            x.set_guarantee(G);
            return x;
        }
        long Wi = W + 2 * std::abs(vd.ceil_long()) + 8;
        TElem step = Px * dPx.inverse(Wi);
        x = tpoly::exact_rep(x - step, Wi);
    }
    throw PrecisionExhausted("Newton iteration did not converge");
}

TPoly exact_poly(const TPoly& f, long W) {
    TPoly r;
    for (const auto& c : f) r.push_back(tpoly::exact_rep(c, W));
    return r;
}

TPoly lift_fpoly(const TowerPtr& t, const FPoly& f) {
    TPoly r;
    for (const auto& c : f) r.push_back(TElem::lift(t, c));
    if (r.empty()) r.push_back(TElem(t));
    return r;
}

FPoly reduce_poly(const TPoly& f, const FField& RF) {
    FPoly r;
    for (const auto& c : f) r.push_back(c.rep_is_zero() && c.is_exact() ? RF.zero() : c.residue());
    fpoly::trim(r, RF);
    return r;
}

// Monic factor of Q over T whose roots are those on segment s with
// t^e/g reducing to a root of phi (multiplicity m in the residual).
TPoly class_factor(const TPoly& Q, const NPSegment& s, int e, const TElem& g, const FPoly& phi, int m, long W) {
    TowerPtr T = tpoly::tower_of(Q);
    const FField& RF = *T->residue_field();
    TowerPtr T2 = T;
    TElem c = g;
    if (e > 1) {
        T2 = Tower::adjoin_ramified(T, e, g, TElem::from_int(T, 1), "cf");
        c = TElem::gen(T2, T2->levels());
    }
    ValRational lam = s.slope;
    ValRational mu = Q[s.i0].val() + lam * ValRational(s.i0);
    TElem Mn = TElem::monomial(T2, -mu);
    TPoly Pt;
    TElem ci = TElem::from_int(T2, 1);
    for (const auto& a : Q) {
        Pt.push_back(a.promote(T2) * ci * Mn);
        ci = ci * c;
    }
    // residual target: phi(u^e)^m
    FPoly phie;
    for (int k = 0; k <= fpoly::deg(phi); ++k) {
        phie.push_back(phi[k]);
        if (k < fpoly::deg(phi))
            for (int j = 1; j < e; ++j) phie.push_back(RF.zero());
    }
    FPoly Abar{RF.one()};
    for (int j = 0; j < m; ++j) Abar = fpoly::mul(RF, Abar, phie);
    FPoly Pbar = reduce_poly(Pt, RF);
    FPoly Bbar, rr;
    fpoly::divrem(RF, Pbar, Abar, Bbar, rr);
    if (!rr.empty()) throw PrecisionExhausted("class factor: residual does not divide");
    FPoly sb, tb;
    FPoly gg = fpoly::xgcd(RF, Bbar, Abar, sb, tb);
    if (fpoly::deg(gg) != 0) throw InvalidUse("class factor: residual parts not coprime");
    TPoly A = lift_fpoly(T2, Abar);
    TPoly S = lift_fpoly(T2, sb);
    long Wi = W + 8;
    ValRational target(W);
    for (const auto& a : Pt) target = vmin(target, a.guarantee());
    for (int it = 0; it < 200; ++it) {
        TPoly B, E;
        tpoly::divrem_monic(Pt, A, B, E);
        ValRational lbE = ValRational::infinity();
        for (const auto& x : E) lbE = vmin(lbE, x.lb());
        if (lbE >= target) break;
        // S <- S (2 - B S) mod A
        TPoly BS = tpoly::rem_monic(tpoly::mul(B, S), A);
        TPoly two = BS;
        for (auto& x : two) x = -x;
        two[0] += TElem::from_int(T2, 2);
        S = exact_poly(tpoly::rem_monic(tpoly::mul(S, two), A), Wi);
        TPoly dA = tpoly::rem_monic(tpoly::mul(S, E), A);
        for (size_t j = 0; j < dA.size() && j + 1 < A.size(); ++j) A[j] += dA[j];
        A = exact_poly(A, Wi);
        if (it == 199) throw PrecisionExhausted("class factor lifting did not converge");
    }
    // F(t) = c^k A(t / c), projected to T
    int k = tpoly::degree(A);
    TPoly F(k + 1, TElem(T));
    TElem cp = TElem::from_int(T2, 1);
    for (int j = k; j >= 0; --j) {
        TElem v = A[j] * cp;
        TElem p(T);
        std::copy(v.coeffs().begin(), v.coeffs().begin() + T->degree(), p.coeffs_mut().begin());
        F[j] = tpoly::exact_rep(p, Wi);
        cp = cp * c;
    }
    F[k] = TElem::from_int(T, 1);
    return F;
}

// Solves M X = R for square M by elimination with minimal-valuation pivots.
std::vector<std::vector<TElem>> solve_linear(std::vector<std::vector<TElem>> M, std::vector<std::vector<TElem>> R,
                                             long W) {
    int n = static_cast<int>(M.size());
    int k = R.empty() ? 0 : static_cast<int>(R[0].size());
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n; ++r) {
            if (exact_zero(M[r][col]) || !M[r][col].certified()) continue;
            if (piv < 0 || M[r][col].val() < M[piv][col].val()) piv = r;
        }
        if (piv < 0) throw PrecisionExhausted("linear system: no certified pivot");
        std::swap(M[piv], M[col]);
        std::swap(R[piv], R[col]);
        long Wi = W + 2 * std::abs(M[col][col].val().ceil_long()) + 8;
        TElem inv = M[col][col].inverse(Wi);
        for (int r = 0; r < n; ++r) {
            if (r == col || exact_zero(M[r][col])) continue;
            TElem f = M[r][col] * inv;
            for (int j = col; j < n; ++j) M[r][j] -= f * M[col][j];
            for (int j = 0; j < k; ++j) R[r][j] -= f * R[col][j];
        }
        for (int j = 0; j < k; ++j) R[col][j] = R[col][j] * inv;
        for (int j = col; j < n; ++j) M[col][j] = M[col][j] * inv;
    }
    return R;
}

// T[t]/(G) for a monic G; elements are coefficient vectors of length n.
struct ClusterAlgebra {
    TowerPtr T;
    TPoly G;
    long W;
    int n;
    ClusterAlgebra(TowerPtr t, TPoly g, long w) : T(std::move(t)), G(std::move(g)), W(w), n(tpoly::degree(G)) {}

    TPoly reduce(const TPoly& a) const {
        TPoly r = static_cast<int>(a.size()) > n ? tpoly::rem_monic(a, G) : a;
        r.resize(n, TElem(T));
        return r;
    }
    TPoly mul(const TPoly& a, const TPoly& b) const { return reduce(tpoly::mul(a, b)); }
    // columns h * t^j
    std::vector<std::vector<TElem>> matrix(const TPoly& h) const {
        std::vector<std::vector<TElem>> M(n, std::vector<TElem>(n, TElem(T)));
        TPoly cur = reduce(h);
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) M[i][j] = cur[i];
            TPoly sh(n + 1, TElem(T));
            for (int i = 0; i < n; ++i) sh[i + 1] = cur[i];
            cur = reduce(sh);
        }
        return M;
    }
    // v(N(h)) / n, the value at a root when G is irreducible
    ValRational value(const TPoly& h) const {
        auto M = matrix(h);
        ValRational v(0);
        for (int col = 0; col < n; ++col) {
            int piv = -1;
            for (int r = col; r < n; ++r) {
                if (exact_zero(M[r][col]) || !M[r][col].certified()) continue;
                if (piv < 0 || M[r][col].val() < M[piv][col].val()) piv = r;
            }
            if (piv < 0) throw PrecisionExhausted("cluster algebra: norm not certified");
            std::swap(M[piv], M[col]);
            v = v + M[col][col].val();
            long Wi = W + 2 * std::abs(M[col][col].val().ceil_long()) + 8;
            TElem inv = M[col][col].inverse(Wi);
            for (int r = col + 1; r < n; ++r) {
                if (exact_zero(M[r][col])) continue;
                TElem f = M[r][col] * inv;
                for (int j = col; j < n; ++j) M[r][j] -= f * M[col][j];
            }
        }
        return v / ValRational(n);
    }
    // a / b
    TPoly divide(const TPoly& a, const TPoly& b) const {
        auto M = matrix(b);
        TPoly ra = reduce(a);
        std::vector<std::vector<TElem>> R(n, std::vector<TElem>(1, TElem(T)));
        for (int i = 0; i < n; ++i) R[i][0] = ra[i];
        auto X = solve_linear(M, R, W);
        TPoly out(n, TElem(T));
        for (int i = 0; i < n; ++i) out[i] = X[i][0];
        return out;
    }
    // (characteristic polynomial of z, coordinates of t in the basis z^j)
    std::pair<TPoly, std::vector<TElem>> krylov(const TPoly& z) const {
        std::vector<TPoly> pw;
        TPoly cur(n, TElem(T));
        cur[0] = TElem::from_int(T, 1);
        for (int k = 0; k <= n; ++k) {
            pw.push_back(cur);
            cur = mul(cur, z);
        }
        std::vector<std::vector<TElem>> M(n, std::vector<TElem>(n, TElem(T)));
        std::vector<std::vector<TElem>> R(n, std::vector<TElem>(2, TElem(T)));
        TPoly tt = reduce(TPoly{TElem(T), TElem::from_int(T, 1)});
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) M[i][j] = pw[j][i];
            R[i][0] = pw[n][i];
            R[i][1] = tt[i];
        }
        auto X = solve_linear(M, R, W);
        TPoly chi(n + 1, TElem(T));
        std::vector<TElem> tc(n, TElem(T));
        for (int j = 0; j < n; ++j) {
            chi[j] = -X[j][0];
            tc[j] = X[j][1];
        }
        chi[n] = TElem::from_int(T, 1);
        return {chi, tc};
    }
};

struct Searcher {
    const RootOptions& opt;
    TPoly P;
    bool first_only = false;
    std::vector<TElem> leaves;
    int label_counter = 0;

    std::string next_label() { return opt.label + std::to_string(++label_counter); }

    void run(const TElem& c, const std::optional<ValRational>& lam_min, int depth) {
        TowerPtr T = c.tower();
        TPoly Q = tpoly::taylor_shift(tpoly::promote(P, T), c);
        int n = tpoly::degree(Q);
        int start = 0;
        if (exact_zero(Q[0])) {
            leaves.push_back(c);
            start = 1;
        } else if (!Q[0].certified()) {
            if (n < 1 || !Q[1].certified())
                throw PrecisionExhausted("cluster of roots not separated at current precision");
            leaves.push_back(newton_refine(P, c, lam_min.value_or(ValRational(-1000000)), opt.W));
            start = 1;
        }
        if (first_only && !leaves.empty()) return;
        std::vector<NPSegment> segs = hull_segments(Q, start);
        std::vector<NPSegment> todo;
        for (const auto& s : segs)
            if (!lam_min || s.slope > *lam_min) todo.push_back(s);
        std::sort(todo.begin(), todo.end(), [&](const NPSegment& a, const NPSegment& b) {
            return opt.alt ? a.slope < b.slope : a.slope > b.slope;
        });
        for (const auto& s : todo) {
            process_segment(Q, c, s, depth);
            if (first_only && !leaves.empty()) return;
        }
    }

    // Exact root of the class factor; separation from the other roots of P
    // is certified before Newton refinement.
    void wild_leaf(const TPoly& Q, const TElem& c, const NPSegment& s, int e, const TElem& g, const FPoly& phi,
                   const ValRational& lam) {
        TowerPtr T = c.tower();
        TPoly F = class_factor(Q, s, e, g, phi, 1, opt.W);
        std::vector<TElem> low(F.begin(), F.end() - 1);
        TowerPtr T1 = Tower::extend(T, low, next_label());
        if (!T1) throw PrecisionExhausted("class factor not certified irreducible");
        TElem x = c.promote(T1) + TElem::gen(T1, T1->levels());
        TPoly Px = tpoly::taylor_shift(tpoly::promote(P, T1), x);
        if (!Px[1].certified()) throw PrecisionExhausted("wild root: derivative not certified");
        ValRational sep = lam;
        for (const auto& sg : hull_segments(Px, 1)) sep = vmax(sep, sg.slope);
        leaves.push_back(newton_refine(P, x, sep, opt.W));
    }

    // Roots t = sum_j tc_j z^j of the cluster, z running over the roots of chi.
    void split_through(const TPoly& chi, const std::vector<TElem>& tc, const TElem& c, const ValRational& lam,
                       int depth) {
        TPoly ch;
        for (const auto& a : chi) ch.push_back(tpoly::exact_rep(a, opt.W + 8).with_guarantee(a.guarantee()));
        RootOptions sub = opt;
        sub.label = next_label() + "s";
        Searcher inner{sub, ch, first_only, {}, 0};
        inner.run(TElem(tpoly::tower_of(ch)), std::nullopt, depth);
        for (const TElem& zr : inner.leaves) {
            TowerPtr Tz = zr.tower();
            TElem t(Tz), zp = TElem::from_int(Tz, 1);
            for (size_t j = 0; j < tc.size(); ++j) {
                t += tc[j].promote(Tz) * zp;
                zp = zp * zr;
            }
            add_refined(c.promote(Tz) + t, lam);
            if (first_only) return;
        }
    }

    void add_refined(const TElem& x, const ValRational& lam) {
        TowerPtr Tx = x.tower();
        TPoly Px = tpoly::taylor_shift(tpoly::promote(P, Tx), tpoly::exact_rep(x, opt.W + 8));
        ValRational sep = lam;
        if (Px.size() > 1 && Px[1].certified())
            for (const auto& sg : hull_segments(Px, 1)) sep = vmax(sep, sg.slope);
        leaves.push_back(newton_refine(P, x, sep, opt.W));
    }

    // Repeated residual factor on a wild segment: MacLane refinement inside
    // A = T1[t]/(G), G the class factor of the cluster over T1 = T(rho).
    // Key polynomials phi_1 = t, phi_2, ... are improved until their values
    // generate a value group of index deg G over T1; a uniformizer built from
    // them has a single-slope characteristic polynomial, which gives the tower.
    void wild_cluster(const TPoly& Q, const TElem& c, const NPSegment& s, int e, const TElem& g, const TElem& rho,
                      int m, const ValRational& lam, int depth) {
        TowerPtr T1 = rho.tower();
        const FFPtr& RF1 = T1->residue_field();
        FPoly lin{RF1->neg(rho.residue()), RF1->one()};
        TPoly G = class_factor(tpoly::promote(Q, T1), s, e, g.promote(T1), lin, m, opt.W);
        ClusterAlgebra A{T1, G, opt.W};
        const int n = A.n;
        const long ET = T1->ram_index();
        struct Key {
            TPoly phi;
            ValRational val;
            long e = 1;  // index of the value group gained at this level
        };
        std::vector<Key> keys;
        long D = ET;  // value group of levels so far is (1/D)Z
        auto in_group = [](const ValRational& v, long d) { return (v * ValRational(d)).is_integer(); };
        // monomial pi^b * prod phi_i^{a_i}, 0 <= a_i < e_i, of value v (v in (1/D)Z)
        auto monomial = [&](ValRational v, size_t levels) {
            TPoly M{TElem::from_int(T1, 1)};
            std::vector<long> Ds{ET};
            for (size_t i = 0; i < levels; ++i) Ds.push_back(Ds.back() * keys[i].e);
            for (size_t i = levels; i-- > 0;) {
                long a = 0;
                while (!in_group(v - ValRational(a) * keys[i].val, Ds[i])) ++a;
                v = v - ValRational(a) * keys[i].val;
                for (long k = 0; k < a; ++k) M = tpoly::mul(M, keys[i].phi);
            }
            for (auto& x : M) x = x * TElem::monomial(T1, v);
            return M;
        };
        TPoly tpol{TElem(T1), TElem::from_int(T1, 1)};
        keys.push_back({tpol, lam, 1});
        // value of an element; a characteristic polynomial with several slopes
        // means G splits, and the roots are then found through that polynomial
        bool split = false;
        auto value_or_split = [&](const TPoly& h) {
            std::pair<TPoly, std::vector<TElem>> X;
            try {
                X = A.krylov(A.reduce(h));
            } catch (const PrecisionExhausted&) {
                return A.value(h);
            }
            auto segs = hull_segments(X.first, 0);
            if (segs.size() == 1) return segs[0].slope;
            split_through(X.first, X.second, c, lam, depth);
            split = true;
            return ValRational(0);
        };
        // residue of a unit u, read off the reduced characteristic polynomial;
        // distinct residual factors split G, a single one of degree > 1 needs
        // an unramified step first
        auto residue_of = [&](const TPoly& u) -> std::optional<TElem> {
            auto X = A.krylov(A.reduce(u));
            FPoly cb = reduce_poly(X.first, *RF1);
            auto facs = fpoly::factor(*RF1, cb);
            if (facs.size() == 1 && fpoly::deg(facs[0].first) == 1)
                return TElem::lift(T1, RF1->neg(facs[0].first[0]));
            TPoly chi = X.first;
            if (facs.size() == 1) {
                TowerPtr Tu = Tower::adjoin_unramified(T1, facs[0].first, next_label());
                chi = tpoly::promote(chi, Tu);
            }
            split_through(chi, X.second, c, lam, depth);
            split = true;
            return std::nullopt;
        };
        for (int iter = 0; iter < 200; ++iter) {
            Key& top = keys.back();
            top.val = value_or_split(top.phi);
            if (split) return;
            if (!in_group(top.val, D)) {
                top.e = (top.val * ValRational(D)).den().get_si();
                D *= top.e;
                if (std::getenv("Q3_TRACE"))
                    std::fprintf(stderr, "[search] key degree %d value %s index %ld\n", tpoly::degree(top.phi),
                                 top.val.str().c_str(), D / ET);
                if (D / ET == n) break;
                if (D / ET > n) throw IrregularResidual("wild cluster: value group index exceeds degree");
                size_t lv = keys.size();
                TPoly Ppow{TElem::from_int(T1, 1)};
                for (long k = 0; k < top.e; ++k) Ppow = tpoly::mul(Ppow, top.phi);
                TPoly M = monomial(top.val * ValRational(top.e), lv - 1);
                auto r = residue_of(A.divide(Ppow, M));
                if (!r) return;
                TPoly next = Ppow;
                for (size_t j = 0; j < M.size(); ++j) next[j] -= *r * M[j];
                keys.push_back({next, ValRational(0), 1});
                continue;
            }
            TPoly M = monomial(top.val, keys.size() - 1);
            auto r = residue_of(A.divide(top.phi, M));
            if (!r) return;
            for (size_t j = 0; j < M.size(); ++j) top.phi[j] -= *r * M[j];
            if (iter == 199) throw PrecisionExhausted("wild cluster: key polynomial refinement did not stop");
        }
        // uniformizer of value 1/D
        TPoly pi = A.reduce(monomial(ValRational(1, D), keys.size()));
        auto X = A.krylov(pi);
        TPoly chi = X.first;
        if (hull_segments(chi, 0).size() > 1) {
            split_through(chi, X.second, c, lam, depth);
            return;
        }
        std::vector<TElem> low;
        for (size_t j = 0; j + 1 < chi.size(); ++j) low.push_back(tpoly::exact_rep(chi[j], opt.W + 8));
        TowerPtr TL = Tower::extend(T1, low, next_label());
        if (!TL && std::getenv("Q3_TRACE")) {
            std::fprintf(stderr, "[search] uniformizer slopes:");
            for (const auto& sg : hull_segments(chi, 0)) std::fprintf(stderr, " %s x%d", sg.slope.str().c_str(), sg.length);
            std::fprintf(stderr, "\n");
        }
        if (!TL) throw IrregularResidual("wild cluster: uniformizer polynomial not certified irreducible");
        TElem pz = TElem::gen(TL, TL->levels());
        TElem t(TL), zp = TElem::from_int(TL, 1);
        for (int j = 0; j < n; ++j) {
            t += X.second[j].promote(TL) * zp;
            zp = zp * pz;
        }
        add_refined(c.promote(TL) + t, lam);
    }

    void process_segment(const TPoly& Q, const TElem& c, const NPSegment& s, int depth) {
        TowerPtr T = c.tower();
        long ET = T->ram_index();
        mpq_class le = s.slope.q() * ET;
        le.canonicalize();
        int e = static_cast<int>(le.get_den().get_si());
        ValRational lam = s.slope;
        TElem g = TElem::monomial(T, lam * ValRational(e));
        TElem N0 = TElem::monomial(T, -Q[s.i0].val());
        const FFPtr& RF = T->residue_field();
        int K = (s.i1 - s.i0) / e;
        FPoly R(K + 1, RF->zero());
        TElem gk = TElem::from_int(T, 1);
        for (int k = 0; k <= K; ++k) {
            const TElem& a = Q[s.i0 + e * k];
            if (!exact_zero(a)) R[k] = (a * N0 * gk).residue();
            gk = gk * g;
        }
        fpoly::trim(R, *RF);
        auto facs = fpoly::factor(*RF, R);
        if (std::getenv("Q3_TRACE")) {
            std::fprintf(stderr, "[search] depth %d tower %s slope %s len %d e %d factors:", depth,
                         T->describe().c_str(), lam.str().c_str(), s.length, e);
            for (const auto& [phi, m] : facs) std::fprintf(stderr, " (deg %d)^%d", fpoly::deg(phi), m);
            std::fprintf(stderr, "\n");
        }
        if (opt.alt) std::reverse(facs.begin(), facs.end());
        for (const auto& [phi, m] : facs) {
            bool extends = false;
            TowerPtr T1 = T;
            TElem rho;
            if (fpoly::deg(phi) > 1) {
                T1 = Tower::adjoin_unramified(T, phi, next_label());
                rho = TElem::gen(T1, T1->levels());
                extends = true;
            } else {
                rho = TElem::lift(T, RF->neg(phi[0]));
            }
            TElem x1;
            if (e > 1) {
                TowerPtr T2 = Tower::adjoin_ramified(T1, e, g.promote(T1), rho, next_label());
                x1 = TElem::gen(T2, T2->levels());
                extends = true;
            } else {
                x1 = g.promote(T1) * rho;
            }
            if (m == 1 && e % 3 == 0) {
                wild_leaf(Q, c, s, e, g, phi, lam);
                if (first_only && !leaves.empty()) return;
                continue;
            }
            if (e % 3 == 0) {
                int nd = depth + 1;
                if (nd > opt.depth_cap)
                    throw IrregularResidual("repeated residual factor beyond refinement depth " +
                                            std::to_string(opt.depth_cap));
                wild_cluster(Q, c, s, e, g, rho, m, lam, nd);
                if (first_only && !leaves.empty()) return;
                continue;
            }
            TElem c1 = c.promote(x1.tower()) + x1;
            // a simple residual root isolates one root only in the tame case;
            // for 3 | e all conjugates stay closer than lam to x1
            if (m == 1 && e % 3 != 0) {
                leaves.push_back(newton_refine(P, c1, lam, opt.W));
            } else {
                int nd = depth + (extends ? 1 : 0);
                if (nd > opt.depth_cap)
                    throw IrregularResidual("repeated residual factor beyond refinement depth " +
                                            std::to_string(opt.depth_cap));
                run(c1, lam, nd);
            }
            if (first_only && !leaves.empty()) return;
        }
    }
};

std::vector<TElem> search(const TPoly& f0, const RootOptions& opt, bool first_only) {
    TPoly f = f0;
    while (!f.empty() && exact_zero(f.back())) f.pop_back();
    if (f.size() < 2) throw InvalidUse("root search on a constant polynomial");
    if (!f.back().certified()) throw PrecisionExhausted("leading coefficient not certified");
    Searcher s{opt, f, first_only, {}, 0};
    s.run(TElem(tpoly::tower_of(f)), std::nullopt, 0);
    return s.leaves;
}

}  // namespace

TElem adjoin_root(const TPoly& f, const RootOptions& opt) { return search(f, opt, true).front(); }

std::vector<TElem> branch_roots(const TPoly& f, const RootOptions& opt) { return search(f, opt, false); }

namespace {

// f(x0 + t) with the coefficient guarantees widened by the uncertainty of x0:
// the error in coefficient i is sum_k binom(i+k, i) Q[i+k] d^k with v(d) >= N.
TPoly shift_at(const TPoly& f, const TElem& x0, const TowerPtr& t) {
    if (x0.is_exact()) return tpoly::taylor_shift(tpoly::promote(f, t), x0.promote(t));
    ValRational N = x0.guarantee();
    TPoly Q = tpoly::taylor_shift(tpoly::promote(f, t), tpoly::exact_rep(x0.promote(t), N.ceil_long() + 8));
    for (size_t i = 0; i < Q.size(); ++i) {
        ValRational err = ValRational::infinity();
        for (size_t k = 1; i + k < Q.size(); ++k) {
            if (exact_zero(Q[i + k])) continue;
            err = vmin(err, Q[i + k].lb() + ValRational(static_cast<long>(k)) * N);
        }
        if (!err.is_inf()) Q[i].set_guarantee(vmin(Q[i].guarantee(), err));
    }
    return Q;
}

}  // namespace

TElem hensel_lift(const TPoly& f, const TElem& approx, const ValRational& target, long W) {
    TowerPtr t = common_tower(tpoly::tower_of(f), approx.tower());
    TElem a = tpoly::exact_rep(approx.promote(t), std::max<long>(W, target.ceil_long()) + 8);
    TElem fa = tpoly::eval(f, a);
    TElem da = tpoly::eval(tpoly::derivative(f), a);
    if (!da.certified()) throw HenselConditionFailed("derivative not certified");
    ValRational vd = da.val();
    if (exact_zero(fa)) return a;
    if (!fa.certified()) {
        if (fa.lb() > vd * ValRational(2)) {
            a.set_guarantee(fa.lb() - vd);
            return a;
        }
        throw HenselConditionFailed("f(approx) not certified");
    }
    if (!(fa.val() > vd * ValRational(2))) throw HenselConditionFailed("v(f(a)) <= 2 v(f'(a))");
    long Wt = std::max<long>(W, target.ceil_long() + 2 * std::abs(vd.ceil_long()) + 2);
    TElem r = newton_refine(f, a, fa.val() - vd - ValRational(1), Wt);
    return r;
}

std::vector<ValRational> root_distances(const TPoly& psi, const TElem& x0) {
    TowerPtr t = common_tower(tpoly::tower_of(psi), x0.tower());
    TPoly Q = shift_at(psi, x0, t);
    if (Q[0].certified() && !exact_zero(Q[0])) throw InvalidUse("root_distances: x0 is not a root");
    if (Q.size() < 2 || !Q[1].certified()) throw PrecisionExhausted("root_distances: derivative not certified");
    std::vector<ValRational> out;
    for (const auto& s : hull_segments(Q, 1)) {
        if (!x0.is_exact() && s.slope >= x0.guarantee())
            throw PrecisionExhausted("root distance beyond the root guarantee");
        for (int k = 0; k < s.length; ++k) out.push_back(s.slope);
    }
    std::sort(out.begin(), out.end());
    return out;
}

ValRational max_root_distance(const TPoly& chi, const TElem& x0) {
    TowerPtr t = common_tower(tpoly::tower_of(chi), x0.tower());
    TPoly Q = shift_at(chi, x0, t);
    int start = 0;
    if (exact_zero(Q[0]) || !Q[0].certified()) {
        if (Q.size() < 2 || !Q[1].certified()) throw PrecisionExhausted("max_root_distance: unresolved");
        start = 1;
    }
    auto segs = hull_segments(Q, start);
    if (segs.empty()) return ValRational::infinity();
    ValRational m = segs.front().slope;
    for (const auto& s : segs) m = vmax(m, s.slope);
    if (!x0.is_exact() && m >= x0.guarantee()) throw PrecisionExhausted("root distance beyond the root guarantee");
    return m;
}

std::vector<ValRational> distances_to_roots(const TPoly& chi, const TElem& x0) {
    TowerPtr t = common_tower(tpoly::tower_of(chi), x0.tower());
    TPoly Q = shift_at(chi, x0, t);
    while (Q.size() > 1 && exact_zero(Q.back())) Q.pop_back();
    int k = 0;
    while (k + 1 < static_cast<int>(Q.size()) && (exact_zero(Q[k]) || !Q[k].certified())) ++k;
    if (!Q[k].certified()) throw PrecisionExhausted("distances_to_roots: unresolved");
    std::vector<ValRational> out(k, ValRational::infinity());
    for (const auto& s : hull_segments(Q, k)) {
        if (!x0.is_exact() && s.slope >= x0.guarantee())
            throw PrecisionExhausted("root distance beyond the root guarantee");
        for (int j = 0; j < s.length; ++j) out.push_back(s.slope);
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

// Coordinate j of x over the sub-tower B.
TElem coord(const TElem& x, const TowerPtr& B, int j) {
    int DB = B->degree();
    TElem r(B);
    std::copy(x.coeffs().begin() + j * DB, x.coeffs().begin() + (j + 1) * DB, r.coeffs_mut().begin());
    if (!x.is_exact()) r.set_guarantee(x.guarantee() - x.tower()->basis_val(j * DB));
    return r;
}

}  // namespace

std::optional<TPoly> minpoly_over(const TElem& alpha, const TowerPtr& B, int max_deg, const TPoly* must_divide) {
    TowerPtr T = alpha.tower();
    if (!B->is_prefix_of(*T)) throw InvalidUse("minpoly base is not a sub-tower");
    int n = T->degree() / B->degree();
    long W = alpha.is_exact() ? 64 : alpha.guarantee().ceil_long() + 4;
    std::vector<TElem> pw{TElem::from_int(T, 1)};
    for (int d = 1; d <= n && d <= max_deg; ++d) {
        pw.push_back(pw.back() * alpha);
        if (n % d != 0) continue;
        // rows: coordinates; columns: powers 0..d-1, rhs -alpha^d
        std::vector<std::vector<TElem>> M(n, std::vector<TElem>(d + 1));
        for (int r = 0; r < n; ++r) {
            for (int k = 0; k < d; ++k) M[r][k] = coord(pw[k], B, r);
            M[r][d] = -coord(pw[d], B, r);
        }
        std::vector<int> pivrow(d, -1);
        std::vector<bool> used(n, false);
        bool ok = true;
        for (int k = 0; k < d && ok; ++k) {
            int best = -1;
            ValRational bv;
            for (int r = 0; r < n; ++r) {
                if (used[r] || !M[r][k].certified() || M[r][k].rep_is_zero()) continue;
                ValRational v = M[r][k].val();
                if (best < 0 || v < bv) {
                    best = r;
                    bv = v;
                }
            }
            if (best < 0) {
                ok = false;
                break;
            }
            used[best] = true;
            pivrow[k] = best;
            TElem inv = M[best][k].inverse(W + 2 * std::abs(bv.ceil_long()) + 4);
            for (int r = 0; r < n; ++r) {
                if (r == best || M[r][k].rep_is_zero()) continue;
                TElem fct = M[r][k] * inv;
                for (int j = k; j <= d; ++j) M[r][j] -= fct * M[best][j];
            }
            for (int j = k; j <= d; ++j) M[best][j] = M[best][j] * inv;
        }
        if (!ok) continue;
        bool consistent = true;
        for (int r = 0; r < n; ++r)
            if (!used[r] && M[r][d].certified() && !M[r][d].rep_is_zero()) consistent = false;
        if (!consistent) continue;
        TPoly chi;
        for (int k = 0; k < d; ++k) chi.push_back(M[pivrow[k]][d]);
        chi.push_back(TElem::from_int(B, 1));
        TElem chk = tpoly::eval(chi, alpha);
        if (chk.certified() && !chk.rep_is_zero()) continue;
        if (must_divide) {
            TPoly r = tpoly::rem_monic(*must_divide, chi);
            bool divides = true;
            for (const auto& c : r)
                if (c.certified() && !c.rep_is_zero()) divides = false;
            if (!divides) continue;
        }
        return chi;
    }
    return std::nullopt;
}

std::vector<LocalFactor> factor_completion(const TPoly& f0, const RootOptions& opt) {
    TPoly f = f0;
    while (!f.empty() && exact_zero(f.back())) f.pop_back();
    TowerPtr B = tpoly::tower_of(f);
    int n = tpoly::degree(f);
    // monic normalization keeps the divisibility test meaningful
    TElem lcinv = f.back().inverse(opt.W + 8);
    TPoly fm;
    for (const auto& c : f) fm.push_back(c * lcinv);
    fm.back() = TElem::from_int(B, 1);
    std::vector<LocalFactor> out;
    int total = 0;
    for (const TElem& a : branch_roots(fm, opt)) {
        bool dup = false;
        for (const auto& lf : out) {
            TElem v = tpoly::eval(lf.chi, a);
            if (!v.certified() || v.rep_is_zero()) {
                dup = true;
                break;
            }
        }
        if (dup) continue;
        auto chi = minpoly_over(a, B, n - total, &fm);
        if (!chi) throw PrecisionExhausted("minimal polynomial of a local root not found");
        total += tpoly::degree(*chi);
        out.push_back({*chi, a});
    }
    if (total != n) throw PrecisionExhausted("local factor degrees do not add up");
    return out;
}

namespace {

// Minimal polynomial over the subfield F0 of an element of an extension F.
FPoly residue_minpoly(const FField& F0, const FField& F, const FElem& a) {
    mpz_class q = F0.order();
    std::vector<FElem> conj{a};
    for (FElem b = F.pow(a, q); b != a; b = F.pow(b, q)) conj.push_back(b);
    FPoly m{F.one()};
    for (const auto& c : conj) m = fpoly::mul(F, m, FPoly{F.neg(c), F.one()});
    // back to F0 coordinates
    std::vector<FElem> elts;
    int k = F0.degree();
    long total = 1;
    for (int i = 0; i < k; ++i) total *= 3;
    for (long code = 0; code < total; ++code) {
        FElem r(k);
        long cc = code;
        for (int i = 0; i < k; ++i, cc /= 3) r[i] = static_cast<int>(cc % 3);
        elts.push_back(r);
    }
    FPoly out;
    for (const auto& c : m) {
        bool found = false;
        for (const auto& r : elts)
            if (F.embed(F0, r) == c) {
                out.push_back(r);
                found = true;
                break;
            }
        if (!found) throw InvalidUse("residue minimal polynomial outside the base field");
    }
    return out;
}

}  // namespace

namespace {

// Whether chi has a root b with v(x0 - b) >= r, x0 itself included.
bool has_root_within(const TPoly& chi, const TElem& x0, const ValRational& r) {
    TowerPtr t = common_tower(tpoly::tower_of(chi), x0.tower());
    TPoly Q = shift_at(chi, x0, t);
    if (exact_zero(Q[0])) return true;
    if (Q[0].certified()) {
        for (const auto& s : hull_segments(Q, 0))
            if (s.slope >= r) return true;
        return false;
    }
    if (Q.size() < 2 || !Q[1].certified()) throw PrecisionExhausted("has_root_within: unresolved");
    // the root near x0 is at distance at least lb(Q0) - v(Q1)
    if (Q[0].lb() - Q[1].val() >= r) return true;
    for (const auto& s : hull_segments(Q, 1))
        if (s.slope >= r) return true;
    throw PrecisionExhausted("has_root_within: unresolved");
}

}  // namespace

TPoly minimal_center(const TElem& alpha, const TowerPtr& B, const ValRational& r, long W) {
    TowerPtr T = alpha.tower();
    const FField& F0 = *B->residue_field();
    const FField& F = *T->residue_field();
    const long EB = B->ram_index();
    struct Key {
        TPoly phi;
        ValRational val;
        long e = 1;
    };
    std::vector<Key> keys;
    long D = EB;
    auto in_group = [](const ValRational& v, long d) { return (v * ValRational(d)).is_integer(); };
    auto at = [&](const TPoly& f) { return tpoly::eval(tpoly::promote(f, T), alpha); };
    auto monomial = [&](ValRational v) {
        TPoly M{TElem::from_int(B, 1)};
        std::vector<long> Ds{EB};
        for (const auto& k : keys) Ds.push_back(Ds.back() * k.e);
        for (size_t i = keys.size(); i-- > 0;) {
            long a = 0;
            while (!in_group(v - ValRational(a) * keys[i].val, Ds[i])) ++a;
            v = v - ValRational(a) * keys[i].val;
            for (long j = 0; j < a; ++j) M = tpoly::mul(M, keys[i].phi);
        }
        for (auto& x : M) x = x * TElem::monomial(B, v);
        return M;
    };
    auto pw = [](const TPoly& f, long n) {
        TPoly out{TElem::from_int(tpoly::tower_of(f), 1)};
        for (long j = 0; j < n; ++j) out = tpoly::mul(out, f);
        return out;
    };
    // sum_j lift(psi_j) M^{f-j} Phi^j for the residual polynomial psi
    auto lift_residual = [&](const FPoly& psi, const TPoly& Phi, const TPoly& M) {
        int f = fpoly::deg(psi);
        TPoly out;
        for (int j = 0; j <= f; ++j) {
            TPoly term = tpoly::mul(pw(M, f - j), pw(Phi, j));
            TElem c = TElem::lift(B, psi[j]);
            if (out.size() < term.size()) out.resize(term.size(), TElem(B));
            for (size_t i = 0; i < term.size(); ++i) out[i] += c * term[i];
        }
        return out;
    };
    TPoly phi{TElem(B), TElem::from_int(B, 1)};
    for (int iter = 0; iter < 400; ++iter) {
        if (has_root_within(phi, alpha, r)) return phi;
        TElem fa = at(phi);
        if (!fa.certified()) throw PrecisionExhausted("minimal_center: key value not certified");
        ValRational val = fa.val();
        long e = 1;
        if (!in_group(val, D)) e = (val * ValRational(D)).den().get_si();
        TPoly Phi = pw(phi, e);
        TPoly M = monomial(val * ValRational(e));
        long Wi = W + 2 * std::abs(at(M).val().ceil_long()) + 8;
        TElem u = at(Phi) * at(M).inverse(Wi);
        FPoly psi = residue_minpoly(F0, F, u.residue());
        if (e == 1 && fpoly::deg(psi) == 1) {
            // same degree, larger value
            TElem c = TElem::lift(B, F0.neg(psi[0]));
            for (size_t i = 0; i < M.size(); ++i) phi[i] -= c * M[i];
            continue;
        }
        keys.push_back({phi, val, e});
        D *= e;
        phi = lift_residual(psi, Phi, M);
    }
    throw PrecisionExhausted("minimal_center: key polynomial chain did not reach the radius");
}

}  // namespace q3
