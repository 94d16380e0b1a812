#include "q3/quartic.hpp"

#include "q3/errors.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace q3 {

// ---------------------------------------------------------------- μ

ValRational mu(const KPoly& delta, const InputField& K, const TElem& x0, long W) {
    TowerPtr T = common_tower(K.completion(), x0.tower());
    TPoly Q = tpoly::taylor_shift(kpoly::embed(K, delta, T, W), x0.promote(T));
    if (!Q[0].certified() || (Q[0].is_exact() && Q[0].rep_is_zero())) return ValRational::infinity();
    ValRational v0 = Q[0].val();
    std::optional<ValRational> best;
    std::vector<std::pair<int, ValRational>> loose;
    for (size_t i = 1; i < Q.size(); ++i) {
        if (Q[i].is_exact() && Q[i].rep_is_zero()) continue;
        if (!Q[i].certified()) {
            loose.push_back({static_cast<int>(i), Q[i].lb()});
            continue;
        }
        ValRational c = (v0 - Q[i].val()) / ValRational(static_cast<long>(i));
        if (!best || c > *best) best = c;
    }
    if (!best) throw PrecisionExhausted("mu: no certified Taylor coefficient");
    for (const auto& [i, lb] : loose)
        if ((v0 - lb) / ValRational(i) >= *best) throw PrecisionExhausted("mu: Taylor coefficient not certified");
    return *best;
}

// ---------------------------------------------------------------- δ

namespace {

std::vector<RInterval> meet(const std::vector<RInterval>& a, const std::vector<RInterval>& b) {
    std::vector<RInterval> out;
    for (const auto& x : a)
        for (const auto& y : b) {
            std::optional<ValRational> lo = x.lo;
            if (y.lo && (!lo || *lo < *y.lo)) lo = y.lo;
            ValRational hi = vmin(x.hi, y.hi);
            if (!lo || *lo <= hi) out.push_back({lo, hi});
        }
    return out;
}

const ValRational kHalf3(3, 2);

}  // namespace

DeltaProfile delta_from_transform(const InteriorTransform& it) {
    DeltaProfile d;
    d.transform = it;
    std::vector<RInterval> tA, tB, tC;
    PiecewiseAffine vA = gauss_profile(it.A, &tA), vB = gauss_profile(it.B, &tB), vC = gauss_profile(it.C, &tC);
    d.trust = meet(meet(tA, tB), tC);
    if (vC.is_infinite()) {
        d.profile = PiecewiseAffine::constant(ValRational(0));
        d.zero_set = {RInterval{std::nullopt, ValRational::infinity()}};
        return d;
    }
    PiecewiseAffine m = PiecewiseAffine::constant(kHalf3);
    if (!vA.is_infinite()) m = pa_min(m, vA.scale(kHalf3) + vC.scale(ValRational(-1, 2)));
    if (!vB.is_infinite()) m = pa_min(m, vB.scale(kHalf3) + vC.scale(ValRational(-1)));
    d.profile = pa_max(m, PiecewiseAffine::constant(ValRational(0)));
    d.zero_set = m.where_le(ValRational(0));
    for (const auto& b : d.profile.breakpoints())
        if (!intervals_contain(d.trust, b)) throw PrecisionExhausted("delta profile breakpoint outside the certified range");
    for (const auto& z : d.zero_set) {
        if (z.lo && !intervals_contain(d.trust, *z.lo)) throw PrecisionExhausted("delta zero set outside the certified range");
        if (!z.hi.is_inf() && !intervals_contain(d.trust, z.hi))
            throw PrecisionExhausted("delta zero set outside the certified range");
    }
    return d;
}

DeltaProfile delta_path(const QuarticCurve& C, const TElem& x0, const InteriorOptions& opt) {
    return delta_from_transform(transform_interior(C, x0, opt));
}

// ---------------------------------------------------------------- λ and tails

namespace {

TElem fiber_root(const QuarticCurve& C, const TElem& x0, const InteriorOptions& opt) {
    const InputField& K = *C.K;
    TowerPtr T = common_tower(K.completion(), x0.tower());
    auto at = [&](const KPoly& p) { return p.empty() ? TElem(T) : tpoly::eval(kpoly::embed(K, p, T, opt.W), x0.promote(T)); };
    TPoly fib{at(C.A0), at(C.A1), at(C.A2), TElem::from_int(T, 1)};
    RootOptions ro;
    ro.W = opt.W;
    ro.alt = opt.alt;
    ro.depth_cap = opt.depth_cap;
    ro.label = "y";
    return adjoin_root(fib, ro);
}

}  // namespace

ValRational lambda_of(const DeltaProfile& dp, const ValRational& mu) {
    std::optional<ValRational> best;
    for (const auto& iv : dp.zero_set) {
        if (iv.hi < mu) continue;
        ValRational r = iv.lo && *iv.lo > mu ? *iv.lo : mu;
        if (!best || r < *best) best = r;
    }
    if (!best) return ValRational::infinity();
    if (!best->is_inf() && !intervals_contain(dp.trust, *best))
        throw PrecisionExhausted("lambda: zero of delta outside the trusted range");
    return *best;
}

TailData lambda_tail(const QuarticCurve& C, const TailTransform& tt, const KPoly& delta, const TElem& x0,
                     const InteriorOptions& opt) {
    TailData td;
    td.mu = mu(delta, *C.K, x0, opt.W);
    ValRational ld = lambda_of(delta_path(C, x0, opt), td.mu);
    if (ld == td.mu) throw InvalidUse("lambda: delta vanishes at mu, no tail at this center");
    td.y0 = fiber_root(C, x0, opt);
    TowerPtr T = td.y0.tower();
    TElem x = x0.promote(T);
    TElem b0 = sring::eval(C, tt.b[0], x, td.y0, opt.W);
    if (!b0.certified()) throw PrecisionExhausted("lambda: b0 not certified");
    ValRational vb = b0.val();
    std::array<TElem, 5> c;
    std::optional<ValRational> best;
    std::vector<std::pair<int, ValRational>> loose;
    std::map<int, ValRational> cand;
    for (int k = 2; k <= 4; ++k) {
        c[k] = sring::eval(C, tt.c[k], x, td.y0, opt.W);
        if (c[k].is_exact() && c[k].rep_is_zero()) continue;
        if (!c[k].certified()) {
            loose.push_back({k, c[k].lb()});
            continue;
        }
        ValRational l = (ValRational(3) * vb - ValRational(2) * c[k].val()) / ValRational(2 * k);
        cand[k] = l;
        if (!best || l > *best) best = l;
    }
    if (!best) throw PrecisionExhausted("lambda: no certified tail coefficient");
    for (const auto& [k, lb] : loose)
        if ((ValRational(3) * vb - ValRational(2) * lb) / ValRational(2 * k) >= *best)
            throw PrecisionExhausted("lambda: tail coefficient not certified");
    td.lambda = *best;
    if (td.lambda != ld)
        throw InvalidUse("lambda: tail coefficients give " + td.lambda.str() + ", delta gives " + ld.str());
    for (const auto& [k, l] : cand)
        if (l == td.lambda) td.achieving.push_back(k);
    auto has = [&](int k) { return std::find(td.achieving.begin(), td.achieving.end(), k) != td.achieving.end(); };
    td.genus = has(4) ? 3 : has(2) ? 1 : 0;
    // residues up to units: b0/π^{2s} and c_k ϖ^k/π^{3s} with v(π) = s, v(ϖ) = λ,
    // after a tame ramified step making s and λ values of the tower
    ValRational s = vb / ValRational(2);
    long E = T->ram_index();
    mpz_class den = lcm((s * ValRational(E)).den(), (td.lambda * ValRational(E)).den());
    TowerPtr TR = T;
    if (den > 1) {
        int e = static_cast<int>(den.get_si());
        if (e % 3 == 0) return td;  // wild step needed; residues left out
        TR = Tower::adjoin_ramified(T, e, TElem::monomial(T, ValRational(1, E)), TElem::from_int(T, 1), "r");
    }
    TElem pi = TElem::monomial(TR, s), w = TElem::monomial(TR, td.lambda);
    long Wi = opt.W + 16;
    TElem ip2 = pi.pow(2).inverse(Wi), ip3 = pi.pow(3).inverse(Wi);
    td.residue_field = TR->residue_field();
    td.residues.push_back((b0.promote(TR) * ip2).residue());
    for (int k = 2; k <= 4; ++k)
        td.residues.push_back(has(k) ? (c[k].promote(TR) * w.pow(k) * ip3).residue() : td.residue_field->zero());
    return td;
}

UNorms u_norms(const QuarticCurve& C, const TailTransform& tt) {
    return UNorms{norm_cubic(C, tt.b[0]), norm_cubic(C, tt.c[2]), norm_cubic(C, tt.c[3]), norm_cubic(C, tt.c[4])};
}

namespace {

ValuativeFunction ratfunc_valuative(CenterSet& cs, const RatFunc& f, const std::string& name, const RootOptions& opt) {
    ValuativeFunction h = local_factorization(cs, f.num, name, opt);
    if (h.zero) return h;
    h.add(local_factorization(cs, f.den, name + "/den", opt), -1);
    return h;
}

DiscoidDomain whole_line() { return DiscoidDomain{{Component{true, {}, {}}}}; }

}  // namespace

UDomain compute_U(CenterSet& cs, const QuarticCurve& C, const TailTransform& tt, const RootOptions& opt) {
    UNorms n = u_norms(C, tt);
    ValuativeFunction b0 = ratfunc_valuative(cs, n.b0, "Nm(b0)", opt);
    ValuativeFunction c2 = ratfunc_valuative(cs, n.c2, "Nm(c2)", opt);
    ValuativeFunction c3 = ratfunc_valuative(cs, n.c3, "Nm(c3)", opt);
    ValuativeFunction c4 = ratfunc_valuative(cs, n.c4, "Nm(c4)", opt);
    UDomain u;
    u.degenerate = b0.zero || c2.zero || c3.zero || c4.zero;
    // 3 v(b0) + 4 v(c3) >= 6 v(c2)
    bool lhs_inf = b0.zero || c3.zero;
    if (c2.zero) u.U2 = lhs_inf ? whole_line() : DiscoidDomain{};
    else if (lhs_inf) u.U2 = whole_line();
    else {
        ValuativeFunction h;
        h.add(b0, 3);
        h.add(c3, 4);
        h.add(c2, -6);
        u.U2 = domain_from_inequality(cs, h);
    }
    // 8 v(c3) >= 3 v(b0) + 6 v(c4)
    bool rhs_inf = b0.zero || c4.zero;
    if (rhs_inf) u.U4 = c3.zero ? whole_line() : DiscoidDomain{};
    else if (c3.zero) u.U4 = whole_line();
    else {
        ValuativeFunction h;
        h.add(c3, 8);
        h.add(b0, -3);
        h.add(c4, -6);
        u.U4 = domain_from_inequality(cs, h);
    }
    u.U = unite(cs, u.U2, u.U4);
    return u;
}

// ---------------------------------------------------------------- pipeline

namespace {

std::string factor_key(const TPoly& chi) {
    std::string s = std::to_string(tpoly::degree(chi)) + ":";
    for (const auto& c : chi) s += tpoly::exact_rep(c, 12).str() + ";";
    return s;
}

const char* kSub[] = {"₀", "₁", "₂", "₃", "₄", "₅", "₆", "₇", "₈", "₉"};

std::string subscript(int n) {
    std::string d = std::to_string(n), s;
    for (char ch : d) s += kSub[ch - '0'];
    return s;
}

std::string rational_center_name(const InputField& K, const KPoly& p) {
    // p = x − a
    KElem a = K.neg(p[0]);
    if (K.is_zero(a)) return "x";
    std::string s = K.str(a);
    if (s[0] == '-') return "x + " + s.substr(1);
    if (s.find_first_of("+-", 1) != std::string::npos) return "x - (" + s + ")";
    return "x - " + s;
}

// Names a discoid through a center of least degree inside it. An open
// discoid keeps its center when the key found only reaches its boundary.
void least_degree_center(CenterSet& cs, Discoid& d, const RootOptions& ro, bool open = false) {
    if (cs[d.c].degree() == 1 || d.r.is_inf()) return;
    TPoly phi = minimal_center(cs[d.c].root, cs.base(), d.r, ro.W);
    if (tpoly::degree(phi) >= cs[d.c].degree()) return;
    int k = cs.add(phi, adjoin_root(phi, ro), "key" + std::to_string(cs.size()));
    ValRational dk = cs.dist(k, d.c);
    if (dk < d.r) throw InvalidUse("least-degree center outside its discoid");
    if (open && dk == d.r) return;
    d.c = k;
}

void least_degree_centers(CenterSet& cs, DiscoidDomain& dom, const RootOptions& ro) {
    for (auto& k : dom.comps) {
        if (!k.whole) least_degree_center(cs, k.outer, ro);
        for (auto& h : k.holes) least_degree_center(cs, h, ro, true);
    }
    rename_canonical(cs, dom);
}

}  // namespace

std::string center_label(const ReductionReport& r, int c) { return (*r.cs)[c].name; }

ReductionReport run_algorithm_at(const QuarticCurve& C, long W, bool alt, int depth_cap) {
    const InputField& K = *C.K;
    ReductionReport rep;
    rep.curve = C;
    rep.precision = W;
    rep.delta = discriminant_y(C);
    rep.infinity_branch = kpoly::deg(rep.delta) < 10;
    rep.cs = std::make_shared<CenterSet>(C.K, W);
    CenterSet& cs = *rep.cs;
    RootOptions ro;
    ro.W = W;
    ro.alt = alt;
    ro.depth_cap = depth_cap;

    // (1a) branch points over the completion
    KPoly dsf = kpoly::monic(K, kpoly::squarefree_part(K, rep.delta));
    std::vector<int> bcenters;
    if (kpoly::deg(dsf) > 0) {
        auto lfs = factor_completion(kpoly::embed(K, dsf, cs.base(), W), ro);
        std::sort(lfs.begin(), lfs.end(), [](const LocalFactor& a, const LocalFactor& b) {
            return factor_key(a.chi) < factor_key(b.chi);
        });
        for (size_t k = 0; k < lfs.size(); ++k) {
            std::optional<KPoly> ex;
            if (lfs.size() == 1) ex = dsf;
            bcenters.push_back(cs.add(lfs[k].chi, lfs[k].root, "branch" + std::to_string(k), ex));
        }
    }

    // (1b)-(1c) δ along [x0, ∞] for each branch point
    std::map<int, DeltaProfile> prof;
    for (int c : bcenters) {
        InteriorOptions io;
        io.W = W;
        io.alt = alt;
        io.depth_cap = depth_cap;
        io.at_branch = true;
        DeltaProfile d = delta_path(C, cs[c].root, io);
        rep.branch.push_back(BranchPoint{c, d, d.transform.fiber_multiplicity});
        prof.emplace(c, d);
    }

    // (1d) U^interior as the retraction preimage of the δ zero set on Γ0
    std::vector<ValRational> radii;
    for (const auto& [c, d] : prof) {
        for (const auto& b : d.profile.breakpoints()) radii.push_back(b);
        for (const auto& z : d.zero_set) {
            if (z.lo) radii.push_back(*z.lo);
            if (!z.hi.is_inf()) radii.push_back(z.hi);
        }
    }
    if (!bcenters.empty()) {
        KTree g0(cs, bcenters, radii);
        auto m = [&](int i, const ValRational& r) { return intervals_contain(prof.at(i).zero_set, r); };
        bool inf_member = false;
        for (size_t k = 0; k < bcenters.size(); ++k) {
            const auto& z = prof.at(bcenters[k]).zero_set;
            bool here = !z.empty() && !z.front().lo;
            if (k == 0) inf_member = here;
            else if (here != inf_member) rep.diagnostics.push_back("delta near infinity differs between paths");
        }
        // δ must agree where paths share points
        for (size_t a = 0; a < bcenters.size(); ++a)
            for (size_t b = a + 1; b < bcenters.size(); ++b) {
                ValRational d = cs.dist(bcenters[a], bcenters[b]);
                for (const auto& r : radii)
                    if (r <= d && prof.at(bcenters[a]).profile.eval(r) != prof.at(bcenters[b]).profile.eval(r))
                        rep.diagnostics.push_back("delta differs on a shared segment at r = " + r.str());
            }
        rep.interior = g0.extract(m, inf_member);
        rename_canonical(cs, rep.interior);
    }

    // (2) U = U2 ∪ U4
    TailTransform tt = transform_tail(C);
    UDomain ud = compute_U(cs, C, tt, ro);
    if (ud.degenerate) rep.diagnostics.push_back("a norm vanishes identically; +inf valuation convention used");
    rep.U = ud.U;

    // (3) U^tail = U \ U^interior, component by component
    for (const auto& k : rep.U.comps) {
        bool interior = k.whole ? contains_infinity(rep.interior) : contains(cs, rep.interior, k.outer.c, k.outer.r);
        if (interior) continue;
        if (k.whole) throw InvalidUse("tail component containing infinity");
        if (!k.holes.empty()) rep.diagnostics.push_back("tail component with holes: " + k.str(cs));
        InteriorOptions io;
        io.W = W;
        io.alt = alt;
        io.depth_cap = depth_cap;
        TailData td = lambda_tail(C, tt, rep.delta, cs[k.outer.c].root, io);
        if (td.lambda != k.outer.r)
            rep.diagnostics.push_back("tail radius " + k.outer.r.str() + " differs from lambda " + td.lambda.str());
        if (td.genus == 0) rep.diagnostics.push_back("genus-0 point inside U: " + k.str(cs));
        TailComponent tc;
        tc.disc = k.outer;
        tc.split = cs[k.outer.c].theta.split(k.outer.psi_radius(cs)).first;
        tc.data = td;
        rep.tails.push_back(tc);
    }

    least_degree_centers(cs, rep.interior, ro);
    least_degree_centers(cs, rep.U, ro);
    for (auto& t : rep.tails) {
        least_degree_center(cs, t.disc, ro);
        DiscoidDomain one{{Component{false, t.disc, {}}}};
        rename_canonical(cs, one);
        t.disc = one.comps[0].outer;
    }

    // (4) boundary points and the spanning tree
    std::vector<Discoid> pts;
    for (const auto& k : rep.interior.comps) {
        ReportComponent rc{"interior", k, 1, {}};
        if (!k.whole) rc.split = cs[k.outer.c].theta.split(k.outer.psi_radius(cs)).first;
        rep.components.push_back(rc);
    }
    for (const auto& t : rep.tails) {
        Component k{false, t.disc, {}};
        rep.components.push_back(ReportComponent{"tail", k, t.split, std::vector<int>(t.split, t.data.genus)});
    }
    for (const auto& rc : rep.components) {
        if (!rc.comp.whole) pts.push_back(rc.comp.outer);
        for (const auto& h : rc.comp.holes) pts.push_back(h);
    }
    for (size_t a = 0; a < bcenters.size(); ++a)
        for (size_t b = a + 1; b < bcenters.size(); ++b)
            pts.push_back(Discoid{bcenters[a], cs.dist(bcenters[a], bcenters[b])});
    std::sort(pts.begin(), pts.end(), [](const Discoid& a, const Discoid& b) {
        return a.c != b.c ? a.c < b.c : a.r < b.r;
    });
    // drop duplicates (same point named through different centers)
    std::vector<Discoid> uniq;
    for (const auto& p : pts) {
        bool dup = false;
        for (const auto& q : uniq) dup |= q.r == p.r && cs.dist(p.c, q.c) >= p.r;
        if (!dup) uniq.push_back(p);
    }
    rep.boundary = uniq;
    std::vector<Discoid> tpts = uniq;
    for (int c : bcenters) tpts.push_back(Discoid{c, ValRational::infinity()});
    rep.tree = span_tree(cs, tpts);
    for (size_t v = 0; v < rep.tree.vertices.size(); ++v) {
        const auto& vx = rep.tree.vertices[v];
        if (vx.parent < 0) continue;
        const auto& pv = rep.tree.vertices[vx.parent];
        ValRational s = pv.p.inf ? (vx.p.r.is_inf() ? ValRational(0) : vx.p.r - ValRational(1))
                                 : (vx.p.r.is_inf() ? pv.p.r + ValRational(1) : (vx.p.r + pv.p.r) / ValRational(2));
        for (int c : bcenters)
            if (cs.dist(c, vx.p.c) >= s) {
                rep.tree.edge_style[static_cast<int>(v)] =
                    prof.at(c).profile.eval(s) > ValRational(0) ? "positive" : "zero";
                break;
            }
    }
    for (const auto& rc : rep.components)
        if (!rc.comp.whole && cs[rc.comp.outer.c].degree() > 1 && rc.split > 1) rep.may_require_refinement = true;

    // display names
    int psi = 0, beta = 0;
    std::set<int> named{0};
    auto name = [&](int c, bool branch_single) {
        if (named.count(c)) return;
        named.insert(c);
        const Center& ce = cs[c];
        if (branch_single && ce.degree() > 1) cs.rename(c, "Δ_F");
        else if (ce.degree() == 1 && ce.exact) cs.rename(c, rational_center_name(K, *ce.exact));
        else if (ce.degree() == 1) cs.rename(c, "β" + subscript(++beta));
        else cs.rename(c, "ψ" + subscript(++psi));
    };
    for (int c : bcenters) name(c, bcenters.size() == 1);
    for (const auto& rc : rep.components) {
        if (!rc.comp.whole) name(rc.comp.outer.c, false);
        for (const auto& h : rc.comp.holes) name(h.c, false);
    }
    for (const auto& p : rep.boundary) name(p.c, false);
    for (auto& v : rep.tree.vertices) {
        if (v.p.inf) continue;
        name(v.p.c, false);
        v.label = v.leaf ? cs[v.p.c].name : Discoid{v.p.c, v.p.r}.str(cs);
    }
    return rep;
}

ReductionReport run_algorithm(const QuarticCurve& C, const RunOptions& opt) {
    long W = opt.W;
    for (;;) {
        try {
            return run_algorithm_at(C, W, opt.alt, opt.depth_cap);
        } catch (const PrecisionExhausted&) {
            if (W * 2 > opt.max_W) throw;
            W *= 2;
        }
    }
}

std::vector<std::string> summary_lines(const ReductionReport& r) {
    const CenterSet& cs = *r.cs;
    std::vector<std::string> out;
    for (const auto& rc : r.components) {
        std::string s = rc.kind + " " + rc.comp.str(cs);
        if (rc.split > 1) s += " splits " + std::to_string(rc.split);
        if (rc.kind == "tail") {
            s += " genus ";
            for (size_t i = 0; i < rc.genera.size(); ++i) s += (i ? "," : "") + std::to_string(rc.genera[i]);
        }
        out.push_back(s);
    }
    std::sort(out.begin(), out.end());
    if (r.tails.empty()) out.push_back("tail: none");
    return out;
}

}  // namespace q3
