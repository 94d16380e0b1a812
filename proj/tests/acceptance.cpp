// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any of them fails.

#include "q3/cli.hpp"
#include "q3/errors.hpp"

#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>

using namespace q3;

namespace {

struct Outcome {
    std::vector<std::string> failures;
    void check(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

ValRational q(long n, long d = 1) { return ValRational(n, d); }

cli::ParsedInput load(const std::string& name) { return cli::parse_input(std::string(Q3_TEST_DATA) + "/" + name); }

struct Run {
    cli::ParsedInput in;
    ReductionReport rep;
    double secs = 0;
};

Run run_file(const std::string& name, const RunOptions& opt = RunOptions{}) {
    Run r{load(name), {}, 0};
    auto t0 = Clock::now();
    r.rep = run_algorithm(r.in.curve, opt);
    r.secs = seconds_since(t0);
    return r;
}

std::string canonical(const Run& r) { return cli::report_json(r.rep, r.in).dump(); }

const ReportComponent* find_component(const ReductionReport& r, const std::string& text) {
    for (const auto& rc : r.components)
        if (rc.comp.str(*r.cs) == text) return &rc;
    return nullptr;
}

bool is_branch_center(const ReductionReport& r, int c) {
    for (const auto& b : r.branch)
        if (b.center == c) return true;
    return false;
}

// Artin–Schreier data T^3 + b T + c2 x^2 (+ c3 x^3) with b, c2 units and c4 = 0.
bool genus_one_residues(const TailData& td) {
    if (td.residues.size() != 4 || !td.residue_field) return false;
    const FField& F = *td.residue_field;
    return !F.is_zero(td.residues[0]) && !F.is_zero(td.residues[1]) && F.is_zero(td.residues[3]);
}

// ------------------------------------------------------------------ 1

Outcome criterion1(const Run& r) {
    Outcome o;
    const ReductionReport& rep = r.rep;
    const CenterSet& cs = *rep.cs;
    o.check(r.secs < 300, "genus-1 tail example took " + std::to_string(r.secs) + " s");
    o.check(rep.components.size() == 3, "expected three components, got " + std::to_string(rep.components.size()));

    const ReportComponent* inf = find_component(rep, "D[1/x, 0]");
    o.check(inf && inf->kind == "interior" && inf->comp.is_infinity_disk(cs) && inf->comp.holes[0].c == 0 &&
                inf->comp.holes[0].r == q(0),
            "interior D[1/x, 0] missing");

    const ReportComponent* big = nullptr;
    for (const auto& rc : rep.components)
        if (rc.kind == "interior" && !rc.comp.whole && cs[rc.comp.outer.c].degree() == 9) big = &rc;
    o.check(big != nullptr, "interior discoid with a degree-9 center missing");
    if (big) {
        int c = big->comp.outer.c;
        o.check(big->comp.outer.psi_radius(cs) == q(6), "degree-9 discoid radius " + big->comp.outer.psi_radius(cs).str());
        o.check(big->comp.holes.empty(), "degree-9 discoid has holes");
        o.check(big->split == 9, "degree-9 discoid splits into " + std::to_string(big->split));
        o.check(is_branch_center(rep, c), "degree-9 center is not the branch factor");
        KPoly dsf = kpoly::monic(*rep.curve.K, kpoly::squarefree_part(*rep.curve.K, rep.delta));
        o.check(cs[c].exact && kpoly::equal(*cs[c].exact, dsf), "degree-9 center is not Δ_F");
    }

    o.check(rep.tails.size() == 1, "expected one tail");
    if (rep.tails.size() == 1) {
        const TailComponent& t = rep.tails[0];
        o.check(t.disc.c == 0 && t.disc.r == q(3, 4), "tail is " + t.disc.str(cs));
        o.check(t.data.genus == 1 && t.split == 1, "tail genus/split");
        o.check(t.data.lambda == q(3, 4), "λ = " + t.data.lambda.str());
        o.check(genus_one_residues(t.data), "tail residues do not give y^3 + y + x^2 up to units");
        const ReportComponent* tc = find_component(rep, "D[x, 3/4]");
        o.check(tc && tc->kind == "tail" && tc->genera == std::vector<int>{1}, "tail component entry");
    }
    return o;
}

// ------------------------------------------------------------------ 2

KElem zk(const InputField& K, const mpq_class& a, const mpq_class& b) {
    KElem e = K.zero();
    e[0] = a;
    e[1] = b;
    return e;
}

// Reference values for the two degree-9 centers, lowest degree first.
KPoly listed_psi1(const InputField& K) {
    return {zk(K, mpq_class(15309, 2), mpq_class(2187, 13)),
            zk(K, 72171, mpq_class(-6561, 2)),
            zk(K, 15309, 37179),
            zk(K, 13851, 729),
            zk(K, 3645, -729),
            zk(K, 0, 486),
            zk(K, 108, 54),
            zk(K, mpq_class(-27, 2), 54),
            zk(K, 18, 9),
            zk(K, 1, 0)};
}

KPoly listed_psi2(const InputField& K) {
    return {zk(K, 155277, -63423),
            zk(K, mpq_class(6561, 8), 6561),
            zk(K, 41553, 37179),
            zk(K, -1458, 2916),
            zk(K, 0, 729),
            zk(K, 972, 243),
            zk(K, mpq_class(-27, 2), 54),
            zk(K, 27, 54),
            zk(K, -9, 9),
            zk(K, 1, 0)};
}

// The listed polynomial names the same discoid as center c at ψ-radius s:
// one of its roots is within the geometric radius of α_c and its own θ
// sends that radius to s.
bool same_discoid(const ReductionReport& rep, int c, const KPoly& listed, const ValRational& s) {
    const CenterSet& cs = *rep.cs;
    const InputField& K = *rep.curve.K;
    ValRational r = cs[c].theta.inverse(s);
    TPoly chi = kpoly::embed(K, listed, cs.base(), rep.precision);
    RootOptions ro;
    ro.W = rep.precision;
    ro.label = "l";
    TElem beta = adjoin_root(chi, ro);
    if (max_root_distance(cs[c].chi, beta) < r) return false;
    Theta th(tpoly::degree(chi), root_distances(chi, beta));
    return th.eval(r) == s;
}

Outcome criterion2(const Run& r) {
    Outcome o;
    const ReductionReport& rep = r.rep;
    const CenterSet& cs = *rep.cs;
    const InputField& K = *rep.curve.K;
    o.check(r.secs < 1800, "the example took " + std::to_string(r.secs) + " s");
    o.check(rep.components.size() == 3, "expected three components, got " + std::to_string(rep.components.size()));

    // D[x, 2/3] on the side of ∞ (the complement of the open disk)
    const ReportComponent* inf = find_component(rep, "D[1/x, -2/3]");
    o.check(inf && inf->kind == "interior" && inf->comp.holes[0].c == 0 && inf->comp.holes[0].r == q(2, 3),
            "interior component with boundary D[x, 2/3] around ∞ missing");

    const ReportComponent* p1 = nullptr;
    for (const auto& rc : rep.components)
        if (rc.kind == "interior" && !rc.comp.whole) p1 = &rc;
    o.check(p1 != nullptr, "interior discoid ψ₁ missing");
    int c1 = -1, c2 = -1;
    if (p1) {
        c1 = p1->comp.outer.c;
        o.check(cs[c1].degree() == 9 && is_branch_center(rep, c1), "ψ₁ is not the degree-9 branch factor");
        o.check(p1->comp.outer.psi_radius(cs) == q(12), "ψ₁ radius " + p1->comp.outer.psi_radius(cs).str());
        o.check(p1->split == 9 && p1->comp.outer.r == q(2), "D[ψ₁, 12] should split into 9 disks of radius 2");
        o.check(same_discoid(rep, c1, listed_psi1(K), q(12)), "listed ψ₁ does not give the same D[ψ₁, 12]");
    }

    o.check(rep.tails.size() == 1, "expected one tail discoid");
    if (rep.tails.size() == 1) {
        const TailComponent& t = rep.tails[0];
        c2 = t.disc.c;
        o.check(cs[c2].degree() == 9, "ψ₂ has degree " + std::to_string(cs[c2].degree()));
        o.check(t.disc.psi_radius(cs) == q(45, 4), "ψ₂ radius " + t.disc.psi_radius(cs).str());
        o.check(t.split == 3 && t.disc.r == q(17, 12), "D[ψ₂, 45/4] should split into 3 disks of radius 17/12");
        o.check(t.data.lambda == q(17, 12), "λ = " + t.data.lambda.str());
        o.check(t.data.genus == 1 && genus_one_residues(t.data), "tail reduction is not y^3 - y = x^2 up to units");
        const ReportComponent* tc = find_component(rep, "D[" + cs[c2].name + ", 45/4]");
        o.check(tc && tc->genera == std::vector<int>{1, 1, 1}, "tail genera should be 1,1,1");
        o.check(same_discoid(rep, c2, listed_psi2(K), q(45, 4)), "listed ψ₂ does not give the same D[ψ₂, 45/4]");
    }

    // the middle vertex D[ψ₁, 11] = D[ψ₂, 11]
    bool middle = false;
    if (c1 >= 0 && c2 >= 0) {
        std::map<int, int> children;
        for (const auto& v : rep.tree.vertices)
            if (v.parent >= 0) ++children[v.parent];
        for (size_t i = 0; i < rep.tree.vertices.size(); ++i) {
            const auto& v = rep.tree.vertices[i];
            if (v.p.inf || v.leaf || children[static_cast<int>(i)] < 2) continue;
            ValRational g = v.p.r;
            if (cs.dist(v.p.c, c1) >= g && cs.dist(v.p.c, c2) >= g && cs[c1].theta.eval(g) == q(11) &&
                cs[c2].theta.eval(g) == q(11))
                middle = true;
        }
    }
    o.check(middle, "no branching vertex at D[ψ₁, 11] = D[ψ₂, 11]");
    return o;
}

// ------------------------------------------------------------------ 3

// Roots a + Σ_j 3^{k_j} i_j u_j with i_j < b_j: every root sees the same
// distances, so the discoid splits like an irreducible polynomial would.
std::vector<mpq_class> symmetric_roots(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nlev(1, 3), br(2, 3), kk(-2, 4), uu(1, 40);
    int m = nlev(rng);
    std::set<int> ks;
    while (static_cast<int>(ks.size()) < m) ks.insert(kk(rng));
    std::vector<mpq_class> roots{mpq_class(uu(rng) * (uu(rng) % 2 ? 1 : -1))};
    for (int k : ks) {
        int b = br(rng);
        mpz_class u = uu(rng);
        if (u % 3 == 0) u += 1;
        mpq_class step = k >= 0 ? mpq_class(u * pow3(k)) : mpq_class(u, pow3(-k));
        std::vector<mpq_class> next;
        for (const auto& a : roots)
            for (int i = 0; i < b; ++i) next.push_back(a + step * i);
        roots = next;
    }
    return roots;
}

std::vector<mpq_class> loose_roots(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> n(2, 7), num(-300, 300), ex(-2, 3);
    std::set<mpq_class> s;
    int d = n(rng);
    while (static_cast<int>(s.size()) < d) {
        int e = ex(rng);
        mpq_class a = e >= 0 ? mpq_class(num(rng) * pow3(e)) : mpq_class(num(rng), pow3(-e));
        a.canonicalize();
        s.insert(a);
    }
    return {s.begin(), s.end()};
}

ValRational vq(const mpq_class& a) {
    bool exact = true;
    Z3 z = z3_from_mpq(a, 1000, exact);
    return ValRational(z.val());
}

Outcome criterion3() {
    Outcome o;
    std::mt19937_64 rng(20260301);
    const TowerPtr B = Tower::base();
    for (int it = 0; it < 50; ++it) {
        std::vector<mpq_class> roots = it % 2 == 0 ? symmetric_roots(rng) : loose_roots(rng);
        int n = static_cast<int>(roots.size());
        // ψ = Π (x − a)
        std::vector<mpq_class> c{1};
        for (const auto& a : roots) {
            std::vector<mpq_class> d(c.size() + 1, 0);
            for (size_t i = 0; i < c.size(); ++i) {
                d[i + 1] += c[i];
                d[i] -= a * c[i];
            }
            c = d;
        }
        TPoly psi;
        for (const auto& x : c) psi.push_back(TElem::from_mpq(B, x, 400));
        std::string tag = "case " + std::to_string(it) + ": ";
        for (int which = 0; which < n; which += std::max(1, n / 3)) {
            TElem a0 = TElem::from_mpq(B, roots[which], 400);
            std::vector<ValRational> brute;
            for (int j = 0; j < n; ++j)
                if (j != which) brute.push_back(vq(roots[j] - roots[which]));
            std::sort(brute.begin(), brute.end());
            std::vector<ValRational> got = root_distances(psi, a0);
            o.check(got == brute, tag + "root_distances differ from the root list");
            Theta th(n, got);
            PiecewiseAffine f = th.function();
            ValRational prev;
            bool first = true;
            for (int k = -16; k <= 30; ++k) {
                ValRational r(k, 4);
                ValRational direct = r;  // the root itself
                int closed = 1, open = 1;
                for (const auto& d : brute) {
                    direct += vmin(d, r);
                    if (d >= r) ++closed;
                    if (d > r) ++open;
                }
                o.check(th.eval(r) == direct, tag + "θ(" + r.str() + ") differs from Σ min(r, d)");
                o.check(f.eval(r) == direct, tag + "θ as a piecewise function differs");
                o.check(th.cluster(r) == closed, tag + "cluster count differs");
                o.check(f.slope_at(r) == ValRational(open), tag + "slope of θ differs from the count |I_r|");
                o.check(th.inverse(direct) == r, tag + "θ inverse");
                if (!first) o.check(direct > prev, tag + "θ not strictly increasing");
                prev = direct;
                first = false;
                if (it % 2 == 0) {
                    // disks of radius r around all roots
                    std::vector<int> cls(n, -1);
                    int classes = 0;
                    for (int i = 0; i < n; ++i) {
                        if (cls[i] >= 0) continue;
                        cls[i] = classes;
                        for (int j = i + 1; j < n; ++j)
                            if (vq(roots[i] - roots[j]) >= r) cls[j] = classes;
                        ++classes;
                    }
                    auto sp = th.split(direct);
                    o.check(sp.first == classes && sp.second == r, tag + "split count differs from clustering");
                }
            }
        }
    }
    return o;
}

// ------------------------------------------------------------------ 4

struct RandomCase {
    QuarticCurve C;
    TElem x0;
    mpq_class x0q;
};

std::vector<RandomCase> random_cases() {
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<int> co(-9, 9), num(-40, 40), den(0, 5);
    const long dens[] = {1, 3, 9, 2, 5, 27};
    auto K = InputField::rationals();
    std::vector<RandomCase> out;
    while (out.size() < 20) {
        auto rp = [&](int n) {
            std::vector<mpq_class> c;
            for (int i = 0; i <= n; ++i) c.push_back(co(rng));
            return kpoly::from_rationals(*K, c);
        };
        QuarticCurve C{K, rp(2), rp(3), rp(4)};
        try {
            check_curve(C);
        } catch (const InputError&) {
            continue;
        }
        mpq_class x(num(rng), dens[den(rng)]);
        x.canonicalize();
        if (K->is_zero(kpoly::eval(*K, discriminant_y(C), K->from_mpq(x)))) continue;
        out.push_back(RandomCase{C, TElem::from_mpq(Tower::base(), x, 64), x});
    }
    return out;
}

// v_r(f) = min_i v(f_i) + i r, or nullopt when an uncertified coefficient could reach it.
std::optional<ValRational> gauss_value(const TPoly& f, const ValRational& r) {
    std::optional<ValRational> best;
    for (size_t i = 0; i < f.size(); ++i) {
        if (!f[i].certified()) continue;
        ValRational w = f[i].val() + ValRational(static_cast<long>(i)) * r;
        if (!best || w < *best) best = w;
    }
    for (size_t i = 0; i < f.size(); ++i) {
        if (f[i].certified() || (f[i].is_exact() && f[i].rep_is_zero())) continue;
        if (!best || f[i].lb() + ValRational(static_cast<long>(i)) * r <= *best) return std::nullopt;
    }
    if (!best) return ValRational::infinity();
    return best;
}

TPoly pmul(const TPoly& a, const TPoly& b, const TowerPtr& T) {
    TPoly r(a.size() + b.size() - 1, TElem(T));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

TPoly padd(TPoly a, const TPoly& b, const TowerPtr& T) {
    if (a.size() < b.size()) a.resize(b.size(), TElem(T));
    for (size_t i = 0; i < b.size(); ++i) a[i] += b[i];
    return a;
}

// Coefficients of z^2, z^1, z^0 in F(x0 + t, y0 + v t + z), expanded directly.
std::array<TPoly, 3> expand_at(const QuarticCurve& C, const TElem& x0, const TElem& y0, const TElem& v, long W) {
    const InputField& K = *C.K;
    TowerPtr T = v.tower();
    TElem x = x0.promote(T), y = y0.promote(T);
    auto at = [&](const KPoly& p) {
        // p(x0 + t) by Horner on polynomials in t
        TPoly acc{TElem(T)};
        TPoly lin{x, TElem::from_int(T, 1)};
        for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i) {
            acc = pmul(acc, lin, T);
            acc[0] += K.embed(p[i], T, W);
        }
        return acc;
    };
    std::array<TPoly, 4> A{at(C.A0), at(C.A1), at(C.A2), TPoly{TElem::from_int(T, 1)}};
    TPoly Y{y, v.promote(T)};
    std::array<TPoly, 3> out;
    const long binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
    for (int k = 0; k <= 2; ++k) {
        TPoly g{TElem(T)};
        for (int j = k; j <= 3; ++j) {
            TPoly term = A[j];
            for (int e = 0; e < j - k; ++e) term = pmul(term, Y, T);
            for (auto& c : term) c = c * TElem::from_int(T, binom[j][k]);
            g = padd(g, term, T);
        }
        out[2 - k] = g;
    }
    return out;  // {A, B, C}
}

Outcome criterion4(const std::vector<RandomCase>& cases) {
    Outcome o;
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> rn(-12, 36), rd(1, 6);
    const ValRational three_halves(3, 2);
    int lam_eq_mu = 0, lam_gt_mu = 0;
    for (size_t n = 0; n < cases.size(); ++n) {
        const RandomCase& rc = cases[n];
        std::string tag = "curve " + std::to_string(n) + ": ";
        InteriorOptions io;
        DeltaProfile dp = delta_path(rc.C, rc.x0, io);
        const InteriorTransform& it = dp.transform;
        auto abc = expand_at(rc.C, rc.x0, it.y0, it.v, 64);
        int sampled = 0;
        for (int tries = 0; tries < 200 && sampled < 10; ++tries) {
            ValRational r(rn(rng), rd(rng));
            if (!intervals_contain(dp.trust, r)) continue;
            auto vA = gauss_value(abc[0], r), vB = gauss_value(abc[1], r), vC = gauss_value(abc[2], r);
            if (!vA || !vB || !vC) continue;
            ValRational m = three_halves;
            if (!vC->is_inf()) {
                m = vmin(m, three_halves * *vA - *vC / ValRational(2));
                m = vmin(m, three_halves * *vB - *vC);
            }
            ValRational direct = vmax(ValRational(0), m);
            ValRational got = dp.profile.eval(r);
            o.check(got == direct, tag + "δ(" + r.str() + ") = " + got.str() + ", direct " + direct.str());
            o.check(ValRational(0) <= got && got <= three_halves, tag + "δ outside [0, 3/2]");
            o.check(intervals_contain(dp.zero_set, r) == (got == ValRational(0)), tag + "zero set disagrees");
            ++sampled;
        }
        o.check(sampled == 10, tag + "only " + std::to_string(sampled) + " certified radii");
        // λ from the zero set of δ; the tail-coefficient formula must agree when λ > μ
        KPoly disc = discriminant_y(rc.C);
        ValRational m = mu(disc, *rc.C.K, rc.x0, io.W);
        ValRational lam = lambda_of(dp, m);
        o.check(lam >= m, tag + "λ < μ");
        o.check(lam.is_inf() || dp.profile.eval(lam) == ValRational(0), tag + "δ(λ) ≠ 0");
        if (lam > m) {
            TailData td = lambda_tail(rc.C, transform_tail(rc.C), disc, rc.x0, io);
            o.check(td.lambda == lam, tag + "formula λ " + td.lambda.str() + ", δ gives " + lam.str());
            o.check(td.mu == m, tag + "μ disagrees");
            ++lam_gt_mu;
        } else {
            bool threw = false;
            try {
                lambda_tail(rc.C, transform_tail(rc.C), disc, rc.x0, io);
            } catch (const InvalidUse&) {
                threw = true;
            }
            o.check(threw, tag + "lambda_tail accepted λ = μ");
            ++lam_eq_mu;
        }
    }
    o.check(lam_gt_mu > 0 && lam_eq_mu > 0,
            "λ > μ at " + std::to_string(lam_gt_mu) + " points, λ = μ at " + std::to_string(lam_eq_mu));
    return o;
}

// ------------------------------------------------------------------ 5

Outcome criterion5(const std::vector<const ReductionReport*>& reps) {
    Outcome o;
    std::mt19937_64 rng(55);
    std::uniform_int_distribution<int> rn(-24, 60), rd(1, 4);
    for (size_t n = 0; n < reps.size(); ++n) {
        const ReductionReport& rep = *reps[n];
        const CenterSet& cs = *rep.cs;
        std::string tag = "report " + std::to_string(n) + ": ";
        for (const auto& t : rep.tails) {
            DiscoidDomain d{{Component{false, t.disc, {}}}};
            o.check(subtract(cs, d, rep.U).empty(), tag + "tail " + t.disc.str(cs) + " not inside U");
        }
        // δ at each tail boundary, along the path from its center
        std::vector<bool> tail_ok;
        for (const auto& t : rep.tails) {
            InteriorOptions io;
            io.W = rep.precision;
            DeltaProfile dp = delta_path(rep.curve, cs[t.disc.c].root, io);
            tail_ok.push_back(dp.profile.eval(t.disc.r) == ValRational(0));
        }
        std::uniform_int_distribution<int> pick(0, cs.size() - 1);
        int found = 0;
        for (int tries = 0; tries < 4000 && found < 20; ++tries) {
            int c = pick(rng);
            ValRational r(rn(rng), rd(rng));
            if (!contains(cs, rep.U, c, r)) continue;
            ++found;
            if (contains(cs, rep.interior, c, r)) {
                // retraction onto Γ0: the farthest point of the branch paths below ξ
                std::optional<ValRational> best;
                int bc = -1;
                for (const auto& b : rep.branch) {
                    ValRational rho = vmin(r, cs.dist(c, b.center));
                    if (!best || rho > *best) {
                        best = rho;
                        bc = b.center;
                    }
                }
                if (bc < 0) continue;
                for (const auto& b : rep.branch)
                    if (b.center == bc)
                        o.check(b.delta.profile.eval(*best) == ValRational(0),
                                tag + "point D[" + cs[c].name + "] at " + r.str() + " retracts to δ > 0");
                continue;
            }
            bool in_tail = false;
            for (size_t k = 0; k < rep.tails.size(); ++k)
                if (contains(cs, Component{false, rep.tails[k].disc, {}}, c, r)) {
                    in_tail = true;
                    o.check(tail_ok[k], tag + "tail boundary with δ > 0");
                }
            o.check(in_tail, tag + "point of U outside the tame locus");
        }
        o.check(found == 20, tag + "only " + std::to_string(found) + " sampled points of U");
    }
    return o;
}

// ------------------------------------------------------------------ 6

Outcome criterion6(const Run& tail_ex, const Run& xns) {
    Outcome o;
    struct Variant {
        std::string file;
        RunOptions opt;
        std::string what;
    };
    RunOptions dbl;
    dbl.W = 128;
    RunOptions alt;
    alt.alt = true;
    for (const Run* base : {&tail_ex, &xns}) {
        bool is_tail_ex = base == &tail_ex;
        std::string f = is_tail_ex ? "genus1_tail.json" : "xns27_normal.json";
        std::string fp = is_tail_ex ? "genus1_tail_permuted.json" : "xns27_normal_permuted.json";
        std::string ref = canonical(*base);
        for (const Variant& v : {Variant{f, dbl, "doubled precision"}, Variant{f, alt, "alternate selector"},
                                 Variant{fp, RunOptions{}, "permuted input"}}) {
            Run r = run_file(v.file, v.opt);
            o.check(canonical(r) == ref, f + ": report changes under " + v.what);
        }
    }
    return o;
}

// ------------------------------------------------------------------ 7

std::vector<long> rand_coeffs(std::mt19937_64& rng, int deg) {
    std::uniform_int_distribution<long> u(-9, 9);
    std::vector<long> c(deg + 1);
    for (auto& x : c) x = u(rng);
    return c;
}

KPoly qp(const std::vector<long>& c) {
    std::vector<mpq_class> v(c.begin(), c.end());
    return kpoly::from_rationals(*InputField::rationals(), v);
}

bool rf_equal(const InputField& K, const RatFunc& a, const RatFunc& b) {
    return kpoly::equal(kpoly::mul(K, a.num, b.den), kpoly::mul(K, b.num, a.den));
}

// Exact value of g at a rational point of the curve.
mpq_class eval_at(const QuarticCurve& C, const SFrac& g, const mpq_class& x0, const mpq_class& y0) {
    const InputField& K = *C.K;
    auto ev = [&](const SElem& s) {
        mpq_class r = 0, yp = 1;
        for (int i = 0; i < 3; ++i) {
            if (!s.c[i].empty()) r += kpoly::eval(K, s.c[i], K.from_mpq(x0))[0] * yp;
            yp *= y0;
        }
        return r;
    };
    mpq_class d = ev(sring::Fy(C)), n = ev(g.num);
    for (int i = 0; i < g.k; ++i) n /= d;
    return n;
}

Outcome criterion7() {
    Outcome o;
    std::mt19937_64 rng(777);
    std::uniform_int_distribution<long> small(-4, 4);
    const InputField& K = *InputField::rationals();
    int tested = 0;
    for (int it = 0; it < 200 && tested < 20; ++it) {
        QuarticCurve C{InputField::rationals(), qp(rand_coeffs(rng, 2)), qp(rand_coeffs(rng, 3)),
                       qp(rand_coeffs(rng, 4))};
        // a rational point (x0, y0) on the curve
        long x0 = small(rng), y0 = small(rng);
        mpq_class val = y0 * y0 * y0 + kpoly::eval(K, C.A2, K.from_mpq(x0))[0] * y0 * y0 +
                        kpoly::eval(K, C.A1, K.from_mpq(x0))[0] * y0 + kpoly::eval(K, C.A0, K.from_mpq(x0))[0];
        C.A0 = kpoly::sub(K, C.A0, kpoly::constant(K, K.from_mpq(val)));
        try {
            check_curve(C);
        } catch (const InputError&) {
            continue;
        }
        if (eval_at(C, SFrac{sring::Fy(C), 0}, x0, y0) == 0) continue;
        std::string tag = "curve " + std::to_string(tested) + ": ";
        ++tested;
        KPoly delta = discriminant_y(C);

        // norms
        SElem g, h;
        for (auto& c : g.c) c = qp(rand_coeffs(rng, 2));
        for (auto& c : h.c) c = qp(rand_coeffs(rng, 2));
        SFrac gf{g, tested % 2}, hf{h, 1};
        RatFunc lhs = norm_cubic(C, SFrac{sring::mul(C, g, h), gf.k + hf.k});
        RatFunc rhs = ratfunc_mul(K, norm_cubic(C, gf), norm_cubic(C, hf));
        o.check(rf_equal(K, lhs, rhs), tag + "Nm is not multiplicative");
        RatFunc nfy = norm_cubic(C, SFrac{sring::Fy(C), 0});
        bool pm = kpoly::equal(nfy.num, delta) || kpoly::equal(nfy.num, kpoly::neg(K, delta));
        o.check(pm && kpoly::equal(nfy.den, qp({1})), tag + "Nm(F_y) is not ±Δ_F");

        // tail transform at the rational point
        TailTransform tt = transform_tail(C);
        o.check(eval_at(C, tt.c[0], x0, y0) == 0 && eval_at(C, tt.c[1], x0, y0) == 0,
                tag + "c0, c1 do not vanish at a point of the curve");

        // interior transform: degrees 0 and 3 of C vanish (checked on an independent expansion)
        InteriorOptions io;
        TElem xa = TElem::from_int(Tower::base(), x0 + 1);
        if (K.is_zero(kpoly::eval(K, delta, K.from_mpq(x0 + 1)))) continue;
        InteriorTransform itf = transform_interior(C, xa, io);
        o.check(itf.C[0].is_exact() && itf.C[0].rep_is_zero() && itf.C[3].is_exact() && itf.C[3].rep_is_zero(),
                tag + "transform_interior left degrees 0 or 3 of C");
        auto abc = expand_at(C, itf.x0, itf.y0, itf.v, io.W);
        for (int d : {0, 3}) {
            const TElem& cd = abc[2].size() > static_cast<size_t>(d) ? abc[2][d] : TElem(itf.v.tower());
            o.check(!cd.certified() || cd.rep_is_zero(), tag + "C_" + std::to_string(d) + " certified nonzero");
            o.check(cd.lb() > ValRational(io.W / 2), tag + "C_" + std::to_string(d) + " not small");
        }
        for (int d : {1, 2, 4})
            o.check(abc[2].size() <= static_cast<size_t>(d) ||
                        (abc[2][d] - itf.C[d].promote(abc[2][d].tower())).lb() > ValRational(io.W / 2),
                    tag + "transform_interior C differs from the direct expansion");
    }
    o.check(tested == 20, "only " + std::to_string(tested) + " curves tested");
    return o;
}

}  // namespace

int main() {
    bool all = true;
    auto report = [&](int n, const std::string& name, const std::function<Outcome()>& f) {
        auto t0 = Clock::now();
        Outcome o;
        try {
            o = f();
        } catch (const std::exception& e) {
            o.failures.push_back(std::string("exception: ") + e.what());
        }
        bool ok = o.failures.empty();
        all &= ok;
        std::cout << (ok ? "PASS" : "FAIL") << " criterion " << n << ": " << name << " ("
                  << std::to_string(seconds_since(t0)).substr(0, 6) << " s)\n";
        for (size_t i = 0; i < o.failures.size() && i < 10; ++i) std::cout << "    " << o.failures[i] << "\n";
        std::cout.flush();
    };

    std::optional<Run> tail_ex, xns;
    std::vector<RandomCase> cases;
    std::vector<ReductionReport> random_reports;

    report(1, "genus-1 tail example golden test", [&] {
        tail_ex = run_file("genus1_tail.json");
        return criterion1(*tail_ex);
    });
    report(2, "X+ns(27) quotient quartic golden test", [&] {
        xns = run_file("xns27_normal.json");
        return criterion2(*xns);
    });
    report(3, "theta and splitting against root lists", [&] { return criterion3(); });
    report(4, "delta formula against direct evaluation", [&] {
        cases = random_cases();
        return criterion4(cases);
    });
    report(5, "tail locus inside U inside the tame locus", [&] {
        if (!tail_ex || !xns || cases.empty()) throw InvalidUse("earlier criteria did not produce their curves");
        for (const auto& rc : cases) random_reports.push_back(run_algorithm(rc.C, RunOptions{}));
        std::vector<const ReductionReport*> reps{&tail_ex->rep, &xns->rep};
        for (const auto& r : random_reports) reps.push_back(&r);
        return criterion5(reps);
    });
    report(6, "invariance of the reports", [&] {
        if (!tail_ex || !xns) throw InvalidUse("golden runs missing");
        return criterion6(*tail_ex, *xns);
    });
    report(7, "norm and transform identities", [&] { return criterion7(); });
    return all ? 0 : 1;
}
