#include "doctest.h"

#include "q3/berktree.hpp"
#include "q3/errors.hpp"

#include <algorithm>
#include <random>

using namespace q3;

namespace {

ValRational V(long n, long d = 1) { return ValRational(n, d); }

FieldPtr QQ() { return InputField::rationals(); }

KPoly qp(const std::vector<long>& c) {
    std::vector<mpq_class> q(c.begin(), c.end());
    return kpoly::from_rationals(*QQ(), q);
}

// Brute-force min_i(v_i + i r).
ValRational brute_gauss(const std::vector<std::pair<int, ValRational>>& cv, const ValRational& r) {
    ValRational m = ValRational::infinity();
    for (const auto& [i, v] : cv) m = vmin(m, v + ValRational(i) * r);
    return m;
}

// 3-adic valuation of a nonzero rational.
ValRational v3(const mpq_class& q) {
    long v = 0;
    mpz_class n = q.get_num(), d = q.get_den();
    while (n % 3 == 0) n /= 3, ++v;
    while (d % 3 == 0) d /= 3, --v;
    return ValRational(v);
}

// Independent v_ξ(h) for h a product of linear factors (x - a)^m over Q,
// at ξ = ξ_{b, r}.
ValRational brute_val(const std::vector<std::pair<long, int>>& fac, long unit_val, long b, const ValRational& r) {
    ValRational s(unit_val);
    for (const auto& [a, m] : fac) {
        ValRational d = a == b ? r : vmin(r, v3(mpq_class(b - a)));
        s += m >= 0 ? d * ValRational(m) : -(d * ValRational(-m));
    }
    return s;
}

}  // namespace

TEST_CASE("gauss_profile examples") {
    auto f = gauss_profile({{0, V(1)}, {2, V(0)}});
    CHECK(f.breakpoints() == std::vector<ValRational>{V(1, 2)});
    CHECK(f.eval(V(0)) == V(0));
    CHECK(f.eval(V(1)) == V(1));
    auto g = gauss_profile({{0, V(0)}});
    CHECK(g.breakpoints().empty());
    CHECK(g.eval(V(17)) == V(0));
    std::vector<std::pair<int, ValRational>> cv{{0, V(2)}, {1, V(0)}, {3, V(0)}};
    auto h = gauss_profile(cv);
    CHECK(h.breakpoints() == std::vector<ValRational>{V(0), V(2)});
    for (long r = -2; r <= 3; ++r) CHECK(h.eval(V(r)) == brute_gauss(cv, V(r)));
    CHECK(h.slopes() == std::vector<ValRational>{V(3), V(1), V(0)});
}

TEST_CASE("piecewise affine operations agree with pointwise evaluation") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<long> u(-6, 6);
    auto rnd = [&]() {
        std::vector<std::pair<int, ValRational>> cv;
        for (int i = 0; i < 4; ++i) cv.push_back({i, V(u(rng), 1 + (u(rng) + 6) % 3)});
        return gauss_profile(cv);
    };
    for (int it = 0; it < 30; ++it) {
        auto a = rnd(), b = rnd().scale(V(-1, 2));
        auto mn = pa_min(a, b), mx = pa_max(a, b), sm = a + b;
        auto g = PiecewiseAffine::affine(V(2), V(u(rng)));
        auto comp = a.compose(g);
        auto ge = sm.where_ge(V(1));
        for (long k = -40; k <= 40; ++k) {
            ValRational r(k, 4);
            CHECK(mn.eval(r) == vmin(a.eval(r), b.eval(r)));
            CHECK(mx.eval(r) == vmax(a.eval(r), b.eval(r)));
            CHECK(sm.eval(r) == a.eval(r) + b.eval(r));
            CHECK(comp.eval(r) == a.eval(g.eval(r)));
            CHECK(intervals_contain(ge, r) == (sm.eval(r) >= V(1)));
        }
        // continuity at breakpoints
        for (const auto& p : mn.breakpoints()) {
            size_t k = std::find(mn.breakpoints().begin(), mn.breakpoints().end(), p) - mn.breakpoints().begin();
            CHECK(mn.slopes()[k] * p + mn.intercepts()[k] == mn.slopes()[k + 1] * p + mn.intercepts()[k + 1]);
        }
    }
}

TEST_CASE("theta examples and splitting") {
    Theta id(1, {});
    CHECK(id.eval(V(7, 3)) == V(7, 3));
    CHECK(id.split(V(7)) == std::make_pair(1, V(7)));
    std::vector<ValRational> d{V(3, 2), V(3, 2)};
    for (int i = 0; i < 6; ++i) d.push_back(V(7, 6));
    Theta t(9, d);
    CHECK(t.eval(V(2)) == V(12));
    CHECK(t.eval(V(17, 12)) == V(45, 4));
    CHECK(t.eval(V(4, 3)) == V(11));
    CHECK(t.inverse(V(12)) == V(2));
    CHECK(t.inverse(V(45, 4)) == V(17, 12));
    CHECK(t.split(V(45, 4)) == std::make_pair(3, V(17, 12)));
    CHECK(t.split(V(12)) == std::make_pair(9, V(2)));
    CHECK(t.eval(V(1)) == V(9));
    for (long k = -12; k <= 40; ++k) {
        ValRational r(k, 12);
        CHECK(t.inverse(t.eval(r)) == r);
        CHECK(t.function().eval(r) == t.eval(r));
    }
}

TEST_CASE("theta is independent of the chosen root") {
    // for ψ = x² − 6x + 6 and x² + 1 both roots α and (sum − α) live in one tower
    auto K = QQ();
    CenterSet cs(K);
    RootOptions opt;
    for (auto coeffs : {std::vector<long>{6, -6, 1}, std::vector<long>{1, 0, 1}, std::vector<long>{-12, -3, 1}}) {
        TPoly chi = kpoly::embed(*K, qp(coeffs), cs.base(), 64);
        auto fs = factor_completion(chi, opt);
        REQUIRE(fs.size() == 1);
        TElem a = fs[0].root;
        TElem b = TElem::from_int(a.tower(), -coeffs[1]) - a;
        Theta ta(2, root_distances(fs[0].chi, a)), tb(2, root_distances(fs[0].chi, b));
        for (long k = -8; k <= 30; ++k) CHECK(ta.eval(ValRational(k, 4)) == tb.eval(ValRational(k, 4)));
    }
}

TEST_CASE("center distances and span_tree examples") {
    auto K = QQ();
    CenterSet cs(K);
    int c3 = cs.add_rational(K->from_mpq(3), "x-3");
    CHECK(cs.dist(0, c3) == V(1));
    CHECK(cs.add_rational(K->from_mpq(3), "again") == c3);

    auto t = span_tree(cs, {Discoid{0, V(1)}, Discoid{c3, V(2)}});
    REQUIRE(t.vertices.size() == 3);
    CHECK(t.vertices[0].p.inf);
    CHECK(t.vertices[1].p.r == V(1));
    CHECK(t.vertices[1].parent == 0);
    CHECK(t.vertices[2].p.r == V(2));
    CHECK(t.vertices[2].parent == 1);

    auto s = span_tree(cs, {Discoid{0, V(0)}});
    REQUIRE(s.vertices.size() == 2);
    CHECK(s.vertices[1].p.r == V(0));

    // permutation invariance
    int c9 = cs.add_rational(K->from_mpq(9), "x-9");
    std::vector<Discoid> pts{{0, V(3)}, {c3, V(2)}, {c9, V(5, 2)}, {0, V(1, 2)}};
    auto ref = span_tree(cs, pts);
    std::sort(pts.begin(), pts.end(), [](const Discoid& a, const Discoid& b) { return a.c > b.c; });
    auto perm = span_tree(cs, pts);
    CHECK(to_dot(cs, ref) == to_dot(cs, perm));
}

TEST_CASE("domain_from_inequality examples") {
    auto K = QQ();
    CenterSet cs(K);
    RootOptions opt;

    ValuativeFunction one;
    auto w = domain_from_inequality(cs, one);
    REQUIRE(w.comps.size() == 1);
    CHECK(w.comps[0].whole);
    CHECK(w.comps[0].holes.empty());

    ValuativeFunction h1 = local_factorization(cs, qp({0, 1}), "h", opt);
    h1.unit_val = V(-1);
    auto d1 = domain_from_inequality(cs, h1);
    REQUIRE(d1.comps.size() == 1);
    CHECK(d1.str(cs) == "D[x, 1]");

    ValuativeFunction h2 = local_factorization(cs, qp({0, -3, 1}), "h", opt);
    h2.unit_val = V(-2);
    auto d2 = domain_from_inequality(cs, h2);
    REQUIRE(d2.comps.size() == 1);
    CHECK(d2.str(cs) == "D[x, 1]");
    // edge-walk oracle on the paths [0, ∞] and [3, ∞]
    int c3 = cs.add_rational(K->from_mpq(3), "x-3");
    for (long k : {0, 1, 2, 3, 4, 6}) {
        ValRational r(k, 2);
        CHECK(contains(cs, d2, 0, r) == (brute_val({{0, 1}, {3, 1}}, -2, 0, r) >= V(0)));
        CHECK(contains(cs, d2, c3, r) == (brute_val({{0, 1}, {3, 1}}, -2, 3, r) >= V(0)));
    }
}

TEST_CASE("domain_from_inequality matches direct evaluation on random rational functions") {
    auto K = QQ();
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<long> ua(-40, 40), um(-2, 2), uu(-3, 3);
    RootOptions opt;
    for (int it = 0; it < 25; ++it) {
        CenterSet cs(K);
        std::vector<std::pair<long, int>> fac;
        for (int j = 0; j < 4; ++j) {
            long a = ua(rng);
            int m = um(rng);
            bool dup = false;
            for (auto& f : fac) dup |= f.first == a;
            if (m != 0 && !dup) fac.push_back({a, m});
        }
        long uv = uu(rng);
        ValuativeFunction h;
        h.unit_val = ValRational(uv);
        std::vector<int> idx;
        for (auto& [a, m] : fac) {
            int c = cs.add_rational(K->from_mpq(a), "x-" + std::to_string(a));
            idx.push_back(c);
            h.terms.push_back({c, m});
        }
        auto D = domain_from_inequality(cs, h);
        for (size_t j = 0; j < fac.size(); ++j)
            for (long k = -8; k <= 16; ++k) {
                ValRational r(k, 2);
                CHECK(contains(cs, D, idx[j], r) == (brute_val(fac, uv, fac[j].first, r) >= V(0)));
            }
        // off-tree point: a center far from all factors
        int z = cs.add_rational(K->from_mpq(1000001), "far");
        long far = 1000001;
        bool ok = true;
        for (auto& f : fac) ok &= v3(mpq_class(far - f.first)) == V(0);
        if (ok)
            for (long k = -4; k <= 8; ++k)
                CHECK(contains(cs, D, z, V(k)) == (brute_val(fac, uv, far, V(k)) >= V(0)));
    }
}

TEST_CASE("boolean operations") {
    auto K = QQ();
    CenterSet cs(K);
    int c3 = cs.add_rational(K->from_mpq(3), "x-3");
    DiscoidDomain a{{Component{false, Discoid{0, V(1)}, {}}}};
    DiscoidDomain b{{Component{false, Discoid{0, V(2)}, {}}}};
    CHECK(unite(cs, a, b).str(cs) == "D[x, 1]");
    auto d = subtract(cs, a, b);
    REQUIRE(d.comps.size() == 1);
    CHECK(d.str(cs) == "D[x, 1] \\ D°[x, 2]");
    DiscoidDomain e{{Component{false, Discoid{c3, V(1)}, {}}}};
    CHECK(unite(cs, a, e).str(cs) == "D[x, 1]");
    CHECK(intersect(cs, b, e).str(cs) == "D[x, 2]");
    DiscoidDomain f{{Component{false, Discoid{c3, V(2)}, {}}}};
    CHECK(intersect(cs, b, f).empty());
    auto g = unite(cs, b, f);
    CHECK(g.comps.size() == 2);
}

TEST_CASE("normalization is canonical on random boolean combinations") {
    auto K = QQ();
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<long> ua(-30, 30), ur(-2, 8);
    for (int it = 0; it < 40; ++it) {
        CenterSet cs(K);
        std::vector<DiscoidDomain> ds;
        std::vector<int> cents;
        for (int j = 0; j < 4; ++j) {
            int c = cs.add_rational(K->from_mpq(ua(rng)), "c" + std::to_string(j));
            cents.push_back(c);
            ds.push_back(DiscoidDomain{{Component{false, Discoid{c, ValRational(ur(rng), 2)}, {}}}});
        }
        auto x = subtract(cs, unite(cs, ds[0], ds[1]), ds[2]);
        auto y = subtract(cs, unite(cs, ds[1], ds[0]), ds[2]);
        CHECK(x.str(cs) == y.str(cs));
        auto u = unite(cs, unite(cs, ds[0], ds[1]), ds[3]);
        auto v = unite(cs, ds[3], unite(cs, ds[1], ds[0]));
        CHECK(u.str(cs) == v.str(cs));
        CHECK(normalize(cs, u).str(cs) == u.str(cs));
        auto in = intersect(cs, u, ds[2]);
        // membership oracle: direct evaluation of the boolean formula
        for (int c : cents)
            for (long k = -4; k <= 18; ++k) {
                ValRational r(k, 2);
                bool m0 = contains(cs, ds[0], c, r), m1 = contains(cs, ds[1], c, r);
                bool m2 = contains(cs, ds[2], c, r), m3 = contains(cs, ds[3], c, r);
                CHECK(contains(cs, u, c, r) == (m0 || m1 || m3));
                CHECK(contains(cs, in, c, r) == ((m0 || m1 || m3) && m2));
                bool inb = (m0 || m1) && !m2;
                // closure may only add boundary points of ds[2]
                if (inb) CHECK(contains(cs, x, c, r));
            }
    }
}
