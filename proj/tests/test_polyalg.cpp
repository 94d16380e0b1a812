#include "doctest.h"

#include "q3/errors.hpp"
#include "q3/polyalg.hpp"

#include <random>

using namespace q3;

namespace {

FieldPtr QQ() { return InputField::rationals(); }

KPoly qp(const std::vector<long>& c) {
    std::vector<mpq_class> q(c.begin(), c.end());
    return kpoly::from_rationals(*QQ(), q);
}

QuarticCurve qcurve(const std::vector<long>& a2, const std::vector<long>& a1, const std::vector<long>& a0) {
    return QuarticCurve{QQ(), qp(a2), qp(a1), qp(a0)};
}

std::vector<KPoly> ycoeffs(const QuarticCurve& C) { return {C.A0, C.A1, C.A2, qp({1})}; }

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

std::vector<long> rand_coeffs(std::mt19937_64& rng, int deg) {
    std::uniform_int_distribution<long> u(-5, 5);
    std::vector<long> c(deg + 1);
    for (auto& x : c) x = u(rng);
    return c;
}

QuarticCurve random_curve(std::mt19937_64& rng) {
    return qcurve(rand_coeffs(rng, 2), rand_coeffs(rng, 3), rand_coeffs(rng, 4));
}

SElem random_selem(std::mt19937_64& rng) {
    SElem s;
    for (auto& c : s.c) c = qp(rand_coeffs(rng, 2));
    return s;
}

bool rf_equal(const RatFunc& a, const RatFunc& b) { return kpoly::equal(a.num, b.num) && kpoly::equal(a.den, b.den); }

}  // namespace

TEST_CASE("resultant examples") {
    const InputField& K = *QQ();
    KPoly x = kpoly::x(K);
    // Res_y(y^3 + A0, y) is the product of the roots, -A0
    KPoly A0 = qp({1, 2, 0, 7});
    CHECK(kpoly::equal(resultant_y(K, {A0, {}, {}, qp({1})}, {{}, qp({1})}), kpoly::neg(K, A0)));
    // Res_y(y^2 - x, y - 1) = 1 - x
    CHECK(kpoly::equal(resultant_y(K, {kpoly::neg(K, x), {}, qp({1})}, {qp({-1}), qp({1})}), qp({1, -1})));
}

TEST_CASE("discriminant examples") {
    CHECK(kpoly::equal(discriminant_y(qcurve({}, {}, {0, 1})), qp({0, 0, -27})));
    CHECK(kpoly::equal(discriminant_y(qcurve({}, {1}, {0, 1})), qp({-4, 0, -27})));
    // frozen from an independent computer-algebra computation
    KPoly d = discriminant_y(qcurve({}, {0, 0, 3, 2}, {-1, 0, -2, 0, -3}));
    CHECK(kpoly::equal(d, qp({-27, 0, -108, 0, -270, 0, -432, -216, -387, -32})));
    CHECK_THROWS_AS(discriminant_y(qcurve({}, {}, {})), NotGenericallyEtale);
}

TEST_CASE("discriminant equals minus the resultant of F and F_y on random curves") {
    std::mt19937_64 rng(7);
    for (int it = 0; it < 20; ++it) {
        QuarticCurve C = random_curve(rng);
        SElem fy = sring::Fy(C);
        KPoly r = resultant_y(*C.K, ycoeffs(C), {fy.c[0], fy.c[1], fy.c[2]});
        KPoly d;
        try {
            d = discriminant_y(C);
        } catch (const NotGenericallyEtale&) {
            continue;
        }
        CHECK(kpoly::equal(kpoly::neg(*C.K, r), d));
    }
}

TEST_CASE("norm examples") {
    const InputField& K = *QQ();
    QuarticCurve C = qcurve({1, 1}, {0, 2, 0, 1}, {3, 0, 1, 0, 1});
    RatFunc ny = norm_cubic(C, SFrac{sring::y(K), 0});
    CHECK(kpoly::equal(ny.num, kpoly::neg(K, C.A0)));
    CHECK(kpoly::equal(ny.den, qp({1})));
    RatFunc nc = norm_cubic(C, SFrac{sring::constant(qp({2, 1})), 0});
    CHECK(kpoly::equal(nc.num, kpoly::pow(K, qp({2, 1}), 3)));
    RatFunc nd = norm_cubic(C, SFrac{sring::Fy(C), 0});
    CHECK(kpoly::equal(nd.num, kpoly::neg(K, discriminant_y(C))));
    // y / F_y has norm -A0 / (-Δ)
    RatFunc q = norm_cubic(C, SFrac{sring::y(K), 1});
    RatFunc expect = ratfunc_mul(K, RatFunc{kpoly::neg(K, C.A0), qp({1})},
                                 RatFunc{qp({1}), kpoly::neg(K, discriminant_y(C))});
    CHECK(rf_equal(q, expect));
}

TEST_CASE("norm is multiplicative") {
    std::mt19937_64 rng(11);
    for (int it = 0; it < 10; ++it) {
        QuarticCurve C = random_curve(rng);
        try {
            discriminant_y(C);
        } catch (const NotGenericallyEtale&) {
            continue;
        }
        SElem g = random_selem(rng), h = random_selem(rng);
        SFrac gf{g, it % 2}, hf{h, 1};
        SFrac gh{sring::mul(C, g, h), gf.k + hf.k};
        RatFunc lhs = norm_cubic(C, gh);
        RatFunc rhs = ratfunc_mul(*C.K, norm_cubic(C, gf), norm_cubic(C, hf));
        CHECK(rf_equal(lhs, rhs));
    }
}

TEST_CASE("normalize cancels exact factors of F_y") {
    QuarticCurve C = qcurve({0, 1}, {1, 0, 1}, {2, 1});
    SElem fy = sring::Fy(C);
    SElem g = sring::mul(C, sring::mul(C, fy, fy), sring::y(*C.K));
    SFrac n = sring::normalize(C, SFrac{g, 3});
    CHECK(n.k == 1);
    CHECK(rf_equal(norm_cubic(C, n), norm_cubic(C, SFrac{sring::y(*C.K), 1})));
}

TEST_CASE("tail transform on y^3 + y + x") {
    QuarticCurve C = qcurve({}, {1}, {0, 1});
    TailTransform tt = transform_tail(C);
    CHECK(sring::is_zero(tt.c[0].num));
    CHECK(sring::is_zero(tt.c[1].num));
    CHECK(eval_at(C, tt.b[0], -2, 1) == 4);
    CHECK(eval_at(C, tt.a[0], -2, 1) == 3);
}

TEST_CASE("tail transform constant and linear coefficients vanish on random curves") {
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<long> u(-4, 4);
    int tested = 0;
    for (int it = 0; it < 40 && tested < 20; ++it) {
        // force the rational point (x0, y0) onto the curve through A0(0)
        long x0 = u(rng), y0 = u(rng);
        QuarticCurve C = random_curve(rng);
        const InputField& K = *C.K;
        mpq_class val = y0 * y0 * y0 + kpoly::eval(K, C.A2, K.from_mpq(x0))[0] * y0 * y0 +
                        kpoly::eval(K, C.A1, K.from_mpq(x0))[0] * y0 + kpoly::eval(K, C.A0, K.from_mpq(x0))[0];
        C.A0 = kpoly::sub(K, C.A0, kpoly::constant(K, K.from_mpq(val)));
        KPoly d;
        try {
            d = discriminant_y(C);
        } catch (const NotGenericallyEtale&) {
            continue;
        }
        SElem fy = sring::Fy(C);
        if (eval_at(C, SFrac{fy, 0}, x0, y0) == 0) continue;
        TailTransform tt = transform_tail(C);
        CHECK(eval_at(C, tt.c[0], x0, y0) == 0);
        CHECK(eval_at(C, tt.c[1], x0, y0) == 0);
        // b0 is F_y(x0, y0)
        CHECK(eval_at(C, tt.b[0], x0, y0) == eval_at(C, SFrac{fy, 0}, x0, y0));
        ++tested;
    }
    CHECK(tested >= 10);
}

TEST_CASE("interior transform on y^3 + y + x at 0") {
    QuarticCurve C = qcurve({}, {1}, {0, 1});
    InteriorOptions opt;
    InteriorTransform it = transform_interior(C, TElem(Tower::base()), opt);
    REQUIRE(it.A.size() == 3);
    REQUIRE(it.B.size() == 4);
    REQUIRE(it.C.size() == 5);
    for (const auto& a : it.A) CHECK(a.lb() > ValRational(40));
    CHECK((it.B[0] - TElem::from_int(it.B[0].tower(), 1)).lb() > ValRational(40));
    for (int i = 1; i < 4; ++i) CHECK(it.B[i].lb() > ValRational(40));
    CHECK((it.C[1] - TElem::from_int(it.C[1].tower(), 1)).lb() > ValRational(40));
    for (int i : {0, 2, 3, 4}) CHECK(it.C[i].lb() > ValRational(40));
    CHECK(it.C[0].is_exact());
    CHECK(it.C[3].is_exact());
    CHECK(it.convention == "z=(y-y0)-v*t");
}

TEST_CASE("interior transform kills degrees 0 and 3 of C") {
    QuarticCurve C = qcurve({1, 0, 1}, {2, 1, 0, 1}, {1, 0, 1, 0, 2});
    for (long a : {1L, 2L, 4L}) {
        InteriorOptions opt;
        InteriorTransform it = transform_interior(C, TElem::from_int(Tower::base(), a), opt);
        CHECK(it.C[0].rep_is_zero());
        CHECK(it.C[3].rep_is_zero());
        // the fiber point lies on the curve
        TElem y = it.y0, x = it.x0;
        TElem f = y * y * y + tpoly::eval(kpoly::embed(*C.K, C.A2, x.tower(), 64), x) * y * y +
                  tpoly::eval(kpoly::embed(*C.K, C.A1, x.tower(), 64), x) * y +
                  tpoly::eval(kpoly::embed(*C.K, C.A0, x.tower(), 64), x);
        CHECK(f.lb() > ValRational(30));
    }
}

TEST_CASE("roots in K and reducibility check") {
    const InputField& K = *QQ();
    // (y - 2)(y^2 + 1)
    auto r = roots_in_field(K, {K.from_mpq(-2), K.from_mpq(1), K.from_mpq(-2), K.one()});
    REQUIRE(r.size() == 1);
    CHECK(r[0][0] == 2);
    auto r2 = roots_in_field(K, {K.from_mpq(mpq_class(-5, 7)), K.one()});
    REQUIRE(r2.size() == 1);
    CHECK(r2[0][0] == mpq_class(5, 7));
    // y = x^2 + 1 is a root of (y - x^2 - 1)(y^2 + x y + 1)
    // expanded: y^3 + (x - x^2 - 1) y^2 + (1 - x^3 - x) y - x^2 - 1
    QuarticCurve red = qcurve({-1, 1, -1}, {1, -1, 0, -1}, {-1, 0, -1});
    CHECK_THROWS_AS(check_curve(red), ReducibleCover);
    CHECK_NOTHROW(check_curve(qcurve({}, {0, 0, 3, 2}, {-1, 0, -2, 0, -3})));
}

TEST_CASE("input field over zeta_3") {
    FieldPtr K = InputField::from_minpoly({1, 1, 1});
    CHECK(K->degree() == 2);
    CHECK(K->val(K->sub(K->gamma(), K->one())) == ValRational(1, 2));
    CHECK(K->val(K->from_mpq(mpq_class(9, 2))) == ValRational(2));
    KElem z2 = K->mul(K->gamma(), K->gamma());
    CHECK(K->is_zero(K->add(K->add(z2, K->gamma()), K->one())));
    CHECK_THROWS_AS(InputField::from_minpoly({-1, 0, 1}), InvalidBase);
    // reconstruction of 3/7 + (2/5) g from its completion image
    KElem a{mpq_class(3, 7), mpq_class(2, 5)};
    auto back = K->reconstruct(K->embed(a, K->completion(), 60).with_guarantee(ValRational(60)), 1000000);
    REQUIRE(back);
    CHECK((*back)[0] == mpq_class(3, 7));
    CHECK((*back)[1] == mpq_class(2, 5));
}
