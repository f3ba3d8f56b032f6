#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qscat/cyclotomic.hpp"
#include "qscat/series.hpp"

using namespace qscat;

namespace {

QRational rand_qrational(std::mt19937_64& rng, long scale) {
    std::uniform_int_distribution<long> coeff(-4, 4), expo(-3, 3), len(1, 3);
    auto rand_poly = [&]() {
        QLaurent p(QQ(0), 0, scale);
        long n = len(rng);
        for (long i = 0; i < n; ++i) p += QLaurent(QQ(coeff(rng)), expo(rng), scale);
        return p;
    };
    QLaurent den = rand_poly();
    while (den.is_zero()) den = rand_poly();
    return QRational(rand_poly(), den);
}

}  // namespace

TEST_CASE("quantum integers: stated values") {
    CHECK(qnum(QQ(0), 1).is_zero());
    CHECK(qnum(QQ(1), 1).is_one());
    QLaurent expect(QQ(1), 1, 1);
    expect += QLaurent(QQ(1), -1, 1);
    CHECK(qnum(QQ(2), 1) == QRational(expect));
    CHECK(classical_limit(qnum(QQ(3), 1)) == 3);
    for (long w = 1; w <= 6; ++w) CHECK(classical_limit(qnum(QQ(w), 1)) == w);
    CHECK_THROWS_AS(qnum(QQ(1, 2), 1), scale_error);
    CHECK(classical_limit(qnum(QQ(1, 2), 2)) == QQ(1, 2));
}

TEST_CASE("level coefficients") {
    // R_{1,1;q} = 1, R_{2,1;q} = -1/(2 [2]_q), classical limit -1/4
    CHECK(level_coefficient(1, QQ(1), 1).is_one());
    CHECK(classical_limit(level_coefficient(2, QQ(1), 1)) == QQ(-1, 4));
    CHECK(classical_limit(level_coefficient(3, QQ(1), 1)) == QQ(1, 9));
    // general d: R_{w,d;1} = (-1)^(w-1) d / w^2
    CHECK(classical_limit(level_coefficient(3, QQ(2), 2)) == QQ(2, 9));
}

TEST_CASE("[w]_q is symmetric under q -> 1/q") {
    for (long w = 1; w <= 7; ++w) {
        QRational x = qnum(QQ(w), 1);
        CHECK(x.bar() == x);
    }
}

TEST_CASE("canonical form and ring axioms on random triples") {
    std::mt19937_64 rng(20240811);
    long scale = 2;
    for (int trial = 0; trial < 60; ++trial) {
        QRational a = rand_qrational(rng, scale);
        QRational b = rand_qrational(rng, scale);
        QRational c = rand_qrational(rng, scale);
        CHECK((a * b) * c == a * (b * c));
        CHECK((a + b) + c == a + (b + c));
        CHECK(a * (b + c) == a * b + a * c);
        CHECK(a - a == QRational(QQ(0), scale));
        if (!b.is_zero()) CHECK(a / b * b == a);
        // canonical form is idempotent: rebuilding from num/den is a no-op
        QRational renorm(a.num(), a.den());
        CHECK(renorm == a);
        CHECK(renorm.num() == a.num());
        CHECK(renorm.den() == a.den());
    }
}

TEST_CASE("denominator normalization is canonical") {
    // (q - q^-1) / (q^2 - q^-2) == 1/[2]_q with den = 1 + q^2-free normal form
    QLaurent n(QQ(1), 1, 1);
    n += QLaurent(QQ(-1), -1, 1);
    QLaurent d(QQ(1), 2, 1);
    d += QLaurent(QQ(-1), -2, 1);
    QRational x(n, d);
    CHECK(x == qnum(QQ(2), 1).inverse());
    CHECK(x.den().lo_exp() == 0);
    CHECK(x.den().coeff(0) == 1);
    CHECK(x.den().leading() > 0);
}

TEST_CASE("monomial multiplication over the quantum torus") {
    GradedLattice lat = make_lattice(2, {{QQ(0), QQ(1)}, {QQ(-1), QQ(0)}}, {{0, QQ(1)}, {1, QQ(1)}});
    TorusMonomial a{QRational(QQ(1), lat.scale), {1, 0}};
    TorusMonomial b{QRational(QQ(1), lat.scale), {0, 1}};
    TorusMonomial ab = monomial_mul(lat, a, b);
    CHECK(ab.exp == VecZ{1, 1});
    CHECK(ab.coeff == QRational::s_power(1, 1));
    TorusMonomial ba = monomial_mul(lat, b, a);
    CHECK(ba.coeff == QRational::s_power(-1, 1));
    // W = 0 block: plain product
    GradedLattice flat = make_lattice(2, {{QQ(0), QQ(0)}, {QQ(0), QQ(0)}}, {{0, QQ(1)}, {1, QQ(1)}});
    TorusMonomial cd = monomial_mul(flat, a, b);
    CHECK(cd.coeff.is_one());
}

TEST_CASE("eval at roots of unity") {
    QRational one = qnum(QQ(3), 1) / qnum(QQ(3), 1);
    for (long m : {2L, 3L, 5L, 7L}) CHECK(eval_at_root(one, m) == CyclotomicElement::one(m));
    // [3]_q at a primitive cube root: zeta^3 - zeta^-3 = 0
    CHECK(eval_at_root(qnum(QQ(3), 1), 3).is_zero());
    CHECK_FALSE(eval_at_root(qnum(QQ(2), 1), 3).is_zero());
    // pole detection: 1/[3]_q at zeta_3
    CHECK(has_pole_at_root(qnum(QQ(3), 1).inverse(), 3));
    CHECK_THROWS_AS(eval_at_root(qnum(QQ(3), 1).inverse(), 3), pole_error);
}

TEST_CASE("eval_at_root commutes with ring operations") {
    std::mt19937_64 rng(7);
    long m = 5;
    for (int trial = 0; trial < 40; ++trial) {
        QRational a = rand_qrational(rng, 1);
        QRational b = rand_qrational(rng, 1);
        if (has_pole_at_root(a, m) || has_pole_at_root(b, m)) continue;
        CHECK(eval_at_root(a + b, m) == eval_at_root(a, m) + eval_at_root(b, m));
        CHECK(eval_at_root(a * b, m) == eval_at_root(a, m) * eval_at_root(b, m));
    }
}

TEST_CASE("paired-bracket root-of-unity limit") {
    // lim_{q->zeta_k} [k^2 a]_q R_{kw,d;q} = a d (-1)^(w-1) / w^2 for odd k,
    // gcd(d,k)=1, evaluated exactly in the cyclotomic field at s = q^(1/d).
    struct Case {
        long a, w, d, k;
    };
    for (Case cs : {Case{1, 1, 1, 3}, Case{2, 3, 1, 3}, Case{1, 2, 1, 5}, Case{3, 1, 2, 3}}) {
        long scale = cs.d;
        QRational val = qnum(QQ(cs.k * cs.k * cs.a), scale) *
                        level_coefficient(cs.k * cs.w, QQ(cs.d), scale);
        CyclotomicElement got = eval_at_root(val, cs.k);
        QQ expect = QQ(cs.a * cs.d * ((cs.w % 2) ? 1 : -1)) / QQ(cs.w * cs.w);
        CHECK(got.is_rational());
        CHECK(got.rational_value() == expect);
    }
}

TEST_CASE("string round trip") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        QRational a = rand_qrational(rng, 2);
        QRational back = QRational::parse(a.to_string(), 2);
        CHECK(back == a);
    }
    QRational z(QQ(0), 3);
    CHECK(QRational::parse(z.to_string(), 3) == z);
}

TEST_CASE("cyclotomic polynomial table") {
    CHECK(cyclotomic_degree(1) == 1);
    CHECK(cyclotomic_degree(2) == 1);
    CHECK(cyclotomic_degree(3) == 2);
    CHECK(cyclotomic_degree(4) == 2);
    CHECK(cyclotomic_degree(6) == 2);
    CHECK(cyclotomic_degree(5) == 4);
    CHECK(cyclotomic_degree(9) == 6);
    CHECK(cyclotomic_degree(12) == 4);
}
