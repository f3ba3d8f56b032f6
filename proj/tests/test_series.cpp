#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qscat/series.hpp"

using namespace qscat;

namespace {
GradedLattice pentagon() {
    return make_lattice(2, {{QQ(0), QQ(1)}, {QQ(-1), QQ(0)}}, {{0, QQ(1)}, {1, QQ(1)}});
}

QRational zhat_unit(const GradedLattice& lat) {  // 1/(q - q^-1)
    QLaurent d(QQ(1), lat.scale, lat.scale);
    d += QLaurent(QQ(-1), -lat.scale, lat.scale);
    return QRational(d).inverse();
}
}  // namespace

TEST_CASE("q-commutation in products") {
    GradedLattice lat = pentagon();
    Series a = series_monomial(lat, {1, 0}, QRational(QQ(1), lat.scale), 4);
    Series b = series_monomial(lat, {0, 1}, QRational(QQ(1), lat.scale), 4);
    Series ab = mul(lat, a, b);
    Series ba = mul(lat, b, a);
    CHECK(ab.coeff({1, 1}) == QRational::s_power(1, lat.scale));
    CHECK(ba.coeff({1, 1}) == QRational::s_power(-1, lat.scale));
}

TEST_CASE("series inverse, exp, log") {
    GradedLattice lat = pentagon();
    long order = 5;
    Series one = series_one(lat, order);
    Series g = one;
    g.add_term(lat, {1, 0}, 0, QRational(QQ(2), lat.scale));
    g.add_term(lat, {1, 1}, 0, QRational(QQ(1, 3), lat.scale));
    Series gi = inverse(lat, g);
    CHECK(series_equal(mul(lat, g, gi), one));
    CHECK(series_equal(mul(lat, gi, g), one));
    Series lg = log_series(lat, g);
    CHECK(series_equal(exp_series(lat, lg), g));
}

TEST_CASE("nilpotent commutator identity") {
    // (1 - t2 zh2)(1 + t1 zh1)(1 + t2 zh2)(1 - t1 zh1) = 1 + t1 t2 [W(n1,n2)]_q zh^{n1+n2}
    GradedLattice lat = pentagon();
    long order = 6;
    QRational zh = zhat_unit(lat);
    auto nil = [&](const VecZ& n, uint64_t u, const QQ& sign) {
        Series s = series_one(lat, order);
        s.add_term(lat, n, u, zh * QRational(sign, lat.scale));
        return s;
    };
    for (VecZ n1 : {VecZ{1, 0}, VecZ{2, 1}})
        for (VecZ n2 : {VecZ{0, 1}, VecZ{1, 2}}) {
            Series lhs = mul(lat, mul(lat, nil(n2, 2, QQ(-1)), nil(n1, 1, QQ(1))),
                             mul(lat, nil(n2, 2, QQ(1)), nil(n1, 1, QQ(-1))));
            Series rhs = series_one(lat, order);
            QRational bracket = qnum(lat.form(n1, n2), lat.scale);
            rhs.add_term(lat, add(n1, n2), 3, bracket * zh);
            CHECK(series_equal(lhs, rhs));
        }
}

TEST_CASE("u-variables square to zero") {
    GradedLattice lat = pentagon();
    Series a = series_one(lat, 4);
    a.add_term(lat, {1, 0}, 1, QRational(QQ(1), lat.scale));
    Series sq = mul(lat, a, a);
    // cross terms with u1*u1 vanish; only 1 + 2 u1 z^{f1} survives
    CHECK(sq.coeff({1, 0}, 1) == QRational(QQ(2), lat.scale));
    CHECK(sq.coeff({2, 0}, 1).is_zero());
}

TEST_CASE("truncation respects relative degree") {
    GradedLattice lat = pentagon();
    Series a = series_monomial(lat, {0, 0}, QRational(QQ(1), lat.scale), 2);
    a.add_term(lat, {1, 0}, 0, QRational(QQ(1), lat.scale));
    Series b = a;
    Series p = mul(lat, a, b);
    CHECK(p.coeff({2, 0}) == QRational(QQ(1), lat.scale));
    Series q = mul(lat, p, a);
    CHECK(q.coeff({3, 0}).is_zero());  // beyond order 2
    CHECK(q.max_rel_degree() <= 2);
}

TEST_CASE("classical terms") {
    GradedLattice lat = pentagon();
    Series a = series_one(lat, 3);
    a.add_term(lat, {1, 1}, 0, qnum(QQ(2), lat.scale));
    auto cl = classical_terms(a);
    CHECK(cl.at(SKey{{1, 1}, 0}) == 2);
}
