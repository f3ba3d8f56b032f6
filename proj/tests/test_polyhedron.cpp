#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qscat/polyhedron.hpp"

using namespace qscat;

namespace {
VecQ pt(std::initializer_list<long> xs) {
    VecQ v;
    for (long x : xs) v.emplace_back(x);
    return v;
}
}  // namespace

TEST_CASE("containment and interior points") {
    // first quadrant in the plane
    HPoly p = HPoly::whole(2);
    p.add_ge(pt({1, 0}), QQ(0));
    p.add_ge(pt({0, 1}), QQ(0));
    CHECK(p.contains(pt({2, 3})));
    CHECK(p.contains(pt({0, 1})));
    CHECK_FALSE(p.contains(pt({-1, 1})));
    auto ip = relative_interior_point(p);
    REQUIRE(ip.has_value());
    CHECK(ip->at(0) > 0);
    CHECK(ip->at(1) > 0);
    CHECK(affine_dim(p) == 2);
}

TEST_CASE("lower dimensional and empty sets") {
    HPoly line = HPoly::whole(2);
    line.add_eq(pt({1, 1}), QQ(3));
    CHECK(affine_dim(line) == 1);

    HPoly seg = line;
    seg.add_ge(pt({1, 0}), QQ(0));
    seg.add_ge(pt({-1, 0}), QQ(-1));
    CHECK(affine_dim(seg) == 1);
    auto ip = relative_interior_point(seg);
    REQUIRE(ip.has_value());
    CHECK(seg.contains(*ip));

    HPoly point = HPoly::whole(2);
    point.add_ge(pt({1, 0}), QQ(2));
    point.add_ge(pt({-1, 0}), QQ(-2));
    point.add_eq(pt({0, 1}), QQ(5));
    CHECK(affine_dim(point) == 0);

    HPoly empty = HPoly::whole(2);
    empty.add_ge(pt({1, 0}), QQ(1));
    empty.add_ge(pt({-1, 0}), QQ(0));
    CHECK(affine_dim(empty) == -1);
    CHECK_FALSE(nonempty(empty));
    CHECK_FALSE(relative_interior_point(empty).has_value());
}

TEST_CASE("implicit equalities detected") {
    HPoly wedge = HPoly::whole(2);
    wedge.add_ge(pt({1, 1}), QQ(0));
    wedge.add_ge(pt({-1, -1}), QQ(0));  // forces x+y = 0
    CHECK(affine_dim(wedge) == 1);
    // the raw system has no point with all inequalities strict
    CHECK_FALSE(relative_interior_point(wedge).has_value());
}

TEST_CASE("extrusion by a ray") {
    // segment from (1,0) to (1,1) extruded along (-1,0): a half-strip
    HPoly seg = HPoly::whole(2);
    seg.add_eq(pt({1, 0}), QQ(1));
    seg.add_ge(pt({0, 1}), QQ(0));
    seg.add_ge(pt({0, -1}), QQ(-1));
    HPoly strip = extrude(seg, pt({-1, 0}));
    CHECK(strip.contains(pt({1, 0})));
    CHECK(strip.contains(pt({-5, 1})));
    CHECK_FALSE(strip.contains(pt({2, 0})));
    CHECK_FALSE(strip.contains(pt({0, 2})));
    CHECK(affine_dim(strip) == 2);

    // point extruded along a ray: a half-line
    HPoly point = HPoly::whole(2);
    point.add_eq(pt({1, 0}), QQ(2));
    point.add_eq(pt({0, 1}), QQ(3));
    HPoly ray = extrude(point, pt({1, -1}));
    CHECK(ray.contains(pt({2, 3})));
    CHECK(ray.contains(pt({4, 1})));
    CHECK_FALSE(ray.contains(pt({1, 4})));
    CHECK(affine_dim(ray) == 1);
}

TEST_CASE("canonical form groups equal cones") {
    // the ray {(t,-t): t >= 0} constructed two different ways
    HPoly a = HPoly::whole(2);
    a.add_eq(pt({1, 1}), QQ(0));
    a.add_ge(pt({1, 0}), QQ(0));
    HPoly b = HPoly::whole(2);
    b.add_eq(pt({2, 2}), QQ(0));
    b.add_ge(pt({3, -1}), QQ(0));
    b.add_ge(pt({1, -1}), QQ(-5));  // redundant
    CHECK(same_polyhedron(a, b));
    CHECK(poly_key(a) == poly_key(b));
    HPoly c = HPoly::whole(2);
    c.add_eq(pt({1, 1}), QQ(0));
    c.add_ge(pt({-1, 0}), QQ(0));  // opposite ray
    CHECK_FALSE(same_polyhedron(a, c));
    // recession of a translate recovers the cone
    CHECK(same_polyhedron(a.translated(pt({7, 11})).recession(), a));
}

TEST_CASE("feasibility corner cases") {
    // strict point in a single open half plane
    std::vector<LinCond> sys{{pt({1, 0}), QQ(3), false}};
    auto y = fm_strict_point(sys, 2);
    REQUIRE(y.has_value());
    CHECK((*y)[0] > 3);
    CHECK(fm_feasible(sys, 2));
    std::vector<LinCond> bad{{pt({0, 0}), QQ(1), false}};
    CHECK_FALSE(fm_feasible(bad, 2));
}
