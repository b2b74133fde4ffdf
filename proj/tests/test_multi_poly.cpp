#include "superden/multi_poly.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace superden;

namespace {

MultiPoly random_poly(std::mt19937_64& rng, int m, int max_terms, int max_deg) {
    std::uniform_int_distribution<int> expo(0, max_deg), coeff(-4, 4);
    MultiPoly p(m);
    for (int t = 0; t < max_terms; ++t) {
        MultiPoly::ExponentVec e(2 * m);
        for (auto& x : e) x = expo(rng);
        p.add_term(std::move(e), coeff(rng));
    }
    return p;
}

std::vector<Rational> random_point(std::mt19937_64& rng, int m) {
    std::uniform_int_distribution<int> num(-6, 6), den(1, 4);
    std::vector<Rational> pt(2 * m);
    for (auto& c : pt) c = make_rational(num(rng), den(rng));
    return pt;
}

}  // namespace

TEST_CASE("vm_poly base cases and a known point value") {
    MultiPoly v1 = vm_poly(1);
    CHECK(v1 == MultiPoly::var_x(1, 0) * MultiPoly::var_y(1, 0));

    MultiPoly v2 = vm_poly(2);
    // V_2(1, 1/2, 2, 3/2) = (1/2^2)(1! 3!)^2 = 9
    std::vector<Rational> pt = {1, make_rational(1, 2), 2, make_rational(3, 2)};
    CHECK(v2.evaluate(pt) == 9);

    // vanishing when x_1 = x_2
    std::vector<Rational> degenerate = {2, make_rational(1, 2), 2, make_rational(3, 2)};
    CHECK(v2.evaluate(degenerate) == 0);
}

TEST_CASE("vm_poly is homogeneous of degree 2m^2") {
    std::mt19937_64 rng(7);
    for (int m = 1; m <= 3; ++m) {
        MultiPoly v = vm_poly(m);
        long deg = 0;
        REQUIRE(v.is_homogeneous(&deg));
        CHECK(deg == 2 * m * m);
        // V(t x) = t^{2m^2} V(x) at random rational points
        for (int round = 0; round < 5; ++round) {
            auto pt = random_point(rng, m);
            Rational t = make_rational(3, 2);
            auto scaled = pt;
            for (auto& c : scaled) c *= t;
            CHECK(v.evaluate(scaled) == rational_pow(t, deg) * v.evaluate(pt));
        }
    }
}

TEST_CASE("V_m vanishes on coinciding squares") {
    std::mt19937_64 rng(11);
    MultiPoly v3 = vm_poly(3);
    for (int round = 0; round < 10; ++round) {
        auto pt = random_point(rng, 3);
        pt[2 * 2] = -pt[0];  // x_3 = -x_1 so x_1^2 = x_3^2
        CHECK(v3.evaluate(pt) == 0);
        auto pt2 = random_point(rng, 3);
        pt2[2 * 1 + 1] = pt2[2 * 2 + 1];  // y_2 = y_3
        CHECK(v3.evaluate(pt2) == 0);
    }
}

TEST_CASE("laplacian_mm annihilates V_m and handles simple polynomials") {
    for (int m = 1; m <= 4; ++m) CHECK(laplacian_mm(vm_poly(m)).is_zero());

    MultiPoly x2 = MultiPoly::var_x(1, 0) * MultiPoly::var_x(1, 0);
    CHECK(laplacian_mm(x2) == MultiPoly::constant(1, 2));

    MultiPoly y2 = MultiPoly::var_y(1, 0) * MultiPoly::var_y(1, 0);
    CHECK(laplacian_mm(x2 + y2).is_zero());
}

TEST_CASE("euler_op scales monomials by their degree") {
    MultiPoly v2 = vm_poly(2);
    CHECK(euler_op(v2) == v2 * Rational(8));  // degree 2 m^2 = 8
    CHECK(euler_op(MultiPoly::constant(2, 5)).is_zero());

    // x_1 y_2^3 has degree 4
    MultiPoly m = MultiPoly::var_x(2, 0) * MultiPoly::var_y(2, 1) *
                  MultiPoly::var_y(2, 1) * MultiPoly::var_y(2, 1);
    CHECK(euler_op(m) == m * Rational(4));
}

TEST_CASE("is_spherical") {
    for (int m = 1; m <= 3; ++m) {
        auto sc = is_spherical(vm_poly(m));
        CHECK(sc.spherical);
        CHECK(sc.degree == 2 * m * m);
    }
    MultiPoly x2 = MultiPoly::var_x(1, 0) * MultiPoly::var_x(1, 0);
    CHECK_FALSE(is_spherical(x2).spherical);

    MultiPoly inhom = MultiPoly::var_x(1, 0) * MultiPoly::var_y(1, 0) + MultiPoly::var_x(1, 0);
    CHECK_FALSE(is_spherical(inhom).spherical);
}

TEST_CASE("commutator [laplacian, euler] p = 2 laplacian p") {
    std::mt19937_64 rng(23);
    for (int round = 0; round < 12; ++round) {
        int m = 1 + static_cast<int>(rng() % 2);
        MultiPoly p = random_poly(rng, m, 5, 3);
        MultiPoly lhs = laplacian_mm(euler_op(p)) - euler_op(laplacian_mm(p));
        MultiPoly rhs = laplacian_mm(p) * Rational(2);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("directional_derivative basics") {
    ConeVector c(0, 1);  // -Q1 = 1/2
    MultiPoly x1 = MultiPoly::var_x(1, 0);

    auto id = directional_derivative(x1, c, 0, 0);
    CHECK(id.poly == x1);
    CHECK(id.sqrt_power == 0);

    auto d = directional_derivative(x1, c, 0, 1);
    CHECK(d.poly.is_zero());  // c1 = 0 kills d/dx

    // order beyond the degree annihilates
    MultiPoly v1 = vm_poly(1);  // degree 2 in the single pair
    ConeVector cg(make_rational(1, 2), 1);
    CHECK(directional_derivative(v1, cg, 0, 3).poly.is_zero());
    CHECK_FALSE(directional_derivative(v1, cg, 0, 2).poly.is_zero());
}

TEST_CASE("directional derivatives on distinct pairs commute") {
    std::mt19937_64 rng(31);
    ConeVector ca(make_rational(1, 2), 2), cb(-1, make_rational(3, 2));
    for (int round = 0; round < 8; ++round) {
        MultiPoly p = random_poly(rng, 2, 6, 3);
        auto ab = directional_derivative(directional_derivative(p, ca, 0, 1).poly, cb, 1, 2);
        auto ba = directional_derivative(directional_derivative(p, cb, 1, 2).poly, ca, 0, 1);
        CHECK(ab.poly == ba.poly);
    }
}

TEST_CASE("cone vector invariants are enforced") {
    CHECK_THROWS_AS(ConeVector(1, 1), std::invalid_argument);       // Q1 = 0
    CHECK_THROWS_AS(ConeVector(2, 1), std::invalid_argument);       // Q1 > 0
    CHECK_THROWS_AS(ConeVector(0, -1), std::invalid_argument);      // c2 < 0
    CHECK_NOTHROW(ConeVector(1, 2));
}

TEST_CASE("PointR2m validates its input") {
    CHECK_THROWS_AS(PointR2m({1.0}), std::invalid_argument);
    CHECK_THROWS_AS(PointR2m({1.0, std::numeric_limits<double>::infinity()}),
                    std::invalid_argument);
    PointR2m p = PointR2m::repeated(2, 0.5, -1.5);
    CHECK(p.pairs() == 2);
    CHECK(p.x(1) == 0.5);
    CHECK(p.y(1) == -1.5);
}
