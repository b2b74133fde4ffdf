#include "superden/kernel.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace superden;

namespace {

MultiPoly poly_xy(int m, int j) { return MultiPoly::var_x(m, j) * MultiPoly::var_y(m, j); }

// Independent hand expansion of the kernel for m = 1, f = xy (degree 2):
// three k-levels written out from the definition.
double kernel_m1_xy_oracle(double x, double y, const ConeVector& c0, const ConeVector& c1) {
    double acc = 0;
    for (int s = 0; s < 2; ++s) {
        const ConeVector& c = s == 0 ? c0 : c1;
        double sn = c.norm();
        double z = (c.c1d() * x - c.c2d() * y) / sn;
        double g0 = x * y;
        double g1 = (c.c1d() * y + c.c2d() * x) / sn;
        double g2 = 2.0 * c.c1d() * c.c2d() / (sn * sn);
        double term = error_E(z) * g0 - error_E_deriv(1, z) * g1 / (4.0 * kPi) +
                      0.5 * error_E_deriv(2, z) * g2 / std::pow(4.0 * kPi, 2);
        acc += (s == 0 ? 1.0 : -1.0) * term;
    }
    return acc;
}

double sign_kernel(const MultiPoly& f, const PointR2m& pt) {
    double prod = 1;
    for (int j = 0; j < pt.pairs(); ++j) {
        auto sgn = [](double t) { return t > 0 ? 1.0 : (t < 0 ? -1.0 : 0.0); };
        prod *= sgn(pt.x(j) - pt.y(j)) - sgn(-pt.x(j) - pt.y(j));
    }
    return prod * f.evaluate(pt);
}

}  // namespace

TEST_CASE("constant f collapses to a product of E-differences") {
    std::mt19937_64 rng(301);
    std::uniform_real_distribution<double> dist(-2.5, 2.5);
    for (int m : {1, 2}) {
        std::vector<ConeVector> c0(m, ConeVector(1, 2)), c1(m, ConeVector(-1, make_rational(3, 2)));
        KernelSpec spec(m, MultiPoly::constant(m, 1), c0, c1);
        for (int round = 0; round < 10; ++round) {
            std::vector<double> coords(2 * m);
            for (auto& c : coords) c = dist(rng);
            PointR2m pt(coords);
            double expect = 1;
            for (int j = 0; j < m; ++j) {
                double e0 = error_E(spec.z_value(j, 0, pt.x(j), pt.y(j)));
                double e1 = error_E(spec.z_value(j, 1, pt.x(j), pt.y(j)));
                expect *= e0 - e1;
            }
            CHECK(std::abs(kernel_eval(spec, pt) - expect) < 1e-14);
        }
    }
}

TEST_CASE("kernel matches the hand-expanded oracle for m=1, f=xy") {
    MultiPoly f = poly_xy(1, 0);
    ConeVector c0 = cone_plus(1), c1 = cone_minus(1);
    KernelSpec spec(1, f, {c0}, {c1});
    std::mt19937_64 rng(302);
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    for (int i = 0; i < 40; ++i) {
        double x = dist(rng), y = dist(rng);
        double got = kernel_eval(spec, PointR2m({x, y}));
        double want = kernel_m1_xy_oracle(x, y, c0, c1);
        CHECK(std::abs(got - want) < 1e-13);
    }
    // and with asymmetric cones
    ConeVector d0(make_rational(1, 2), 2), d1(make_rational(-1, 4), 1);
    KernelSpec spec2(1, f, {d0}, {d1});
    for (int i = 0; i < 20; ++i) {
        double x = dist(rng), y = dist(rng);
        CHECK(std::abs(kernel_eval(spec2, PointR2m({x, y})) -
                       kernel_m1_xy_oracle(x, y, d0, d1)) < 1e-13);
    }
}

TEST_CASE("deep-cone asymptotics approach the sign kernel") {
    for (int m : {1, 2}) {
        MultiPoly f = vm_poly(m);
        std::vector<ConeVector> c0(m, cone_plus(1)), c1(m, cone_minus(1));
        KernelSpec spec(m, f, c0, c1);
        // x_j - y_j >> 0 and x_j + y_j >> 0 for all j
        std::vector<double> coords;
        for (int j = 0; j < m; ++j) {
            coords.push_back(8.0 + 2.0 * j);
            coords.push_back(1.0 + 0.5 * j);
        }
        PointR2m pt(coords);
        double got = kernel_eval(spec, pt);
        double want = sign_kernel(f, pt);  // = 2^m f here
        CHECK(want == std::pow(2.0, m) * f.evaluate(pt));
        CHECK(std::abs(got - want) <= 1e-10 * std::abs(want));
    }
}

TEST_CASE("pointwise sign-kernel limit as t -> 0 off the lines") {
    MultiPoly f = poly_xy(1, 0);
    PointR2m pt({2.0, 1.0});
    Rational t("1/1000");
    KernelSpec spec(1, f, {cone_plus(t)}, {cone_minus(t)});
    CHECK(std::abs(kernel_eval(spec, pt) - sign_kernel(f, pt)) < 1e-12);

    PointR2m inside({0.5, 1.5});  // |x| < |y|: sign kernel vanishes
    CHECK(std::abs(kernel_eval(spec, inside)) < 1e-12);

    // points on the lines are legal inputs
    CHECK_NOTHROW(kernel_eval(spec, PointR2m({1.0, 1.0})));
}

TEST_CASE("sigma-factorization for split f at m=2") {
    MultiPoly f = poly_xy(2, 0) * poly_xy(2, 1);
    ConeVector a0 = cone_plus(1), a1 = cone_minus(1);
    ConeVector b0(make_rational(1, 2), 2), b1(make_rational(-1, 2), make_rational(5, 4));
    KernelSpec spec2(2, f, {a0, b0}, {a1, b1});
    KernelSpec specA(1, poly_xy(1, 0), {a0}, {a1});
    KernelSpec specB(1, poly_xy(1, 0), {b0}, {b1});
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int i = 0; i < 20; ++i) {
        double x1 = dist(rng), y1 = dist(rng), x2 = dist(rng), y2 = dist(rng);
        double joint = kernel_eval(spec2, PointR2m({x1, y1, x2, y2}));
        double split = kernel_eval(specA, PointR2m({x1, y1})) *
                       kernel_eval(specB, PointR2m({x2, y2}));
        CHECK(std::abs(joint - split) < 1e-10);
    }
}

TEST_CASE("weighted kernel equals kernel times Gaussian where both are safe") {
    MultiPoly f = vm_poly(2);
    std::vector<ConeVector> c0(2, cone_plus(1)), c1(2, cone_minus(1));
    KernelSpec spec(2, f, c0, c1);
    std::mt19937_64 rng(304);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int i = 0; i < 20; ++i) {
        std::vector<double> c = {dist(rng), dist(rng), dist(rng), dist(rng)};
        PointR2m pt(c);
        double q = 0.5 * (c[0] * c[0] - c[1] * c[1] + c[2] * c[2] - c[3] * c[3]);
        double direct = kernel_eval(spec, pt) * std::exp(-2.0 * kPi * q);
        CHECK(std::abs(weighted_kernel_eval(spec, pt) - direct) < 1e-10 * std::max(1.0, std::abs(direct)));
    }
}

TEST_CASE("weighted kernel stays finite far into the negative cone") {
    MultiPoly f = poly_xy(1, 0);
    KernelSpec spec(1, f, {cone_plus(1)}, {cone_minus(1)});
    for (double y : {5.0, 10.0, 20.0, 40.0}) {
        double w = weighted_kernel_eval(spec, PointR2m({0.3, y}));
        CHECK(std::isfinite(w));
        CHECK(std::abs(w) < 1.0);
    }
}

TEST_CASE("Schwartz decay along rays including the null directions") {
    // Rays avoid the coordinate axes, where the kernel vanishes identically
    // for f = xy with mirror-symmetric cones. (1,1) and (1,-1) are the null
    // directions of Q_1.
    MultiPoly f = poly_xy(1, 0);
    KernelSpec spec(1, f, {cone_plus(1)}, {cone_minus(1)});
    const double dirs[][2] = {{1, 1}, {1, -1}, {0.6, 0.8}, {-0.7, 0.72}, {0.28, 0.96}};
    for (auto& d : dirs) {
        double nrm = std::hypot(d[0], d[1]);
        std::vector<double> r2s, logs;
        for (int r = 1; r <= 10; ++r) {
            double x = r * d[0] / nrm, y = r * d[1] / nrm;
            double w = std::abs(weighted_kernel_eval(spec, PointR2m({x, y})));
            if (w < 1e-290) break;
            r2s.push_back(r * r);
            logs.push_back(std::log(w));
        }
        REQUIRE(r2s.size() >= 3);
        // least-squares slope of log|w| against r^2 must be negative
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < r2s.size(); ++i) { mx += r2s[i]; my += logs[i]; }
        mx /= r2s.size(); my /= r2s.size();
        double num = 0, den = 0;
        for (std::size_t i = 0; i < r2s.size(); ++i) {
            num += (r2s[i] - mx) * (logs[i] - my);
            den += (r2s[i] - mx) * (r2s[i] - mx);
        }
        CHECK(num / den < -0.1);
    }
}

TEST_CASE("kernel_partials against central finite differences") {
    MultiPoly f = poly_xy(1, 0);
    KernelSpec spec(1, f, {cone_plus(1)}, {cone_minus(1)});
    std::mt19937_64 rng(305);
    std::uniform_real_distribution<double> dist(-2.5, 2.5);
    const double h = 1e-5;
    for (int i = 0; i < 20; ++i) {
        std::vector<double> c = {dist(rng), dist(rng)};
        KernelPartials kp = kernel_partials(spec, PointR2m(c));
        CHECK(std::abs(kp.value - kernel_eval(spec, PointR2m(c))) < 1e-13);
        for (int var = 0; var < 2; ++var) {
            auto cp = c, cm = c;
            cp[var] += h;
            cm[var] -= h;
            double fd1 = (kernel_eval(spec, PointR2m(cp)) - kernel_eval(spec, PointR2m(cm))) / (2 * h);
            double fd2 = (kernel_eval(spec, PointR2m(cp)) - 2 * kp.value +
                          kernel_eval(spec, PointR2m(cm))) / (h * h);
            CHECK(std::abs(fd1 - kp.gradient[var]) < 1e-6);
            CHECK(std::abs(fd2 - kp.second_diag[var]) < 1e-4);
        }
    }
}

TEST_CASE("single-term chain rule for f == 1, m = 1") {
    KernelSpec spec(1, MultiPoly::constant(1, 1), {cone_plus(1)}, {cone_minus(1)});
    std::mt19937_64 rng(306);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int i = 0; i < 10; ++i) {
        double x = dist(rng), y = dist(rng);
        KernelPartials kp = kernel_partials(spec, PointR2m({x, y}));
        const ConeVector &c0 = spec.cone(0, 0), &c1 = spec.cone(0, 1);
        double z0 = spec.z_value(0, 0, x, y), z1 = spec.z_value(0, 1, x, y);
        double expect = error_E_deriv(1, z0) * c0.c1d() / c0.norm() -
                        error_E_deriv(1, z1) * c1.c1d() / c1.norm();
        CHECK(std::abs(kp.gradient[0] - expect) < 1e-13);
    }
}

TEST_CASE("kernel and gradient parity under negating all pairs") {
    // Direct evaluation at +-x shows p(-x) = (-1)^{m+d} p(x); gradients flip
    // the opposite way. m = 1 with f = V_1 (d = 2) is odd, m = 2 with f = V_2
    // (d = 8) is even.
    std::mt19937_64 rng(307);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);

    KernelSpec s1(1, vm_poly(1), {cone_plus(1)}, {cone_minus(1)});
    for (int i = 0; i < 10; ++i) {
        double x = dist(rng), y = dist(rng);
        KernelPartials kp = kernel_partials(s1, PointR2m({x, y}));
        KernelPartials kn = kernel_partials(s1, PointR2m({-x, -y}));
        CHECK(std::abs(kp.value + kn.value) < 1e-12);        // odd value
        CHECK(std::abs(kp.gradient[0] - kn.gradient[0]) < 1e-11);  // even gradient
        CHECK(std::abs(kp.gradient[1] - kn.gradient[1]) < 1e-11);
    }

    std::vector<ConeVector> c0(2, cone_plus(1)), c1(2, cone_minus(1));
    KernelSpec s2(2, vm_poly(2), c0, c1);
    for (int i = 0; i < 4; ++i) {
        std::vector<double> c = {dist(rng), dist(rng), dist(rng), dist(rng)};
        std::vector<double> n = {-c[0], -c[1], -c[2], -c[3]};
        KernelPartials kp = kernel_partials(s2, PointR2m(c));
        KernelPartials kn = kernel_partials(s2, PointR2m(n));
        CHECK(std::abs(kp.value - kn.value) < 1e-11);        // even value
        CHECK(std::abs(kp.gradient[0] + kn.gradient[0]) < 1e-10);  // odd gradient
    }
}

TEST_CASE("Vigneras eigenvalue residuals") {
    std::mt19937_64 rng(20240817);

    MultiPoly fxy = poly_xy(1, 0);
    KernelSpec s1(1, fxy, {cone_plus(1)}, {cone_minus(1)});
    std::uniform_real_distribution<double> d3(-3.0, 3.0);
    for (int i = 0; i < 20; ++i)
        CHECK(vigneras_residual(s1, PointR2m({d3(rng), d3(rng)})) <= 1e-7);

    std::vector<ConeVector> c0(2, cone_plus(1)), c1(2, cone_minus(1));
    KernelSpec s2(2, vm_poly(2), c0, c1);
    std::uniform_real_distribution<double> d2(-2.0, 2.0);
    for (int i = 0; i < 20; ++i)
        CHECK(vigneras_residual(s2, PointR2m({d2(rng), d2(rng), d2(rng), d2(rng)})) <= 1e-6);

    // f == 1: eigenvalue 0
    KernelSpec s0(1, MultiPoly::constant(1, 1), {cone_plus(1)}, {cone_minus(1)});
    for (int i = 0; i < 10; ++i)
        CHECK(vigneras_residual(s0, PointR2m({d3(rng), d3(rng)})) <= 1e-7);
}

TEST_CASE("KernelSpec rejects bad input") {
    MultiPoly x2 = MultiPoly::var_x(1, 0) * MultiPoly::var_x(1, 0);
    CHECK_THROWS_AS(KernelSpec(1, x2, {cone_plus(1)}, {cone_minus(1)}), std::invalid_argument);
    CHECK_THROWS_AS(KernelSpec(2, vm_poly(2), {cone_plus(1)}, {cone_minus(1), cone_minus(1)}),
                    std::invalid_argument);
    CHECK_THROWS_AS(KernelSpec(1, vm_poly(2), {cone_plus(1)}, {cone_minus(1)}),
                    std::invalid_argument);
}
