// Acceptance suite: runs every criterion at its pinned tolerance and prints
// one PASS/FAIL line each. Exit code is the number of failed criteria.

#include "superden/theta.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace superden;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void criterion(const std::string& id, const std::string& name,
               const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool ok = false;
    auto start = Clock::now();
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(Clock::now() - start).count();
    std::printf("%-4s %-34s %s (%.2fs)%s%s\n", id.c_str(), name.c_str(),
                ok ? "PASS" : "FAIL", secs, detail.empty() ? "" : "  -- ",
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

MultiPoly poly_xy() { return MultiPoly::var_x(1, 0) * MultiPoly::var_y(1, 0); }

}  // namespace

int main() {
    criterion("C1", "exact identity m=1, 100 terms", [](std::string& d) {
        auto start = Clock::now();
        auto rep = verify_identity(1, 6 + 16 * 50);  // up to q^{3/8 + 50}
        double secs = std::chrono::duration<double>(Clock::now() - start).count();
        d = "terms=" + std::to_string(rep.terms_checked);
        return rep.equal && rep.terms_checked >= 100 && secs <= 10.0;
    });

    criterion("C2", "exact identity m=2, 40 terms", [](std::string& d) {
        auto start = Clock::now();
        auto rep = verify_identity(2, 20 + 16 * 20);  // up to q^{10/8 + 20}
        double secs = std::chrono::duration<double>(Clock::now() - start).count();
        d = "terms=" + std::to_string(rep.terms_checked);
        return rep.equal && secs <= 120.0;
    });

    criterion("C3", "eta quotient equality, 50 orders", [](std::string&) {
        const std::int64_t N = 16 * 50;
        return !FracSeries::first_mismatch(theta_triangle(N), eta_quotient_theta(N), N)
                    .has_value();
    });

    criterion("C4", "triangle product form, 50 orders", [](std::string&) {
        const std::int64_t N = 16 * 50;
        return !FracSeries::first_mismatch(triangle_series(N), triangle_product_form(N), N)
                    .has_value();
    });

    criterion("C5", "sphericality of V_m, m=1..4", [](std::string&) {
        for (int m = 1; m <= 4; ++m)
            if (!laplacian_mm(vm_poly(m)).is_zero()) return false;
        return true;
    });

    criterion("C6", "Vigneras eigenvalue residuals", [](std::string& d) {
        std::mt19937_64 rng(20240817);
        KernelSpec s1(1, poly_xy(), {cone_plus(1)}, {cone_minus(1)});
        std::uniform_real_distribution<double> d3(-3.0, 3.0);
        double worst1 = 0;
        for (int i = 0; i < 20; ++i)
            worst1 = std::max(worst1, vigneras_residual(s1, PointR2m({d3(rng), d3(rng)})));

        std::vector<ConeVector> c0(2, cone_plus(1)), c1(2, cone_minus(1));
        KernelSpec s2(2, vm_poly(2), c0, c1);
        std::uniform_real_distribution<double> d2(-2.0, 2.0);
        double worst2 = 0;
        for (int i = 0; i < 20; ++i)
            worst2 = std::max(
                worst2, vigneras_residual(s2, PointR2m({d2(rng), d2(rng), d2(rng), d2(rng)})));
        char buf[96];
        std::snprintf(buf, sizeof buf, "m1=%.2e m2=%.2e", worst1, worst2);
        d = buf;
        return worst1 <= 1e-7 && worst2 <= 1e-6;
    });

    criterion("C7", "theta S-transform residuals", [](std::string& d) {
        PointR2m a({0.3, 0.7}), b({0.15, 0.4}), nb({-0.15, -0.4});
        const double pairing = 0.3 * 0.15 - 0.7 * 0.4;
        ThetaSpec fwd(KernelSpec(1, poly_xy(), {cone_plus(1)}, {cone_minus(1)}), a, b);
        ThetaSpec swp(KernelSpec(1, poly_xy(), {cone_plus(1)}, {cone_minus(1)}), nb, a);
        double worst = 0;
        for (std::complex<double> tau : {std::complex<double>(0, 1),
                                         std::complex<double>(1.0 / 3, 0.5)}) {
            auto lhs = theta_eval(fwd, to_tau(-1.0 / tau), 1e-10);
            auto rhs = theta_eval(swp, to_tau(tau), 1e-10);
            std::complex<double> pred =
                detail::ipow(-tau, 3) * detail::unit_phase(pairing) * rhs.value;
            worst = std::max(worst, std::abs(lhs.value - pred) / std::abs(pred));
        }
        char buf[48];
        std::snprintf(buf, sizeof buf, "max_rel=%.2e", worst);
        d = buf;
        return worst <= 1e-5;
    });

    criterion("C8", "holomorphic limit t-convergence", [](std::string& d) {
        LimitTable t = limit_t_check(1, TauPoint(0.0, 1.0),
                                     {make_rational(1, 2), make_rational(1, 5),
                                      make_rational(1, 10), make_rational(1, 20)},
                                     1e-6);
        bool decreasing = true;
        for (std::size_t i = 0; i + 1 < t.rows.size(); ++i)
            decreasing = decreasing && t.rows[i + 1].abs_error < t.rows[i].abs_error;
        char buf[96];
        std::snprintf(buf, sizeof buf, "err(0.5)=%.2e err(0.05)=%.2e",
                      t.rows.front().abs_error, t.rows.back().abs_error);
        d = buf;
        return decreasing && t.rows.back().abs_error <= 1e-1 * t.rows.front().abs_error;
    });

    criterion("C9", "Gamma(2) transforms of KW_m", [](std::string& d) {
        auto g1 = gamma2_transform_check(1, TauPoint(0.0, 1.0), 1e-5);
        auto g2 = gamma2_transform_check(2, TauPoint(0.0, 1.0), 1e-4);
        bool series_exact = true;
        for (int m : {1, 2}) {
            FracSeries s = kw_series(m, 120);
            const std::int64_t lead = 2 * m * (2 * m + 1);
            for (const auto& [n, c] : s.terms())
                series_exact = series_exact && (n - lead) % 8 == 0 && n >= lead;
        }
        char buf[128];
        std::snprintf(buf, sizeof buf, "m1=(%.1e,%.1e) m2=(%.1e,%.1e) support=%s",
                      g1.residual_shift, g1.residual_mobius, g2.residual_shift,
                      g2.residual_mobius, series_exact ? "exact" : "BROKEN");
        d = buf;
        return g1.residual_shift <= 1e-5 && g1.residual_mobius <= 1e-5 &&
               g2.residual_shift <= 1e-4 && g2.residual_mobius <= 1e-4 && series_exact;
    });

    criterion("C10", "cusp behavior of KW_m", [](std::string& d) {
        auto r1 = cusp_behavior_check(1, {1, 2, 4, 8});
        auto r2 = cusp_behavior_check(2, {1, 2, 4, 8});
        bool bounded0 = r1.alpha_zero >= -0.05 && r2.alpha_zero >= -0.05;
        for (const auto& row : r1.rows) bounded0 = bounded0 && std::isfinite(row.scaled_zero);
        for (const auto& row : r2.rows) bounded0 = bounded0 && std::isfinite(row.scaled_zero);
        bool cusp1 = std::abs(r1.alpha_one - 3.0 / 8.0) <= 0.05;
        char buf[128];
        std::snprintf(buf, sizeof buf, "lead=(%d,%d) a0=(%.3f,%.3f) a1(m=1)=%.3f",
                      r1.leading_exact ? 1 : 0, r2.leading_exact ? 1 : 0, r1.alpha_zero,
                      r2.alpha_zero, r1.alpha_one);
        d = buf;
        return r1.leading_exact && r2.leading_exact && bounded0 && cusp1;
    });

    criterion("C11", "cross-pillar consistency at tau=i", [](std::string& d) {
        TauPoint tau(0.0, 1.0);
        SeriesValue sv = series_eval_at(kw_series(1, 6 + 16 * 20), tau);
        HoloResult h =
            holomorphic_limit_eval(vm_poly(1), kw_shift_a(1), kw_shift_b(1), tau, 1e-12);
        std::complex<double> lhs = sv.value;
        std::complex<double> rhs = h.value / kw_limit_constant(1);  // 4i * 1! * (1!)^2
        double rel = std::abs(lhs - rhs) / std::abs(rhs);
        char buf[48];
        std::snprintf(buf, sizeof buf, "rel=%.2e", rel);
        d = buf;
        return rel <= 1e-8;
    });

    criterion("C12", "mutation sensitivity of the harness", [](std::string& d) {
        auto rep = verify_identity(1, 6 + 16 * 10, KwSign::y_parity);
        bool located = !rep.equal && rep.first_mismatch.has_value() &&
                       *rep.first_mismatch == 14;  // q^{7/8}
        Rational mutated = kw_series(1, 14, KwSign::y_parity).coefficient(14);
        Rational truth = series_pow(theta_triangle(14), 6).coefficient(14);
        char buf[96];
        std::snprintf(buf, sizeof buf, "first_mismatch=%s coeffs=%s vs %s",
                      rep.first_mismatch ? std::to_string(*rep.first_mismatch).c_str() : "none",
                      truth.get_str().c_str(), mutated.get_str().c_str());
        d = buf;
        return located && mutated == -6 && truth == 6;
    });

    if (failures) std::printf("%d criterion(s) FAILED\n", failures);
    else std::printf("all 12 criteria passed\n");
    return failures;
}
