#pragma once

// Numerical evaluation of the indefinite theta function
//
//   theta_{a,b}^{c0,c1}[f](tau) = v^{-d/2} sum_{x in a + Z^{2m}}
//       p^{c0,c1}[f](x sqrt v) q^{Q_m(x)} e^{2 pi i B_m(x,b)},
//
// its t -> 0 holomorphic limit (the sign-kernel lattice sum), and the
// modular-transformation and cusp checks for the Kac-Wakimoto series KW_m.
//
// Summands are assembled as [p(y) e^{-2pi Q_m(y)}]_{y = x sqrt v} times a unit
// phase, so magnitudes follow the Schwartz decay of the weighted kernel and
// truncation by shells is sound. Shell enumeration is lexicographic and the
// parallel reduction runs in fixed slice order, so results are reproducible
// for any thread count.

#include "superden/kernel.hpp"
#include "superden/kw_series.hpp"
#include "superden/multi_poly.hpp"
#include "superden/tau.hpp"

#include <atomic>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <vector>

namespace superden {

namespace detail {

inline std::complex<double> ipow(std::complex<double> z, long e) {
    if (e < 0) return 1.0 / ipow(z, -e);
    std::complex<double> acc = 1, b = z;
    unsigned long k = static_cast<unsigned long>(e);
    while (k) {
        if (k & 1) acc *= b;
        b *= b;
        k >>= 1;
    }
    return acc;
}

inline std::complex<double> unit_phase(double turns) {
    double arg = 2.0 * kPi * turns;
    return {std::cos(arg), std::sin(arg)};
}

inline double dist_to_integer(double x) {
    double r = std::abs(x - std::round(x));
    return r;
}

// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double num = 0, den = 0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (x[i] - mx) * (y[i] - my);
        den += (x[i] - mx) * (x[i] - mx);
    }
    return num / den;
}

}  // namespace detail

struct ThetaSpec {
    KernelSpec kernel;
    PointR2m a;
    PointR2m b;
    // Whether a satisfies the non-integrality hypothesis of the holomorphic
    // limit (B_1((1,1),a_j), B_1((-1,1),a_j) not integers). Recorded, not
    // enforced: general evaluation permits any a.
    bool limit_admissible = false;

    ThetaSpec(KernelSpec k, PointR2m a_, PointR2m b_)
        : kernel(std::move(k)), a(std::move(a_)), b(std::move(b_)) {
        if (a.pairs() != kernel.m() || b.pairs() != kernel.m())
            throw std::invalid_argument("ThetaSpec: a, b must lie in R^{2m}");
        limit_admissible = true;
        for (int j = 0; j < kernel.m(); ++j) {
            if (detail::dist_to_integer(a.x(j) - a.y(j)) < 1e-9 ||
                detail::dist_to_integer(-a.x(j) - a.y(j)) < 1e-9)
                limit_admissible = false;
        }
    }
};

struct ThetaOptions {
    int initial_radius = 4;
    int radius_cap = 64;
    int threads = 0;  // 0: hardware count, clamped to 8
};

struct ThetaResult {
    std::complex<double> value;
    int radius = 0;
    double last_shell = 0;  // absolute contribution of the final shell
};

namespace detail {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hc = std::thread::hardware_concurrency();
    return static_cast<int>(std::min(hc == 0 ? 1u : hc, 8u));
}

// Walks a shell r_lo < ||n||_inf <= r_hi of the offset lattice Z^{2m},
// split into slices by the first coordinate. Each slice is accumulated
// serially in lexicographic order; slices are reduced in index order.
template <typename PointFn>
inline void shell_sum(int dims, int r_lo, int r_hi, int threads, PointFn&& fn,
                      std::complex<double>& sum_out, double& abs_out) {
    const int slice_count = 2 * r_hi + 1;
    std::vector<std::complex<double>> sums(slice_count, 0.0);
    std::vector<double> abss(slice_count, 0.0);

    auto run_slice = [&](int si) {
        const int n0 = si - r_hi;
        std::vector<int> n(dims, -r_hi);
        n[0] = n0;
        std::complex<double> local = 0;
        double local_abs = 0;
        // odometer over coordinates 1..dims-1
        for (;;) {
            int linf = std::abs(n0);
            for (int i = 1; i < dims; ++i) linf = std::max(linf, std::abs(n[i]));
            if (linf <= r_hi && linf > r_lo) fn(n, local, local_abs);
            int i = dims - 1;
            for (; i >= 1; --i) {
                if (n[i] < r_hi) {
                    ++n[i];
                    break;
                }
                n[i] = -r_hi;
            }
            if (i == 0) break;
        }
        sums[si] = local;
        abss[si] = local_abs;
    };

    int nthreads = std::min(resolve_threads(threads), slice_count);
    if (nthreads <= 1) {
        for (int si = 0; si < slice_count; ++si) run_slice(si);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back([&] {
                for (int si = next.fetch_add(1); si < slice_count; si = next.fetch_add(1))
                    run_slice(si);
            });
        for (auto& th : pool) th.join();
    }
    for (int si = 0; si < slice_count; ++si) {
        sum_out += sums[si];
        abs_out += abss[si];
    }
}

}  // namespace detail

// Adaptive lattice sum with radius doubling: stops once the newest shell
// contributes less than tol/10 in absolute value and moves the result by less
// than tol. Throws NonConvergence at the radius cap.
inline ThetaResult theta_eval(const ThetaSpec& spec, const TauPoint& tau, double tol,
                              const ThetaOptions& opts = {}) {
    if (!(tol > 0)) throw std::invalid_argument("theta_eval: tol must be positive");
    const int m = spec.kernel.m();
    const int dims = 2 * m;
    const double sqv = std::sqrt(tau.v);
    const double prefactor = std::pow(tau.v, -0.5 * static_cast<double>(spec.kernel.degree()));

    std::complex<double> total = 0;
    double shell_abs = 0;
    std::complex<double> shell_sum_val = 0;

    // Per-point scratch is thread_local: slices run serially within a thread.
    auto point_fn = [&](const std::vector<int>& n, std::complex<double>& local,
                        double& local_abs) {
        thread_local std::vector<double> coords, scaled;
        thread_local detail::FactorTable ws;
        coords.resize(dims);
        scaled.resize(dims);
        double q_form = 0, pairing = 0;
        for (int j = 0; j < m; ++j) {
            double xj = spec.a.x(j) + n[2 * j];
            double yj = spec.a.y(j) + n[2 * j + 1];
            coords[2 * j] = xj;
            coords[2 * j + 1] = yj;
            scaled[2 * j] = xj * sqv;
            scaled[2 * j + 1] = yj * sqv;
            q_form += 0.5 * (xj * xj - yj * yj);
            pairing += xj * spec.b.x(j) - yj * spec.b.y(j);
        }
        double w = detail::weighted_kernel_coords(spec.kernel, scaled, ws);
        if (w == 0) return;
        std::complex<double> term = w * detail::unit_phase(tau.u * q_form + pairing);
        local += term;
        local_abs += std::abs(w);
    };

    int r_prev = -1;  // first band includes the center point
    int radius = opts.initial_radius;
    int bands = 0;
    for (;;) {
        shell_abs = 0;
        shell_sum_val = 0;
        detail::shell_sum(dims, r_prev, radius, opts.threads, point_fn, shell_sum_val,
                          shell_abs);
        total += shell_sum_val;
        ++bands;
        const double shell_scaled = shell_abs * prefactor;
        const double delta_scaled = std::abs(shell_sum_val) * prefactor;
        if (bands >= 2 && shell_scaled < tol / 10.0 && delta_scaled < tol) break;
        if (radius >= opts.radius_cap) {
            if (shell_scaled < tol / 10.0 && delta_scaled < tol) break;
            throw NonConvergence("theta_eval: radius cap reached", radius, shell_scaled);
        }
        r_prev = radius;
        radius *= 2;
        if (radius > opts.radius_cap) radius = opts.radius_cap;
    }
    return {total * prefactor, radius, shell_abs * prefactor};
}

struct HoloOptions {
    double budget_cap = 4096.0;
};

struct HoloResult {
    std::complex<double> value;
    double budget = 0;
    double last_band = 0;
};

namespace detail {

struct HoloPair {
    double x, y, w;
    std::complex<double> factor;  // sign kernel * q^w * character, unit phase scaled
};

// All lattice points (x, y) in (ax, ay) + Z^2 with |x| > |y| and weight
// w = (x^2 - y^2)/2 <= budget, enumerated through s = x+y, d = x-y (same
// parity offsets), which the non-integrality of ax -+ ay keeps away from 0.
inline std::vector<HoloPair> holo_coordinate_pairs(double ax, double ay, double bx, double by,
                                                   const TauPoint& tau, double budget) {
    const double d_base = ax - ay;
    const double s_base = ax + ay;
    const double s_min = dist_to_integer(s_base);
    std::vector<HoloPair> out;
    const double d_cap = 2.0 * budget / s_min;
    // q runs over integers with d = d_base + q nonzero and |d| <= d_cap.
    const long q_lo = static_cast<long>(std::floor(-d_cap - d_base)) - 1;
    const long q_hi = static_cast<long>(std::ceil(d_cap - d_base)) + 1;
    for (long q = q_lo; q <= q_hi; ++q) {
        const double d = d_base + static_cast<double>(q);
        if (std::abs(d) < 1e-12 || std::abs(d) > d_cap) continue;
        const double s_cap = 2.0 * budget / std::abs(d);
        const long p_lo = static_cast<long>(std::floor(-s_cap - s_base)) - 2;
        const long p_hi = static_cast<long>(std::ceil(s_cap - s_base)) + 2;
        // p must share q's parity so that (p+q)/2, (p-q)/2 are integers.
        for (long p = p_lo + ((p_lo ^ q) & 1); p <= p_hi; p += 2) {
            const double s = s_base + static_cast<double>(p);
            if (s * d <= 0) continue;  // need w > 0 with matching signs
            const double w = 0.5 * s * d;
            if (w > budget) continue;
            HoloPair hp;
            hp.x = 0.5 * (s + d);
            hp.y = 0.5 * (s - d);
            hp.w = w;
            const double sgn = s > 0 ? 1.0 : -1.0;
            hp.factor = 2.0 * sgn * std::exp(-2.0 * kPi * tau.v * w) *
                        unit_phase(tau.u * w + hp.x * bx - hp.y * by);
            out.push_back(hp);
        }
    }
    std::sort(out.begin(), out.end(),
              [](const HoloPair& a, const HoloPair& b) { return a.w < b.w; });
    return out;
}

}  // namespace detail

// The sign-kernel lattice sum of the holomorphic limit:
//   sum_{x in a+Z^{2m}} prod_j (sgn(x_j-y_j) - sgn(-x_j-y_j)) f(x) q^{Q_m(x)}
//       e^{2 pi i B_m(x,b)}.
// Requires the non-integrality condition on a; truncates by total weight with
// band doubling.
inline HoloResult holomorphic_limit_eval(const MultiPoly& f, const PointR2m& a,
                                         const PointR2m& b, const TauPoint& tau, double tol,
                                         const HoloOptions& opts = {}) {
    if (!(tol > 0)) throw std::invalid_argument("holomorphic_limit_eval: tol must be positive");
    const int m = f.pair_count();
    if (a.pairs() != m || b.pairs() != m)
        throw std::invalid_argument("holomorphic_limit_eval: a, b must lie in R^{2m}");
    double w_floor = 0;  // least possible total weight
    for (int j = 0; j < m; ++j) {
        double dd = detail::dist_to_integer(a.x(j) - a.y(j));
        double ds = detail::dist_to_integer(-a.x(j) - a.y(j));
        if (dd < 1e-9 || ds < 1e-9)
            throw std::invalid_argument(
                "holomorphic_limit_eval: a violates the non-integrality condition");
        w_floor += 0.5 * dd * ds;
    }

    const auto fc = detail::CompiledPoly::compile(f);
    std::complex<double> total = 0;
    double band_abs = 0;
    std::complex<double> band_sum = 0;

    double budget = w_floor + std::max(4.0, 6.0 / tau.v);
    double prev_budget = 0;
    int bands = 0;
    for (;;) {
        std::vector<std::vector<detail::HoloPair>> lists(m);
        for (int j = 0; j < m; ++j)
            lists[j] = detail::holo_coordinate_pairs(a.x(j), a.y(j), b.x(j), b.y(j), tau, budget);
        std::vector<double> rem_min(m + 1, 0.0);
        for (int j = m - 1; j >= 0; --j) {
            if (lists[j].empty()) { rem_min[j] = 1e300; continue; }
            rem_min[j] = rem_min[j + 1] + lists[j].front().w;
        }

        band_abs = 0;
        band_sum = 0;
        std::vector<double> coords(2 * m);
        auto dfs = [&](auto&& self, int depth, double used,
                       std::complex<double> factor) -> void {
            if (depth == m) {
                if (used <= prev_budget) return;  // belongs to an earlier band
                std::complex<double> term = factor * fc.eval(coords);
                band_sum += term;
                band_abs += std::abs(term);
                return;
            }
            for (const detail::HoloPair& hp : lists[depth]) {
                if (used + hp.w + rem_min[depth + 1] > budget) break;
                coords[2 * depth] = hp.x;
                coords[2 * depth + 1] = hp.y;
                self(self, depth + 1, used + hp.w, factor * hp.factor);
            }
        };
        dfs(dfs, 0, 0.0, std::complex<double>(1.0, 0.0));
        total += band_sum;
        ++bands;

        if (bands >= 2 && band_abs < tol / 10.0 && std::abs(band_sum) < tol) break;
        if (budget >= opts.budget_cap) {
            if (band_abs < tol / 10.0 && std::abs(band_sum) < tol) break;
            throw NonConvergence("holomorphic_limit_eval: budget cap reached", budget, band_abs);
        }
        prev_budget = budget;
        budget = std::min(budget * 2.0, opts.budget_cap);
    }
    return {total, budget, band_abs};
}

// The lattice shifts of the Kac-Wakimoto specialization: a_j = (0, 1/2),
// b_j = (1/2, 1/2).
inline PointR2m kw_shift_a(int m) { return PointR2m::repeated(m, 0.0, 0.5); }
inline PointR2m kw_shift_b(int m) { return PointR2m::repeated(m, 0.5, 0.5); }

// (4i)^m m! (prod (2j-1)!)^2, the constant of the holomorphic limit.
inline std::complex<double> kw_limit_constant(int m) {
    double mag = std::pow(4.0, m) * to_double(Rational(detail::kw_denominator(m)));
    return mag * detail::ipow(std::complex<double>(0, 1), m);
}

// KW_m(tau) evaluated through the holomorphic limit, to absolute accuracy
// about tol (at KW normalization).
inline std::complex<double> kw_value(int m, const TauPoint& tau, double tol,
                                     const HoloOptions& opts = {}) {
    std::complex<double> c = kw_limit_constant(m);
    HoloResult r = holomorphic_limit_eval(vm_poly(m), kw_shift_a(m), kw_shift_b(m), tau,
                                          std::max(tol, 1e-13) * std::abs(c), opts);
    return r.value / c;
}

struct LimitRow {
    Rational t;
    std::complex<double> theta_value;
    double abs_error;
};

struct LimitTable {
    std::complex<double> target;
    std::vector<LimitRow> rows;
};

// Convergence table of theta with cones (1,1+t), (-1,1+t) against the t = 0
// sign-kernel limit, for the KW shifts and f = V_m.
inline LimitTable limit_t_check(int m, const TauPoint& tau, const std::vector<Rational>& t_list,
                                double tol, const ThetaOptions& theta_opts = {}) {
    if (t_list.empty()) throw std::invalid_argument("limit_t_check: empty t list");
    for (std::size_t i = 0; i + 1 < t_list.size(); ++i)
        if (!(t_list[i] > t_list[i + 1]) || t_list[i + 1] <= 0)
            throw std::invalid_argument("limit_t_check: t list must be positive decreasing");

    const MultiPoly f = vm_poly(m);
    const PointR2m a = kw_shift_a(m), b = kw_shift_b(m);
    const double inner = std::max(tol * 1e-3, 1e-11);

    LimitTable table;
    table.target = holomorphic_limit_eval(f, a, b, tau, inner).value;
    for (const Rational& t : t_list) {
        std::vector<ConeVector> c0(m, cone_plus(t)), c1(m, cone_minus(t));
        ThetaSpec spec(KernelSpec(m, f, c0, c1), a, b);
        ThetaResult r = theta_eval(spec, tau, inner, theta_opts);
        table.rows.push_back({t, r.value, std::abs(r.value - table.target)});
    }
    return table;
}

struct Gamma2Residuals {
    std::complex<double> kw_tau;       // KW_m(tau)
    double residual_shift;             // |KW(tau+2) - (-i)^m KW(tau)| / |KW(tau)|
    double residual_mobius;            // |KW(tau/(2tau+1)) - (2tau+1)^{m(2m+1)} KW(tau)| / |KW(tau)|
};

// Checks the two Gamma(2) generator laws of KW_m numerically.
inline Gamma2Residuals gamma2_transform_check(int m, const TauPoint& tau, double tol,
                                              const HoloOptions& opts = {}) {
    const std::complex<double> tau_c = tau.value();
    const std::complex<double> mobius = tau_c / (2.0 * tau_c + 1.0);
    if (!(mobius.imag() > 1e-6))
        throw std::invalid_argument("gamma2_transform_check: Moebius image too close to the boundary");

    const long weight = static_cast<long>(m) * (2 * m + 1);
    const std::complex<double> autom = detail::ipow(2.0 * tau_c + 1.0, weight);

    std::complex<double> coarse = kw_value(m, tau, 1e-8, opts);
    const double mag = std::abs(coarse);
    if (!(mag > 0)) throw std::domain_error("gamma2_transform_check: KW(tau) vanished");

    const double share = 0.05 * tol * mag;
    std::complex<double> kw_tau = kw_value(m, tau, share / std::max(1.0, std::abs(autom)), opts);
    std::complex<double> kw_shift = kw_value(m, TauPoint(tau.u + 2.0, tau.v), share, opts);
    std::complex<double> kw_mob = kw_value(m, to_tau(mobius), share, opts);

    Gamma2Residuals r;
    r.kw_tau = kw_tau;
    std::complex<double> phase = detail::ipow(std::complex<double>(0, -1), m);
    r.residual_shift = std::abs(kw_shift - phase * kw_tau) / mag;
    r.residual_mobius = std::abs(kw_mob - autom * kw_tau) / mag;
    return r;
}

struct CuspReport {
    bool leading_exact = false;        // series leading term == 1 * q^{m(2m+1)/8}
    std::int64_t leading_exponent_num16 = 0;
    struct Row {
        double v;
        double scaled_inf;   // |KW(iv)| / |q|^{m(2m+1)/8}
        double scaled_zero;  // |(-i tau)^{-m(2m+1)} KW(-1/tau)|, tau = iv
        double scaled_one;   // |(-i tau)^{-m(2m+1)} KW((tau-1)/tau)|
    };
    std::vector<Row> rows;
    double alpha_inf = 0, alpha_zero = 0, alpha_one = 0;  // fitted q-exponents
};

// Cusp behavior along tau = iv: scaled magnitudes at i-infinity, 0, 1 and
// their fitted leading exponents (in powers of q), plus the exact leading
// term of the series at i-infinity.
inline CuspReport cusp_behavior_check(int m, const std::vector<double>& v_list,
                                      double inner_tol = 1e-10,
                                      const HoloOptions& opts = {}) {
    if (v_list.size() < 2) throw std::invalid_argument("cusp_behavior_check: need >= 2 points");
    CuspReport rep;
    const std::int64_t lead = 2 * static_cast<std::int64_t>(m) * (2 * m + 1);
    rep.leading_exponent_num16 = lead;
    FracSeries s = kw_series(m, lead);
    rep.leading_exact = !s.terms().empty() && s.terms().begin()->first == lead &&
                        s.terms().begin()->second == 1 && s.terms().size() == 1;

    const double ell = static_cast<double>(m) * (2 * m + 1) / 8.0;
    const long weight = static_cast<long>(m) * (2 * m + 1);
    std::vector<double> xs, yi, y0, y1;
    for (double v : v_list) {
        if (!(v > 0)) throw std::invalid_argument("cusp_behavior_check: v must be positive");
        const double log_q = -2.0 * kPi * v;
        std::complex<double> at_inf = kw_value(m, TauPoint(0.0, v), inner_tol, opts);
        std::complex<double> at_zero = kw_value(m, TauPoint(0.0, 1.0 / v), inner_tol, opts);
        std::complex<double> at_one = kw_value(m, TauPoint(1.0, 1.0 / v), inner_tol, opts);
        const double vpow = std::pow(v, static_cast<double>(weight));  // |(-i tau)^{weight}|
        CuspReport::Row row;
        row.v = v;
        row.scaled_inf = std::abs(at_inf) * std::exp(-log_q * ell);
        row.scaled_zero = std::abs(at_zero) / vpow;
        row.scaled_one = std::abs(at_one) / vpow;
        rep.rows.push_back(row);
        xs.push_back(log_q);
        yi.push_back(std::log(std::abs(at_inf)));
        y0.push_back(std::log(row.scaled_zero));
        y1.push_back(std::log(row.scaled_one));
    }
    rep.alpha_inf = detail::fit_slope(xs, yi);
    rep.alpha_zero = detail::fit_slope(xs, y0);
    rep.alpha_one = detail::fit_slope(xs, y1);
    return rep;
}

}  // namespace superden
