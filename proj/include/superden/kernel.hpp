#pragma once

// The error-function kernel p^{c0,c1}[f] for the signature-(m,m) quadratic
// form, built from a spherical polynomial f of degree d:
//
//   p(x) = sum_{sigma in {0,1}^m} (-1)^{|sigma|} sum_{|k| <= d}
//          (-1)^{|k|}/(4pi)^{|k|} F_{sigma,k}(x) G_{sigma,k}(x),
//
// with F a product of scaled error-function derivatives E^{(k_j)} and G the
// corresponding normalized directional derivatives of f. Since G and F only
// depend on sigma_j at coordinates with k_j > 0, the sigma-sum over the
// remaining coordinates collapses to differences E(z_j0) - E(z_j1); terms are
// cached in that collapsed form, with all directional-derivative polynomials
// computed symbolically once per spec.
//
// Evaluation comes in two flavors: the bare kernel p(x), and the Gaussian-
// weighted p(x) e^{-2pi Q_m(x)} needed by theta sums. The weighted form is
// where convergence lives: on the negative cone e^{-2pi Q_m} explodes while
// the E-differences vanish, so the two are combined analytically (via the
// scaled complement beta(z) e^{pi z} = erfcx) before any exponential is
// evaluated. The combined exponents are nonpositive for every x because
// Q_1 - B_1(c,.)^2 / 2 Q_1(c) is positive definite for c in the cone.

#include "superden/cone.hpp"
#include "superden/multi_poly.hpp"
#include "superden/special_functions.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace superden {

namespace detail {

// Flat compiled polynomial for fast repeated double evaluation.
struct CompiledPoly {
    struct Term {
        std::vector<int> exps;
        double coeff;
    };
    std::vector<Term> terms;

    static CompiledPoly compile(const MultiPoly& p) {
        CompiledPoly c;
        c.terms.reserve(p.terms().size());
        for (const auto& [e, r] : p.terms()) c.terms.push_back({e, to_double(r)});
        return c;
    }

    double eval(const std::vector<double>& coords) const {
        double acc = 0;
        for (const Term& t : terms) {
            double v = t.coeff;
            for (std::size_t i = 0; i < t.exps.size(); ++i)
                for (int k = 0; k < t.exps[i]; ++k) v *= coords[i];
            acc += v;
        }
        return acc;
    }
};

}  // namespace detail

class KernelSpec {
public:
    KernelSpec(int m, MultiPoly f, std::vector<ConeVector> c0, std::vector<ConeVector> c1)
        : m_(m), f_(std::move(f)), c0_(std::move(c0)), c1_(std::move(c1)), tower_(1) {
        if (m_ < 1) throw std::invalid_argument("KernelSpec: m must be positive");
        if (f_.pair_count() != m_)
            throw std::invalid_argument("KernelSpec: f has wrong variable count");
        if (static_cast<int>(c0_.size()) != m_ || static_cast<int>(c1_.size()) != m_)
            throw std::invalid_argument("KernelSpec: cone lists must have length m");
        SphericalCheck sc = is_spherical(f_);
        if (!sc.spherical)
            throw std::invalid_argument("KernelSpec: f must be a spherical polynomial");
        degree_ = sc.degree;
        tower_ = ErrorDerivTower(static_cast<int>(degree_) + 3);
        build_terms();
    }

    int m() const { return m_; }
    long degree() const { return degree_; }
    const MultiPoly& f() const { return f_; }
    const ConeVector& cone(int j, int sigma) const { return sigma == 0 ? c0_[j] : c1_[j]; }
    const ErrorDerivTower& tower() const { return tower_; }

    struct Term {
        std::vector<int> kvec;         // full multi-index, |kvec| <= d
        std::vector<int> support;      // coordinates j with k_j > 0
        std::vector<std::uint8_t> sigma;  // sigma_j for j in support, aligned with it
        MultiPoly g;                   // unnormalized directional derivative of f
        detail::CompiledPoly gc;
        double coeff;                  // signs, (4pi)^{-|k|}, 1/k_j!, (-Q1)^{-k_j/2}
    };

    const std::vector<Term>& cached_terms() const { return terms_; }

    double z_value(int j, int sigma, double x, double y) const {
        return cone(j, sigma).normalized_pairing(x, y);
    }

private:
    void build_terms() {
        std::vector<int> kvec(m_, 0);
        enumerate_k(kvec, 0, 0);
    }

    // Lexicographic walk over multi-indices with |k| <= d.
    void enumerate_k(std::vector<int>& kvec, int pos, int used) {
        if (pos == m_) {
            add_terms_for(kvec);
            return;
        }
        for (int k = 0; used + k <= degree_; ++k) {
            kvec[pos] = k;
            enumerate_k(kvec, pos + 1, used + k);
        }
        kvec[pos] = 0;
    }

    void add_terms_for(const std::vector<int>& kvec) {
        std::vector<int> support;
        int total = 0;
        for (int j = 0; j < m_; ++j) {
            if (kvec[j] > 0) support.push_back(j);
            total += kvec[j];
        }
        int nsup = static_cast<int>(support.size());
        for (int mask = 0; mask < (1 << nsup); ++mask) {
            MultiPoly g = f_;
            double scale = 1.0;
            int sign = (total % 2 == 0) ? 1 : -1;
            std::vector<std::uint8_t> sigma(nsup, 0);
            for (int s = 0; s < nsup; ++s) {
                int j = support[s];
                int sg = (mask >> s) & 1;
                sigma[s] = static_cast<std::uint8_t>(sg);
                if (sg) sign = -sign;
                const ConeVector& c = cone(j, sg);
                DirectionalDerivative dd = directional_derivative(g, c, j, kvec[j]);
                g = std::move(dd.poly);
                if (g.is_zero()) break;
                scale *= std::pow(to_double(c.minus_q1()), -0.5 * kvec[j]);
                scale /= to_double(Rational(factorial(kvec[j])));
            }
            if (g.is_zero()) continue;
            double coeff = sign * std::pow(4.0 * kPi, -total) * scale;
            terms_.push_back({kvec, support, std::move(sigma), g,
                              detail::CompiledPoly::compile(g), coeff});
        }
    }

    int m_;
    MultiPoly f_;
    long degree_ = 0;
    std::vector<ConeVector> c0_, c1_;
    ErrorDerivTower tower_;
    std::vector<Term> terms_;
};

namespace detail {

// Per-point factor tables shared by the evaluation entry points. Reused as a
// workspace across points to keep the lattice-sum hot path allocation-free.
struct FactorTable {
    // ediff[j]: the sigma-collapsed factor for coordinates with k_j = 0.
    // deriv[j][sigma][k]: E^{(k)} factor values, k = 1..max_order.
    std::vector<double> ediff;
    std::vector<std::array<std::vector<double>, 2>> deriv;

    void resize(int m, int max_order) {
        ediff.resize(m);
        deriv.resize(m);
        for (auto& d : deriv)
            for (auto& v : d) v.assign(max_order + 1, 0.0);
    }
};

inline void fill_bare_factors(const KernelSpec& spec, const std::vector<double>& coords,
                              int max_order, FactorTable& ft) {
    const int m = spec.m();
    ft.resize(m, max_order);
    for (int j = 0; j < m; ++j) {
        double z0 = spec.z_value(j, 0, coords[2 * j], coords[2 * j + 1]);
        double z1 = spec.z_value(j, 1, coords[2 * j], coords[2 * j + 1]);
        ft.ediff[j] = error_E(z0) - error_E(z1);
        for (int s = 0; s < 2; ++s) {
            double z = s == 0 ? z0 : z1;
            for (int k = 1; k <= max_order; ++k)
                ft.deriv[j][s][k] = spec.tower().derivative(k, z);
        }
    }
}

// Factors for p(x) e^{-2pi Q_m(x)}: each coordinate's Gaussian weight
// e^{-2pi Q_1(x_j)} is folded into its factor analytically.
inline void fill_weighted_factors(const KernelSpec& spec, const std::vector<double>& coords,
                                  int max_order, FactorTable& ft) {
    const int m = spec.m();
    ft.resize(m, max_order);
    for (int j = 0; j < m; ++j) {
        const double x = coords[2 * j], y = coords[2 * j + 1];
        const double gexp = -kPi * (x * x - y * y);  // -2 pi Q_1(x_j)
        double z0 = spec.z_value(j, 0, x, y);
        double z1 = spec.z_value(j, 1, x, y);
        if (gexp <= 0) {
            ft.ediff[j] = (error_E(z0) - error_E(z1)) * std::exp(gexp);
        } else {
            // Q_1(x_j) < 0 forces |y| > |x|, so both pairings share the sign
            // -sgn(y); use E(z) = sgn(z)(1 - beta(z^2)) and scale each beta
            // against the Gaussian. Combined exponents are nonpositive.
            double s = y > 0 ? -1.0 : 1.0;
            double t1 = beta_scaled(z1 * z1) * std::exp(-kPi * z1 * z1 + gexp);
            double t0 = beta_scaled(z0 * z0) * std::exp(-kPi * z0 * z0 + gexp);
            ft.ediff[j] = s * (t1 - t0);
        }
        for (int sg = 0; sg < 2; ++sg) {
            double z = sg == 0 ? z0 : z1;
            for (int k = 1; k <= max_order; ++k)
                ft.deriv[j][sg][k] = spec.tower().derivative_weighted(k, z, gexp);
        }
    }
}

inline double accumulate_terms(const KernelSpec& spec, const FactorTable& ft,
                               const std::vector<double>& coords) {
    double acc = 0;
    for (const KernelSpec::Term& t : spec.cached_terms()) {
        double prod = t.coeff;
        std::size_t s = 0;
        for (int j = 0; j < spec.m(); ++j) {
            if (t.kvec[j] == 0) {
                prod *= ft.ediff[j];
            } else {
                prod *= ft.deriv[j][t.sigma[s]][t.kvec[j]];
                ++s;
            }
        }
        if (prod != 0) acc += prod * t.gc.eval(coords);
    }
    return acc;
}

inline double weighted_kernel_coords(const KernelSpec& spec, const std::vector<double>& coords,
                                     FactorTable& ws) {
    fill_weighted_factors(spec, coords, static_cast<int>(spec.degree()), ws);
    return accumulate_terms(spec, ws, coords);
}

}  // namespace detail

// The kernel p(x) itself.
inline double kernel_eval(const KernelSpec& spec, const PointR2m& pt) {
    if (pt.pairs() != spec.m()) throw std::invalid_argument("kernel_eval: point size");
    detail::FactorTable ft;
    detail::fill_bare_factors(spec, pt.coords(), static_cast<int>(spec.degree()), ft);
    return detail::accumulate_terms(spec, ft, pt.coords());
}

// p(x) e^{-2pi Q_m(x)}, safe on the whole space.
inline double weighted_kernel_eval(const KernelSpec& spec, const PointR2m& pt) {
    if (pt.pairs() != spec.m()) throw std::invalid_argument("weighted_kernel_eval: point size");
    detail::FactorTable ft;
    return detail::weighted_kernel_coords(spec, pt.coords(), ft);
}

struct KernelPartials {
    double value = 0;
    std::vector<double> gradient;     // d/dx_1, d/dy_1, ...
    std::vector<double> second_diag;  // d^2/dx_1^2, d^2/dy_1^2, ...
};

// Analytic first and diagonal second partials, assembled term by term with
// the product/chain rule; E^{(k)}' = E^{(k+1)} and the G-polynomials are
// differentiated exactly.
inline KernelPartials kernel_partials(const KernelSpec& spec, const PointR2m& pt) {
    if (pt.pairs() != spec.m()) throw std::invalid_argument("kernel_partials: point size");
    const int m = spec.m();
    const int d = static_cast<int>(spec.degree());
    detail::FactorTable ft;
    detail::fill_bare_factors(spec, pt.coords(), d + 2, ft);

    // dz/dx = c1 / sqrt(-Q1(c)), dz/dy = -c2 / sqrt(-Q1(c)).
    std::vector<std::array<std::array<double, 2>, 2>> dz(m);  // [j][sigma][var in pair]
    for (int j = 0; j < m; ++j)
        for (int s = 0; s < 2; ++s) {
            const ConeVector& c = spec.cone(j, s);
            dz[j][s][0] = c.c1d() / c.norm();
            dz[j][s][1] = -c.c2d() / c.norm();
        }

    KernelPartials out;
    out.gradient.assign(2 * m, 0.0);
    out.second_diag.assign(2 * m, 0.0);

    std::vector<double> base(m), dbase(2 * m), d2base(2 * m);
    for (const KernelSpec::Term& t : spec.cached_terms()) {
        std::size_t s = 0;
        for (int j = 0; j < m; ++j) {
            if (t.kvec[j] == 0) {
                base[j] = ft.ediff[j];
                for (int c = 0; c < 2; ++c) {
                    dbase[2 * j + c] = ft.deriv[j][0][1] * dz[j][0][c] -
                                       ft.deriv[j][1][1] * dz[j][1][c];
                    d2base[2 * j + c] = ft.deriv[j][0][2] * dz[j][0][c] * dz[j][0][c] -
                                        ft.deriv[j][1][2] * dz[j][1][c] * dz[j][1][c];
                }
            } else {
                int sg = t.sigma[s];
                int k = t.kvec[j];
                base[j] = ft.deriv[j][sg][k];
                for (int c = 0; c < 2; ++c) {
                    dbase[2 * j + c] = ft.deriv[j][sg][k + 1] * dz[j][sg][c];
                    d2base[2 * j + c] = ft.deriv[j][sg][k + 2] * dz[j][sg][c] * dz[j][sg][c];
                }
                ++s;
            }
        }
        double prod_all = 1;
        for (int j = 0; j < m; ++j) prod_all *= base[j];

        double gval = t.gc.eval(pt.coords());
        out.value += t.coeff * prod_all * gval;

        for (int var = 0; var < 2 * m; ++var) {
            int j = var / 2;
            double prod_except = 1;
            for (int i = 0; i < m; ++i)
                if (i != j) prod_except *= base[i];
            MultiPoly gu = t.g.derivative(var);
            double guv = gu.evaluate(pt);
            double guuv = gu.derivative(var).evaluate(pt);
            out.gradient[var] +=
                t.coeff * (dbase[var] * prod_except * gval + prod_all * guv);
            out.second_diag[var] +=
                t.coeff * (d2base[var] * prod_except * gval +
                           2.0 * dbase[var] * prod_except * guv + prod_all * guuv);
        }
    }
    return out;
}

// |D_m p(x) - d p(x)| with D_m = E - Laplacian/4pi, the eigenvalue statement
// behind the modularity of the theta series.
inline double vigneras_residual(const KernelSpec& spec, const PointR2m& pt) {
    KernelPartials kp = kernel_partials(spec, pt);
    const int m = spec.m();
    double euler = 0, lap = 0;
    for (int var = 0; var < 2 * m; ++var) euler += pt.coords()[var] * kp.gradient[var];
    for (int j = 0; j < m; ++j) lap += kp.second_diag[2 * j] - kp.second_diag[2 * j + 1];
    double dp = euler - lap / (4.0 * kPi);
    return std::abs(dp - static_cast<double>(spec.degree()) * kp.value);
}

}  // namespace superden
