#pragma once

// Formal q-series on the exponent lattice (1/16)Z with exact rational
// coefficients.
//
// A FracSeries stores the nonzero coefficients of sum_n c_n q^{n/16} together
// with a truncation bound N: the series is known exactly for every exponent
// n/16 with n <= N. Arithmetic propagates the bound (minimum of the operands'
// bounds, shifted by valuations under multiplication), and coefficient queries
// beyond the bound throw instead of silently returning zero.

#include "superden/rational.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>

namespace superden {

inline constexpr int kSeriesScale = 16;

// Sentinel bound for exact (polynomial/constant) series. Kept far away from
// saturation so that bound arithmetic never overflows.
inline constexpr std::int64_t kTruncationUnbounded =
    std::numeric_limits<std::int64_t>::max() / 4;

namespace detail {
inline std::int64_t sat_add(std::int64_t a, std::int64_t b) {
    if (a >= kTruncationUnbounded || b >= kTruncationUnbounded) return kTruncationUnbounded;
    std::int64_t s = a + b;
    return s >= kTruncationUnbounded ? kTruncationUnbounded : s;
}
}  // namespace detail

class FracSeries {
public:
    using Exponent = std::int64_t;  // numerator of n/16
    using TermMap = std::map<Exponent, Rational>;

    // Zero series, exact at every order.
    FracSeries() : truncation_(kTruncationUnbounded) {}

    explicit FracSeries(Exponent truncation) : truncation_(truncation) {}

    static FracSeries constant(const Rational& c) {
        FracSeries s;
        if (c != 0) s.terms_[0] = c;
        return s;
    }

    static FracSeries monomial(const Rational& c, Exponent n,
                               Exponent truncation = kTruncationUnbounded) {
        FracSeries s(truncation);
        if (c != 0 && n <= truncation) s.terms_[n] = c;
        return s;
    }

    Exponent truncation() const { return truncation_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    // Smallest exponent carrying a nonzero coefficient. For a series with no
    // stored terms this is a lower bound (everything up to the truncation is
    // zero), used only for bound bookkeeping.
    Exponent valuation_lower_bound() const {
        if (!terms_.empty()) return terms_.begin()->first;
        return detail::sat_add(truncation_, 1);
    }

    Rational coefficient(Exponent n) const {
        if (n > truncation_)
            throw std::out_of_range("FracSeries::coefficient: exponent " + std::to_string(n) +
                                    "/16 beyond truncation " + std::to_string(truncation_) + "/16");
        auto it = terms_.find(n);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    void add_term(Exponent n, const Rational& c) {
        if (n > truncation_ || c == 0) return;
        Rational& slot = terms_[n];
        slot += c;
        if (slot == 0) terms_.erase(n);
    }

    // Restricts validity to n <= bound and drops any terms beyond it.
    FracSeries truncated(Exponent bound) const {
        FracSeries out(std::min(bound, truncation_));
        for (const auto& [n, c] : terms_) {
            if (n > out.truncation_) break;
            out.terms_[n] = c;
        }
        return out;
    }

    // Multiplication by the monomial q^{dn/16}.
    FracSeries shifted(Exponent dn) const {
        FracSeries out(detail::sat_add(truncation_, dn));
        for (const auto& [n, c] : terms_) out.terms_[n + dn] = c;
        return out;
    }

    friend FracSeries operator+(const FracSeries& a, const FracSeries& b) {
        FracSeries out(std::min(a.truncation_, b.truncation_));
        out.terms_ = a.terms_;
        for (const auto& [n, c] : b.terms_) {
            Rational& slot = out.terms_[n];
            slot += c;
            if (slot == 0) out.terms_.erase(n);
        }
        return out.truncated(out.truncation_);
    }

    friend FracSeries operator-(const FracSeries& a, const FracSeries& b) {
        return a + (-b);
    }

    FracSeries operator-() const {
        FracSeries out(truncation_);
        for (const auto& [n, c] : terms_) out.terms_[n] = -c;
        return out;
    }

    friend FracSeries operator*(const FracSeries& a, const FracSeries& b) {
        FracSeries out(std::min(detail::sat_add(a.truncation_, b.valuation_lower_bound()),
                                detail::sat_add(b.truncation_, a.valuation_lower_bound())));
        for (const auto& [na, ca] : a.terms_) {
            if (na > out.truncation_) break;
            for (const auto& [nb, cb] : b.terms_) {
                Exponent n = na + nb;
                if (n > out.truncation_) break;
                Rational& slot = out.terms_[n];
                slot += ca * cb;
                if (slot == 0) out.terms_.erase(n);
            }
        }
        return out;
    }

    FracSeries& operator*=(const FracSeries& b) { return *this = *this * b; }
    FracSeries& operator+=(const FracSeries& b) { return *this = *this + b; }
    FracSeries& operator-=(const FracSeries& b) { return *this = *this - b; }

    // Multiplicative inverse. The leading stored term is factored out as a
    // monomial; the remaining unit factor is inverted by the standard
    // recursion w_n = -sum_{k>=1} u_k w_{n-k}, which is exact over rationals.
    // Requires a finite truncation (an exact non-monomial series would have an
    // infinite inverse expansion); truncate first.
    FracSeries inverse() const {
        if (terms_.empty())
            throw std::domain_error("FracSeries::inverse: zero series");
        Exponent val = terms_.begin()->first;
        Rational lead = terms_.begin()->second;
        if (terms_.size() == 1) {
            FracSeries out(truncation_ >= kTruncationUnbounded
                               ? kTruncationUnbounded
                               : detail::sat_add(truncation_, -2 * val));
            out.terms_[-val] = 1 / lead;
            return out;
        }
        if (truncation_ >= kTruncationUnbounded)
            throw std::domain_error("FracSeries::inverse: untruncated non-monomial series");
        Exponent m = truncation_ - val;  // validity of the unit factor
        TermMap u;                       // unit factor, exponents relative to val
        for (const auto& [n, c] : terms_)
            if (n - val <= m) u[n - val] = c / lead;

        TermMap w = {{0, Rational(1)}};
        for (Exponent n = 1; n <= m; ++n) {
            Rational s = 0;
            for (auto it = u.upper_bound(0); it != u.end() && it->first <= n; ++it) {
                auto jt = w.find(n - it->first);
                if (jt != w.end()) s += it->second * jt->second;
            }
            if (s != 0) w[n] = -s;
        }
        FracSeries out(m - val);
        for (const auto& [n, c] : w) out.terms_[n - val] = c / lead;
        return out;
    }

    friend FracSeries operator/(const FracSeries& a, const FracSeries& b) {
        return a * b.inverse();
    }

    // First exponent (<= bound and within both validities) where the two
    // series differ; nullopt when equal.
    static std::optional<Exponent> first_mismatch(const FracSeries& a, const FracSeries& b,
                                                  Exponent bound) {
        if (bound > a.truncation_ || bound > b.truncation_)
            throw std::out_of_range("first_mismatch: bound exceeds a series truncation");
        auto ia = a.terms_.begin(), ib = b.terms_.begin();
        while (ia != a.terms_.end() || ib != b.terms_.end()) {
            Exponent na = ia != a.terms_.end() ? ia->first : bound + 1;
            Exponent nb = ib != b.terms_.end() ? ib->first : bound + 1;
            Exponent n = std::min(na, nb);
            if (n > bound) break;
            Rational ca = na == n ? ia->second : Rational(0);
            Rational cb = nb == n ? ib->second : Rational(0);
            if (ca != cb) return n;
            if (na == n) ++ia;
            if (nb == n) ++ib;
        }
        return std::nullopt;
    }

private:
    Exponent truncation_;
    TermMap terms_;
};

// s^e by binary exponentiation; truncation bookkeeping is inherited from
// multiplication, which accounts for the e-fold valuation shift.
inline FracSeries series_pow(const FracSeries& s, unsigned long e) {
    FracSeries acc = FracSeries::constant(1);
    FracSeries b = s;
    while (e) {
        if (e & 1) acc *= b;
        if (e >>= 1) b *= b;
    }
    return acc;
}

// Generating function of triangular numbers: coefficient of q^k is 1 iff
// k = n(n+1)/2.
inline FracSeries triangle_series(FracSeries::Exponent N) {
    if (N < 0) throw std::invalid_argument("triangle_series: negative truncation");
    FracSeries s(N);
    for (std::int64_t n = 0;; ++n) {
        std::int64_t tri16 = n * (n + 1) / 2 * kSeriesScale;
        if (tri16 > N) break;
        s.add_term(tri16, 1);
    }
    return s;
}

// q^{1/16} * triangle(q^{1/2}): exponents (2n+1)^2/16.
inline FracSeries theta_triangle(FracSeries::Exponent N) {
    if (N < 0) throw std::invalid_argument("theta_triangle: negative truncation");
    FracSeries s(N);
    for (std::int64_t n = 0;; ++n) {
        std::int64_t num = (2 * n + 1) * (2 * n + 1);
        if (num > N) break;
        s.add_term(num, 1);
    }
    return s;
}

namespace detail {
// prod_{n>=1, n*step16 <= N} (1 - q^{n*step16/16}), exact to q^{N/16}.
inline FracSeries euler_like_product(FracSeries::Exponent N, FracSeries::Exponent step16,
                                     int power) {
    FracSeries acc = FracSeries::constant(1).truncated(N);
    for (FracSeries::Exponent e = step16; e <= N; e += step16)
        for (int r = 0; r < power; ++r)
            acc = (acc - acc.shifted(e)).truncated(N);
    return acc;
}
}  // namespace detail

// eta(tau)^2 / eta(tau/2) expanded on the scale-16 lattice. The eta prefactors
// combine to q^{2/24 - 1/48} = q^{1/16}; the remaining unit factor is
// prod(1-q^n)^2 / prod(1-q^{n/2}).
inline FracSeries eta_quotient_theta(FracSeries::Exponent N) {
    if (N < 0) throw std::invalid_argument("eta_quotient_theta: negative truncation");
    FracSeries num = detail::euler_like_product(N, 16, 2);
    FracSeries den = detail::euler_like_product(N, 8, 1);
    FracSeries unit = (num * den.inverse()).truncated(N - 1);
    return unit.shifted(1);
}

// triangle(q) as the product prod (1-q^{2n})/(1-q^{2n-1}).
inline FracSeries triangle_product_form(FracSeries::Exponent N) {
    if (N < 0) throw std::invalid_argument("triangle_product_form: negative truncation");
    FracSeries num = detail::euler_like_product(N, 32, 1);
    FracSeries den = FracSeries::constant(1).truncated(N);
    for (FracSeries::Exponent e = 16; e <= N; e += 32)
        den = (den - den.shifted(e)).truncated(N);
    return (num * den.inverse()).truncated(N);
}

}  // namespace superden
