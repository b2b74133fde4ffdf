#pragma once

// Exact q-expansion of the Kac-Wakimoto series KW_m and the end-to-end
// identity check against theta_triangle^{2m(2m+1)}.
//
// The primary enumeration is the cone form: x_j in Z_{>0}, y_j in 1/2 + Z_{>=0}
// with x_j > y_j, per-pair weight q^{(x_j^2-y_j^2)/2} and sign
// (-1)^{x_j-y_j-1/2}, prefactor 2^m / (m! (prod (2j-1)!)^2). The full-lattice
// form (with the sgn-difference kernel) is kept as a cross-check of the
// folding symmetry. Tuples with a repeated x_j^2 or y_j^2 are skipped: V_m
// vanishes there.

#include "superden/frac_series.hpp"
#include "superden/multi_poly.hpp"
#include "superden/rational.hpp"
#include "superden/special_functions.hpp"
#include "superden/tau.hpp"

#include <algorithm>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace superden {

// One admissible pair of the cone sum. y is stored doubled (odd integer) so
// everything stays integral; the exponent numerator is on the scale-16
// lattice: 16 * (x^2 - y^2)/2 = 8 x^2 - 2 y2^2.
struct ConePair {
    std::int64_t x;   // x in Z_{>0}
    std::int64_t y2;  // 2y, odd, >= 1, with 2x > y2

    Rational y() const { return make_rational(y2, 2); }
    std::int64_t exponent_num16() const { return 8 * x * x - 2 * y2 * y2; }
    // parity of x - y - 1/2 = x - (y2+1)/2
    int sign() const { return (x - (y2 + 1) / 2) % 2 == 0 ? 1 : -1; }
};

struct ConePairEntry {
    ConePair pair;
    std::int64_t exponent_num16;
    int sign;
};

// All pairs with (x^2 - y^2)/2 <= max_exponent, ascending by exponent.
// For fixed x the smallest weight is (4x - 1)/8, which bounds the scan.
inline std::vector<ConePairEntry> enumerate_cone_pairs(const Rational& max_exponent) {
    if (max_exponent <= 0) throw std::invalid_argument("enumerate_cone_pairs: need positive bound");
    Rational bound16 = max_exponent * kSeriesScale;
    std::vector<ConePairEntry> out;
    for (std::int64_t x = 1; Rational(2 * (4 * x - 1)) <= bound16; ++x) {
        for (std::int64_t y2 = 2 * x - 1; y2 >= 1; y2 -= 2) {
            ConePair p{x, y2};
            if (Rational(p.exponent_num16()) > bound16) break;
            out.push_back({p, p.exponent_num16(), p.sign()});
        }
    }
    std::sort(out.begin(), out.end(),
              [](const ConePairEntry& a, const ConePairEntry& b) {
                  if (a.exponent_num16 != b.exponent_num16) return a.exponent_num16 < b.exponent_num16;
                  return a.pair.x < b.pair.x;
              });
    return out;
}

namespace detail {

inline BigInt kw_denominator(int m) {
    BigInt prod = 1;
    for (int j = 1; j <= m; ++j) prod *= factorial(2 * j - 1);
    return factorial(m) * prod * prod;
}

// 2^m / (m! (prod (2j-1)!)^2), the cone-form prefactor.
inline Rational kw_prefactor(int m) { return make_rational(BigInt(1) << m, kw_denominator(m)); }

// 1 / (4^m m! (prod (2j-1)!)^2), the full-lattice prefactor.
inline Rational kw_fulllattice_prefactor(int m) {
    return make_rational(BigInt(1), (BigInt(1) << (2 * m)) * kw_denominator(m));
}

// V_m at a tuple of cone pairs (x_j, y_j), exact.
inline Rational vm_at_pairs(const std::vector<ConePair>& tuple) {
    const int m = static_cast<int>(tuple.size());
    Rational v = 1;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            v *= Rational(tuple[i].x * tuple[i].x - tuple[j].x * tuple[j].x);
            v *= make_rational(tuple[i].y2 * tuple[i].y2 - tuple[j].y2 * tuple[j].y2, 4);
        }
    for (int j = 0; j < m; ++j) v *= make_rational(tuple[j].x * tuple[j].y2, 2);
    return v;
}

}  // namespace detail

// Sign conventions for the identity check. `standard` is the series itself;
// the other two are negative controls that corrupt the per-pair sign, and
// exist so the harness can demonstrate a detectable failure.
enum class KwSign {
    standard,       // (-1)^{x-y-1/2}
    shifted_half,   // (-1)^{x-y+1/2}: flips every pair
    y_parity,       // (-1)^{y-1/2}: flips exactly the pairs with even x
};

namespace detail {
inline int apply_sign(const ConePair& p, KwSign mode) {
    switch (mode) {
        case KwSign::standard: return p.sign();
        case KwSign::shifted_half: return -p.sign();
        case KwSign::y_parity: return ((p.y2 - 1) / 2) % 2 == 0 ? 1 : -1;
    }
    return 1;
}
}  // namespace detail

// Exact expansion of KW_m to q^{N/16} from the cone form.
inline FracSeries kw_series(int m, FracSeries::Exponent N, KwSign sign_mode = KwSign::standard) {
    if (m < 1) throw std::invalid_argument("kw_series: m must be positive");
    if (N < 0) throw std::invalid_argument("kw_series: negative truncation");
    FracSeries out(N);
    const std::int64_t min_pair = 6;  // smallest pair weight 3/8 on the scale-16 lattice
    if (N < min_pair * m) return out;

    auto pairs = enumerate_cone_pairs(make_rational(N, kSeriesScale));
    const Rational pref = detail::kw_prefactor(m);

    std::vector<ConePair> tuple(m);
    // DFS over ordered tuples of pairs with total weight <= N; distinct-value
    // pruning (repeated x or y2 kills V_m) happens before recursion.
    auto dfs = [&](auto&& self, int depth, std::int64_t used, int sign) -> void {
        if (depth == m) {
            Rational contrib = detail::vm_at_pairs(tuple) * pref * sign;
            out.add_term(used, contrib);
            return;
        }
        std::int64_t remaining_min = static_cast<std::int64_t>(m - depth - 1) * min_pair;
        for (const ConePairEntry& e : pairs) {
            if (used + e.exponent_num16 + remaining_min > N) break;
            bool repeated = false;
            for (int i = 0; i < depth; ++i)
                if (tuple[i].x == e.pair.x || tuple[i].y2 == e.pair.y2) { repeated = true; break; }
            if (repeated) continue;
            tuple[depth] = e.pair;
            self(self, depth + 1, used + e.exponent_num16,
                 sign * detail::apply_sign(e.pair, sign_mode));
        }
    };
    dfs(dfs, 0, 0, 1);
    return out;
}

// The same series from the unfolded full-lattice form of KW_m: x_j in Z,
// y_j in 1/2 + Z, kernel sgn(x_j-y_j) - sgn(-x_j-y_j), prefactor
// 1/(4^m m! (prod (2j-1)!)^2). Exercises the (x_j,y_j) -> (+-x_j,+-y_j)
// folding symmetry.
inline FracSeries kw_series_fulllattice(int m, FracSeries::Exponent N) {
    if (m < 1) throw std::invalid_argument("kw_series_fulllattice: m must be positive");
    if (N < 0) throw std::invalid_argument("kw_series_fulllattice: negative truncation");
    FracSeries out(N);
    const std::int64_t min_pair = 6;
    if (N < min_pair * m) return out;

    auto cone = enumerate_cone_pairs(make_rational(N, kSeriesScale));
    // Signed pair: x in Z nonzero, y2 odd in Z, |x| > |y|/1 (here |2x| > |y2|).
    struct SignedPair {
        std::int64_t x, y2, w16;
        Rational xv, yv;
        int kernel;   // sgn(x-y) - sgn(-x-y) = 2 sgn(x) on |x| > |y|
        int charsign; // (-1)^{x-y-1/2}
    };
    std::vector<SignedPair> pairs;
    pairs.reserve(cone.size() * 4);
    for (const ConePairEntry& e : cone)
        for (int sx = -1; sx <= 1; sx += 2)
            for (int sy = -1; sy <= 1; sy += 2) {
                SignedPair p;
                p.x = sx * e.pair.x;
                p.y2 = sy * e.pair.y2;
                p.w16 = e.exponent_num16;
                p.xv = Rational(p.x);
                p.yv = make_rational(p.y2, 2);
                p.kernel = 2 * sx;
                std::int64_t expo = p.x - (p.y2 + 1) / 2;  // x - y - 1/2, integral
                p.charsign = (expo % 2 == 0) ? 1 : -1;
                pairs.push_back(p);
            }
    std::sort(pairs.begin(), pairs.end(),
              [](const SignedPair& a, const SignedPair& b) { return a.w16 < b.w16; });

    Rational pref = detail::kw_fulllattice_prefactor(m);

    std::vector<const SignedPair*> tuple(m);
    std::vector<Rational> coords(2 * m);
    auto dfs = [&](auto&& self, int depth, std::int64_t used, Rational factor) -> void {
        if (depth == m) {
            // V_m at the signed tuple.
            Rational v = 1;
            for (int i = 0; i < m; ++i) {
                coords[2 * i] = tuple[i]->xv;
                coords[2 * i + 1] = tuple[i]->yv;
            }
            for (int i = 0; i < m; ++i)
                for (int j = i + 1; j < m; ++j) {
                    v *= coords[2 * i] * coords[2 * i] - coords[2 * j] * coords[2 * j];
                    v *= coords[2 * i + 1] * coords[2 * i + 1] - coords[2 * j + 1] * coords[2 * j + 1];
                }
            for (int i = 0; i < m; ++i) v *= coords[2 * i] * coords[2 * i + 1];
            out.add_term(used, v * factor);
            return;
        }
        std::int64_t remaining_min = static_cast<std::int64_t>(m - depth - 1) * min_pair;
        for (const SignedPair& p : pairs) {
            if (used + p.w16 + remaining_min > N) break;
            tuple[depth] = &p;
            self(self, depth + 1, used + p.w16, factor * (p.kernel * p.charsign));
        }
    };
    dfs(dfs, 0, 0, pref);
    return out;
}

struct IdentityReport {
    int m = 0;
    FracSeries::Exponent truncation = 0;
    bool equal = false;
    std::optional<FracSeries::Exponent> first_mismatch;
    std::size_t terms_checked = 0;
};

// theta_triangle^{2m(2m+1)} vs kw_series, coefficient by coefficient on the
// scale-16 lattice up to q^{N/16}.
inline IdentityReport verify_identity(int m, FracSeries::Exponent N,
                                      KwSign sign_mode = KwSign::standard) {
    if (m < 1) throw std::invalid_argument("verify_identity: m must be positive");
    unsigned long power = static_cast<unsigned long>(2 * m) * (2 * m + 1);
    FracSeries lhs = series_pow(theta_triangle(N), power).truncated(N);
    FracSeries rhs = kw_series(m, N, sign_mode);

    IdentityReport rep;
    rep.m = m;
    rep.truncation = N;
    rep.first_mismatch = FracSeries::first_mismatch(lhs, rhs, N);
    rep.equal = !rep.first_mismatch.has_value();
    std::size_t nonzero = 0;
    for (const auto& [n, c] : lhs.terms())
        if (n <= N) ++nonzero;
    rep.terms_checked = nonzero;
    return rep;
}

struct SeriesValue {
    std::complex<double> value;
    double tail_bound = 0;
};

// Numeric evaluation of a truncated series at tau: sum c_n e^{2 pi i tau n/16}.
// The reported tail bound is geometric in e^{-2 pi v/16} with the largest
// stored |coefficient| as the growth model; for the theta-type series handled
// here the admissible v keeps the geometric factor dozens of orders below the
// tolerance, so the model term is immaterial. Refuses tau whose imaginary
// part is too small for the available truncation.
inline SeriesValue series_eval_at(const FracSeries& s, const TauPoint& tau,
                                  double tail_tolerance = 1e-12) {
    std::complex<double> acc = 0;
    double max_abs = 0;
    const double step = 2.0 * kPi / kSeriesScale;
    for (const auto& [n, c] : s.terms()) {
        double cd = to_double(c);
        max_abs = std::max(max_abs, std::abs(cd));
        double mag = std::exp(-step * tau.v * static_cast<double>(n));
        double arg = step * tau.u * static_cast<double>(n);
        acc += cd * mag * std::complex<double>(std::cos(arg), std::sin(arg));
    }
    SeriesValue out;
    out.value = acc;
    if (s.truncation() < kTruncationUnbounded) {
        double r = std::exp(-step * tau.v);
        double tail = max_abs * std::pow(r, static_cast<double>(s.truncation() + 1)) / (1.0 - r);
        out.tail_bound = tail;
        if (!(tail <= tail_tolerance))
            throw std::invalid_argument(
                "series_eval_at: tail bound " + std::to_string(tail) +
                " exceeds tolerance; Im(tau) too small for this truncation");
    }
    return out;
}

}  // namespace superden
