#pragma once

// Exact rational scalars (GMP) shared by the series and polynomial layers.

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace superden {

using Rational = mpq_class;
using BigInt = mpz_class;

inline std::string to_string(const Rational& r) { return r.get_str(); }

inline double to_double(const Rational& r) { return r.get_d(); }

// mpq_class's two-argument constructor does not reduce the fraction; GMP
// comparisons assume canonical form, so every num/den construction goes
// through here.
inline Rational make_rational(const BigInt& num, const BigInt& den) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline Rational make_rational(long num, long den) {
    return make_rational(BigInt(num), BigInt(den));
}

inline BigInt factorial(unsigned n) {
    BigInt f = 1;
    for (unsigned k = 2; k <= n; ++k) f *= k;
    return f;
}

inline Rational rational_pow(const Rational& base, long e) {
    if (e < 0) {
        if (base == 0) throw std::domain_error("rational_pow: 0^negative");
        return 1 / rational_pow(base, -e);
    }
    Rational acc = 1;
    Rational b = base;
    unsigned long k = static_cast<unsigned long>(e);
    while (k) {
        if (k & 1) acc *= b;
        b *= b;
        k >>= 1;
    }
    return acc;
}

// Accepts "p/q", integer, and plain decimal strings ("0.05" -> 1/20).
inline Rational parse_rational(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("parse_rational: empty string");
    auto dot = text.find('.');
    if (dot == std::string::npos) {
        Rational r;
        if (r.set_str(text, 10) != 0)
            throw std::invalid_argument("parse_rational: cannot parse '" + text + "'");
        r.canonicalize();
        return r;
    }
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    std::size_t frac_len = text.size() - dot - 1;
    if (frac_len == 0 || digits.empty())
        throw std::invalid_argument("parse_rational: cannot parse '" + text + "'");
    BigInt num;
    if (num.set_str(digits, 10) != 0)
        throw std::invalid_argument("parse_rational: cannot parse '" + text + "'");
    BigInt den = 1;
    for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
    Rational r(num, den);
    r.canonicalize();
    return r;
}

}  // namespace superden
