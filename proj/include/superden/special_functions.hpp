#pragma once

// The smoothed-sign error function E(z) = 2 int_0^z e^{-pi u^2} du, its
// derivative tower E^{(k)}(z) = P_k(z) e^{-pi z^2}, and the complementary
// function beta(z) = int_z^inf u^{-1/2} e^{-pi u} du.
//
// E and beta reduce to the standard error functions: E(z) = erf(sqrt(pi) z)
// and beta(z) = erfc(sqrt(pi z)). The P_k coefficients are exact rationals
// times powers of pi, generated by P_1 = 2, P_{k+1} = P_k' - 2 pi z P_k.

#include "superden/rational.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace superden {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

inline double error_E(double z) { return std::erf(std::sqrt(kPi) * z); }

inline double beta_fn(double z) {
    if (z < 0) throw std::domain_error("beta_fn: argument must be nonnegative");
    return std::erfc(std::sqrt(kPi * z));
}

// Scaled complement: erfcx(w) = e^{w^2} erfc(w), w >= 0, without overflow.
// Below the switch e^{w^2} is comfortably finite; above it the asymptotic
// series truncation error (~ first omitted term) is below 1e-12 relative.
inline double erfcx(double w) {
    if (w < 6.5) return std::exp(w * w) * std::erfc(w);
    // Asymptotic series: 1/(w sqrt(pi)) sum (-1)^k (2k-1)!!/(2w^2)^k.
    double inv2w2 = 1.0 / (2.0 * w * w);
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 12; ++k) {
        term *= -(2 * k - 1) * inv2w2;
        sum += term;
    }
    return sum / (w * std::sqrt(kPi));
}

// beta(z) * e^{pi z}, stable for large z.
inline double beta_scaled(double z) {
    if (z < 0) throw std::domain_error("beta_scaled: argument must be nonnegative");
    return erfcx(std::sqrt(kPi * z));
}

// Exact coefficient tables for the P_k polynomials. Entry (k, i) holds the
// rational r with coefficient of z^i in P_k equal to r * pi^{(k-1+i)/2};
// the parity constraint k-1+i even is maintained by the recurrence.
class ErrorDerivTower {
public:
    explicit ErrorDerivTower(int max_order) {
        if (max_order < 1) throw std::invalid_argument("ErrorDerivTower: order must be >= 1");
        coeffs_.resize(max_order + 1);
        coeffs_[1] = {Rational(2)};
        for (int k = 1; k < max_order; ++k) {
            const auto& pk = coeffs_[k];
            std::vector<Rational> next(k + 1, Rational(0));
            for (int i = 0; i + 1 <= k - 1; ++i) next[i] += pk[i + 1] * (i + 1);  // P_k'
            for (int i = 0; i <= k - 1; ++i) next[i + 1] -= pk[i] * 2;            // -2 pi z P_k
            coeffs_[k + 1] = std::move(next);
        }
    }

    int max_order() const { return static_cast<int>(coeffs_.size()) - 1; }

    // Coefficient of z^i in P_k as (rational, pi power); rational is zero off
    // the parity lattice.
    Rational coefficient(int k, int i) const {
        check(k);
        if (i < 0 || i >= k) return 0;
        return coeffs_[k][i];
    }
    int pi_power(int k, int i) const { return (k - 1 + i) / 2; }

    // P_k(z) evaluated in double precision.
    double polynomial(int k, double z) const {
        check(k);
        double acc = 0;
        for (int i = k - 1; i >= 0; --i) {
            acc *= z;
            const Rational& r = coeffs_[k][i];
            if (r != 0) acc += to_double(r) * std::pow(kPi, pi_power(k, i));
        }
        return acc;
    }

    // E^{(k)}(z) = P_k(z) e^{-pi z^2}.
    double derivative(int k, double z) const {
        return polynomial(k, z) * std::exp(-kPi * z * z);
    }

    // P_k(z) e^{-pi z^2 + extra_exponent}; callers guarantee the combined
    // exponent is nonpositive so this never overflows.
    double derivative_weighted(int k, double z, double extra_exponent) const {
        return polynomial(k, z) * std::exp(-kPi * z * z + extra_exponent);
    }

private:
    void check(int k) const {
        if (k < 1 || k > max_order())
            throw std::out_of_range("ErrorDerivTower: order out of range");
    }
    std::vector<std::vector<Rational>> coeffs_;
};

// Shared tower for free-function use; orders above 64 never occur here
// (deg f = 2m^2 stays small at desk scale).
inline const ErrorDerivTower& shared_deriv_tower() {
    static const ErrorDerivTower tower(64);
    return tower;
}

inline double error_E_deriv(int k, double z) {
    if (k < 1) throw std::invalid_argument("error_E_deriv: order must be >= 1");
    return shared_deriv_tower().derivative(k, z);
}

}  // namespace superden
