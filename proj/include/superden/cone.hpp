#pragma once

// Cone vectors for the signature-(1,1) plane: c = (c1, c2) with
// Q1(c) = (c1^2 - c2^2)/2 < 0 and c2 > 0.

#include "superden/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace superden {

class ConeVector {
public:
    ConeVector(Rational c1, Rational c2) : c1_(std::move(c1)), c2_(std::move(c2)) {
        if (c2_ <= 0)
            throw std::invalid_argument("ConeVector: second coordinate must be positive");
        if (q1() >= 0)
            throw std::invalid_argument("ConeVector: Q1(c) must be negative");
    }

    const Rational& c1() const { return c1_; }
    const Rational& c2() const { return c2_; }

    Rational q1() const { return (c1_ * c1_ - c2_ * c2_) / 2; }
    Rational minus_q1() const { return -q1(); }

    double c1d() const { return to_double(c1_); }
    double c2d() const { return to_double(c2_); }
    // sqrt(-Q1(c)), the normalization of the smoothed sign argument.
    double norm() const { return std::sqrt(to_double(minus_q1())); }

    // B1(c, (x,y)) / sqrt(-Q1(c)) for the signature (1,-1) pairing.
    double normalized_pairing(double x, double y) const {
        return (c1d() * x - c2d() * y) / norm();
    }

private:
    Rational c1_, c2_;
};

// The standard cone pair (1, 1+t), (-1, 1+t) used by the holomorphic limit.
inline ConeVector cone_plus(const Rational& t) { return ConeVector(1, 1 + t); }
inline ConeVector cone_minus(const Rational& t) { return ConeVector(-1, 1 + t); }

}  // namespace superden
