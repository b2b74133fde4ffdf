#pragma once

// Exact multivariate polynomials in the 2m variables x_1,y_1,...,x_m,y_m,
// with the differential operators acting on them: the signature-(m,m)
// Laplacian, the Euler operator, and normalized directional derivatives
// along cone vectors. Also builds the Vandermonde-type polynomial V_m.

#include "superden/cone.hpp"
#include "superden/rational.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace superden {

// A point of R^{2m}, coordinates interleaved as (x_1, y_1, ..., x_m, y_m).
class PointR2m {
public:
    explicit PointR2m(std::vector<double> coords) : coords_(std::move(coords)) {
        if (coords_.empty() || coords_.size() % 2 != 0)
            throw std::invalid_argument("PointR2m: need 2m coordinates");
        for (double c : coords_)
            if (!std::isfinite(c)) throw std::invalid_argument("PointR2m: non-finite coordinate");
    }

    static PointR2m repeated(int m, double x, double y) {
        std::vector<double> c;
        c.reserve(2 * m);
        for (int j = 0; j < m; ++j) {
            c.push_back(x);
            c.push_back(y);
        }
        return PointR2m(std::move(c));
    }

    int pairs() const { return static_cast<int>(coords_.size()) / 2; }
    double x(int j) const { return coords_[2 * j]; }
    double y(int j) const { return coords_[2 * j + 1]; }
    const std::vector<double>& coords() const { return coords_; }

private:
    std::vector<double> coords_;
};

class MultiPoly {
public:
    using ExponentVec = std::vector<int>;
    using TermMap = std::map<ExponentVec, Rational>;

    explicit MultiPoly(int m) : m_(m) {
        if (m < 1) throw std::invalid_argument("MultiPoly: m must be positive");
    }

    static MultiPoly constant(int m, const Rational& c) {
        MultiPoly p(m);
        if (c != 0) p.terms_[ExponentVec(2 * m, 0)] = c;
        return p;
    }

    static MultiPoly monomial(int m, ExponentVec exps, const Rational& c) {
        MultiPoly p(m);
        if (static_cast<int>(exps.size()) != 2 * m)
            throw std::invalid_argument("MultiPoly::monomial: exponent vector size");
        for (int e : exps)
            if (e < 0) throw std::invalid_argument("MultiPoly::monomial: negative exponent");
        if (c != 0) p.terms_[std::move(exps)] = c;
        return p;
    }

    // x_j resp. y_j, 0-based pair index.
    static MultiPoly var_x(int m, int j) { return single_var(m, 2 * j); }
    static MultiPoly var_y(int m, int j) { return single_var(m, 2 * j + 1); }

    int pair_count() const { return m_; }
    int var_count() const { return 2 * m_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(ExponentVec exps, const Rational& c) {
        if (c == 0) return;
        auto [it, inserted] = terms_.try_emplace(std::move(exps), c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    friend MultiPoly operator+(const MultiPoly& a, const MultiPoly& b) {
        a.check_same(b);
        MultiPoly out = a;
        for (const auto& [e, c] : b.terms_) {
            Rational& slot = out.terms_[e];
            slot += c;
            if (slot == 0) out.terms_.erase(e);
        }
        return out;
    }

    friend MultiPoly operator-(const MultiPoly& a, const MultiPoly& b) { return a + (-b); }

    MultiPoly operator-() const {
        MultiPoly out(m_);
        for (const auto& [e, c] : terms_) out.terms_[e] = -c;
        return out;
    }

    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
        a.check_same(b);
        MultiPoly out(a.m_);
        for (const auto& [ea, ca] : a.terms_) {
            for (const auto& [eb, cb] : b.terms_) {
                ExponentVec e(2 * a.m_);
                for (int i = 0; i < 2 * a.m_; ++i) e[i] = ea[i] + eb[i];
                Rational& slot = out.terms_[e];
                slot += ca * cb;
                if (slot == 0) out.terms_.erase(e);
            }
        }
        return out;
    }

    MultiPoly operator*(const Rational& s) const {
        MultiPoly out(m_);
        if (s == 0) return out;
        for (const auto& [e, c] : terms_) out.terms_[e] = c * s;
        return out;
    }

    MultiPoly& operator+=(const MultiPoly& b) { return *this = *this + b; }
    MultiPoly& operator-=(const MultiPoly& b) { return *this = *this - b; }
    MultiPoly& operator*=(const MultiPoly& b) { return *this = *this * b; }

    bool operator==(const MultiPoly& b) const { return m_ == b.m_ && terms_ == b.terms_; }

    // d/d(var), 0-based interleaved variable index.
    MultiPoly derivative(int var) const {
        MultiPoly out(m_);
        for (const auto& [e, c] : terms_) {
            if (e[var] == 0) continue;
            ExponentVec d = e;
            d[var] -= 1;
            out.terms_[std::move(d)] += c * e[var];
        }
        for (auto it = out.terms_.begin(); it != out.terms_.end();)
            it = it->second == 0 ? out.terms_.erase(it) : std::next(it);
        return out;
    }

    long total_degree() const {
        long d = -1;
        for (const auto& [e, c] : terms_) {
            long t = 0;
            for (int x : e) t += x;
            if (t > d) d = t;
        }
        return d;  // -1 for the zero polynomial
    }

    bool is_homogeneous(long* degree_out = nullptr) const {
        long d = -1;
        for (const auto& [e, c] : terms_) {
            long t = 0;
            for (int x : e) t += x;
            if (d == -1) d = t;
            else if (t != d) return false;
        }
        if (degree_out) *degree_out = d < 0 ? 0 : d;
        return true;
    }

    Rational evaluate(const std::vector<Rational>& point) const {
        if (static_cast<int>(point.size()) != 2 * m_)
            throw std::invalid_argument("MultiPoly::evaluate: point size");
        Rational acc = 0;
        for (const auto& [e, c] : terms_) {
            Rational t = c;
            for (int i = 0; i < 2 * m_; ++i)
                if (e[i]) t *= rational_pow(point[i], e[i]);
            acc += t;
        }
        return acc;
    }

    double evaluate(const PointR2m& point) const {
        if (point.pairs() != m_) throw std::invalid_argument("MultiPoly::evaluate: point size");
        double acc = 0;
        for (const auto& [e, c] : terms_) {
            double t = to_double(c);
            for (int i = 0; i < 2 * m_; ++i)
                for (int k = 0; k < e[i]; ++k) t *= point.coords()[i];
            acc += t;
        }
        return acc;
    }

private:
    static MultiPoly single_var(int m, int idx) {
        MultiPoly p(m);
        ExponentVec e(2 * m, 0);
        e.at(idx) = 1;
        p.terms_[std::move(e)] = 1;
        return p;
    }

    void check_same(const MultiPoly& b) const {
        if (m_ != b.m_) throw std::invalid_argument("MultiPoly: mixed variable counts");
    }

    int m_;
    TermMap terms_;
};

// V_m = prod_{i<j} (x_i^2-x_j^2)(y_i^2-y_j^2) * prod_j x_j y_j,
// homogeneous of degree 2m^2.
inline MultiPoly vm_poly(int m) {
    if (m < 1) throw std::invalid_argument("vm_poly: m must be positive");
    MultiPoly p = MultiPoly::constant(m, 1);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            MultiPoly xi = MultiPoly::var_x(m, i), xj = MultiPoly::var_x(m, j);
            MultiPoly yi = MultiPoly::var_y(m, i), yj = MultiPoly::var_y(m, j);
            p *= xi * xi - xj * xj;
            p *= yi * yi - yj * yj;
        }
    for (int j = 0; j < m; ++j) p *= MultiPoly::var_x(m, j) * MultiPoly::var_y(m, j);
    return p;
}

// sum_j (d^2/dx_j^2 - d^2/dy_j^2).
inline MultiPoly laplacian_mm(const MultiPoly& p) {
    MultiPoly out(p.pair_count());
    for (int j = 0; j < p.pair_count(); ++j) {
        out += p.derivative(2 * j).derivative(2 * j);
        out -= p.derivative(2 * j + 1).derivative(2 * j + 1);
    }
    return out;
}

// sum_v v d/dv over all 2m variables; on a monomial this is multiplication by
// its total degree.
inline MultiPoly euler_op(const MultiPoly& p) {
    MultiPoly out(p.pair_count());
    for (const auto& [e, c] : p.terms()) {
        long deg = 0;
        for (int x : e) deg += x;
        if (deg != 0) out.add_term(e, c * deg);
    }
    return out;
}

struct SphericalCheck {
    bool spherical = false;
    long degree = 0;
};

// Spherical = homogeneous and annihilated by the signature-(m,m) Laplacian.
inline SphericalCheck is_spherical(const MultiPoly& p) {
    SphericalCheck r;
    long d = 0;
    if (!p.is_homogeneous(&d)) return r;
    if (!laplacian_mm(p).is_zero()) return r;
    r.spherical = true;
    r.degree = d;
    return r;
}

// Result of applying the normalized directional derivative
// (1/sqrt(-Q1(c)) (c1 d/dx_j + c2 d/dy_j))^k: an exact rational polynomial
// together with the deferred power of the irrational normalizer, meaning
// poly * (-Q1(c))^{-sqrt_power/2}.
struct DirectionalDerivative {
    MultiPoly poly;
    int sqrt_power = 0;
};

inline DirectionalDerivative directional_derivative(const MultiPoly& p, const ConeVector& c,
                                                    int pair_index, int order) {
    if (pair_index < 0 || pair_index >= p.pair_count())
        throw std::invalid_argument("directional_derivative: pair index out of range");
    if (order < 0) throw std::invalid_argument("directional_derivative: negative order");
    MultiPoly acc = p;
    for (int k = 0; k < order && !acc.is_zero(); ++k)
        acc = acc.derivative(2 * pair_index) * c.c1() + acc.derivative(2 * pair_index + 1) * c.c2();
    return {std::move(acc), order};
}

}  // namespace superden
