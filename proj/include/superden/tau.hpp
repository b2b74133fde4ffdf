#pragma once

// Points of the upper half-plane and the non-convergence error shared by the
// adaptive lattice summations.

#include <complex>
#include <stdexcept>
#include <string>

namespace superden {

struct TauPoint {
    double u;
    double v;

    TauPoint(double u_, double v_) : u(u_), v(v_) {
        if (!(v > 0)) throw std::invalid_argument("TauPoint: Im(tau) must be positive");
    }

    std::complex<double> value() const { return {u, v}; }
};

inline TauPoint to_tau(std::complex<double> z) { return TauPoint(z.real(), z.imag()); }

class NonConvergence : public std::runtime_error {
public:
    NonConvergence(const std::string& what, double cutoff, double last_contribution)
        : std::runtime_error(what + " (cutoff " + std::to_string(cutoff) +
                             ", last contribution " + std::to_string(last_contribution) + ")"),
          cutoff_(cutoff),
          last_contribution_(last_contribution) {}

    double cutoff() const { return cutoff_; }
    double last_contribution() const { return last_contribution_; }

private:
    double cutoff_;
    double last_contribution_;
};

}  // namespace superden
