#pragma once

// JSON encodings of the library's value types (nlohmann::json).

#include "superden/frac_series.hpp"
#include "superden/kw_series.hpp"
#include "superden/multi_poly.hpp"
#include "superden/tau.hpp"
#include "superden/theta.hpp"

#include <json.hpp>

#include <complex>

namespace superden {

// {"scale":16, "truncation":N, "terms":[[n, "p/q"], ...]}, exponents ascending.
inline nlohmann::json to_json(const FracSeries& s) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [n, c] : s.terms()) terms.push_back({n, to_string(c)});
    return {{"scale", kSeriesScale}, {"truncation", s.truncation()}, {"terms", terms}};
}

// [[exponent-vector, "p/q"], ...]
inline nlohmann::json to_json(const MultiPoly& p) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [e, c] : p.terms()) out.push_back({e, to_string(c)});
    return out;
}

inline nlohmann::json to_json(std::complex<double> z) {
    return nlohmann::json::array({z.real(), z.imag()});
}

inline nlohmann::json theta_record(int m, const TauPoint& tau, const ThetaResult& r, double tol) {
    return {{"m", m},
            {"tau", {tau.u, tau.v}},
            {"value", to_json(r.value)},
            {"radius", r.radius},
            {"tol", tol}};
}

inline nlohmann::json to_json(const IdentityReport& rep) {
    nlohmann::json j = {{"m", rep.m},
                        {"N", rep.truncation},
                        {"equal", rep.equal},
                        {"terms_checked", rep.terms_checked}};
    if (rep.first_mismatch) j["first_mismatch"] = *rep.first_mismatch;
    else j["first_mismatch"] = nullptr;
    return j;
}

inline nlohmann::json to_json(const LimitTable& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : t.rows)
        rows.push_back({{"t", to_string(r.t)},
                        {"theta", to_json(r.theta_value)},
                        {"abs_error", r.abs_error}});
    return {{"target", to_json(t.target)}, {"rows", rows}};
}

inline nlohmann::json to_json(const Gamma2Residuals& g) {
    return {{"kw_tau", to_json(g.kw_tau)},
            {"residual_shift", g.residual_shift},
            {"residual_mobius", g.residual_mobius}};
}

inline nlohmann::json to_json(const CuspReport& c) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : c.rows)
        rows.push_back({{"v", r.v},
                        {"scaled_inf", r.scaled_inf},
                        {"scaled_zero", r.scaled_zero},
                        {"scaled_one", r.scaled_one}});
    return {{"leading_exact", c.leading_exact},
            {"leading_exponent_num16", c.leading_exponent_num16},
            {"rows", rows},
            {"alpha_inf", c.alpha_inf},
            {"alpha_zero", c.alpha_zero},
            {"alpha_one", c.alpha_one}};
}

}  // namespace superden
