// Command-line interface: exact q-series expansions and the numerical
// verification commands, with machine-readable output.
//
// Exit codes: 0 success, 1 internal failure, 2 usage error, 3 a mathematical
// check ran and failed its tolerance.

#include "superden/serialize.hpp"
#include "superden/theta.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace superden;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;
constexpr int kExitCheckFailed = 3;

struct RunConfig {
    std::string command;
    int m = 1;
    std::optional<std::int64_t> N;      // scale-16 truncation
    std::optional<long> terms;          // half-integer steps past the leading exponent
    std::string tau_text = "0+1i";
    std::optional<double> tol;
    std::string t_list_text = "0.5,0.2,0.1,0.05";
    std::string series;
    unsigned long exponent = 0;         // for theta-pow
    std::string format = "json";
    std::string output;
    int threads = 0;
    unsigned long seed = 20240817;

    double tolerance() const { return tol ? *tol : (m >= 2 ? 1e-4 : 1e-6); }

    std::int64_t truncation_for_kw() const {
        if (N) return *N;
        long t = terms ? *terms : 100;
        return 2 * static_cast<std::int64_t>(m) * (2 * m + 1) + 8 * t;
    }

    std::int64_t truncation_plain(std::int64_t dflt) const {
        if (N) return *N;
        if (terms) return *terms * 16;
        return dflt;
    }
};

TauPoint parse_tau(const std::string& text) {
    // "U+Vi" / "U-Vi", e.g. "0+1i", "0.333+0.5i".
    if (text.empty() || text.back() != 'i')
        throw CLI::ValidationError("--tau", "expected U+Vi, e.g. 0+1i");
    std::string body = text.substr(0, text.size() - 1);
    std::size_t split = body.find_last_of("+-");
    if (split == std::string::npos || split == 0)
        throw CLI::ValidationError("--tau", "expected U+Vi, e.g. 0+1i");
    try {
        double u = std::stod(body.substr(0, split));
        double v = std::stod(body.substr(split));
        return TauPoint(u, v);
    } catch (const std::exception&) {
        throw CLI::ValidationError("--tau", "cannot parse '" + text + "'");
    }
}

std::vector<Rational> parse_t_list(const std::string& text) {
    std::vector<Rational> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_rational(item));
    if (out.empty()) throw CLI::ValidationError("--t-list", "empty list");
    return out;
}

int resolved_threads(const RunConfig& cfg) {
    if (cfg.threads > 0) return cfg.threads;
    if (const char* env = std::getenv("SUPERDEN_THREADS")) {
        int t = std::atoi(env);
        if (t > 0) return t;
    }
    return 0;  // libraries pick a deterministic-by-construction default
}

json config_json(const RunConfig& cfg) {
    TauPoint tau = parse_tau(cfg.tau_text);
    return {{"command", cfg.command},
            {"m", cfg.m},
            {"N", cfg.N ? json(*cfg.N) : json(nullptr)},
            {"terms", cfg.terms ? json(*cfg.terms) : json(nullptr)},
            {"tau", {tau.u, tau.v}},
            {"tol", cfg.tolerance()},
            {"t_list", cfg.t_list_text},
            {"radius_cap", ThetaOptions{}.radius_cap},
            {"threads", resolved_threads(cfg)},
            {"seed", cfg.seed},
            {"format", cfg.format}};
}

void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.output.empty() || cfg.output == "-") {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream f(cfg.output);
    if (!f) throw std::runtime_error("cannot open output file " + cfg.output);
    f << text;
    if (!text.empty() && text.back() != '\n') f << '\n';
}

std::string series_csv(const FracSeries& s) {
    std::ostringstream out;
    out << "exponent_num16,coefficient\n";
    for (const auto& [n, c] : s.terms()) out << n << "," << to_string(c) << "\n";
    return out.str();
}

std::string series_pretty(const FracSeries& s) {
    std::ostringstream out;
    out << "# scale 16, truncation " << s.truncation() << " (q^{n/16})\n";
    for (const auto& [n, c] : s.terms())
        out << "  q^" << n << "/16  " << to_string(c) << "\n";
    return out.str();
}

void emit_series(const RunConfig& cfg, const FracSeries& s) {
    if (cfg.format == "csv") {
        emit(cfg, series_csv(s));
    } else if (cfg.format == "pretty") {
        emit(cfg, series_pretty(s));
    } else {
        json j = {{"config", config_json(cfg)}, {"series", to_json(s)}};
        emit(cfg, j.dump(2));
    }
}

void emit_report(const RunConfig& cfg, const json& result) {
    if (cfg.format == "pretty") {
        std::ostringstream out;
        out << "== " << cfg.command << "\n";
        for (auto& [k, v] : result.items()) {
            if (v.is_array() && !v.empty() && v[0].is_object()) {
                out << k << ":\n";
                for (auto& row : v) out << "  " << row.dump() << "\n";
            } else {
                out << k << " = " << v.dump() << "\n";
            }
        }
        emit(cfg, out.str());
    } else if (cfg.format == "csv") {
        std::ostringstream out;
        out << "key,value\n";
        for (auto& [k, v] : result.items()) out << k << "," << v.dump() << "\n";
        emit(cfg, out.str());
    } else {
        json j = {{"config", config_json(cfg)}, {"result", result}};
        emit(cfg, j.dump(2));
    }
}

int cmd_expand(const RunConfig& cfg) {
    const std::string& s = cfg.series;
    if (s == "triangle") {
        emit_series(cfg, triangle_series(cfg.truncation_plain(16 * 50)));
    } else if (s == "triangle-product") {
        emit_series(cfg, triangle_product_form(cfg.truncation_plain(16 * 50)));
    } else if (s == "theta") {
        emit_series(cfg, theta_triangle(cfg.truncation_plain(16 * 50)));
    } else if (s == "theta-eta") {
        emit_series(cfg, eta_quotient_theta(cfg.truncation_plain(16 * 50)));
    } else if (s == "theta6") {
        std::int64_t N = cfg.truncation_plain(16 * 20);
        emit_series(cfg, series_pow(theta_triangle(N), 6).truncated(N));
    } else if (s == "theta-pow") {
        unsigned long e = cfg.exponent ? cfg.exponent
                                       : static_cast<unsigned long>(2 * cfg.m) * (2 * cfg.m + 1);
        std::int64_t N = cfg.truncation_plain(16 * 20);
        emit_series(cfg, series_pow(theta_triangle(N), e).truncated(N));
    } else if (s == "kw") {
        emit_series(cfg, kw_series(cfg.m, cfg.truncation_for_kw()));
    } else if (s == "kw-full") {
        emit_series(cfg, kw_series_fulllattice(cfg.m, cfg.truncation_for_kw()));
    } else {
        std::cerr << "unknown series '" << s << "'\n";
        return kExitUsage;
    }
    return kExitOk;
}

int cmd_verify_identity(const RunConfig& cfg) {
    auto rep = verify_identity(cfg.m, cfg.truncation_for_kw());
    emit_report(cfg, to_json(rep));
    return rep.equal ? kExitOk : kExitCheckFailed;
}

int cmd_verify_mutation(const RunConfig& cfg) {
    // Negative control: the sign corruption must be caught at q^{7/8} (m=1).
    auto rep = verify_identity(cfg.m, cfg.truncation_for_kw(), KwSign::y_parity);
    json j = to_json(rep);
    bool caught = !rep.equal && rep.first_mismatch.has_value();
    if (cfg.m == 1) caught = caught && *rep.first_mismatch == 14;
    j["control_detected"] = caught;
    emit_report(cfg, j);
    return caught ? kExitOk : kExitCheckFailed;
}

int cmd_verify_fold(const RunConfig& cfg) {
    std::int64_t N = cfg.truncation_for_kw();
    FracSeries cone = kw_series(cfg.m, N);
    FracSeries full = kw_series_fulllattice(cfg.m, N);
    auto mm = FracSeries::first_mismatch(cone, full, N);
    json j = {{"m", cfg.m}, {"N", N}, {"equal", !mm.has_value()}};
    if (mm) j["first_mismatch"] = *mm;
    emit_report(cfg, j);
    return mm ? kExitCheckFailed : kExitOk;
}

int cmd_verify_eta(const RunConfig& cfg) {
    std::int64_t N = cfg.truncation_plain(16 * 50);
    auto mm = FracSeries::first_mismatch(theta_triangle(N), eta_quotient_theta(N), N);
    json j = {{"N", N}, {"equal", !mm.has_value()}};
    if (mm) j["first_mismatch"] = *mm;
    emit_report(cfg, j);
    return mm ? kExitCheckFailed : kExitOk;
}

int cmd_verify_product(const RunConfig& cfg) {
    std::int64_t N = cfg.truncation_plain(16 * 50);
    auto mm = FracSeries::first_mismatch(triangle_series(N), triangle_product_form(N), N);
    json j = {{"N", N}, {"equal", !mm.has_value()}};
    if (mm) j["first_mismatch"] = *mm;
    emit_report(cfg, j);
    return mm ? kExitCheckFailed : kExitOk;
}

int cmd_verify_spherical(const RunConfig& cfg) {
    MultiPoly v = vm_poly(cfg.m);
    auto sc = is_spherical(v);
    json j = {{"m", cfg.m},
              {"laplacian_zero", laplacian_mm(v).is_zero()},
              {"spherical", sc.spherical},
              {"degree", sc.degree}};
    emit_report(cfg, j);
    return sc.spherical && sc.degree == 2L * cfg.m * cfg.m ? kExitOk : kExitCheckFailed;
}

int cmd_verify_gamma2(const RunConfig& cfg) {
    TauPoint tau = parse_tau(cfg.tau_text);
    auto g = gamma2_transform_check(cfg.m, tau, cfg.tolerance());
    json j = to_json(g);
    j["tol"] = cfg.tolerance();
    emit_report(cfg, j);
    return g.residual_shift <= cfg.tolerance() && g.residual_mobius <= cfg.tolerance()
               ? kExitOk
               : kExitCheckFailed;
}

int cmd_verify_stransform(const RunConfig& cfg) {
    TauPoint tau = parse_tau(cfg.tau_text);
    MultiPoly f = MultiPoly::var_x(1, 0) * MultiPoly::var_y(1, 0);
    PointR2m a({0.3, 0.7}), b({0.15, 0.4}), nb({-0.15, -0.4});
    const double pairing = 0.3 * 0.15 - 0.7 * 0.4;
    ThetaOptions opts;
    opts.threads = resolved_threads(cfg);
    ThetaSpec fwd(KernelSpec(1, f, {cone_plus(1)}, {cone_minus(1)}), a, b);
    ThetaSpec swp(KernelSpec(1, f, {cone_plus(1)}, {cone_minus(1)}), nb, a);
    std::complex<double> tc = tau.value();
    auto lhs = theta_eval(fwd, to_tau(-1.0 / tc), cfg.tolerance() * 1e-3, opts);
    auto rhs = theta_eval(swp, tau, cfg.tolerance() * 1e-3, opts);
    std::complex<double> pred = detail::ipow(-tc, 3) * detail::unit_phase(pairing) * rhs.value;
    double rel = std::abs(lhs.value - pred) / std::abs(pred);
    TauPoint mtau = to_tau(-1.0 / tc);
    json j = {{"m", 1},
              {"theta_at_minus_1_over_tau", theta_record(1, mtau, lhs, cfg.tolerance() * 1e-3)},
              {"theta_swapped_at_tau", theta_record(1, tau, rhs, cfg.tolerance() * 1e-3)},
              {"predicted", to_json(pred)},
              {"relative_residual", rel}};
    emit_report(cfg, j);
    return rel <= cfg.tolerance() ? kExitOk : kExitCheckFailed;
}

int cmd_verify_limit(const RunConfig& cfg) {
    TauPoint tau = parse_tau(cfg.tau_text);
    ThetaOptions opts;
    opts.threads = resolved_threads(cfg);
    auto table = limit_t_check(cfg.m, tau, parse_t_list(cfg.t_list_text), cfg.tolerance(), opts);
    bool decreasing = true;
    for (std::size_t i = 0; i + 1 < table.rows.size(); ++i)
        decreasing = decreasing && table.rows[i + 1].abs_error < table.rows[i].abs_error;
    json j = to_json(table);
    j["strictly_decreasing"] = decreasing;
    emit_report(cfg, j);
    return decreasing ? kExitOk : kExitCheckFailed;
}

int cmd_verify_cusps(const RunConfig& cfg) {
    auto rep = cusp_behavior_check(cfg.m, {1, 2, 4, 8});
    json j = to_json(rep);
    bool ok = rep.leading_exact && rep.alpha_zero >= -0.05;
    if (cfg.m == 1) ok = ok && std::abs(rep.alpha_one - 3.0 / 8.0) <= 0.05;
    j["pass"] = ok;
    emit_report(cfg, j);
    return ok ? kExitOk : kExitCheckFailed;
}

int cmd_verify_vigneras(const RunConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    double tol = cfg.tol ? *cfg.tol : (cfg.m >= 2 ? 1e-6 : 1e-7);
    MultiPoly f = cfg.m == 1 ? MultiPoly::var_x(1, 0) * MultiPoly::var_y(1, 0)
                             : vm_poly(cfg.m);
    std::vector<ConeVector> c0(cfg.m, cone_plus(1)), c1(cfg.m, cone_minus(1));
    KernelSpec spec(cfg.m, f, c0, c1);
    double range = cfg.m >= 2 ? 2.0 : 3.0;
    std::uniform_real_distribution<double> dist(-range, range);
    double worst = 0;
    for (int i = 0; i < 20; ++i) {
        std::vector<double> pt(2 * cfg.m);
        for (auto& c : pt) c = dist(rng);
        worst = std::max(worst, vigneras_residual(spec, PointR2m(pt)));
    }
    json j = {{"m", cfg.m}, {"points", 20}, {"max_residual", worst}, {"tol", tol}};
    emit_report(cfg, j);
    return worst <= tol ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{"Kac-Wakimoto denominator identity: exact q-series verification and "
                 "indefinite theta function checks"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* c) {
        c->add_option("--m", cfg.m, "number of coordinate pairs")->check(CLI::PositiveNumber);
        c->add_option("--N", cfg.N, "truncation as an exponent numerator on the q^{1/16} lattice");
        c->add_option("--terms", cfg.terms, "half-integer q-steps past the leading exponent");
        c->add_option("--tau", cfg.tau_text, "point of the upper half-plane, U+Vi");
        c->add_option("--tol", cfg.tol, "tolerance (default 1e-6 for m=1, 1e-4 for m>=2)");
        c->add_option("--t-list", cfg.t_list_text, "decreasing cone parameters, comma separated");
        c->add_option("--format", cfg.format, "json | csv | pretty")
            ->check(CLI::IsMember({"json", "csv", "pretty"}));
        c->add_option("--output", cfg.output, "output path (default stdout)");
        c->add_option("--threads", cfg.threads, "worker threads (0 = auto; env SUPERDEN_THREADS)");
        c->add_option("--seed", cfg.seed, "RNG seed for random-point checks");
    };

    CLI::App* expand = app.add_subcommand("expand", "print an exact q-expansion");
    expand->add_option("--series", cfg.series,
                       "triangle | triangle-product | theta | theta-eta | theta6 | "
                       "theta-pow | kw | kw-full")
        ->required();
    expand->add_option("--exponent", cfg.exponent, "power for theta-pow");
    add_common(expand);

    CLI::App* verify = app.add_subcommand("verify", "run a verification");
    verify->require_subcommand(1);
    std::vector<std::pair<std::string, std::string>> verbs = {
        {"identity", "theta_triangle^{2m(2m+1)} == KW_m, exact"},
        {"fold", "cone form == full-lattice form, exact"},
        {"eta", "theta_triangle == eta quotient, exact"},
        {"product", "triangle series == product form, exact"},
        {"spherical", "Laplacian annihilates V_m, exact"},
        {"vigneras", "Vigneras eigenvalue residual at random points"},
        {"stransform", "theta S-transform law, m=1, f=xy"},
        {"limit", "t -> 0 convergence of theta to the sign kernel"},
        {"gamma2", "Gamma(2) transformation laws of KW_m"},
        {"cusps", "cusp behavior of KW_m"},
        {"mutation", "negative control: corrupted sign must be caught"},
    };
    for (auto& [name, desc] : verbs) add_common(verify->add_subcommand(name, desc));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (expand->parsed()) {
            cfg.command = "expand:" + cfg.series;
            return cmd_expand(cfg);
        }
        CLI::App* sub = verify->get_subcommands().front();
        cfg.command = "verify:" + sub->get_name();
        const std::string& name = sub->get_name();
        if (name == "identity") return cmd_verify_identity(cfg);
        if (name == "fold") return cmd_verify_fold(cfg);
        if (name == "eta") return cmd_verify_eta(cfg);
        if (name == "product") return cmd_verify_product(cfg);
        if (name == "spherical") return cmd_verify_spherical(cfg);
        if (name == "vigneras") return cmd_verify_vigneras(cfg);
        if (name == "stransform") return cmd_verify_stransform(cfg);
        if (name == "limit") return cmd_verify_limit(cfg);
        if (name == "gamma2") return cmd_verify_gamma2(cfg);
        if (name == "cusps") return cmd_verify_cusps(cfg);
        if (name == "mutation") return cmd_verify_mutation(cfg);
        std::cerr << "unknown verification\n";
        return kExitUsage;
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const NonConvergence& e) {
        // the check could not be completed within the configured caps
        std::cerr << "non-convergence: " << e.what() << "\n";
        return kExitCheckFailed;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    }
}
