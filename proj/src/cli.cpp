#include "fracevo/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "fracevo/fractional.hpp"

namespace fracevo::cli {

using nlohmann::ordered_json;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

ordered_json complex_json(cplx z) { return ordered_json::array({z.real(), z.imag()}); }

ordered_json error_json(const Error& e) { return {{"code", std::string(to_string(e.code()))}, {"message", e.what()}}; }

int exit_for(const Error& e) {
    switch (e.code()) {
    case ErrorCode::ConfigError: return ConfigFailure;
    case ErrorCode::AuditFailed: return AuditFailure;
    default: return NumericFailure;
    }
}

ordered_json header(const std::string& command, const config::ProblemConfig& c) {
    ordered_json r;
    r["command"] = command;
    r["schema_version"] = config::kSchemaVersion;
    r["status"] = "ok";
    r["exit_code"] = 0;
    r["problem"] = config::serialize(c);
    return r;
}

void finish(Outcome& o) {
    o.report["exit_code"] = o.exit_code;
    o.report["status"] = o.exit_code == Ok ? "ok" : o.exit_code == VerificationFailure ? "failed" : "error";
}

ordered_json audit_json(const AuditReport& a) {
    ordered_json checks = ordered_json::array();
    for (const auto& c : a.checks)
        checks.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"limit", c.limit}, {"evidence", c.evidence}});
    return {{"pass", a.pass}, {"window", a.window}, {"checks", checks}};
}

std::vector<double> positive(const std::vector<double>& ts) {
    std::vector<double> out;
    std::copy_if(ts.begin(), ts.end(), std::back_inserter(out), [](double t) { return t > 0.0; });
    return out;
}

double relative(const Vec& a, const Vec& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

struct Check {
    std::string name;
    bool pass = true;
    double value = 0.0;
    double limit = 0.0;
    std::string evidence;
    ordered_json rows = ordered_json::array();

    ordered_json json() const {
        return {{"name", name}, {"pass", pass}, {"value", value}, {"limit", limit}, {"evidence", evidence}, {"rows", rows}};
    }
};

// 5-point stencils for the m-th derivative along the real direction; m = 3 with one Richardson step
cplx fd_derivative(const std::function<cplx(cplx)>& g, cplx z, int m, double h) {
    auto f = [&](double k) { return g(z + k * h); };
    switch (m) {
    case 1: return (-f(2) + 8.0 * f(1) - 8.0 * f(-1) + f(-2)) / (12.0 * h);
    case 2: return (-f(2) + 16.0 * f(1) - 30.0 * f(0) + 16.0 * f(-1) - f(-2)) / (12.0 * h * h);
    default: {
        auto d3 = [&](double s) {
            auto fs = [&](double k) { return g(z + k * s); };
            return (fs(2) - 2.0 * fs(1) + 2.0 * fs(-1) - fs(-2)) / (2.0 * s * s * s);
        };
        return (4.0 * d3(0.5 * h) - d3(h)) / 3.0;
    }
    }
}

} // namespace

std::string trajectory_csv(const std::vector<double>& times, const std::vector<Vec>& u) {
    std::string s = "t";
    const Eigen::Index n = u.empty() ? 0 : u.front().size();
    for (Eigen::Index i = 1; i <= n; ++i) s += ",Re(u_" + std::to_string(i) + "),Im(u_" + std::to_string(i) + ")";
    s += "\n";
    for (std::size_t k = 0; k < times.size(); ++k) {
        s += g17(times[k]);
        for (Eigen::Index i = 0; i < n; ++i) s += "," + g17(u[k](i).real()) + "," + g17(u[k](i).imag());
        s += "\n";
    }
    return s;
}

Outcome analyze(const config::ProblemConfig& c) {
    Outcome o;
    o.report = header("analyze", c);
    const auto& phi = c.function;
    const auto& zeros = phi.zeros;
    try {
        ordered_json fn;
        const bool polynomial = zeros.finite() && zeros.complete();
        fn["declared_genus"] = phi.genus;
        if (zeros.finite()) {
            fn["zero_count"] = zeros.values().size();
            fn["genus"] = 0;
            fn["convergence_exponent"] = 0.0;
        } else {
            fn["genus"] = entire::genus(zeros);
            fn["convergence_exponent"] = entire::convergence_exponent(zeros);
        }
        o.report["function"] = fn;

        ordered_json growth;
        if (polynomial) {
            growth = {{"order", 0.0}, {"type", nullptr}, {"note", "polynomial: order 0"}};
        } else {
            const auto radii = entire::radius_ladder(c.analysis.ladder_start, c.analysis.rungs);
            const auto est = entire::order_type_estimate(phi, radii, c.analysis.samples);
            growth = {{"order", est.order},     {"type", est.type},         {"radii", est.radii},
                      {"log_max_modulus", est.log_max_modulus}, {"local_slopes", est.local_slopes},
                      {"residual", est.residual}, {"spread", est.spread}};
        }
        o.report["growth"] = growth;

        ordered_json ind;
        const double rho = zeros.finite() ? 0.0 : entire::convergence_exponent(zeros);
        if (rho > 0.0 && std::abs(rho - std::round(rho)) > 1e-9) {
            const auto delta = entire::density_of_zeros(zeros, entire::ProximateOrder{rho, 0.0});
            const auto pos = entire::check_indicator_positivity(rho, delta, c.analysis.indicator_points);
            ind = {{"order", rho}, {"points", pos.psi.size()}, {"min_value", pos.min_value},
                   {"nonnegative", pos.nonnegative}};
            ordered_json jumps = ordered_json::array();
            for (const auto& jmp : delta.jumps()) jumps.push_back({{"angle", jmp.angle}, {"mass", jmp.mass}});
            ind["density_jumps"] = jumps;
            ind["total_mass"] = delta.total_mass();
            std::string csv = "psi,H\n";
            for (std::size_t i = 0; i < pos.psi.size(); ++i) csv += g17(pos.psi[i]) + "," + g17(pos.values[i]) + "\n";
            ind["csv"] = csv;
        } else {
            ind = {{"order", rho}, {"note", "indicator is defined here for non-integer order in (0, inf) only"}};
        }
        o.report["indicator"] = ind;

        ordered_json exc;
        if (!zeros.finite()) {
            exc["condition"] = "II";
            exc["d"] = c.analysis.exceptional_d;
            try {
                const auto circles = entire::exceptional_circles(zeros, entire::ProximateOrder{rho, 0.0},
                                                                 c.analysis.exceptional_d, entire::ExceptionalCondition::II);
                exc["satisfied"] = true;
                exc["circles"] = circles.circles.size();
                ordered_json rays = ordered_json::array();
                for (double theta : {0.0, 0.5 * kPi, kPi}) {
                    const auto rc = entire::ray_clearance(circles, theta);
                    rays.push_back({{"theta", theta}, {"clear", rc.clear}, {"last_hit", rc.last_hit}});
                }
                exc["rays"] = rays;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::ConditionViolated) throw;
                exc["satisfied"] = false;
                exc["message"] = e.what();
            }
        } else {
            exc["note"] = "finite zero set";
        }
        o.report["exceptional_circles"] = exc;
    } catch (const Error& e) {
        o.exit_code = exit_for(e);
        o.report["error"] = error_json(e);
    }
    finish(o);
    return o;
}

Outcome solve(const config::ProblemConfig& c, const Options& opt, std::string* csv) {
    Outcome o;
    o.report = header("solve", c);
    try {
        auto problem = config::to_problem(c, opt.force);
        if (opt.corrupt) problem.exponent_scale = 1.01;
        o.report["audit"] = audit_json(hypothesis_audit(problem));
        const auto sol = fracevo::solve(problem);
        o.report["forced"] = sol.forced;
        o.report["grouping"] = {{"radii", sol.grouping.radii}, {"nonempty", sol.grouping.nonempty()},
                                {"nudged", sol.grouping.nudged}};
        o.report["raw_pairings"] = sol.raw_pairings;
        ordered_json blocks = ordered_json::array();
        for (std::size_t k = 0; k < sol.times.size(); ++k)
            blocks.push_back({{"t", sol.times[k]}, {"block_norms", sol.block_norms[k]}, {"norm", sol.u[k].norm()}});
        o.report["blocks"] = blocks;
        const auto uq = uniqueness_indicator(problem);
        o.report["uniqueness_indicator"] = {{"samples", uq.samples}, {"min_sampled", uq.min_sampled},
                                            {"max_sampled", uq.max_sampled}, {"negative", uq.negative},
                                            {"field_min", uq.field_min}, {"note", uq.note}};
        if (csv) *csv = trajectory_csv(sol.times, sol.u);
    } catch (const Error& e) {
        o.exit_code = exit_for(e);
        o.report["error"] = error_json(e);
    }
    finish(o);
    return o;
}

Outcome verify(const config::ProblemConfig& c, const Options& opt) {
    Outcome o;
    o.report = header("verify", c);
    for (const auto& name : opt.checks)
        if (std::find(kCheckNames.begin(), kCheckNames.end(), name) == kCheckNames.end()) {
            o.exit_code = ConfigFailure;
            o.report["error"] = error_json(Error(ErrorCode::ConfigError, "--checks: unknown check '" + name + "'"));
            o.report["checks"] = ordered_json::array();
            o.report["passed"] = 0;
            o.report["total"] = 0;
            finish(o);
            return o;
        }
    auto wanted = [&](const std::string& name) {
        return opt.checks.empty() || std::find(opt.checks.begin(), opt.checks.end(), name) != opt.checks.end();
    };
    const auto& tol = c.tolerances;
    std::vector<Check> checks;
    try {
        auto problem = config::to_problem(c, opt.force);
        if (opt.corrupt) problem.exponent_scale = 1.01;
        const auto audit = hypothesis_audit(problem);
        o.report["audit"] = audit_json(audit);
        if (wanted("audit")) {
            Check ch{"audit", audit.pass, 0.0, 0.0, audit.pass ? "all hypothesis checks pass" : "failed:"};
            for (const auto& a : audit.checks) {
                if (!a.pass) ch.evidence += " " + a.name;
                ch.value += a.pass ? 0.0 : 1.0;
            }
            checks.push_back(ch);
        }
        if (!audit.pass && !opt.force) throw Error(ErrorCode::AuditFailed, "hypothesis audit failed; rerun with --force");
        problem.force = true;
        const auto sol = fracevo::solve(problem);
        const SeriesEvaluator eval(problem, sol.grouping);
        const auto times = positive(c.equation->times);
        const double t_min = times.empty() ? 0.1 : times.front();

        if (wanted("oracle")) {
            Check ch{"oracle", true, 0.0, tol.oracle, ""};
            if (times.empty()) {
                ch.evidence = "no positive times configured";
            } else {
                const auto contour = build_contour(problem.op, problem.phi, problem.alpha, t_min, tol.contour);
                QuadratureOptions qo;
                qo.tol = tol.contour;
                const auto ref = contour_integral(problem.op, problem.phi, problem.alpha, times, problem.f, contour, {}, qo);
                for (std::size_t k = 0; k < times.size(); ++k) {
                    const double d = relative(eval(times[k]), ref[k].value);
                    ch.value = std::max(ch.value, d);
                    ch.rows.push_back({{"t", times[k]}, {"relative_deviation", d},
                                       {"quadrature_error", ref[k].discretization_error + ref[k].truncation_error}});
                }
                ch.pass = ch.value <= ch.limit;
                ch.evidence = "max relative deviation between the series and the contour integral";
            }
            checks.push_back(ch);
        }
        if (wanted("residual")) {
            Check ch{"residual", true, 0.0, tol.residual_analytic, ""};
            double numeric = 0.0;
            for (double t : times) {
                const auto r = equation_residual(problem, sol, t, tol.numeric_derivative);
                ch.value = std::max(ch.value, r.analytic);
                numeric = std::max(numeric, r.numeric);
                ch.rows.push_back({{"t", t}, {"analytic", r.analytic}, {"numeric", r.numeric},
                                   {"numeric_error", r.numeric_error}, {"reference", r.reference}});
            }
            ch.pass = ch.value <= tol.residual_analytic && numeric <= tol.residual_numeric;
            ch.evidence = "max analytic residual " + g17(ch.value) + " (limit " + g17(tol.residual_analytic) +
                          "), max numeric residual " + g17(numeric) + " (limit " + g17(tol.residual_numeric) + ")";
            checks.push_back(ch);
        }
        if (wanted("initial")) {
            Check ch{"initial", true, 0.0, tol.initial, ""};
            double prev = std::numeric_limits<double>::infinity();
            bool decreasing = true;
            for (double t : {1e-1, 1e-2, 1e-3, 1e-4}) {
                const double d = relative(eval(t), problem.f);
                decreasing = decreasing && d < prev;
                prev = d;
                ch.rows.push_back({{"t", t}, {"relative_deviation", d}});
            }
            ch.value = prev;
            ch.pass = decreasing && prev <= ch.limit;
            ch.evidence = std::string(decreasing ? "decreasing" : "not decreasing") + " toward t = 1e-4";
            checks.push_back(ch);
        }
        if (wanted("beta_k")) {
            Check ch{"beta_k", true, 0.0, tol.beta, ""};
            const auto contour = build_contour(problem.op, problem.phi, problem.alpha, 0.1, tol.contour);
            QuadratureOptions qo;
            // absolute: for k = 8 the integrand reaches ~1e5 on the contour, so rounding sits near 1e-10
            qo.tol = tol.beta;
            bool converged = true;
            const std::vector<double> ts{0.1, 1.0, 10.0};
            std::vector<std::vector<BetaResult>> table;
            try {
                table = beta_table(problem.phi, problem.alpha, ts, contour, 8, qo);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::ToleranceNotMet) throw;
            }
            for (std::size_t j = 0; j < ts.size(); ++j)
                for (int k = 0; k <= 8; ++k) {
                    try {
                        // one by one only when the joint pass did not converge, to locate the offenders
                        const auto b = table.empty() ? beta_k(problem.phi, problem.alpha, ts[j], contour, k, qo)
                                                     : table[j][static_cast<std::size_t>(k)];
                        ch.value = std::max(ch.value, std::abs(b.value));
                        ch.rows.push_back({{"k", k}, {"t", ts[j]}, {"value", complex_json(b.value)}, {"error", b.error}});
                    } catch (const Error& e) {
                        if (e.code() != ErrorCode::ToleranceNotMet) throw;
                        converged = false;
                        ch.rows.push_back({{"k", k}, {"t", ts[j]}, {"error", e.what()}});
                    }
                }
            ch.pass = converged && ch.value <= ch.limit;
            ch.evidence = "max |beta_k(t)| over k = 0..8, t in {0.1, 1, 10}";
            checks.push_back(ch);
        }
        if (wanted("regrouping")) {
            Check ch{"regrouping", true, 0.0, tol.regrouping, ""};
            const double R = problem.R > 0.0 ? problem.R : 0.9 * problem.op.min_characteristic_modulus();
            std::vector<std::vector<Vec>> sums;
            std::vector<std::size_t> counts;
            for (double kappa : {0.3, 0.5, 0.7}) {
                const auto g = group_annuli(problem.op, R, kappa);
                const SeriesEvaluator e(problem, g);
                std::vector<Vec> s;
                for (double t : times) s.push_back(e(t));
                sums.push_back(std::move(s));
                counts.push_back(g.nonempty());
                ch.rows.push_back({{"kappa", kappa}, {"annuli", g.radii.size()}, {"nonempty", g.nonempty()}});
            }
            for (std::size_t i = 1; i < sums.size(); ++i)
                for (std::size_t k = 0; k < times.size(); ++k)
                    ch.value = std::max(ch.value, relative(sums[i][k], sums[0][k]));
            ch.pass = ch.value <= ch.limit;
            ch.evidence = "max relative change of the block sum across kappa in {0.3, 0.5, 0.7}";
            checks.push_back(ch);
        }
        if (wanted("jets")) {
            Check ch{"jets", true, 0.0, tol.jet, ""};
            const double t = times.empty() ? 1.0 : times.front();
            for (std::size_t q = 0; q < problem.op.eigenvalues().size(); ++q) {
                const cplx mu = problem.op.eigenvalues()[q];
                const Jet j = jet_of_exp_neg_phi_alpha(problem.phi, problem.alpha, t, mu, 3);
                auto g = [&](cplx z) { return std::exp(-phi_alpha(problem.phi, problem.alpha, 1.0 / z) * t); };
                double fact = 1.0;
                ordered_json row = {{"eigenvalue", complex_json(mu)}};
                for (int m = 1; m <= 3; ++m) {
                    fact *= m;
                    const cplx fd = fd_derivative(g, mu, m, 0.02 * std::abs(mu)) / fact;
                    const double d = std::abs(j[static_cast<std::size_t>(m)] - fd) /
                                     std::max(std::abs(j[static_cast<std::size_t>(m)]), 1e-300);
                    ch.value = std::max(ch.value, d);
                    row["m" + std::to_string(m)] = d;
                }
                ch.rows.push_back(row);
            }
            ch.pass = ch.value <= ch.limit;
            ch.evidence = "jet coefficients against 5-point differences, m = 1..3, t = " + g17(t);
            checks.push_back(ch);
        }
    } catch (const Error& e) {
        o.exit_code = exit_for(e);
        o.report["error"] = error_json(e);
    }
    ordered_json rows = ordered_json::array();
    std::size_t passed = 0;
    for (const auto& ch : checks) {
        rows.push_back(ch.json());
        passed += ch.pass ? 1 : 0;
    }
    o.report["checks"] = rows;
    o.report["passed"] = passed;
    o.report["total"] = checks.size();
    if (o.exit_code == Ok && passed != checks.size()) o.exit_code = VerificationFailure;
    finish(o);
    return o;
}

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + p.string());
    out << text;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fractional evolution equations with root-vector series"};
    app.require_subcommand(1);
    Options opt;
    std::string checks;
    for (const char* name : {"analyze", "solve", "verify"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("config", opt.config, "JSON problem configuration")->required();
        sub->add_flag("--force", opt.force, "run even when the hypothesis audit fails");
        sub->add_option("--out", opt.out, "output directory");
        if (std::string(name) == "verify") {
            sub->add_option("--checks", checks, "comma-separated subset of checks");
            sub->add_flag("--corrupt", opt.corrupt, "scale the solution exponent by 1.01");
        }
        if (std::string(name) == "solve") sub->add_flag("--corrupt", opt.corrupt, "scale the solution exponent by 1.01");
        sub->callback([&opt, name] { opt.command = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Ok;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return ConfigFailure;
    }
    if (!checks.empty()) {
        std::stringstream ss(checks);
        for (std::string item; std::getline(ss, item, ',');)
            if (!item.empty()) opt.checks.push_back(item);
    }

    config::ProblemConfig cfg;
    try {
        cfg = config::load(opt.config);
        if ((opt.command == "solve" || opt.command == "verify") && !(cfg.op && cfg.equation))
            throw Error(ErrorCode::ConfigError, std::string(cfg.op ? "equation" : "operator") + ": required key is missing");
    } catch (const Error& e) {
        err << e.what() << "\n";
        return exit_for(e);
    }

    std::filesystem::path dir = cfg.output.dir;
    if (const char* env = std::getenv(kOutEnv); env && *env) dir = env;
    if (opt.out) dir = *opt.out;

    Outcome result;
    std::string csv;
    if (opt.command == "analyze") {
        result = analyze(cfg);
        if (result.report.contains("indicator") && result.report["indicator"].contains("csv")) {
            csv = result.report["indicator"]["csv"].get<std::string>();
            result.report["indicator"].erase("csv");
            result.report["indicator"]["file"] = cfg.output.indicator;
        }
    } else if (opt.command == "solve") {
        result = solve(cfg, opt, &csv);
        if (!csv.empty()) result.report["trajectory"] = cfg.output.trajectory;
    } else {
        result = verify(cfg, opt);
    }

    try {
        std::filesystem::create_directories(dir);
        write_file(dir / cfg.output.report, result.report.dump(2) + "\n");
        if (!csv.empty())
            write_file(dir / (opt.command == "analyze" ? cfg.output.indicator : cfg.output.trajectory), csv);
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return ConfigFailure;
    }

    if (result.report.contains("error"))
        err << result.report["error"]["message"].get<std::string>() << "\n";
    out << opt.command << ": " << result.report["status"].get<std::string>();
    if (opt.command == "verify")
        out << " (" << result.report["passed"].get<std::size_t>() << "/" << result.report["total"].get<std::size_t>()
            << " checks passed)";
    out << "; report " << (dir / cfg.output.report).string() << "\n";
    return result.exit_code;
}

} // namespace fracevo::cli
