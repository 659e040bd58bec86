// One PASS/FAIL line per acceptance criterion; exit status 1 when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fracevo/cli.hpp"
#include "fracevo/fractional.hpp"
#include "oracles.hpp"
#include "specimens.hpp"

using namespace fracevo;
using entire::EntireFunctionSpec;

namespace {

struct Case {
    std::string name;
    CauchyProblem problem;
};

Case make_case(std::string name, EntireFunctionSpec phi, double alpha, std::vector<cplx> mu,
               std::vector<std::size_t> lengths, double half_angle, std::uint64_t seed) {
    OperatorSpec spec;
    spec.eigenvalues = mu;
    for (std::size_t q = 0; q < mu.size(); ++q) spec.chains.push_back({q, lengths[q]});
    spec.basis.kind = BasisKind::SeededRandom;
    spec.basis.seed = seed;
    spec.basis.scale = 0.1;
    spec.basis.chain_scale = 0.1;
    spec.sector = {-half_angle, half_angle};
    auto op = SpectralOperator::assemble(spec);
    std::mt19937_64 rng(seed + 1000);
    std::normal_distribution<double> g;
    Vec f(static_cast<Eigen::Index>(op.dimension()));
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        const double re = g(rng);
        const double im = g(rng);
        f(i) = cplx{re, im};
    }
    CauchyProblem p{std::move(op), std::move(phi), alpha, std::move(f), {0.1, 0.5, 1.0, 5.0}};
    return {std::move(name), std::move(p)};
}

std::vector<Case> battery() {
    using specimen::identity;
    using specimen::negative_power;
    std::vector<Case> cs;
    cs.push_back(make_case("identity a=2 N=6", identity(), 2.0, {1.0, 1.2, cplx{1.4, 0.1}}, {1, 2, 3}, 0.5, 11));
    cs.push_back(make_case("identity a=3 N=8", identity(), 3.0, {1.0, 1.1, cplx{1.3, -0.05}, 1.5}, {3, 1, 2, 2},
                           0.4, 12));
    cs.push_back(make_case("-n^3 a=1.5 N=6", negative_power(3.0), 1.5, {1.0, cplx{1.2, 0.05}, 1.4}, {2, 1, 3}, 0.2, 13));
    cs.push_back(make_case("-n^4 a=2 N=10", negative_power(4.0), 2.0, {1.0, 1.1, 1.2, cplx{1.3, 0.05}, 1.5},
                           {1, 2, 3, 2, 2}, 0.2, 14));
    cs.push_back(make_case("-n^3 a=3 N=9", negative_power(3.0), 3.0, {1.3, 1.5, 1.7, 1.9}, {3, 3, 2, 1}, 0.15, 15));
    std::vector<cplx> mu;
    for (int q = 0; q < 10; ++q) mu.push_back(std::polar(1.0 + 0.05 * q, 0.03 * ((q % 3) - 1)));
    cs.push_back(make_case("identity a=1.5 N=20", identity(), 1.5, mu, {1, 2, 3, 1, 2, 3, 1, 2, 3, 2}, 0.5, 16));
    return cs;
}

double relative(const Vec& a, const Vec& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

int failures = 0;

void report(int id, const std::string& title, bool pass, const std::string& detail) {
    std::printf("%s %2d %s: %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

// Runs one criterion; a thrown library error counts as a failure with its message.
void criterion(int id, const std::string& title, const std::function<std::pair<bool, std::string>()>& body) {
    try {
        const auto [pass, detail] = body();
        report(id, title, pass, detail);
    } catch (const std::exception& e) {
        report(id, title, false, std::string("error: ") + e.what());
    }
}

// Test-side 5-point stencils with one Richardson step (order 4 for m = 1, 2; order 2 for m = 3).
cplx fd(const std::function<cplx(cplx)>& g, cplx z, int m, double h) {
    auto f = [&](double k, double s) { return g(z + k * s); };
    auto d = [&](double s) -> cplx {
        if (m == 1) return (-f(2, s) + 8.0 * f(1, s) - 8.0 * f(-1, s) + f(-2, s)) / (12.0 * s);
        if (m == 2) return (-f(2, s) + 16.0 * f(1, s) - 30.0 * f(0, s) + 16.0 * f(-1, s) - f(-2, s)) / (12.0 * s * s);
        return (f(2, s) - 2.0 * f(1, s) + 2.0 * f(-1, s) - f(-2, s)) / (2.0 * s * s * s);
    };
    const double gain = m == 3 ? 4.0 : 16.0;
    return (gain * d(0.5 * h) - d(h)) / (gain - 1.0);
}

} // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();
    const auto cases = battery();
    std::vector<SolutionSeries> solutions;
    bool audits = true;
    std::string audit_note;
    for (const auto& c : cases) {
        auto p = c.problem;
        const auto audit = hypothesis_audit(p);
        if (!audit.pass) {
            audits = false;
            audit_note += " [" + c.name + " audit failed]";
        }
        p.force = true;
        solutions.push_back(solve(p));
    }

    criterion(1, "oracle equivalence", [&]() -> std::pair<bool, std::string> {
        double worst = 0.0;
        std::string where;
        for (std::size_t i = 0; i < cases.size(); ++i) {
            const auto& p = cases[i].problem;
            const auto contour = build_contour(p.op, p.phi, p.alpha, p.times.front(), 1e-12);
            for (std::size_t k = 0; k < p.times.size(); ++k) {
                QuadratureOptions qo;
                qo.tol = 1e-12;
                const auto ref = semigroup_integral(p.op, p.phi, p.alpha, p.times[k], p.f, contour, qo);
                const double d = relative(solutions[i].u[k], ref.value);
                if (d > worst) {
                    worst = d;
                    where = cases[i].name + ", t = " + sci(p.times[k]);
                }
            }
        }
        return {audits && worst <= 1e-6, std::to_string(cases.size()) + " problems, max relative deviation " +
                                             sci(worst) + " at " + where + " (limit 1e-6)" + audit_note};
    });

    criterion(2, "equation residual", [&]() -> std::pair<bool, std::string> {
        double analytic = 0.0, numeric = 0.0;
        for (std::size_t i = 0; i < cases.size(); ++i)
            for (double t : cases[i].problem.times) {
                const auto r = equation_residual(cases[i].problem, solutions[i], t, 1e-7);
                analytic = std::max(analytic, r.analytic);
                numeric = std::max(numeric, r.numeric);
            }
        return {analytic <= 1e-8 && numeric <= 1e-4,
                "max mode-analytic " + sci(analytic) + " (limit 1e-8), max numeric " + sci(numeric) + " (limit 1e-4)"};
    });

    criterion(3, "initial condition", [&]() -> std::pair<bool, std::string> {
        bool ok = true;
        double worst = 0.0;
        std::string where;
        for (std::size_t i = 0; i < cases.size(); ++i) {
            const SeriesEvaluator eval(cases[i].problem, solutions[i].grouping);
            double prev = std::numeric_limits<double>::infinity();
            for (double t : {1e-1, 1e-2, 1e-3, 1e-4}) {
                const double d = relative(eval(t), cases[i].problem.f);
                ok = ok && d < prev;
                prev = d;
            }
            if (prev > worst) {
                worst = prev;
                where = cases[i].name;
            }
        }
        return {ok && worst <= 1e-3, std::string(ok ? "decreasing" : "NOT decreasing") +
                                         " on every problem; max deviation at t = 1e-4: " + sci(worst) + " (" + where +
                                         ", limit 1e-3)"};
    });

    criterion(4, "beta_k vanishing", [&]() -> std::pair<bool, std::string> {
        struct Spec {
            EntireFunctionSpec phi;
            double alpha;
            double half_angle;
        };
        double worst = 0.0;
        const std::vector<double> ts{0.1, 1.0, 10.0};
        for (const auto& s : {Spec{specimen::identity(), 2.0, 0.5}, Spec{specimen::negative_power(3.0), 1.5, 0.2},
                              Spec{specimen::negative_power(4.0), 2.0, 0.2}}) {
            const auto op = SpectralOperator::assemble(specimen::diagonal({1.0, 0.5}, s.half_angle));
            const auto contour = build_contour(op, s.phi, s.alpha, 0.1, 1e-10);
            QuadratureOptions qo;
            qo.tol = 1e-8;
            for (const auto& row : beta_table(s.phi, s.alpha, ts, contour, 8, qo))
                for (const auto& b : row) worst = std::max(worst, std::abs(b.value));
        }
        return {worst <= 1e-8, "k = 0..8, t in {0.1, 1, 10}, three specimens: max |beta_k| " + sci(worst) + " (limit 1e-8)"};
    });

    criterion(5, "indicator asymptotics", [&]() -> std::pair<bool, std::string> {
        const auto zeros = entire::ZeroSequence::power(oracle::pi * oracle::pi, 2.0, -0.5);
        EntireFunctionSpec cs;
        cs.zeros = zeros;
        const auto delta = entire::density_of_zeros(zeros, entire::ProximateOrder{0.5, 0.0});
        const double r = 1e6;
        double worst = 0.0, worst_product = 0.0;
        for (double psi : {-5 * oracle::pi / 6, -oracle::pi / 2, -oracle::pi / 6, oracle::pi / 6, oracle::pi / 2,
                           5 * oracle::pi / 6}) {
            const cplx z = std::polar(r, psi);
            const double h = entire::indicator_H(0.5, delta, psi);
            worst = std::max(worst, std::abs(oracle::log_abs_cos_sqrt(z) / std::sqrt(r) - h));
            worst = std::max(worst, std::abs(h - std::sin(std::abs(psi) / 2.0)));
            worst_product = std::max(worst_product, std::abs(entire::principal_log(cs, z).real() / std::sqrt(r) - h));
        }
        return {worst <= 0.05 && worst_product <= 0.05, "r = 1e6, six angles: closed form vs H " + sci(worst) +
                                                            ", canonical product vs H " + sci(worst_product) + " (limit 0.05)"};
    });

    criterion(6, "indicator positivity", [&]() -> std::pair<bool, std::string> {
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> angle(0.0, 2.0 * oracle::pi), mass(0.0, 1.0);
        std::size_t checked = 0, negative = 0;
        double lowest = std::numeric_limits<double>::infinity();
        for (double rho : {0.1, 0.25, 0.5})
            for (int s = 0; s < 50; ++s) {
                const int knots = 1 + static_cast<int>(rng() % 6);
                std::vector<double> angles;
                for (int k = 0; k < knots; ++k) angles.push_back(angle(rng));
                std::sort(angles.begin(), angles.end());
                std::vector<entire::AngularDensity::Knot> ks;
                double cumulative = 0.0;
                for (double a : angles) {
                    cumulative += mass(rng);
                    ks.push_back({a, cumulative});
                    if (rng() % 3 == 0) {  // a jump at this angle
                        cumulative += mass(rng);
                        ks.push_back({a, cumulative});
                    }
                }
                const auto delta = entire::AngularDensity::from_knots(ks);
                const auto rep = entire::check_indicator_positivity(rho, delta, 181);
                ++checked;
                negative += rep.nonnegative ? 0 : 1;
                lowest = std::min(lowest, rep.min_value / (delta.total_mass()));
            }
        return {negative == 0, std::to_string(checked) + " random densities, " + std::to_string(negative) +
                                   " with negative H; min H / mass " + sci(lowest)};
    });

    criterion(7, "ray lower bound exponent", [&]() -> std::pair<bool, std::string> {
        std::vector<double> radii;
        for (int i = 0; i <= 12; ++i) radii.push_back(std::pow(10.0, 3.0 + 0.25 * i));
        const auto rep = entire::lower_bound_on_ray(specimen::negative_power(3.0), 0.0, 0.5, radii);
        const double e = rep.empirical_exponent;
        return {std::abs(e - 1.0 / 3.0) <= 0.05, "zeros -n^3, theta = 0, r in [1e3, 1e6]: exponent " + sci(e) +
                                                     " vs 1/3 (+-0.05)"};
    });

    criterion(8, "growth recovery", [&]() -> std::pair<bool, std::string> {
        EntireFunctionSpec cs;
        cs.zeros = entire::ZeroSequence::power(oracle::pi * oracle::pi, 2.0, -0.5);
        const auto c = entire::order_type_estimate(cs, entire::radius_ladder(1e3, 7), 360);
        bool ok = std::abs(c.order - 0.5) <= 0.05 && std::abs(c.type - 1.0) <= 0.05;
        std::string detail = "cos sqrt z: (" + sci(c.order) + ", " + sci(c.type) + ")";
        for (double e : {4.0, 3.0}) {
            const auto p = entire::order_type_estimate(specimen::negative_power(e), entire::radius_ladder(1e4, 6), 90);
            ok = ok && std::abs(p.order - 1.0 / e) <= 0.05;
            detail += "; zeros -n^" + sci(e) + ": order " + sci(p.order) + " vs " + sci(1.0 / e);
        }
        return {ok, detail + " (+-0.05)"};
    });

    criterion(9, "jet coefficients", [&]() -> std::pair<bool, std::string> {
        double fd_worst = 0.0, h1_worst = 0.0;
        bool h0 = true;
        const std::vector<EntireFunctionSpec> phis{specimen::identity(), specimen::negative_power(3.0),
                                                   specimen::negative_power(4.0), specimen::polynomial({-2.0, -3.0})};
        for (std::size_t i = 0; i < phis.size(); ++i)
            for (double alpha : {1.5, 2.0, 3.0})
                for (cplx mu : {cplx{0.9, 0.05}, cplx{0.6, 0.0}})
                    for (double t : {0.3, 1.0}) {
                        const auto& phi = phis[i];
                        const Jet j = jet_of_exp_neg_phi_alpha(phi, alpha, t, mu, 3);
                        const auto H = h_coefficients(phi, alpha, t, mu, 3);
                        h0 = h0 && H[0] == cplx{1.0};
                        auto g = [&](cplx z) { return std::exp(-phi_alpha(phi, alpha, 1.0 / z) * t); };
                        // step short against the scale on which ln g varies
                        const double dz = 1e-4 * std::abs(mu);
                        const double slope =
                            t * std::abs(phi_alpha(phi, alpha, 1.0 / (mu + dz)) - phi_alpha(phi, alpha, 1.0 / (mu - dz))) /
                            (2.0 * dz);
                        const double h = std::min(0.02 * std::abs(mu), 0.02 / slope);
                        double fact = 1.0;
                        for (int m = 1; m <= 3; ++m) {
                            fact *= m;
                            const cplx ref = fd(g, mu, m, h) / fact;
                            fd_worst = std::max(fd_worst, std::abs(j[static_cast<std::size_t>(m)] - ref) / std::abs(ref));
                        }
                        if (phi.zeros.finite()) {
                            // H_1 = t lambda^2 (phi^alpha)'(lambda), with phi and phi' in closed form
                            const cplx lambda = 1.0 / mu;
                            cplx p = 1.0, dp = 0.0;
                            if (phi.multiplicity == 1) {
                                p = lambda;
                                dp = 1.0;
                            } else {
                                p = (1.0 + lambda / 2.0) * (1.0 + lambda / 3.0);
                                dp = (1.0 + lambda / 3.0) / 2.0 + (1.0 + lambda / 2.0) / 3.0;
                            }
                            const cplx h1 = t * lambda * lambda * alpha * std::pow(p, alpha - 1.0) * dp;
                            h1_worst = std::max(h1_worst, std::abs(H[1] - h1) / std::abs(h1));
                        }
                    }
        return {fd_worst <= 1e-5 && h0 && h1_worst <= 1e-10,
                "m <= 3 vs 5-point differences " + sci(fd_worst) + " (limit 1e-5); H_0 = 1 " + (h0 ? "exactly" : "VIOLATED") +
                    "; H_1 closed form " + sci(h1_worst) + " (limit 1e-10)"};
    });

    criterion(10, "regrouping invariance", [&]() -> std::pair<bool, std::string> {
        double worst = 0.0;
        std::size_t changed = 0;
        for (const auto& c : cases) {
            const auto& p = c.problem;
            const double R = 0.9 * p.op.min_characteristic_modulus();
            std::vector<AnnulusGrouping> groupings;
            std::vector<std::vector<Vec>> sums;
            for (double kappa : {0.3, 0.5, 0.7}) {
                groupings.push_back(group_annuli(p.op, R, kappa));
                const SeriesEvaluator e(p, groupings.back());
                std::vector<Vec> s;
                for (double t : p.times) s.push_back(e(t));
                sums.push_back(std::move(s));
            }
            if (groupings[0].groups != groupings[1].groups || groupings[1].groups != groupings[2].groups) ++changed;
            for (std::size_t i = 1; i < sums.size(); ++i)
                for (std::size_t k = 0; k < p.times.size(); ++k) worst = std::max(worst, relative(sums[i][k], sums[0][k]));
        }
        return {worst <= 1e-10 && changed > 0, "groupings differ on " + std::to_string(changed) + "/" +
                                                   std::to_string(cases.size()) + " problems; max relative change " +
                                                   sci(worst) + " (limit 1e-10)"};
    });

    criterion(11, "determinism", [&]() -> std::pair<bool, std::string> {
        namespace fs = std::filesystem;
        const auto cfg = (fs::path(FRACEVO_SOURCE_DIR) / "configs" / "diag_alpha2.json").string();
        std::vector<std::string> reports;
        for (int i = 0; i < 2; ++i) {
            const auto dir = fs::temp_directory_path() / ("fracevo_acceptance_" + std::to_string(i));
            fs::remove_all(dir);
            const std::string d = dir.string();
            const char* argv[] = {"fracevo", "verify", cfg.c_str(), "--out", d.c_str()};
            std::ostringstream out, err;
            const int code = cli::run(5, argv, out, err);
            if (code != 0) return {false, "verify exited with " + std::to_string(code)};
            std::ifstream in(dir / "report.json", std::ios::binary);
            reports.emplace_back(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
        }
        const bool same = reports[0] == reports[1] && !reports[0].empty();
        return {same, "two verify runs on the demo config: reports " + std::string(same ? "byte-identical" : "DIFFER") +
                          " (" + std::to_string(reports[0].size()) + " bytes)"};
    });

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%d failing criteria, %.1f s\n", failures, secs);
    return failures == 0 ? 0 : 1;
}
