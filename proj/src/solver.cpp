#include "fracevo/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace fracevo {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

std::string fmt(cplx z) { return "(" + fmt(z.real()) + ", " + fmt(z.imag()) + ")"; }

double wrap_pi(double a) {
    a = std::fmod(a + kPi, 2.0 * kPi);
    if (a < 0.0) a += 2.0 * kPi;
    return a - kPi;
}

// phi^alpha(1/zeta) as a jet at zeta = mu.
Jet exponent_jet(const EntireFunctionSpec& phi, double alpha, cplx mu, std::size_t order) {
    if (mu == cplx{}) fail(ErrorCode::InvalidArgument, "eigenvalue must be nonzero");
    const Jet lambda = reciprocal(Jet::variable(mu, order));
    const Jet lp = entire::log_product_jet(phi, lambda);
    const cplx l0 = lp.value();
    if (!std::isfinite(l0.real()) || !std::isfinite(l0.imag()))
        fail(ErrorCode::BranchCrossing, "phi vanishes at lambda = " + fmt(1.0 / mu));
    if (std::abs(l0.imag()) > kPi - 1e-12)
        fail(ErrorCode::BranchCrossing,
             "phi(lambda) lies on the negative axis at lambda = " + fmt(1.0 / mu) + "; phi^alpha is discontinuous there");
    if (alpha * l0.real() > 700.0)
        fail(ErrorCode::InvalidArgument, "phi^alpha overflows at lambda = " + fmt(1.0 / mu));
    return exp(lp * alpha);
}

bool in_closed_sector(double angle, const Sector& s) {
    const double mid = 0.5 * (s.theta0 + s.theta1), half = 0.5 * (s.theta1 - s.theta0);
    return std::abs(wrap_pi(angle - mid)) <= half;
}

bool is_polynomial(const EntireFunctionSpec& phi) { return phi.zeros.finite() && phi.zeros.complete(); }

} // namespace

Jet jet_of_exp_neg_phi_alpha(const EntireFunctionSpec& phi, double alpha, double t, cplx mu, std::size_t order) {
    return exp(exponent_jet(phi, alpha, mu, order) * (-t));
}

std::vector<cplx> h_coefficients(const EntireFunctionSpec& phi, double alpha, double t, cplx mu, std::size_t order) {
    Jet e = exponent_jet(phi, alpha, mu, order);
    e[0] = 0.0;
    return exp(e * (-t)).coefficients();
}

std::vector<cplx> coefficients(const SpectralOperator& op, const BiorthogonalSystem& biorth,
                               const EntireFunctionSpec& phi, double alpha, const Vec& f, double t,
                               std::size_t chain) {
    const auto& c = op.chains().at(chain);
    const std::size_t k = c.length - 1;
    std::vector<cplx> statics(c.length);
    bool zero = true;
    for (std::size_t i = 0; i <= k; ++i) {
        // (f, g_{q xi + k - i}) in the chain-reversed indexing
        statics[i] = inner(f, biorth.chain_dual.col(static_cast<Eigen::Index>(c.offset + k - i)));
        zero = zero && statics[i] == cplx{};
    }
    std::vector<cplx> out(c.length, cplx{});
    if (zero) return out;
    const Jet j = jet_of_exp_neg_phi_alpha(phi, alpha, t, op.eigenvalues()[c.eigenvalue], k);
    for (std::size_t i = 0; i <= k; ++i)
        for (std::size_t m = 0; i + m <= k; ++m) out[i] += j[m] * statics[i + m];
    return out;
}

std::size_t AnnulusGrouping::nonempty() const {
    return static_cast<std::size_t>(
        std::count_if(groups.begin(), groups.end(), [](const auto& g) { return !g.empty(); }));
}

AnnulusGrouping group_annuli(const SpectralOperator& op, double R, double kappa) {
    if (!(kappa > 0.0 && kappa < 1.0)) fail(ErrorCode::InvalidArgument, "kappa must lie in (0, 1)");
    if (!(R > 0.0)) fail(ErrorCode::InvalidArgument, "R must be positive");
    const auto lambdas = op.characteristic_numbers();
    double top = 0.0;
    for (const auto& l : lambdas) top = std::max(top, std::abs(l));
    if (R > op.min_characteristic_modulus() * (1.0 + 1e-12))
        fail(ErrorCode::InvalidArgument, "R must not exceed min |lambda_q|");

    AnnulusGrouping g;
    constexpr double nudge = 1e-9;
    for (double rho = R;; rho /= (1.0 - kappa)) {
        double b = rho;
        for (const auto& l : lambdas)
            if (std::abs(std::abs(l) - rho) <= nudge * rho) {
                b = rho * (1.0 - nudge);
                g.nudged = true;
            }
        g.radii.push_back(b);
        if (b > top) break;
    }
    g.groups.assign(g.radii.size(), {});
    for (std::size_t q = 0; q < lambdas.size(); ++q) {
        const double m = std::abs(lambdas[q]);
        // first boundary at or beyond |lambda_q|
        const auto it = std::lower_bound(g.radii.begin(), g.radii.end(), m);
        g.groups[static_cast<std::size_t>(it - g.radii.begin())].push_back(q);
    }
    return g;
}

AuditReport hypothesis_audit(const CauchyProblem& problem) {
    AuditReport rep;
    const auto& op = problem.op;
    const auto& phi = problem.phi;
    const auto& sector = op.sector();

    {
        AuditCheck c{"order", false, 0.0, 0.5, ""};
        if (is_polynomial(phi)) {
            c.pass = true;
            c.evidence = "phi is a polynomial (order 0)";
        } else {
            try {
                // a coarse product tail is enough for a growth fit
                EntireFunctionSpec coarse = phi;
                coarse.tail_tolerance = 1e-6;
                const auto radii = entire::radius_ladder(1e3, 6);
                const auto est = entire::order_type_estimate(coarse, radii, 90);
                c.value = est.order;
                c.pass = est.order + 0.02 < 0.5;
                c.evidence = "fitted order " + fmt(est.order) + " (type " + fmt(est.type) + ") needs < 0.5 with margin 0.02";
            } catch (const Error& e) {
                c.evidence = std::string("order estimate failed: ") + e.what();
            }
        }
        rep.checks.push_back(c);
    }
    {
        const auto lambdas = op.characteristic_numbers();
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (const auto& l : lambdas) {
            lo = std::min(lo, std::abs(l));
            hi = std::max(hi, std::abs(l));
        }
        rep.window = 2.0 * hi;
        AuditCheck c{"image", true, 0.0, kPi / (2.0 * problem.alpha), ""};
        constexpr int radii = 48, angles = 33;
        cplx worst{};
        try {
            for (int i = 0; i < radii; ++i) {
                const double r = 1e-3 * lo * std::pow(rep.window / (1e-3 * lo), i / double(radii - 1));
                for (int j = 0; j < angles; ++j) {
                    const double th = sector.theta0 + (sector.theta1 - sector.theta0) * j / double(angles - 1);
                    const cplx z = std::polar(r, th);
                    const double a = std::abs(log_phi(phi, z).imag());
                    if (a > c.value) {
                        c.value = a;
                        worst = z;
                    }
                }
            }
            c.pass = c.value < c.limit;
            c.evidence = "max |arg phi| = " + fmt(c.value) + " at lambda = " + fmt(worst) +
                         " over the sector window |lambda| <= " + fmt(rep.window) + "; needs < pi/(2 alpha) = " +
                         fmt(c.limit);
        } catch (const Error& e) {
            c.pass = false;
            c.evidence = std::string("phi^alpha undefined in the window: ") + e.what();
        }
        rep.checks.push_back(c);
    }
    {
        AuditCheck c{"zeros", true, 0.0, 0.0, ""};
        std::size_t bad = 0;
        cplx example{};
        if (phi.zeros.finite()) {
            for (const auto& a : phi.zeros.values())
                if (in_closed_sector(std::arg(a), sector)) {
                    if (bad++ == 0) example = a;
                }
        } else {
            for (double a : phi.zeros.angles())
                if (in_closed_sector(a, sector)) {
                    if (bad++ == 0) example = std::polar(1.0, a);
                }
        }
        c.value = static_cast<double>(bad);
        c.pass = bad == 0;
        c.evidence = bad == 0 ? "no zero of phi lies in the closed sector"
                              : std::to_string(bad) + " zero direction(s) inside the sector, e.g. arg " +
                                    fmt(std::arg(example));
        rep.checks.push_back(c);
    }
    {
        const auto nr = numerical_range_sector(op);
        AuditCheck c{"numerical_range", nr.pass, nr.half_angle, std::max(nr.theta1, -nr.theta0), nr.verdict};
        c.evidence = nr.verdict + "; sampled arg range [" + fmt(nr.min_arg) + ", " + fmt(nr.max_arg) + "] vs (" +
                     fmt(nr.theta0) + ", " + fmt(nr.theta1) + ")";
        rep.checks.push_back(c);
    }
    rep.checks.push_back({"schatten", true, static_cast<double>(op.dimension()), 0.0,
                          "finite rank N = " + std::to_string(op.dimension()) + ", in every Schatten class"});
    for (const auto& c : rep.checks) rep.pass = rep.pass && c.pass;
    return rep;
}

SeriesEvaluator::SeriesEvaluator(const CauchyProblem& problem, const AnnulusGrouping& grouping)
    : alpha_(problem.alpha), basis_(problem.op.basis()) {
    const auto& op = problem.op;
    const auto biorth = biorthogonal(op);
    std::vector<std::size_t> order(op.eigenvalues().size(), 0);
    for (const auto& c : op.chains()) order[c.eigenvalue] = std::max(order[c.eigenvalue], c.length - 1);
    std::vector<std::size_t> mode_of(op.eigenvalues().size());
    for (std::size_t q = 0; q < op.eigenvalues().size(); ++q) {
        Jet e = exponent_jet(problem.phi, problem.alpha, op.eigenvalues()[q], order[q]) * problem.exponent_scale;
        const Jet root = exp(log_with_constant(e, std::log(e.value())) * (1.0 / problem.alpha));
        mode_of[q] = modes_.size();
        modes_.push_back({q, std::move(e), root});
    }
    for (const auto& c : op.chains()) {
        ChainData d{mode_of[c.eigenvalue], c.offset, std::vector<cplx>(c.length), true};
        const std::size_t k = c.length - 1;
        for (std::size_t i = 0; i <= k; ++i) {
            d.statics[i] = inner(problem.f, biorth.chain_dual.col(static_cast<Eigen::Index>(c.offset + k - i)));
            d.zero = d.zero && d.statics[i] == cplx{};
        }
        chains_.push_back(std::move(d));
    }
    groups_ = grouping.groups.size();
    group_of_mode_.assign(modes_.size(), 0);
    for (std::size_t nu = 0; nu < grouping.groups.size(); ++nu)
        for (std::size_t q : grouping.groups[nu]) group_of_mode_[mode_of[q]] = nu;
}

std::vector<cplx> SeriesEvaluator::chain_coefficients(const ChainData& c, double t, bool derivative) const {
    std::vector<cplx> out(c.statics.size(), cplx{});
    if (c.zero) return out;
    const Mode& m = modes_[c.mode];
    Jet j = exp(m.exponent * (-t));
    if (derivative) j = m.root * j;
    const std::size_t k = c.statics.size() - 1;
    for (std::size_t i = 0; i <= k; ++i)
        for (std::size_t s = 0; i + s <= k; ++s) out[i] += j[s] * c.statics[i + s];
    return out;
}

std::vector<Vec> SeriesEvaluator::blocks(double t) const {
    std::vector<Vec> out(groups_, Vec::Zero(basis_.rows()));
    for (const auto& c : chains_) {
        const auto coef = chain_coefficients(c, t, false);
        Vec& a = out[group_of_mode_[c.mode]];
        for (std::size_t i = 0; i < coef.size(); ++i)
            a += coef[i] * basis_.col(static_cast<Eigen::Index>(c.offset + i));
    }
    return out;
}

Vec SeriesEvaluator::operator()(double t) const {
    Vec u = Vec::Zero(basis_.rows());
    for (const auto& a : blocks(t)) u += a;
    return u;
}

std::vector<std::vector<cplx>> SeriesEvaluator::coefficient_table(double t) const {
    std::vector<std::vector<cplx>> out;
    for (const auto& c : chains_) out.push_back(chain_coefficients(c, t, false));
    return out;
}

Vec SeriesEvaluator::fractional_derivative(double t) const {
    std::vector<Vec> parts(groups_, Vec::Zero(basis_.rows()));
    for (const auto& c : chains_) {
        const auto coef = chain_coefficients(c, t, true);
        Vec& a = parts[group_of_mode_[c.mode]];
        for (std::size_t i = 0; i < coef.size(); ++i)
            a += coef[i] * basis_.col(static_cast<Eigen::Index>(c.offset + i));
    }
    Vec d = Vec::Zero(basis_.rows());
    for (const auto& a : parts) d += a;
    return d;
}

double SeriesEvaluator::min_decay_rate() const {
    double r = std::numeric_limits<double>::infinity();
    for (const auto& m : modes_) r = std::min(r, m.exponent.value().real());
    return r;
}

double SeriesEvaluator::max_decay_rate() const {
    double r = -std::numeric_limits<double>::infinity();
    for (const auto& m : modes_) r = std::max(r, m.exponent.value().real());
    return r;
}

double SeriesEvaluator::max_exponent_modulus() const {
    double r = 0.0;
    for (const auto& m : modes_) r = std::max(r, std::abs(m.exponent.value()));
    return r;
}

SolutionSeries solve(const CauchyProblem& problem) {
    if (!(problem.alpha >= 1.0)) fail(ErrorCode::InvalidArgument, "alpha must be at least 1");
    if (static_cast<std::size_t>(problem.f.size()) != problem.op.dimension())
        fail(ErrorCode::InvalidArgument, "initial vector has dimension " + std::to_string(problem.f.size()) +
                                             ", operator has " + std::to_string(problem.op.dimension()));
    for (std::size_t i = 0; i < problem.times.size(); ++i) {
        if (!(problem.times[i] >= 0.0)) fail(ErrorCode::InvalidArgument, "time points must be nonnegative");
        if (i > 0 && !(problem.times[i] > problem.times[i - 1]))
            fail(ErrorCode::InvalidArgument, "time grid must be strictly ascending");
    }
    SolutionSeries sol;
    sol.audit = hypothesis_audit(problem);
    sol.forced = problem.force;
    if (!sol.audit.pass && !problem.force) {
        std::string failed;
        for (const auto& c : sol.audit.checks)
            if (!c.pass) failed += (failed.empty() ? "" : "; ") + c.name + ": " + c.evidence;
        fail(ErrorCode::AuditFailed, failed);
    }
    const double R = problem.R > 0.0 ? problem.R : 0.9 * problem.op.min_characteristic_modulus();
    sol.grouping = group_annuli(problem.op, R, problem.kappa);
    sol.raw_pairings = biorthogonal(problem.op).raw_pairings;
    const SeriesEvaluator eval(problem, sol.grouping);
    sol.times = problem.times;
    for (double t : problem.times) {
        auto blocks = eval.blocks(t);
        Vec u = Vec::Zero(static_cast<Eigen::Index>(problem.op.dimension()));
        std::vector<double> norms;
        for (const auto& a : blocks) {
            u += a;
            norms.push_back(a.norm());
        }
        sol.u.push_back(std::move(u));
        sol.blocks.push_back(std::move(blocks));
        sol.block_norms.push_back(std::move(norms));
        sol.coefficients.push_back(eval.coefficient_table(t));
    }
    return sol;
}

UniquenessReport uniqueness_indicator(const CauchyProblem& problem, std::size_t samples, std::uint64_t seed) {
    UniquenessReport rep;
    rep.samples = samples;
    const Mat fw = phi_of_W_matrix(problem.op, problem.phi, 1e-12);
    const auto n = fw.rows();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    rep.min_sampled = std::numeric_limits<double>::infinity();
    rep.max_sampled = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < samples; ++s) {
        Vec x(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double re = g(rng);
            const double im = g(rng);
            x(i) = cplx{re, im};
        }
        x.normalize();
        const double v = inner(fw * x, x).real();
        rep.min_sampled = std::min(rep.min_sampled, v);
        rep.max_sampled = std::max(rep.max_sampled, v);
        if (v < 0.0) ++rep.negative;
    }
    const Mat h = 0.5 * (fw + fw.adjoint());
    rep.field_min = Eigen::SelfAdjointEigenSolver<Mat>(h).eigenvalues()(0);
    rep.note = "heuristic: samples Re(phi(W)x, x) only; the uniqueness hypothesis concerns the fractional "
               "composition and is not checked";
    return rep;
}

} // namespace fracevo
