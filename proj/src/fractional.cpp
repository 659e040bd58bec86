#include "fracevo/fractional.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "fracevo/quadrature.hpp"

namespace fracevo {

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

// |u(t)| allowed above the envelope before it counts as a violation
constexpr double kEnvelopeSlack = 1e-9;

} // namespace

double Envelope::operator()(double t) const { return scale * std::exp(-rate * t); }

TrajectorySampler::TrajectorySampler(Fn fn, Envelope envelope, double t_min, double t_max, double time_scale)
    : fn_(std::move(fn)), envelope_(envelope), t_min_(t_min), t_max_(t_max), time_scale_(time_scale) {
    if (!fn_) fail(ErrorCode::InvalidArgument, "sampler needs a callable");
    if (!(t_max_ > t_min_)) fail(ErrorCode::InvalidArgument, "empty validity interval");
    if (!(envelope_.scale >= 0.0) || !std::isfinite(envelope_.rate))
        fail(ErrorCode::InvalidArgument, "envelope must have finite rate and nonnegative scale");
    if (time_scale_ <= 0.0) time_scale_ = envelope_.rate > 0.0 ? 1.0 / envelope_.rate : 1.0;
}

Vec TrajectorySampler::operator()(double t) const {
    if (!(t >= t_min_ && t <= t_max_))
        fail(ErrorCode::InvalidArgument, "t = " + fmt(t) + " outside the validity interval [" + fmt(t_min_) + ", " +
                                             fmt(t_max_) + "]");
    Vec v = fn_(t);
    const double n = v.norm();
    if (!std::isfinite(n)) fail(ErrorCode::EnvelopeViolated, "non-finite sample at t = " + fmt(t));
    const double bound = envelope_(t);
    if (n > bound * (1.0 + kEnvelopeSlack) + 1e-300)
        fail(ErrorCode::EnvelopeViolated,
             "||u(" + fmt(t) + ")|| = " + fmt(n) + " exceeds the envelope value " + fmt(bound));
    return v;
}

Envelope fit_envelope(const TrajectorySampler::Fn& fn, double rate, double horizon, std::size_t samples) {
    if (!(horizon > 0.0) || samples < 2) fail(ErrorCode::InvalidArgument, "envelope fit needs a positive horizon");
    double m = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double t = horizon * static_cast<double>(i) / static_cast<double>(samples - 1);
        m = std::max(m, fn(t).norm() * std::exp(rate * t));
    }
    return {2.0 * m, rate};
}

TrajectorySampler series_sampler(const SeriesEvaluator& eval) {
    const double slow = eval.min_decay_rate();
    if (!(slow > 0.0))
        fail(ErrorCode::NonDecaying, "slowest mode has Re phi^alpha = " + fmt(slow) + " <= 0");
    const double rate = 0.5 * slow;
    auto fn = [&eval](double t) { return eval(t); };
    // t^k e^{-2 rate t} peaks against e^{-rate t} at t = k / rate; 40 / rate covers chains far longer than used
    const Envelope env = fit_envelope(fn, rate, 40.0 / rate);
    return TrajectorySampler(fn, env, 0.0, std::numeric_limits<double>::infinity(),
                             1.0 / eval.max_exponent_modulus());
}

cplx rl_mode_identity(cplx w, double alpha, double t) {
    if (!(alpha > 1.0)) fail(ErrorCode::InvalidArgument, "the mode identity needs alpha > 1");
    if (!(w.real() > 0.0)) fail(ErrorCode::NonDecaying, "Re w = " + fmt(w.real()) + " <= 0");
    return std::pow(w, 1.0 / alpha) * std::exp(-w * t);
}

namespace {

struct Inner {
    Vec value;
    double error;
};

// int_0^X u(tau + x) x^{-xi} dx: s = x^{1/beta} on [0, x0], then panels doubling in length.
Inner inner_integral(const TrajectorySampler& u, double xi, double tau, double X, double abs_tol) {
    const double beta = 1.0 / (1.0 - xi);
    const double x0 = std::min(u.time_scale(), X);
    std::vector<double> cuts{x0};
    while (cuts.back() < X) cuts.push_back(std::min(2.0 * cuts.back(), X));
    const double share = abs_tol / static_cast<double>(cuts.size());

    const auto head = quad::gauss_kronrod(
        [&](double s) -> Vec { return beta * u(tau + std::pow(s, beta)); },
        0.0, std::pow(x0, 1.0 / beta), share, 1e-15);
    Inner out{head.value, head.error};
    for (std::size_t i = 1; i < cuts.size(); ++i) {
        const auto piece = quad::gauss_kronrod(
            [&](double x) -> Vec { return std::pow(x, -xi) * u(tau + x); }, cuts[i - 1], cuts[i], share, 1e-15);
        out.value += piece.value;
        out.error += piece.error;
    }
    return out;
}

// smallest X (on a doubling ladder refined by bisection) with the envelope tail below target
double truncation_point(const Envelope& env, double xi, double tau, double target) {
    const double g = env.rate;
    auto log_tail = [&](double X) {
        return std::log(std::max(env.scale, 1e-300)) - g * tau - xi * std::log(X) - g * X - std::log(g);
    };
    const double lt = std::log(target);
    double hi = 1.0 / g;
    while (log_tail(hi) > lt) {
        hi *= 2.0;
        if (hi > 1e8 / g) fail(ErrorCode::EnvelopeViolated, "envelope tail does not fall below tolerance");
    }
    double lo = 0.0;
    for (int i = 0; i < 40; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid > 0.0 && log_tail(mid) <= lt) hi = mid;
        else lo = mid;
    }
    return hi;
}

} // namespace

RLResult rl_derivative_numeric(const TrajectorySampler& u, double alpha, double t, double tol) {
    if (!(alpha >= 1.0)) fail(ErrorCode::InvalidArgument, "alpha must be at least 1");
    if (!(tol > 0.0)) fail(ErrorCode::InvalidArgument, "tolerance must be positive");
    if (!(t > u.t_min() && t < u.t_max())) fail(ErrorCode::InvalidArgument, "t must be interior to the validity interval");
    const bool first_order = alpha == 1.0;   // D^1 = -d/dt
    const double xi = 1.0 / alpha;
    if (!first_order && !(u.envelope().rate > 0.0))
        fail(ErrorCode::EnvelopeViolated, "envelope gives no decay; the integral over (t, inf) cannot be truncated");
    const double gamma_c = first_order ? 1.0 : std::tgamma(1.0 - xi);

    const double size = std::max(u(t).norm(), 1e-300);
    // target on the absolute error of D: the slowest modes carry at least rate^xi * ||u||
    const double target = 0.1 * tol * size * std::min(1.0, std::pow(std::max(u.envelope().rate, 1e-300), xi));
    double h = std::min(0.25 * (t - u.t_min()), 0.5 * u.time_scale());
    if (std::isfinite(u.t_max())) h = std::min(h, 0.25 * (u.t_max() - t));
    const double h_min = h / 64.0;

    RLResult res;
    if (!first_order) res.truncation = truncation_point(u.envelope(), xi, t - 2.0 * h, target * h_min / (1.5 * gamma_c));
    const double inner_tol = target * h_min / (20.0 * gamma_c);

    std::map<double, Inner> cache;
    auto I = [&](double tau) -> const Inner& {
        auto it = cache.find(tau);
        if (it != cache.end()) return it->second;
        Inner v = first_order ? Inner{u(tau), 0.0} : inner_integral(u, xi, tau, res.truncation, inner_tol);
        return cache.emplace(tau, std::move(v)).first->second;
    };
    auto five_point = [&](double step, double& err) {
        const Inner& a = I(t - 2.0 * step);
        const Inner& b = I(t - step);
        const Inner& c = I(t + step);
        const Inner& d = I(t + 2.0 * step);
        err = (a.error + 8.0 * b.error + 8.0 * c.error + d.error) / (12.0 * step);
        return Vec((a.value - 8.0 * b.value + 8.0 * c.value - d.value) / (12.0 * step));
    };

    // Richardson on the h^4 leading term; successive extrapolants give the estimate
    double qerr_prev = 0.0, qerr = 0.0;
    Vec prev = five_point(h, qerr_prev);
    Vec best_ext;
    double best = std::numeric_limits<double>::infinity();
    for (double step = 0.5 * h; step >= h_min; step *= 0.5) {
        Vec cur = five_point(step, qerr);
        Vec ext = (16.0 * cur - prev) / 15.0;
        if (best_ext.size() > 0) {
            const double est = (ext - best_ext).norm() + qerr;
            const double trunc = first_order ? 0.0 : 1.5 * target * h_min / (1.5 * gamma_c) / step;
            const double total = est + trunc;
            res.value = -ext / gamma_c;
            res.error = total / gamma_c;
            res.step = step;
            if (res.error <= tol * res.value.norm()) return res;
            if (total > best) break;   // roundoff has taken over
            best = total;
        }
        best_ext = ext;
        prev = std::move(cur);
    }
    fail(ErrorCode::ToleranceNotMet, "fractional derivative error estimate " + fmt(res.error) + " exceeds " +
                                         fmt(tol * res.value.norm()) + " at t = " + fmt(t));
}

ResidualReport equation_residual(const CauchyProblem& problem, const SolutionSeries& solution, double t,
                                 double numeric_tol) {
    if (!(t > 0.0)) fail(ErrorCode::InvalidArgument, "residuals are evaluated at t > 0 only");
    const SeriesEvaluator eval(problem, solution.grouping);
    const Vec u = eval(t);
    const Vec fw = phi_of_W_series(problem.op, problem.phi, u, 1e-15 * std::max(u.norm(), 1e-300)).value;
    ResidualReport rep;
    rep.t = t;
    rep.reference = fw.norm();
    const double ref = std::max(rep.reference, 1e-300);
    rep.analytic = (eval.fractional_derivative(t) - fw).norm() / ref;
    const auto num = rl_derivative_numeric(series_sampler(eval), problem.alpha, t, numeric_tol);
    rep.numeric = (num.value - fw).norm() / ref;
    rep.numeric_error = num.error / ref;
    return rep;
}

} // namespace fracevo
