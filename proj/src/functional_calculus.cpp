#include "fracevo/functional_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "fracevo/quadrature.hpp"

namespace fracevo {

namespace {

constexpr double kPi = 3.14159265358979323846;
const cplx kI{0.0, 1.0};

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

// ln Re phi^alpha, -inf when Re phi^alpha <= 0.
double log_re_phi_alpha(const EntireFunctionSpec& phi, double alpha, cplx lambda) {
    const cplx lp = alpha * log_phi(phi, lambda);
    const double c = std::cos(lp.imag());
    if (c <= 0.0) return -std::numeric_limits<double>::infinity();
    return lp.real() + std::log(c);
}

// e^{-t phi^alpha} from ln phi; exact zero once the decay is below the underflow limit.
cplx decay_factor(cplx lphi, double alpha, double t, cplx lambda) {
    const cplx lp = alpha * lphi;
    if (lp.real() > 700.0) {
        if (std::cos(lp.imag()) > 0.0) return 0.0;
        fail(ErrorCode::NoDecay, "Re phi^alpha is not positive at lambda = " + fmt(lambda));
    }
    const cplx e = -t * std::exp(lp);
    if (e.real() < -745.0) return 0.0;
    if (e.real() > 700.0) fail(ErrorCode::NoDecay, "e^{-phi^alpha t} overflows at lambda = " + fmt(lambda));
    return std::exp(e);
}

enum class PieceKind { Ray, Arc };

struct Piece {
    PieceKind kind;
    double fixed;              // ray: angle; arc: radius
    std::vector<double> mesh;  // ray: log-radius breakpoints; arc: angle breakpoints
};

void add_graded(std::vector<double>& pts, double centre, double delta, double grading, double lo, double hi) {
    if (!(delta > 0.0)) return;
    for (double w = delta; w < 1.0; w *= grading) {
        pts.push_back(std::clamp(centre - w, lo, hi));
        pts.push_back(std::clamp(centre + w, lo, hi));
    }
    pts.push_back(std::clamp(centre, lo, hi));
}

std::vector<double> finish_mesh(std::vector<double> pts, double lo, double hi, std::size_t uniform) {
    for (std::size_t i = 0; i <= uniform; ++i)
        pts.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(uniform));
    std::sort(pts.begin(), pts.end());
    std::vector<double> out;
    const double eps = 1e-12 * std::max(1.0, hi - lo);
    for (double p : pts)
        if (out.empty() || p - out.back() > eps) out.push_back(p);
    out.back() = hi;
    out.front() = lo;
    return out;
}

Piece ray_piece(const Contour& c, double theta) {
    const double lo = std::log(c.r), hi = std::log(c.r_max);
    std::vector<double> pts;
    for (const auto& p : c.poles) {
        const double delta = std::abs(wrap_pi(std::arg(p) - theta));
        add_graded(pts, std::log(std::abs(p)), delta, c.grading, lo, hi);
    }
    return {PieceKind::Ray, theta, finish_mesh(std::move(pts), lo, hi, c.ray_panels)};
}

Piece arc_piece(const Contour& c, double radius, bool grade) {
    std::vector<double> pts;
    if (grade)
        for (const auto& p : c.poles) {
            const double a = std::arg(p);
            if (a > c.theta0 && a < c.theta1) pts.push_back(a);
        }
    return {PieceKind::Arc, radius, finish_mesh(std::move(pts), c.theta0, c.theta1, c.arc_panels)};
}

// Integrates e^{-phi^alpha t_j} w(lambda) x(lambda) d lambda over one piece for all t_j.
// `core` returns x(lambda) and is skipped where every decay factor vanishes.
struct PieceIntegrator {
    const EntireFunctionSpec& phi;
    double alpha;
    std::span<const double> times;
    const std::function<Vec(cplx)>& core;
    const ContourWeight& weight;
    Eigen::Index dim;
    std::size_t nodes = 0;

    std::vector<Vec> run(const Piece& piece, std::size_t split) {
        const auto& rule = quad::gauss_legendre(16);
        std::vector<Vec> acc(times.size(), Vec::Zero(dim));
        std::vector<cplx> decay(times.size());
        double prev_arg = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t p = 0; p + 1 < piece.mesh.size(); ++p) {
            const double a = piece.mesh[p], b = piece.mesh[p + 1];
            const double h = (b - a) / static_cast<double>(split);
            for (std::size_t s = 0; s < split; ++s) {
                const double c = a + h * (static_cast<double>(s) + 0.5);
                for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                    const double u = c + 0.5 * h * rule.nodes[i];
                    cplx lambda, dl;
                    if (piece.kind == PieceKind::Ray) {
                        lambda = std::polar(std::exp(u), piece.fixed);
                        dl = lambda;
                    } else {
                        lambda = std::polar(piece.fixed, u);
                        dl = kI * lambda;
                    }
                    const cplx lphi = log_phi(phi, lambda);
                    if (!std::isnan(prev_arg) && std::abs(lphi.imag() - prev_arg) > kPi)
                        fail(ErrorCode::BranchCrossing,
                             "arg phi jumps across the negative axis near lambda = " + fmt(lambda));
                    prev_arg = lphi.imag();
                    bool any = false;
                    for (std::size_t j = 0; j < times.size(); ++j) {
                        decay[j] = decay_factor(lphi, alpha, times[j], lambda);
                        any = any || decay[j] != cplx{};
                    }
                    if (!any) continue;
                    const cplx w = (weight ? weight(lambda, lphi) : cplx{1.0}) * dl * (0.5 * h * rule.weights[i]);
                    const Vec x = core(lambda);
                    ++nodes;
                    for (std::size_t j = 0; j < times.size(); ++j)
                        if (decay[j] != cplx{}) acc[j] += (decay[j] * w) * x;
                }
            }
        }
        return acc;
    }
};

struct ClosedResult {
    std::vector<Vec> value;  // -(ray0 - ray1 - arc), no 1/(2 pi i)
    std::vector<Vec> far;    // closing arc at r_max, theta0 -> theta1
    std::vector<double> tail;
    std::vector<std::vector<double>> diffs;
    std::size_t rounds = 0;
    std::size_t nodes = 0;
};

ClosedResult integrate_closed(const EntireFunctionSpec& phi, double alpha, std::span<const double> times,
                              const std::function<Vec(cplx)>& core, Eigen::Index dim, const Contour& contour,
                              const ContourWeight& weight, double abs_tol, std::size_t max_rounds) {
    if (!(contour.r > 0.0) || !(contour.r_max > contour.r))
        fail(ErrorCode::InvalidArgument, "contour needs 0 < r < r_max");
    for (double t : times)
        if (!(t > 0.0)) fail(ErrorCode::InvalidArgument, "contour integrals need t > 0");
    PieceIntegrator integ{phi, alpha, times, core, weight, dim};
    const Piece ray0 = ray_piece(contour, contour.theta0);
    const Piece ray1 = ray_piece(contour, contour.theta1);
    const Piece arc = arc_piece(contour, contour.r, true);
    const Piece far = arc_piece(contour, contour.r_max, false);

    ClosedResult out;
    out.diffs.resize(times.size());
    std::vector<Vec> prev;
    std::size_t split = 1;
    for (std::size_t round = 0; round <= max_rounds; ++round, split *= 2) {
        const auto i0 = integ.run(ray0, split);
        const auto i1 = integ.run(ray1, split);
        const auto ia = integ.run(arc, split);
        std::vector<Vec> cur(times.size());
        for (std::size_t j = 0; j < times.size(); ++j) cur[j] = -(i0[j] - i1[j] - ia[j]);
        out.rounds = round;
        if (!prev.empty()) {
            bool done = true;
            for (std::size_t j = 0; j < times.size(); ++j) {
                const double d = (cur[j] - prev[j]).norm();
                out.diffs[j].push_back(d);
                done = done && d <= abs_tol;
            }
            if (done) {
                out.value = std::move(cur);
                break;
            }
        }
        prev = std::move(cur);
        if (round == max_rounds) {
            double worst = 0.0;
            for (const auto& d : out.diffs) worst = std::max(worst, d.back());
            fail(ErrorCode::ToleranceNotMet, "node doubling still changes the integral by " + fmt(worst) +
                                                 " after " + std::to_string(max_rounds) + " rounds");
        }
    }
    out.far = integ.run(far, 1);
    out.tail.assign(times.size(), 0.0);
    for (double theta : {contour.theta0, contour.theta1}) {
        const cplx lambda = std::polar(contour.r_max, theta);
        const cplx lphi = log_phi(phi, lambda);
        const cplx w = weight ? weight(lambda, lphi) : cplx{1.0};
        const Vec x = core(lambda);
        for (std::size_t j = 0; j < times.size(); ++j)
            out.tail[j] += std::abs(decay_factor(lphi, alpha, times[j], lambda) * w) * x.norm() * contour.r_max;
    }
    out.nodes = integ.nodes;
    return out;
}

} // namespace

cplx log_phi(const EntireFunctionSpec& phi, cplx lambda) {
    const cplx l = entire::principal_log(phi, lambda);
    if (!std::isfinite(l.real()) || !std::isfinite(l.imag()))
        fail(ErrorCode::BranchCrossing, "phi vanishes at lambda = " + fmt(lambda) + "; phi^alpha has a branch point");
    return l;
}

cplx phi_alpha(const EntireFunctionSpec& phi, double alpha, cplx lambda) {
    return std::exp(alpha * log_phi(phi, lambda));
}

Contour build_contour(const Sector& sector, std::vector<cplx> poles, const EntireFunctionSpec& phi, double alpha,
                      double t_min, double tol, double inner_radius) {
    if (!(alpha > 0.0)) fail(ErrorCode::InvalidArgument, "alpha must be positive");
    if (!(t_min > 0.0)) fail(ErrorCode::InvalidArgument, "t_min must be positive");
    if (!(tol > 0.0)) fail(ErrorCode::InvalidArgument, "tol must be positive");
    Contour c;
    c.theta0 = sector.theta0;
    c.theta1 = sector.theta1;
    c.alpha = alpha;
    c.t_min = t_min;
    c.tol = tol;
    double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
    for (const auto& p : poles) {
        if (!sector.contains(p))
            fail(ErrorCode::PreconditionFailed, "characteristic number " + fmt(p) + " lies outside the sector (" +
                                                    fmt(sector.theta0) + ", " + fmt(sector.theta1) + ")");
        rmin = std::min(rmin, std::abs(p));
        rmax = std::max(rmax, std::abs(p));
    }
    if (poles.empty()) {
        if (!(inner_radius > 0.0)) fail(ErrorCode::InvalidArgument, "contour without poles needs an inner radius");
        c.r = inner_radius;
        rmax = inner_radius;
    } else {
        c.r = inner_radius > 0.0 ? std::min(inner_radius, 0.5 * rmin) : 0.5 * rmin;
    }
    c.poles = std::move(poles);

    constexpr std::size_t arc_samples = 17;
    constexpr double cap = 1e8;
    auto min_log_re = [&](double radius) {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < arc_samples; ++k) {
            const double th = c.theta0 + (c.theta1 - c.theta0) * static_cast<double>(k) / (arc_samples - 1);
            m = std::min(m, log_re_phi_alpha(phi, alpha, std::polar(radius, th)));
        }
        return m;
    };
    double radius = 2.0 * std::max(rmax, c.r);
    double best = -std::numeric_limits<double>::infinity();
    std::size_t falls = 0;
    bool reached = false;
    while (radius <= cap) {
        const double m = min_log_re(radius);
        c.probe_radii.push_back(radius);
        c.probe_log_min_re.push_back(m);
        const double need = std::log(2.0 * kPi * radius / tol) + 8.0 * std::log(std::max(radius, 1.0));
        if (std::isfinite(m) && std::log(t_min) + m >= std::log(need)) {
            reached = true;
            break;
        }
        if (m < best) {
            if (++falls >= 2)
                fail(ErrorCode::NoDecay, "Re phi^alpha stops growing along the contour at R = " + fmt(radius) +
                                             " (ln min Re = " + fmt(m) + ", best so far " + fmt(best) + ")");
        } else {
            falls = 0;
            best = m;
        }
        if (c.probe_radii.size() >= 12 && best < c.probe_log_min_re.front() + std::log(1.5))
            fail(ErrorCode::NoDecay, "Re phi^alpha does not grow along the contour (ln min Re = " + fmt(best) +
                                         " up to R = " + fmt(radius) + ")");
        radius *= std::sqrt(2.0);
    }
    if (!reached)
        fail(ErrorCode::NoDecay, "decay below tolerance not reached before R = " + fmt(cap));
    c.r_max = radius;

    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < c.probe_radii.size(); ++i)
        if (c.probe_log_min_re[i] > 1.0) {
            xs.push_back(std::log(c.probe_radii[i]));
            ys.push_back(std::log(c.probe_log_min_re[i]));
        }
    if (xs.size() >= 2) {
        const double n = static_cast<double>(xs.size());
        const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
        const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxy += (xs[i] - mx) * (ys[i] - my);
            sxx += (xs[i] - mx) * (xs[i] - mx);
        }
        c.decay_exponent = sxy / sxx;
        c.decay_log_scale = my - c.decay_exponent * mx;
    } else if (xs.size() == 1) {
        c.decay_exponent = 0.0;
        c.decay_log_scale = ys[0];
    }
    return c;
}

Contour build_contour(const SpectralOperator& op, const EntireFunctionSpec& phi, double alpha, double t_min,
                      double tol) {
    return build_contour(op.sector(), op.characteristic_numbers(), phi, alpha, t_min, tol);
}

std::vector<QuadratureResult> contour_integral(const SpectralOperator& op, const EntireFunctionSpec& phi,
                                               double alpha, std::span<const double> times, const Vec& f,
                                               const Contour& contour, const ContourWeight& weight,
                                               const QuadratureOptions& options) {
    if (static_cast<std::size_t>(f.size()) != op.dimension())
        fail(ErrorCode::InvalidArgument, "initial vector has the wrong dimension");
    const Mat& b = op.matrix();
    const std::function<Vec(cplx)> core = [&](cplx lambda) -> Vec {
        try {
            return b * resolvent_solve(op, lambda, f);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::NearPole) fail(ErrorCode::NodeOnPole, e.what());
            throw;
        }
    };
    const double scale = std::max(f.norm(), std::numeric_limits<double>::min());
    const auto closed = integrate_closed(phi, alpha, times, core, f.size(), contour, weight, options.tol * scale,
                                         options.max_rounds);
    const cplx factor = 1.0 / (2.0 * kPi * kI);
    std::vector<QuadratureResult> out(times.size());
    for (std::size_t j = 0; j < times.size(); ++j) {
        auto& r = out[j];
        r.value = factor * closed.value[j];
        r.refinement_diffs = closed.diffs[j];
        for (auto& d : r.refinement_diffs) d /= 2.0 * kPi;
        r.discretization_error = r.refinement_diffs.empty() ? 0.0 : r.refinement_diffs.back();
        r.truncation_error = (closed.far[j].norm() + closed.tail[j]) / (2.0 * kPi);
        r.rounds = closed.rounds;
        r.nodes = closed.nodes;
    }
    return out;
}

QuadratureResult semigroup_integral(const SpectralOperator& op, const EntireFunctionSpec& phi, double alpha,
                                    double t, const Vec& f, const Contour& contour,
                                    const QuadratureOptions& options) {
    const double ts[1] = {t};
    return contour_integral(op, phi, alpha, ts, f, contour, {}, options).front();
}

TaylorCoefficients taylor_coeffs_at_zero(const EntireFunctionSpec& phi, std::size_t count) {
    if (count == 0) return {};
    if (count > kJetCap)
        fail(ErrorCode::JetOverflow, std::to_string(count) + " coefficients requested, cap is " +
                                         std::to_string(kJetCap));
    phi.validate();
    const auto& zeros = phi.zeros;
    const int p = phi.genus;
    const std::size_t order = count - 1;
    TaylorCoefficients out;

    // head: prod_{n <= M} G(z / a_n; p) multiplied out as jets, which keeps the
    // coefficients of products with zeros on one ray free of cancellation
    Jet head = Jet::constant(0.0, order, 1.0);
    Jet poly_part = Jet::constant(0.0, order, 0.0); // sum_n sum_{k <= p} (z / a_n)^k / k for genus p > 0
    auto multiply_factor = [&](cplx a) {
        const cplx inv = 1.0 / a;
        for (std::size_t k = order; k >= 1; --k) head[k] -= head[k - 1] * inv;
        cplx pw = 1.0;
        for (int k = 1; k <= p && static_cast<std::size_t>(k) <= order; ++k) {
            pw *= inv;
            poly_part[static_cast<std::size_t>(k)] += pw / static_cast<double>(k);
        }
    };
    std::vector<cplx> tail(order + 1, cplx{});
    std::vector<double> err(order + 1, 0.0);
    const auto first = static_cast<std::size_t>(p + 1);
    if (zeros.finite()) {
        if (!zeros.complete())
            fail(ErrorCode::TailNotBounded, "explicit zero list is only a prefix; its tail cannot be bounded");
        const auto& v = zeros.values();
        out.terms = v.size();
        for (const auto& a : v) multiply_factor(a);
    } else {
        std::size_t m = std::max<std::size_t>(phi.truncation, 16);
        constexpr std::size_t cap = std::size_t{1} << 22;
        const bool power = zeros.family() == entire::ZeroFamily::Power;
        auto tail_error = [&](std::size_t mm) {
            if (power) {
                const auto t = zeros.power_tail_sum(static_cast<int>(first), mm);
                return t ? t->error : std::numeric_limits<double>::infinity();
            }
            return zeros.abs_tail_bound(static_cast<double>(first), mm);
        };
        while (tail_error(m) >= 1e-12 && m < cap) m *= 2;
        if (tail_error(m) >= 1e-12)
            fail(ErrorCode::TailNotBounded, "product tail for the first log-coefficient stays above 1e-12");
        out.terms = m;
        for (std::size_t n = 1; n <= m; ++n) multiply_factor(zeros(n));
        // tail: sum_{n > M} ln G(z / a_n; p) = -sum_{k > p} z^k / k * sum_{n > M} a_n^{-k}
        for (std::size_t k = first; k <= order; ++k) {
            if (power) {
                const auto t = zeros.power_tail_sum(static_cast<int>(k), m);
                tail[k] = t->value;
                err[k] = t->error;
            } else {
                err[k] = zeros.abs_tail_bound(static_cast<double>(k), m);
            }
        }
    }
    Jet l(0.0, order);
    for (std::size_t k = first; k <= order; ++k) {
        l[k] = -tail[k] / static_cast<double>(k);
        out.log_error += err[k] / static_cast<double>(k);
    }
    Jet e = head * exp(l);
    if (p > 0) e = e * exp(poly_part);
    out.c.assign(count, cplx{});
    const auto m = static_cast<std::size_t>(phi.multiplicity);
    for (std::size_t n = m; n < count; ++n) out.c[n] = phi.constant * e[n - m];
    return out;
}

namespace {

double max_indicator(const EntireFunctionSpec& phi, double rho) {
    const auto delta = entire::density_of_zeros(phi.zeros, {rho, 0.0});
    double h = 0.0;
    for (int k = 0; k < 72; ++k) h = std::max(h, entire::indicator_H(rho, delta, -kPi + 2.0 * kPi * k / 72.0, 2000));
    return h;
}

template <class M>
struct SeriesCore {
    M value;
    std::size_t terms = 0;
    double tail = 0.0;
    std::string method;
    std::vector<double> trajectory;
};

template <class M>
SeriesCore<M> series_core(const SpectralOperator& op, const EntireFunctionSpec& phi, const M& f, double tol) {
    if (!(tol > 0.0)) fail(ErrorCode::InvalidArgument, "series tolerance must be positive");
    const Mat& w = op.inverse();
    const double wn = w.operatorNorm();
    const double fn = f.norm();
    SeriesCore<M> out;
    auto accumulate = [&](const std::vector<cplx>& c, std::size_t upto) {
        M term = f;
        M acc = c[0] * f;
        for (std::size_t n = 1; n <= upto; ++n) {
            term = w * term;
            acc += c[n] * term;
        }
        return acc;
    };

    const auto& zeros = phi.zeros;
    if (zeros.finite() && zeros.complete()) {
        const std::size_t degree = zeros.values().size() + static_cast<std::size_t>(phi.multiplicity);
        const auto tc = taylor_coeffs_at_zero(phi, degree + 1);
        out.method = "polynomial";
        out.terms = degree;
        for (std::size_t n = 0; n <= degree; ++n)
            out.trajectory.push_back(std::abs(tc.c[n]) * std::pow(wn, static_cast<double>(n)) * fn);
        out.value = accumulate(tc.c, degree);
        return out;
    }

    const auto tc = taylor_coeffs_at_zero(phi, kJetCap);
    const std::size_t last = kJetCap - 1;
    // ln of the bound on |c_n| ||W||^n ||f||
    std::function<double(std::size_t)> log_bound;
    double cauchy_log_m = 0.0;
    const double rho = entire::convergence_exponent(zeros);
    const auto mult = static_cast<std::size_t>(phi.multiplicity);
    const double log_c = std::log(std::max(std::abs(phi.constant), 1e-300));
    if (zeros.family() == entire::ZeroFamily::Power && rho > 0.0 && rho < 1.0 &&
        std::abs(rho - std::round(rho)) > 1e-9) {
        const double sigma = 1.1 * max_indicator(phi, rho);
        out.method = "coefficient-bound";
        log_bound = [=](std::size_t n) {
            if (n <= mult) return log_c + static_cast<double>(n) * std::log(wn) + std::log(fn);
            const double k = static_cast<double>(n - mult);
            // |c_{m+k}| <= |C| (e sigma rho / k)^{k / rho}
            return log_c + (k / rho) * std::log(std::exp(1.0) * sigma * rho / k) +
                   static_cast<double>(n) * std::log(wn) + std::log(fn);
        };
    } else {
        out.method = "cauchy";
        const double radius = 4.0 * std::max(wn, 1e-12);
        double lm = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < 256; ++k)
            lm = std::max(lm, entire::principal_log(phi, std::polar(radius, 2.0 * kPi * k / 256.0)).real());
        cauchy_log_m = lm + std::log(1.1);
        log_bound = [=](std::size_t n) {
            return cauchy_log_m - static_cast<double>(n) * std::log(4.0) + std::log(fn);
        };
    }
    auto tail_after = [&](std::size_t n) {
        if (out.method == "cauchy") return std::exp(log_bound(n + 1)) * 4.0 / 3.0;
        double s = 0.0;
        for (std::size_t k = n + 1; k < n + 2000; ++k) {
            const double b = std::exp(log_bound(k));
            s += b;
            if (k > n + 5 && b < 1e-20 * s) break;
        }
        return s;
    };
    std::size_t nstar = 0;
    bool found = false;
    std::vector<double> term_norms;
    M term = f;
    for (std::size_t n = 0; n <= last; ++n) {
        if (n > 0) term = w * term;
        term_norms.push_back(std::abs(tc.c[n]) * term.norm());
        out.trajectory.push_back(std::exp(log_bound(n)));
        const bool guard = n >= 1 && term_norms[n] <= tol && term_norms[n - 1] <= tol;
        if (n >= mult && guard && tail_after(n) <= tol) {
            nstar = n;
            found = true;
            break;
        }
    }
    if (!found) {
        std::ostringstream os;
        os << "phi(W) series tail bound stays above " << tol << " up to n = " << last << "; bounds:";
        for (std::size_t n = 0; n < out.trajectory.size(); n += 8) os << " n=" << n << ":" << out.trajectory[n];
        fail(ErrorCode::NoConvergence, os.str());
    }
    out.terms = nstar;
    out.tail = tail_after(nstar);
    out.value = accumulate(tc.c, nstar);
    return out;
}

} // namespace

SeriesResult phi_of_W_series(const SpectralOperator& op, const EntireFunctionSpec& phi, const Vec& f, double tol) {
    if (static_cast<std::size_t>(f.size()) != op.dimension())
        fail(ErrorCode::InvalidArgument, "vector has the wrong dimension");
    auto core = series_core<Vec>(op, phi, f, tol);
    return {std::move(core.value), core.terms, core.tail, core.method, std::move(core.trajectory)};
}

Mat phi_of_W_matrix(const SpectralOperator& op, const EntireFunctionSpec& phi, double tol) {
    const auto n = static_cast<Eigen::Index>(op.dimension());
    return series_core<Mat>(op, phi, Mat::Identity(n, n), tol).value;
}

BetaResult beta_k(const EntireFunctionSpec& phi, double alpha, double t, const Contour& contour, int k,
                  const QuadratureOptions& options) {
    if (k < 0 || k > 8) fail(ErrorCode::InvalidArgument, "beta_k is defined here for 0 <= k <= 8");
    const std::function<Vec(cplx)> core = [](cplx) { return Vec::Ones(1); };
    const ContourWeight weight = [k](cplx lambda, cplx) { return std::pow(lambda, k); };
    const double ts[1] = {t};
    const auto closed =
        integrate_closed(phi, alpha, ts, core, 1, contour, weight, options.tol, options.max_rounds);
    BetaResult out;
    out.value = closed.value[0](0);
    out.far_arc = closed.far[0](0);
    out.refinement_diffs = closed.diffs[0];
    out.error = (out.refinement_diffs.empty() ? 0.0 : out.refinement_diffs.back()) + std::abs(out.far_arc) +
                closed.tail[0];
    return out;
}

std::vector<std::vector<BetaResult>> beta_table(const EntireFunctionSpec& phi, double alpha,
                                                std::span<const double> times, const Contour& contour, int k_max,
                                                const QuadratureOptions& options) {
    if (k_max < 0 || k_max > 8) fail(ErrorCode::InvalidArgument, "beta_k is defined here for 0 <= k <= 8");
    const auto dim = static_cast<Eigen::Index>(k_max + 1);
    const std::function<Vec(cplx)> core = [dim](cplx lambda) {
        Vec v(dim);
        cplx p{1.0};
        for (Eigen::Index k = 0; k < dim; ++k, p *= lambda) v(k) = p;
        return v;
    };
    const auto closed = integrate_closed(phi, alpha, times, core, dim, contour, {}, options.tol, options.max_rounds);
    std::vector<std::vector<BetaResult>> out(times.size());
    for (std::size_t j = 0; j < times.size(); ++j) {
        const double shared = (closed.diffs[j].empty() ? 0.0 : closed.diffs[j].back()) + closed.tail[j];
        for (Eigen::Index k = 0; k < dim; ++k) {
            BetaResult b;
            b.value = closed.value[j](k);
            b.far_arc = closed.far[j](k);
            b.refinement_diffs = closed.diffs[j];
            b.error = shared + std::abs(b.far_arc);
            out[j].push_back(std::move(b));
        }
    }
    return out;
}

CommutationReport commutation_check(const SpectralOperator& op, const EntireFunctionSpec& phi, double alpha,
                                    double t, const Vec& f, const Contour& contour,
                                    const QuadratureOptions& options) {
    const double ts[1] = {t};
    const ContourWeight w = [](cplx, cplx lphi) { return std::exp(lphi); };
    CommutationReport rep;
    rep.left = contour_integral(op, phi, alpha, ts, f, contour, w, options).front().value;
    const Vec plain = contour_integral(op, phi, alpha, ts, f, contour, {}, options).front().value;
    const auto series = phi_of_W_series(op, phi, plain, 1e-14 * std::max(plain.norm(), 1e-300));
    rep.right = series.value;
    rep.series_terms = series.terms;
    rep.relative_difference = (rep.left - rep.right).norm() / std::max(rep.right.norm(), 1e-300);
    return rep;
}

} // namespace fracevo
