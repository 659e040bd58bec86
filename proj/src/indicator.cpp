#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "fracevo/entire_fn.hpp"

namespace fracevo::entire {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

double wrap_two_pi(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    return r;
}

DensityEstimate ladder(const std::function<double(double)>& count, const ProximateOrder& order,
                       const LadderOptions& options) {
    if (options.rungs < 3) fail(ErrorCode::InvalidArgument, "radius ladder needs at least three rungs");
    if (!(options.r0 > 1.0)) fail(ErrorCode::InvalidArgument, "ladder base radius must exceed 1");
    DensityEstimate est;
    est.radii = radius_ladder(options.r0, options.rungs);
    for (double r : est.radii) est.ratios.push_back(count(r) / order.scale(r));
    const auto tail = std::span(est.ratios).last(3);
    const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
    est.spread = *hi - *lo;
    est.value = est.ratios.back();
    return est;
}

} // namespace

std::vector<double> radius_ladder(double r0, std::size_t rungs) {
    if (!(r0 > 0.0)) fail(ErrorCode::InvalidArgument, "ladder base radius must be positive");
    std::vector<double> radii(rungs);
    for (std::size_t k = 0; k < rungs; ++k) radii[k] = std::ldexp(r0, static_cast<int>(k));
    return radii;
}

DensityEstimate angular_density(const ZeroSequence& zeros, const ProximateOrder& order, double phi, double psi,
                                const LadderOptions& options) {
    auto est = ladder([&](double r) { return static_cast<double>(zeros.count_in_sector(r, phi, psi)); }, order,
                      options);
    if (est.spread > options.tolerance * std::max(1.0, est.value))
        fail(ErrorCode::NoLimit, "sector density ladder spread " + std::to_string(est.spread) + " exceeds tolerance");
    return est;
}

DensityEstimate upper_density(const ZeroSequence& zeros, const ProximateOrder& order, const LadderOptions& options) {
    auto est = ladder([&](double r) { return static_cast<double>(zeros.count_below(r, true)); }, order, options);
    // upper limit: largest of the last three rungs
    est.value = *std::max_element(est.ratios.end() - 3, est.ratios.end());
    return est;
}

// ---------------------------------------------------------------------------
// AngularDensity

AngularDensity AngularDensity::from_knots(std::vector<Knot> knots) {
    double prev_angle = 0.0, prev_mass = 0.0;
    for (const auto& k : knots) {
        if (!(k.angle >= 0.0 && k.angle <= kTwoPi + 1e-12))
            fail(ErrorCode::InvalidArgument, "density knot angles must lie in [0, 2 pi]");
        if (k.angle < prev_angle) fail(ErrorCode::InvalidArgument, "density knots must be sorted by angle");
        if (k.mass < prev_mass || !std::isfinite(k.mass))
            fail(ErrorCode::InvalidArgument, "angular density must be nondecreasing and finite");
        prev_angle = k.angle;
        prev_mass = k.mass;
    }
    AngularDensity d;
    d.knots_ = std::move(knots);
    return d;
}

AngularDensity AngularDensity::atoms(std::vector<Jump> jumps) {
    for (auto& j : jumps) {
        if (j.mass < 0.0) fail(ErrorCode::InvalidArgument, "atom masses must be nonnegative");
        j.angle = wrap_two_pi(j.angle);
    }
    std::sort(jumps.begin(), jumps.end(), [](const Jump& a, const Jump& b) { return a.angle < b.angle; });
    std::vector<Knot> knots;
    double mass = 0.0;
    for (const auto& j : jumps) {
        knots.push_back({j.angle, mass});
        mass += j.mass;
        knots.push_back({j.angle, mass});
    }
    return from_knots(std::move(knots));
}

std::vector<AngularDensity::Jump> AngularDensity::jumps() const {
    std::vector<Jump> out;
    double angle = 0.0, mass = 0.0;
    for (const auto& k : knots_) {
        if (k.angle == angle && k.mass > mass) {
            if (!out.empty() && out.back().angle == angle)
                out.back().mass += k.mass - mass;
            else
                out.push_back({angle, k.mass - mass});
        }
        angle = k.angle;
        mass = k.mass;
    }
    return out;
}

std::vector<AngularDensity::Segment> AngularDensity::segments() const {
    std::vector<Segment> out;
    double angle = 0.0, mass = 0.0;
    for (const auto& k : knots_) {
        if (k.angle > angle && k.mass > mass) out.push_back({angle, k.angle, k.mass - mass});
        angle = k.angle;
        mass = k.mass;
    }
    return out;
}

double AngularDensity::total_mass() const { return knots_.empty() ? 0.0 : knots_.back().mass; }

double AngularDensity::operator()(double angle) const {
    double prev_angle = 0.0, prev_mass = 0.0;
    for (const auto& k : knots_) {
        if (angle < k.angle) {
            const double w = (angle - prev_angle) / (k.angle - prev_angle);
            return prev_mass + w * (k.mass - prev_mass);
        }
        prev_angle = k.angle;
        prev_mass = k.mass;
    }
    return prev_mass;
}

AngularDensity density_of_zeros(const ZeroSequence& zeros, const ProximateOrder& order,
                                const LadderOptions& options) {
    if (zeros.finite()) return AngularDensity::atoms({});
    std::map<double, double> masses;
    const auto& angles = zeros.angles();
    const double classes = static_cast<double>(angles.size());
    const bool closed_form = zeros.family() == ZeroFamily::Power && order.log_correction == 0.0 &&
                             std::abs(order.rho * zeros.exponent() - 1.0) < 1e-12;
    for (double a : angles) {
        const double key = wrap_two_pi(a);
        if (masses.count(key)) continue;
        double m = 0.0;
        if (closed_form) {
            // n(r) on one class ~ (r/scale)^{1/e} / L
            std::size_t hits = 0;
            for (double b : angles)
                if (wrap_two_pi(b) == key) ++hits;
            m = std::pow(zeros.scale(), -order.rho) * hits / classes;
        } else {
            constexpr double half = 1e-6;
            m = angular_density(zeros, order, key - half, key + half, options).value;
        }
        masses[key] = m;
    }
    std::vector<AngularDensity::Jump> jumps;
    for (const auto& [a, m] : masses) jumps.push_back({a, m});
    return AngularDensity::atoms(std::move(jumps));
}

double indicator_H(double order, const AngularDensity& delta, double psi, std::size_t panels) {
    if (!(order > 0.0) || !std::isfinite(order)) fail(ErrorCode::InvalidArgument, "order must be positive");
    if (std::abs(order - std::round(order)) < 1e-12)
        fail(ErrorCode::OrderIntegral, "indicator formula needs a non-integer order");
    if (panels == 0) fail(ErrorCode::InvalidArgument, "panel count must be positive");
    // shift each angle into (psi - 2 pi, psi] so that psi - phi lies in [0, 2 pi)
    auto kernel = [&](double phi) {
        const double gap = wrap_two_pi(psi - phi);
        return std::cos(order * (gap - kPi));
    };
    double s = 0.0;
    for (const auto& j : delta.jumps()) s += j.mass * kernel(j.angle);
    for (const auto& seg : delta.segments()) {
        const double h = (seg.to - seg.from) / static_cast<double>(panels);
        const double dens = seg.mass / (seg.to - seg.from);
        double part = 0.0;
        for (std::size_t i = 0; i < panels; ++i) part += kernel(seg.from + (i + 0.5) * h);
        s += dens * h * part;
    }
    return kPi / std::sin(kPi * order) * s;
}

PositivityReport check_indicator_positivity(double order, const AngularDensity& delta, std::size_t grid_points) {
    if (!(order > 0.0 && order <= 0.5)) fail(ErrorCode::InvalidArgument, "positivity check needs order in (0, 1/2]");
    if (grid_points == 0) fail(ErrorCode::InvalidArgument, "grid must be nonempty");
    PositivityReport rep;
    const double scale = kPi / std::sin(kPi * order) * std::max(delta.total_mass(), 1e-300);
    rep.min_value = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j <= grid_points; ++j) {
        const double psi = -kPi + kTwoPi * static_cast<double>(j) / static_cast<double>(grid_points + 1);
        const double h = indicator_H(order, delta, psi);
        rep.psi.push_back(psi);
        rep.values.push_back(h);
        rep.min_value = std::min(rep.min_value, h);
        if (std::abs(h) <= 1e-12 * scale)
            rep.zero_points.push_back(j - 1);
        else if (h < 0.0)
            rep.nonnegative = false;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Exceptional circles

ExceptionalCircles exceptional_circles(const ZeroSequence& zeros, const ProximateOrder& order, double d,
                                       ExceptionalCondition condition, std::size_t prefix) {
    if (!(d > 0.0)) fail(ErrorCode::InvalidArgument, "separation constant d must be positive");
    const std::size_t n_max = zeros.finite() ? *zeros.count() : prefix;
    ExceptionalCircles out;
    out.condition = condition;
    out.d = d;
    out.circles.reserve(n_max);
    for (std::size_t n = 1; n <= n_max; ++n) {
        const cplx a = zeros(n);
        const double m = std::abs(a);
        const double rho = order.at(m);
        const double power = condition == ExceptionalCondition::I ? 1.0 - 0.5 * rho : 1.0 - rho;
        out.circles.push_back({a, d * std::pow(m, power), n});
    }

    if (condition == ExceptionalCondition::I) {
        // two circles can only meet when their annuli |a| -+ r overlap: sweep by inner radius
        const auto& c = out.circles;
        std::vector<std::size_t> by_inner(c.size());
        std::iota(by_inner.begin(), by_inner.end(), std::size_t{0});
        auto inner = [&](std::size_t i) { return std::abs(c[i].center) - c[i].radius; };
        std::sort(by_inner.begin(), by_inner.end(), [&](std::size_t a, std::size_t b) { return inner(a) < inner(b); });
        for (std::size_t s = 0; s < by_inner.size(); ++s) {
            const auto& ci = c[by_inner[s]];
            const double outer = std::abs(ci.center) + ci.radius;
            for (std::size_t t = s + 1; t < by_inner.size() && inner(by_inner[t]) <= outer; ++t) {
                const auto& cj = c[by_inner[t]];
                if (std::abs(ci.center - cj.center) <= ci.radius + cj.radius)
                    fail(ErrorCode::ConditionViolated, "exceptional circles " + std::to_string(std::min(ci.index, cj.index)) +
                                                           " and " + std::to_string(std::max(ci.index, cj.index)) +
                                                           " intersect");
            }
        }
    } else {
        // gap along each ray of the family between consecutive zeros of the same argument
        std::map<double, std::size_t> last_on_ray;
        for (const auto& c : out.circles) {
            const double key = std::round(wrap_two_pi(std::arg(c.center)) * 1e12);
            auto it = last_on_ray.find(key);
            if (it != last_on_ray.end()) {
                const auto& prev = out.circles[it->second];
                const double pm = std::abs(prev.center);
                const double gap = std::abs(c.center) - pm;
                if (!(gap > d * std::pow(pm, 1.0 - order.at(pm))))
                    fail(ErrorCode::ConditionViolated, "gap between zeros " + std::to_string(prev.index) + " and " +
                                                           std::to_string(c.index) + " is " + std::to_string(gap) +
                                                           ", needs > " +
                                                           std::to_string(d * std::pow(pm, 1.0 - order.at(pm))));
            }
            last_on_ray[key] = c.index - 1;
        }
    }
    return out;
}

RayClearance ray_clearance(const ExceptionalCircles& circles, double theta) {
    RayClearance out;
    const cplx rot = std::polar(1.0, -theta);
    for (const auto& c : circles.circles) {
        const cplx w = c.center * rot;
        const double dist = w.real() >= 0.0 ? std::abs(w.imag()) : std::abs(w);
        if (dist <= c.radius) out.last_hit = c.index;
    }
    out.checked = circles.circles.size();
    // hits confined to the first half of the checked prefix count as a finite exceptional set
    out.clear = out.last_hit == 0 || 2 * out.last_hit <= out.checked;
    return out;
}

// ---------------------------------------------------------------------------
// Lower bound of the real part along a ray

namespace {

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace

RayBoundReport lower_bound_on_ray(const EntireFunctionSpec& spec, double theta, double zeta,
                                  std::span<const double> radii, const RayBoundOptions& options) {
    spec.validate();
    if (!(zeta > 0.0 && zeta < 0.5 * kPi)) fail(ErrorCode::InvalidArgument, "sector half-angle must be in (0, pi/2)");
    if (radii.size() < 3) fail(ErrorCode::InvalidArgument, "ray bound needs at least three radii");

    RayBoundReport rep;
    rep.theta = theta;
    rep.epsilon = options.epsilon;
    rep.order = convergence_exponent(spec.zeros);
    const ProximateOrder order{rep.order, 0.0};

    const auto circles = exceptional_circles(spec.zeros, order, options.d, options.condition);
    const auto clearance = ray_clearance(circles, theta);
    rep.clearance_prefix = clearance.checked;
    if (!clearance.clear)
        fail(ErrorCode::PreconditionFailed, "ray arg z = " + std::to_string(theta) + " meets exceptional circle " +
                                                std::to_string(clearance.last_hit) + " of " +
                                                std::to_string(clearance.checked));

    const double psi = std::remainder(theta, kTwoPi);
    rep.indicator = indicator_H(rep.order, density_of_zeros(spec.zeros, order), psi);
    const double slope = rep.indicator - options.epsilon;

    std::vector<double> log_re(radii.size(), -std::numeric_limits<double>::infinity());
    for (double r : radii) {
        const cplx lv = principal_log(spec, std::polar(r, theta));
        rep.radii.push_back(r);
        rep.log_abs.push_back(lv.real());
        rep.arg.push_back(lv.imag());
    }
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (std::abs(rep.arg[i]) > zeta) rep.image_in_sector = false;
        if (std::abs(rep.arg[i]) < 0.5 * kPi) log_re[i] = rep.log_abs[i] + std::log(std::cos(rep.arg[i]));
    }

    // margin g(r) = ln|f| - (H - eps) r^rho. C is the smallest exp(g) seen on the ladder; the bound
    // holds asymptotically when g no longer decreases over the last three rungs.
    const std::size_t n = radii.size();
    std::vector<double> g_mod(n), g_re(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double need = slope * order.scale(radii[i]);
        g_mod[i] = rep.log_abs[i] - need;
        g_re[i] = log_re[i] - need;
    }
    rep.modulus_constant = std::exp(*std::min_element(g_mod.begin(), g_mod.end()));
    rep.real_constant = std::exp(*std::min_element(g_re.begin(), g_re.end()));
    std::size_t first_mod_fail = 0, first_re_fail = 0;
    for (std::size_t i = n - 2; i < n; ++i) {
        const double slack = 1e-12 * std::max(1.0, std::abs(rep.log_abs[i]));
        if (g_mod[i] < g_mod[i - 1] - slack && rep.modulus_bound_holds) {
            rep.modulus_bound_holds = false;
            first_mod_fail = i;
        }
        if (!(g_re[i] >= g_re[i - 1] - slack) && rep.real_part_bound_holds) {
            rep.real_part_bound_holds = false;
            first_re_fail = i;
        }
    }

    // empirical exponent of ln ln Re f when the image stays in the right half plane, else of ln ln |f|
    std::vector<double> x, y;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double v = rep.image_in_sector ? log_re[i] : rep.log_abs[i];
        if (v > 0.0 && std::isfinite(v)) {
            x.push_back(std::log(radii[i]));
            y.push_back(std::log(v));
        }
    }
    rep.empirical_exponent = fit_slope(x, y);

    if (!rep.modulus_bound_holds)
        fail(ErrorCode::BoundViolated,
             "ln|f| - (H - eps) r^rho still decreasing at r = " + std::to_string(radii[first_mod_fail]));
    if (rep.image_in_sector && !rep.real_part_bound_holds)
        fail(ErrorCode::BoundViolated,
             "ln Re f - (H - eps) r^rho still decreasing at r = " + std::to_string(radii[first_re_fail]));
    return rep;
}

} // namespace fracevo::entire
