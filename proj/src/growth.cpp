#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fracevo/entire_fn.hpp"

namespace fracevo::entire {

GrowthEstimate order_type_estimate(const LogModulusFn& log_abs_f, std::span<const double> radii, std::size_t samples) {
    if (samples < 4) fail(ErrorCode::InvalidArgument, "need at least four angular samples per circle");
    GrowthEstimate est;
    std::vector<double> x, y;
    for (double r : radii) {
        if (!(r > 0.0)) fail(ErrorCode::InvalidArgument, "ladder radii must be positive");
        double log_max = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < samples; ++j) {
            const double v = log_abs_f(std::polar(r, 2.0 * kPi * static_cast<double>(j) / static_cast<double>(samples)));
            if (std::isinf(v) && v > 0.0)
                fail(ErrorCode::SamplingOverflow, "|f| overflows on |z| = " + std::to_string(r));
            if (!std::isnan(v)) log_max = std::max(log_max, v);
        }
        est.radii.push_back(r);
        est.log_max_modulus.push_back(log_max);
        if (log_max > 0.0) {
            x.push_back(std::log(r));
            y.push_back(std::log(log_max));
        }
    }
    if (x.size() < 3) fail(ErrorCode::NotDeterminable, "fewer than three rungs with ln M_f(r) > 0");
    for (std::size_t i = 1; i < x.size(); ++i) est.local_slopes.push_back((y[i] - y[i - 1]) / (x[i] - x[i - 1]));

    // least squares on the last three usable rungs
    const std::size_t n = 3, off = x.size() - n;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = off; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / n;
    double ss = 0.0;
    for (std::size_t i = off; i < x.size(); ++i) {
        const double e = y[i] - (intercept + slope * x[i]);
        ss += e * e;
    }
    est.order = slope;
    est.type = std::exp(intercept);
    est.proximate = ProximateOrder{slope, 0.0};
    est.residual = std::sqrt(ss / n);
    const auto tail = std::span(est.local_slopes).last(std::min<std::size_t>(3, est.local_slopes.size()));
    const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
    est.spread = *hi - *lo;
    return est;
}

GrowthEstimate order_type_estimate_values(const std::function<cplx(cplx)>& f, std::span<const double> radii,
                                          std::size_t samples) {
    return order_type_estimate(
        [&](cplx z) {
            const cplx v = f(z);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                fail(ErrorCode::SamplingOverflow, "f is not representable at |z| = " + std::to_string(std::abs(z)));
            return std::log(std::abs(v));
        },
        radii, samples);
}

GrowthEstimate order_type_estimate(const EntireFunctionSpec& spec, std::span<const double> radii, std::size_t samples) {
    spec.validate();
    return order_type_estimate([&](cplx z) { return eval_product(spec, z).log_value.real(); }, radii, samples);
}

} // namespace fracevo::entire
