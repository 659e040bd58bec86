#include "fracevo/entire_fn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace fracevo::entire {

namespace {

constexpr double kTwoPi = 2.0 * kPi;
constexpr std::size_t kMaxTruncation = std::size_t{1} << 26;
constexpr int kMaxTailTerms = 60;

double wrap_two_pi(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    return r;
}

void require_angles(const std::vector<double>& angles) {
    if (angles.empty()) fail(ErrorCode::InvalidArgument, "zero family needs at least one angle");
    for (double a : angles)
        if (!std::isfinite(a)) fail(ErrorCode::InvalidArgument, "non-finite zero angle");
}

} // namespace

double ProximateOrder::at(double r) const {
    if (log_correction == 0.0) return rho;
    return rho + log_correction / std::log(r);
}

double ProximateOrder::scale(double r) const { return std::pow(r, at(r)); }

// ---------------------------------------------------------------------------
// ZeroSequence

ZeroSequence ZeroSequence::explicit_list(std::vector<cplx> zeros, bool complete) {
    for (const auto& z : zeros) {
        if (z == cplx{}) fail(ErrorCode::InvalidArgument, "zero sequences exclude the origin (use the multiplicity)");
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) fail(ErrorCode::InvalidArgument, "non-finite zero");
    }
    std::vector<std::size_t> order(zeros.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ma = std::abs(zeros[a]), mb = std::abs(zeros[b]);
        if (ma != mb) return ma < mb;
        const double aa = std::arg(zeros[a]), ab = std::arg(zeros[b]);
        if (aa != ab) return aa < ab;
        return a < b;
    });
    ZeroSequence s;
    s.family_ = ZeroFamily::Explicit;
    s.complete_ = complete;
    s.values_.reserve(zeros.size());
    for (std::size_t i : order) s.values_.push_back(zeros[i]);
    return s;
}

ZeroSequence ZeroSequence::power(double scale, double exponent, double shift, std::vector<double> angles) {
    if (!(scale > 0.0) || !(exponent > 0.0) || !(shift > -1.0))
        fail(ErrorCode::InvalidArgument, "power family needs scale > 0, exponent > 0, shift > -1");
    require_angles(angles);
    ZeroSequence s;
    s.family_ = ZeroFamily::Power;
    s.complete_ = false;
    s.scale_ = scale;
    s.exponent_ = exponent;
    s.shift_ = shift;
    s.angles_ = std::move(angles);
    return s;
}

ZeroSequence ZeroSequence::power_log(double scale, double exponent, double log_power, double offset,
                                     std::vector<double> angles) {
    if (!(scale > 0.0) || !(exponent > 0.0) || !(log_power >= 0.0) || !(offset > 0.0))
        fail(ErrorCode::InvalidArgument, "power-log family needs scale > 0, exponent > 0, log_power >= 0, offset > 0");
    require_angles(angles);
    ZeroSequence s;
    s.family_ = ZeroFamily::PowerLog;
    s.complete_ = false;
    s.scale_ = scale;
    s.exponent_ = exponent;
    s.log_power_ = log_power;
    s.shift_ = offset;
    s.angles_ = std::move(angles);
    return s;
}

ZeroSequence ZeroSequence::geometric(double scale, double base, std::vector<double> angles) {
    if (!(scale > 0.0) || !(base > 1.0)) fail(ErrorCode::InvalidArgument, "geometric family needs scale > 0, base > 1");
    require_angles(angles);
    ZeroSequence s;
    s.family_ = ZeroFamily::Geometric;
    s.complete_ = false;
    s.scale_ = scale;
    s.base_ = base;
    s.angles_ = std::move(angles);
    return s;
}

std::optional<std::size_t> ZeroSequence::count() const {
    if (finite()) return values_.size();
    return std::nullopt;
}

double ZeroSequence::modulus(std::size_t n) const {
    const double x = static_cast<double>(n);
    switch (family_) {
    case ZeroFamily::Explicit:
        if (n == 0 || n > values_.size()) fail(ErrorCode::InvalidArgument, "zero index out of range");
        return std::abs(values_[n - 1]);
    case ZeroFamily::Power:
        return scale_ * std::pow(x + shift_, exponent_);
    case ZeroFamily::PowerLog: {
        const double m = x + shift_;
        return scale_ * std::pow(m * std::pow(std::log(m), log_power_), exponent_);
    }
    case ZeroFamily::Geometric:
        return scale_ * std::pow(base_, x);
    }
    return 0.0;
}

cplx ZeroSequence::operator()(std::size_t n) const {
    if (n == 0) fail(ErrorCode::InvalidArgument, "zero indices are 1-based");
    if (family_ == ZeroFamily::Explicit) return values_.at(n - 1);
    return std::polar(modulus(n), angles_[(n - 1) % angles_.size()]);
}

std::size_t ZeroSequence::count_below(double r, bool inclusive) const {
    auto below = [&](double m) { return inclusive ? m <= r : m < r; };
    if (finite()) {
        std::size_t c = 0;
        for (const auto& z : values_)
            if (below(std::abs(z))) ++c;
        return c;
    }
    if (!below(modulus(1))) return 0;
    std::size_t lo = 1, hi = 2;
    while (below(modulus(hi))) {
        lo = hi;
        hi *= 2;
        if (hi > (std::size_t{1} << 62)) fail(ErrorCode::InvalidArgument, "radius too large for zero counting");
    }
    // invariant: below(lo), !below(hi)
    while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (below(modulus(mid)))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

std::size_t ZeroSequence::count_in_sector(double r, double phi, double psi) const {
    const double width = psi - phi;
    if (!(width > 0.0) || width > kTwoPi + 1e-12)
        fail(ErrorCode::InvalidArgument, "sector needs 0 < psi - phi <= 2 pi");
    auto inside = [&](double angle) {
        const double d = wrap_two_pi(angle - phi);
        return d > 0.0 && d < width;
    };
    if (finite()) {
        std::size_t c = 0;
        for (const auto& z : values_)
            if (std::abs(z) <= r && inside(std::arg(z))) ++c;
        return c;
    }
    const std::size_t n = count_below(r, true);
    const std::size_t classes = angles_.size();
    std::size_t c = 0;
    for (std::size_t j = 0; j < classes; ++j) {
        if (!inside(angles_[j])) continue;
        c += n / classes + (j < n % classes ? 1 : 0);
    }
    return c;
}

double ZeroSequence::abs_tail_bound(double q, std::size_t m) const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (family_) {
    case ZeroFamily::Explicit: {
        if (!complete_) return inf;
        double s = 0.0;
        for (std::size_t n = m + 1; n <= values_.size(); ++n) s += std::pow(std::abs(values_[n - 1]), -q);
        return s;
    }
    case ZeroFamily::Power: {
        const double a = q * exponent_;
        if (a <= 1.0) return inf;
        double head = 0.0;
        if (m == 0) {
            head = std::pow(modulus(1), -q);
            m = 1;
        }
        return head + std::pow(scale_, -q) * std::pow(static_cast<double>(m) + shift_, 1.0 - a) / (a - 1.0);
    }
    case ZeroFamily::PowerLog: {
        const double a = q * exponent_;
        const double b = q * exponent_ * log_power_;
        double head = 0.0;
        if (m == 0) {
            head = std::pow(modulus(1), -q);
            m = 1;
        }
        const double x = static_cast<double>(m) + shift_;
        const double lx = std::log(x);
        if (std::abs(a - 1.0) < 1e-12) {
            if (b <= 1.0 || lx <= 0.0) return inf;
            return head + std::pow(scale_, -q) * std::pow(lx, 1.0 - b) / (b - 1.0);
        }
        if (a < 1.0) return inf;
        return head + std::pow(scale_, -q) * std::pow(lx, -b) * std::pow(x, 1.0 - a) / (a - 1.0);
    }
    case ZeroFamily::Geometric: {
        const double rq = std::pow(base_, -q);
        return std::pow(scale_, -q) * std::pow(rq, static_cast<double>(m + 1)) / (1.0 - rq);
    }
    }
    return inf;
}

std::optional<ZeroSequence::TailSum> ZeroSequence::power_tail_sum(int k, std::size_t m) const {
    if (family_ != ZeroFamily::Power) return std::nullopt;
    const double ke = k * exponent_;
    if (ke <= 1.0) return std::nullopt;
    const std::size_t classes = angles_.size();
    const double width = static_cast<double>(classes);
    const double amp = std::pow(scale_, -static_cast<double>(k));
    TailSum out{cplx{}, 0.0};
    for (std::size_t j = 0; j < classes; ++j) {
        // first index n0 > m with (n0 - 1) mod L == j
        std::size_t n0 = m + 1 + (j + classes - (m % classes)) % classes;
        const cplx phase = std::polar(1.0, -static_cast<double>(k) * angles_[j]);
        cplx head{};
        // keep the midpoint panel boundary well away from the singularity at -shift
        while (static_cast<double>(n0) - 0.5 * width + shift_ < 0.5) {
            head += std::pow(static_cast<double>(n0) + shift_, -ke);
            n0 += classes;
        }
        const double x0 = static_cast<double>(n0) - 0.5 * width + shift_;
        const double g = std::pow(x0, -ke);
        const double g1 = ke * g / x0;
        const double g2 = ke * (ke + 1.0) * g / (x0 * x0);
        const double integral = x0 * g / (ke - 1.0) / width;
        out.value += amp * phase * (head + integral);
        out.error += amp * (width * width / 24.0) * (g2 + g1 / width);
    }
    return out;
}

// ---------------------------------------------------------------------------
// EntireFunctionSpec and product evaluation

void EntireFunctionSpec::validate() const {
    if (genus < 0) fail(ErrorCode::InvalidArgument, "genus must be nonnegative");
    if (multiplicity < 0) fail(ErrorCode::InvalidArgument, "zero-root multiplicity must be nonnegative");
    if (truncation < 1) fail(ErrorCode::InvalidArgument, "truncation must be positive");
    if (!(tail_tolerance > 0.0)) fail(ErrorCode::InvalidArgument, "tail tolerance must be positive");
    if (constant == cplx{}) fail(ErrorCode::InvalidArgument, "constant factor must be nonzero");
    if (!zeros.finite()) {
        const int expected = entire::genus(zeros);
        if (expected != genus)
            fail(ErrorCode::InvalidArgument, "genus " + std::to_string(genus) + " disagrees with the zero family (expected " +
                                                 std::to_string(expected) + ")");
    }
}

cplx weierstrass_factor(cplx z, int p) {
    cplx s{};
    cplx zk = z;
    for (int k = 1; k <= p; ++k) {
        s += zk / static_cast<double>(k);
        zk *= z;
    }
    return (1.0 - z) * std::exp(s);
}

cplx log_weierstrass_factor(cplx z, int p) {
    if (std::abs(z) < 0.1) {
        // ln G(z; p) = -sum_{k > p} z^k / k
        cplx term = std::pow(z, p + 1);
        cplx s{};
        for (int k = p + 1; k < p + 200; ++k) {
            const cplx add = term / static_cast<double>(k);
            s -= add;
            if (std::abs(add) <= 1e-18 * std::abs(s)) break;
            term *= z;
        }
        return s;
    }
    cplx s = std::log(1.0 - z);
    cplx zk = z;
    for (int k = 1; k <= p; ++k) {
        s += zk / static_cast<double>(k);
        zk *= z;
    }
    return s;
}

namespace {

struct TailPlan {
    std::size_t terms = 0;
    int tail_terms = 0; // K: powers p+1..K of the corrected tail
    double raw_bound = 0.0;
    double error = 0.0;
    bool corrected = false;
};

TailPlan plan_truncation(const EntireFunctionSpec& spec, double absz) {
    TailPlan plan;
    const auto& zeros = spec.zeros;
    if (zeros.finite()) {
        if (!zeros.complete())
            fail(ErrorCode::TailNotBounded, "explicit zero list is a prefix; the product tail cannot be bounded");
        plan.terms = *zeros.count();
        return plan;
    }
    const int p = spec.genus;
    std::size_t m = std::max<std::size_t>(spec.truncation, 1);
    if (absz == 0.0) {
        plan.terms = m;
        return plan;
    }
    while (true) {
        if (zeros.modulus(m + 1) >= 2.0 * absz) {
            plan.raw_bound = 2.0 * std::pow(absz, p + 1) * zeros.abs_tail_bound(p + 1, m) / (p + 1);
            if (zeros.family() == ZeroFamily::Power) {
                int k_last = p + 1;
                double remainder = std::numeric_limits<double>::infinity();
                for (; k_last <= p + kMaxTailTerms; ++k_last) {
                    remainder = 2.0 * std::pow(absz, k_last + 1) * zeros.abs_tail_bound(k_last + 1, m) / (k_last + 1);
                    if (remainder <= 0.25 * spec.tail_tolerance) break;
                }
                double err = remainder;
                for (int k = p + 1; k <= k_last; ++k)
                    err += std::pow(absz, k) / k * zeros.power_tail_sum(k, m)->error;
                if (err <= spec.tail_tolerance) {
                    plan.terms = m;
                    plan.tail_terms = k_last;
                    plan.error = err;
                    plan.corrected = true;
                    return plan;
                }
            } else if (plan.raw_bound <= spec.tail_tolerance) {
                plan.terms = m;
                plan.error = plan.raw_bound;
                return plan;
            }
        }
        m *= 2;
        if (m > kMaxTruncation)
            fail(ErrorCode::TailNotBounded, "product tail above tolerance at |z| = " + std::to_string(absz) +
                                                " even with " + std::to_string(kMaxTruncation) + " factors");
    }
}

cplx reduce_branch(cplx log_value) {
    double im = std::remainder(log_value.imag(), 2.0 * kPi);
    if (im <= -kPi) im += 2.0 * kPi;
    return {log_value.real(), im};
}

cplx log_sum_scalar(const EntireFunctionSpec& spec, cplx z, const TailPlan& plan) {
    const auto& zeros = spec.zeros;
    const int p = spec.genus;
    cplx s = std::log(spec.constant);
    if (spec.multiplicity > 0) s += static_cast<double>(spec.multiplicity) * std::log(z);
    // pairwise-free but deterministic ascending-index accumulation
    for (std::size_t n = 1; n <= plan.terms; ++n) s += log_weierstrass_factor(z / zeros(n), p);
    if (plan.corrected) {
        cplx zk = std::pow(z, p + 1);
        for (int k = p + 1; k <= plan.tail_terms; ++k) {
            s -= zk / static_cast<double>(k) * zeros.power_tail_sum(k, plan.terms)->value;
            zk *= z;
        }
    }
    return s;
}

} // namespace

ProductValue eval_product(const EntireFunctionSpec& spec, cplx z) {
    const TailPlan plan = plan_truncation(spec, std::abs(z));
    ProductValue out;
    out.terms = plan.terms;
    out.tail_bound = plan.raw_bound;
    out.error = plan.error;
    if (z == cplx{}) {
        out.value = spec.multiplicity > 0 ? cplx{} : spec.constant;
        out.log_value = std::log(out.value);
        return out;
    }
    out.log_value = log_sum_scalar(spec, z, plan);
    out.value = std::exp(out.log_value);
    return out;
}

cplx principal_log(const EntireFunctionSpec& spec, cplx z) {
    if (z == cplx{}) return std::log(eval_product(spec, z).value);
    const TailPlan plan = plan_truncation(spec, std::abs(z));
    return reduce_branch(log_sum_scalar(spec, z, plan));
}

Jet log_product_jet(const EntireFunctionSpec& spec, const Jet& z) {
    const cplx z0 = z.value();
    if (z0 == cplx{}) fail(ErrorCode::InvalidArgument, "log of the product is singular at the origin");
    const TailPlan plan = plan_truncation(spec, std::abs(z0));
    const auto& zeros = spec.zeros;
    const int p = spec.genus;
    const std::size_t order = z.order();

    Jet s = Jet::constant(z.point(), order, std::log(spec.constant));
    if (spec.multiplicity > 0) s += log(z) * static_cast<double>(spec.multiplicity);
    for (std::size_t n = 1; n <= plan.terms; ++n) {
        const Jet u = z * (1.0 / zeros(n));
        Jet factor = log_with_constant(-u + 1.0, cplx{});
        if (p > 0) {
            Jet uk = u;
            for (int k = 1; k <= p; ++k) {
                factor += uk * (1.0 / k);
                if (k < p) uk = uk * u;
            }
        }
        factor[0] = log_weierstrass_factor(u.value(), p);
        s += factor;
    }
    if (plan.corrected) {
        Jet zk = z;
        for (int k = 1; k <= p; ++k) zk = zk * z;
        for (int k = p + 1; k <= plan.tail_terms; ++k) {
            s -= zk * (zeros.power_tail_sum(k, plan.terms)->value / static_cast<double>(k));
            zk = zk * z;
        }
    }
    s[0] = reduce_branch(s[0]);
    return s;
}

// ---------------------------------------------------------------------------
// Genus, convergence exponent, counting

namespace {

double snap_integer(double x) {
    const double r = std::round(x);
    return std::abs(x - r) < 1e-9 ? r : x;
}

} // namespace

int genus(const ZeroSequence& zeros) {
    switch (zeros.family()) {
    case ZeroFamily::Explicit:
        fail(ErrorCode::NotDeterminable, "genus of an explicit finite list is not determinable; supply it");
    case ZeroFamily::Power:
        return static_cast<int>(std::floor(snap_integer(1.0 / zeros.exponent())));
    case ZeroFamily::PowerLog: {
        const double x = snap_integer(1.0 / zeros.exponent());
        const int p = static_cast<int>(std::floor(x));
        // at the critical power sum (m ln^L m)^{-1} converges iff L > 1
        if (x == std::floor(x) && p >= 1 && zeros.log_power() > 1.0) return p - 1;
        return p;
    }
    case ZeroFamily::Geometric:
        return 0;
    }
    return 0;
}

double convergence_exponent(const ZeroSequence& zeros) {
    switch (zeros.family()) {
    case ZeroFamily::Power:
    case ZeroFamily::PowerLog:
        return 1.0 / zeros.exponent();
    case ZeroFamily::Geometric:
        return 0.0;
    case ZeroFamily::Explicit:
        break;
    }
    const auto& v = zeros.values();
    if (v.size() < 16)
        fail(ErrorCode::NotDeterminable, "convergence exponent needs at least 16 explicit zeros for a regression estimate");
    // least squares slope of ln n against ln |a_n| over the upper half of the list
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t cnt = 0;
    for (std::size_t n = v.size() / 2 + 1; n <= v.size(); ++n) {
        const double x = std::log(std::abs(v[n - 1]));
        const double y = std::log(static_cast<double>(n));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
    }
    const double denom = cnt * sxx - sx * sx;
    if (std::abs(denom) < 1e-300) fail(ErrorCode::NotDeterminable, "zero moduli do not spread; regression is singular");
    return std::max(0.0, (cnt * sxy - sx * sy) / denom);
}

std::size_t counting_function(const ZeroSequence& zeros, double r) {
    if (!(r > 0.0)) fail(ErrorCode::InvalidArgument, "counting radius must be positive");
    return zeros.count_below(r, false);
}

} // namespace fracevo::entire
