#pragma once

// Entire functions of finite order given by their zeros: canonical products,
// growth estimation, angular density of zeros, the indicator and the
// exceptional-circle geometry used by ray lower bounds.

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fracevo/errors.hpp"
#include "fracevo/jet.hpp"

namespace fracevo::entire {

inline constexpr double kPi = 3.14159265358979323846;

enum class ZeroFamily { Explicit, Power, PowerLog, Geometric };

/// Proximate order rho(r) = rho + c / ln r (c = 0 gives the constant order).
struct ProximateOrder {
    double rho = 0.5;
    double log_correction = 0.0;

    double at(double r) const;
    /// r^{rho(r)}
    double scale(double r) const;
};

/// Nonzero zeros a_1, a_2, ... with nondecreasing moduli.
///
/// Parametric families cycle through `angles`: arg a_n = angles[(n - 1) mod L].
///  - Power:     a_n = scale * (n + shift)^exponent
///  - PowerLog:  a_n = scale * (m * ln^log_power m)^exponent, m = n + offset
///  - Geometric: a_n = scale * base^n
/// Explicit lists are sorted by modulus; ties broken by argument, then input order.
class ZeroSequence {
public:
    static ZeroSequence explicit_list(std::vector<cplx> zeros, bool complete = true);
    static ZeroSequence power(double scale, double exponent, double shift = 0.0,
                              std::vector<double> angles = {0.0});
    static ZeroSequence power_log(double scale, double exponent, double log_power, double offset = 1.0,
                                  std::vector<double> angles = {0.0});
    static ZeroSequence geometric(double scale, double base, std::vector<double> angles = {0.0});

    ZeroFamily family() const noexcept { return family_; }
    bool finite() const noexcept { return family_ == ZeroFamily::Explicit; }
    /// Whether an explicit list is the full zero set (true) or only a prefix of it.
    bool complete() const noexcept { return complete_; }
    std::optional<std::size_t> count() const;

    /// a_n, 1-based.
    cplx operator()(std::size_t n) const;
    double modulus(std::size_t n) const;

    double scale() const noexcept { return scale_; }
    double exponent() const noexcept { return exponent_; }
    double shift() const noexcept { return shift_; }
    double log_power() const noexcept { return log_power_; }
    double base() const noexcept { return base_; }
    const std::vector<double>& angles() const noexcept { return angles_; }
    const std::vector<cplx>& values() const noexcept { return values_; }

    /// #{n : |a_n| < r} (strict) or #{n : |a_n| <= r} (inclusive).
    std::size_t count_below(double r, bool inclusive = false) const;
    /// #{n : |a_n| <= r, phi < arg a_n < psi}, arguments taken modulo 2 pi.
    std::size_t count_in_sector(double r, double phi, double psi) const;

    /// Upper bound for sum_{n > m} |a_n|^{-q} by integral comparison; +inf when divergent.
    double abs_tail_bound(double q, std::size_t m) const;

    struct TailSum {
        cplx value;
        double error;
    };
    /// Power families only: midpoint-rule estimate of sum_{n > m} a_n^{-k} with a bound on its error.
    std::optional<TailSum> power_tail_sum(int k, std::size_t m) const;

private:
    ZeroFamily family_ = ZeroFamily::Explicit;
    bool complete_ = true;
    double scale_ = 1.0;
    double exponent_ = 1.0;
    double shift_ = 0.0;
    double log_power_ = 0.0;
    double base_ = 2.0;
    std::vector<double> angles_{0.0};
    std::vector<cplx> values_;
};

/// C z^m prod_n G(z / a_n; p): a canonical product with the exponential factor reduced to a constant.
struct EntireFunctionSpec {
    ZeroSequence zeros = ZeroSequence::explicit_list({});
    int genus = 0;
    cplx constant{1.0, 0.0};
    int multiplicity = 0;
    std::size_t truncation = 256;
    double tail_tolerance = 1e-12;

    /// Throws InvalidArgument when the genus disagrees with a parametric family.
    void validate() const;
};

cplx weierstrass_factor(cplx z, int p);
/// ln G(z; p) on the principal branch of each piece, accurate for small |z|.
cplx log_weierstrass_factor(cplx z, int p);

struct ProductValue {
    cplx value;        // may overflow to inf for large |z|; use log_value then
    cplx log_value;    // sum of factor logarithms (imaginary part not reduced)
    double tail_bound; // rigorous bound on |sum_{n > M} ln G(z / a_n; p)|
    double error;      // bound on the error left after the tail correction
    std::size_t terms; // M
};

ProductValue eval_product(const EntireFunctionSpec& spec, cplx z);

/// ln phi along a jet argument. The constant term is reduced to the principal
/// branch arg in (-pi, pi].
Jet log_product_jet(const EntireFunctionSpec& spec, const Jet& z);

/// Principal argument of phi(z) and ln|phi(z)| without overflow.
cplx principal_log(const EntireFunctionSpec& spec, cplx z);

int genus(const ZeroSequence& zeros);
double convergence_exponent(const ZeroSequence& zeros);
std::size_t counting_function(const ZeroSequence& zeros, double r);

struct LadderOptions {
    double r0 = 1.0e6;
    std::size_t rungs = 20;
    double tolerance = 1.0e-2;
};

struct DensityEstimate {
    double value = 0.0;
    std::vector<double> radii;
    std::vector<double> ratios;
    double spread = 0.0;
};

DensityEstimate angular_density(const ZeroSequence& zeros, const ProximateOrder& order, double phi, double psi,
                                const LadderOptions& options = {});
DensityEstimate upper_density(const ZeroSequence& zeros, const ProximateOrder& order,
                              const LadderOptions& options = {});

/// Nondecreasing Delta on [0, 2 pi] from cumulative knots. Delta(0) = 0, linear
/// between knots at distinct angles, a repeated angle is a jump, constant after the last knot.
class AngularDensity {
public:
    struct Knot {
        double angle;
        double mass;
    };
    struct Jump {
        double angle;
        double mass;
    };
    struct Segment {
        double from;
        double to;
        double mass;
    };

    AngularDensity() = default;
    static AngularDensity from_knots(std::vector<Knot> knots);
    static AngularDensity atoms(std::vector<Jump> jumps);

    const std::vector<Knot>& knots() const noexcept { return knots_; }
    std::vector<Jump> jumps() const;
    std::vector<Segment> segments() const;
    double total_mass() const;
    double operator()(double angle) const;

private:
    std::vector<Knot> knots_;
};

/// Delta for a zero family: closed form for power families, ladder estimates otherwise.
AngularDensity density_of_zeros(const ZeroSequence& zeros, const ProximateOrder& order,
                                const LadderOptions& options = {});

double indicator_H(double order, const AngularDensity& delta, double psi, std::size_t panels = 10000);

struct PositivityReport {
    std::vector<double> psi;
    std::vector<double> values;
    std::vector<std::size_t> zero_points;
    bool nonnegative = true;
    double min_value = 0.0;
};

PositivityReport check_indicator_positivity(double order, const AngularDensity& delta, std::size_t grid_points = 181);

enum class ExceptionalCondition { I, II };

struct ExceptionalCircles {
    struct Circle {
        cplx center;
        double radius;
        std::size_t index;
    };
    ExceptionalCondition condition = ExceptionalCondition::II;
    double d = 0.0;
    std::vector<Circle> circles;
};

ExceptionalCircles exceptional_circles(const ZeroSequence& zeros, const ProximateOrder& order, double d,
                                       ExceptionalCondition condition, std::size_t prefix = 2000);

struct RayClearance {
    bool clear = false;
    std::size_t last_hit = 0; // index of the last circle the ray meets, 0 if none
    std::size_t checked = 0;
};

RayClearance ray_clearance(const ExceptionalCircles& circles, double theta);

struct GrowthEstimate {
    double order = 0.0;
    double type = 0.0;
    ProximateOrder proximate{};
    std::vector<double> radii;
    std::vector<double> log_max_modulus;
    std::vector<double> local_slopes;
    double residual = 0.0;
    double spread = 0.0;
};

using LogModulusFn = std::function<double(cplx)>;

std::vector<double> radius_ladder(double r0, std::size_t rungs);

/// Order and type from ln ln M_f(r) = ln sigma + rho ln r fitted on the last three rungs.
GrowthEstimate order_type_estimate(const LogModulusFn& log_abs_f, std::span<const double> radii,
                                   std::size_t samples = 720);
GrowthEstimate order_type_estimate_values(const std::function<cplx(cplx)>& f, std::span<const double> radii,
                                          std::size_t samples = 720);
GrowthEstimate order_type_estimate(const EntireFunctionSpec& spec, std::span<const double> radii,
                                   std::size_t samples = 720);

struct RayBoundOptions {
    double epsilon = 0.05;
    double d = 0.1;
    ExceptionalCondition condition = ExceptionalCondition::II;
};

struct RayBoundReport {
    double theta = 0.0;
    double order = 0.0;
    double indicator = 0.0;
    double epsilon = 0.0;
    double modulus_constant = 0.0;
    double real_constant = 0.0;
    std::vector<double> radii;
    std::vector<double> log_abs;
    std::vector<double> arg;
    bool modulus_bound_holds = true;
    bool image_in_sector = true;
    bool real_part_bound_holds = true;
    double empirical_exponent = 0.0;
    std::size_t clearance_prefix = 0;
};

RayBoundReport lower_bound_on_ray(const EntireFunctionSpec& spec, double theta, double zeta,
                                  std::span<const double> radii, const RayBoundOptions& options = {});

} // namespace fracevo::entire
