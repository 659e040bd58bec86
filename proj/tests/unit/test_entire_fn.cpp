#include <cmath>
#include <random>

#include "doctest.h"
#include "fracevo/entire_fn.hpp"
#include "oracles.hpp"

using namespace fracevo;
using namespace fracevo::entire;
using oracle::pi;

namespace {

ZeroSequence cos_sqrt_zeros() { return ZeroSequence::power(pi * pi, 2.0, -0.5); }

EntireFunctionSpec cos_sqrt_spec() {
    EntireFunctionSpec s;
    s.zeros = cos_sqrt_zeros();
    s.genus = 0;
    return s;
}

EntireFunctionSpec neg_power_spec(double e) {
    EntireFunctionSpec s;
    s.zeros = ZeroSequence::power(1.0, e, 0.0, {pi});
    s.genus = genus(s.zeros);
    return s;
}

template <class F>
ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an exception");
    return ErrorCode::InvalidArgument;
}

} // namespace

TEST_CASE("weierstrass factor values") {
    CHECK(std::abs(weierstrass_factor(0.0, 3) - 1.0) == 0.0);
    CHECK(std::abs(weierstrass_factor(1.0, 2)) == 0.0);
    CHECK(std::abs(weierstrass_factor(0.5, 1) - 0.5 * std::exp(0.5)) < 1e-15);
    CHECK(std::abs(weierstrass_factor(cplx{0.3, -2.0}, 0) - cplx{0.7, 2.0}) < 1e-15);
}

TEST_CASE("log factor agrees with direct evaluation for |z| <= 10, p <= 8") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> rad(0.0, 10.0), ang(-pi, pi);
    for (int trial = 0; trial < 400; ++trial) {
        const cplx z = std::polar(rad(rng), ang(rng));
        const int p = trial % 9;
        if (std::abs(1.0 - z) < 1e-6) continue;
        cplx partial{};
        for (int k = 1; k <= p; ++k) partial += std::pow(z, k) / static_cast<double>(k);
        // the exponent carries |z|^p / p of absolute rounding, so compare relative to its size
        double cond = 1.0;
        for (int k = 1; k <= p; ++k) cond += std::pow(std::abs(z), k) / k;
        const cplx log_direct = std::log(1.0 - z) + partial;
        const cplx lg = std::log(weierstrass_factor(z, p));
        if (std::isfinite(std::abs(lg))) {
            const cplx d = lg - log_direct;
            CHECK(std::abs(cplx{d.real(), std::remainder(d.imag(), 2 * pi)}) <= 1e-14 * cond);
        }
        const cplx d2 = log_weierstrass_factor(z, p) - log_direct;
        CHECK(std::abs(cplx{d2.real(), std::remainder(d2.imag(), 2 * pi)}) <= 1e-14 * cond);
    }
}

TEST_CASE("product of cos sqrt z zeros") {
    const auto spec = cos_sqrt_spec();
    CHECK(std::abs(eval_product(spec, 0.0).value - 1.0) == 0.0);
    CHECK(std::abs(eval_product(spec, pi * pi / 4.0).value) < 1e-12);
    const auto v = eval_product(spec, -100.0);
    CHECK(std::abs(v.value - std::cosh(10.0)) <= 1e-9 * std::cosh(10.0));
    CHECK(v.error <= spec.tail_tolerance);
    for (cplx z : {cplx{3.0, 4.0}, cplx{-50.0, 20.0}, cplx{200.0, -1.0}, cplx{0.1, 0.0}}) {
        const cplx ref = oracle::cos_sqrt(z);
        CHECK(std::abs(eval_product(spec, z).value - ref) <= 1e-9 * std::max(1.0, std::abs(ref)));
    }
}

TEST_CASE("tail correction against brute force") {
    // zeros -n^3: corrected truncation vs four million plain factors, whose own tail is below |z| / (2 N^2)
    const auto spec = neg_power_spec(3.0);
    for (cplx z : {cplx{5.0, 1.0}, cplx{-30.0, 2.0}, cplx{100.0, 100.0}}) {
        const cplx brute = oracle::naive_product_genus0([](std::size_t n) { return -std::pow(double(n), 3.0); },
                                                        4000000, z);
        const cplx v = eval_product(spec, z).value;
        CHECK(std::abs(v - brute) <= 1e-10 * std::abs(brute));
    }
}

TEST_CASE("explicit zero lists") {
    EntireFunctionSpec s;
    s.zeros = ZeroSequence::explicit_list({2.0, cplx{0, 1}, -1.0});
    s.genus = 0;
    s.constant = 3.0;
    s.multiplicity = 1;
    const cplx z{0.5, 0.25};
    const cplx ref = 3.0 * z * (1.0 - z / 2.0) * (1.0 - z / cplx{0, 1}) * (1.0 + z);
    CHECK(std::abs(eval_product(s, z).value - ref) < 1e-14);
    CHECK(eval_product(s, z).tail_bound == 0.0);

    EntireFunctionSpec prefix = s;
    prefix.zeros = ZeroSequence::explicit_list({2.0, 3.0}, false);
    CHECK(code_of([&] { eval_product(prefix, z); }) == ErrorCode::TailNotBounded);
    CHECK(code_of([&] { genus(s.zeros); }) == ErrorCode::NotDeterminable);
    CHECK(code_of([&] { ZeroSequence::explicit_list({0.0}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("explicit list sorting is deterministic") {
    const auto z = ZeroSequence::explicit_list({cplx{0, 2}, 1.0, -2.0, cplx{2, 0}});
    CHECK(z(1) == cplx{1.0, 0.0});
    CHECK(z(2) == cplx{2.0, 0.0});
    CHECK(z(3) == cplx{0.0, 2.0});
    CHECK(z(4) == cplx{-2.0, 0.0});
}

TEST_CASE("genus and convergence exponent") {
    CHECK(genus(ZeroSequence::power(1.0, 1.0)) == 1);
    CHECK(genus(ZeroSequence::power_log(1.0, 1.0, 2.0)) == 0);
    CHECK(genus(ZeroSequence::power(1.0, 2.0)) == 0);
    CHECK(genus(ZeroSequence::geometric(1.0, 2.0)) == 0);
    CHECK(convergence_exponent(ZeroSequence::power(1.0, 1.0)) == doctest::Approx(1.0));
    CHECK(convergence_exponent(ZeroSequence::power_log(1.0, 1.0, 2.0)) == doctest::Approx(1.0));
    CHECK(convergence_exponent(ZeroSequence::power(1.0, 2.0)) == doctest::Approx(0.5));
    CHECK(convergence_exponent(ZeroSequence::geometric(1.0, 2.0)) == 0.0);

    // regression oracle: n(r) = floor(sqrt r) has slope 1/2 on a log-log plot
    std::vector<cplx> sq;
    for (int n = 1; n <= 400; ++n) sq.push_back(double(n) * n);
    CHECK(convergence_exponent(ZeroSequence::explicit_list(sq)) == doctest::Approx(0.5).epsilon(0.02));
    CHECK(code_of([] { convergence_exponent(ZeroSequence::explicit_list({1.0, 2.0})); }) ==
          ErrorCode::NotDeterminable);
}

TEST_CASE("genus bracketed by convergence exponent") {
    for (double e : {0.3, 0.5, 0.7, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0}) {
        for (const auto& z : {ZeroSequence::power(1.0, e), ZeroSequence::power_log(1.0, e, 1.0),
                              ZeroSequence::power_log(1.0, e, 2.0)}) {
            const int p = genus(z);
            const double rho = convergence_exponent(z);
            CHECK(p <= rho + 1e-12);
            CHECK(rho <= p + 1 + 1e-12);
        }
    }
}

TEST_CASE("counting function") {
    const auto sq = ZeroSequence::power(1.0, 2.0);
    CHECK(counting_function(sq, 10.0) == 3);
    CHECK(counting_function(sq, 1.0) == 0);
    CHECK(counting_function(sq, 100.5) == 10);
    std::size_t prev = 0;
    for (double r = 0.5; r < 5000.0; r *= 1.07) {
        const std::size_t c = counting_function(sq, r);
        CHECK(c >= prev);
        // brute-force oracle
        std::size_t brute = 0;
        for (int n = 1; double(n) * n < r; ++n) ++brute;
        CHECK(c == brute);
        prev = c;
    }
}

TEST_CASE("tail bounds dominate partial sums") {
    const auto z = ZeroSequence::power(2.0, 1.5, 0.25, {0.0, 1.0});
    for (double q : {1.0, 2.0, 3.5}) {
        for (std::size_t m : {0u, 3u, 50u}) {
            double s = 0.0;
            for (std::size_t n = m + 1; n <= 200000; ++n) s += std::pow(z.modulus(n), -q);
            CHECK(s <= z.abs_tail_bound(q, m) * (1.0 + 1e-12));
        }
    }
    const auto g = ZeroSequence::geometric(1.0, 2.0);
    CHECK(g.abs_tail_bound(1.0, 0) == doctest::Approx(1.0));
    CHECK(ZeroSequence::power(1.0, 1.0).abs_tail_bound(1.0, 10) == std::numeric_limits<double>::infinity());

    const auto pl = ZeroSequence::power_log(1.0, 1.0, 2.0);
    double s = 0.0;
    for (std::size_t n = 21; n <= 2000000; ++n) s += 1.0 / pl.modulus(n);
    CHECK(s <= pl.abs_tail_bound(1.0, 20));
}

TEST_CASE("midpoint tail sums are within their error bound") {
    const auto z = ZeroSequence::power(1.5, 2.0, 0.0, {0.3, 2.0, -1.0});
    for (int k : {1, 2, 3}) {
        const auto t = z.power_tail_sum(k, 64);
        REQUIRE(t.has_value());
        cplx brute{};
        for (std::size_t n = 3000000; n > 64; --n) brute += std::pow(z(n), -k);
        // tail beyond the brute-force range is below 1e-13 for these exponents
        CHECK(std::abs(t->value - brute) <= t->error + 2e-7 / std::pow(3e6, 2.0 * k - 1.0));
    }
}

TEST_CASE("angular density ladder") {
    const auto sq = ZeroSequence::power(1.0, 2.0);
    const ProximateOrder half{0.5, 0.0};
    CHECK(angular_density(sq, half, -pi / 4, pi / 4).value == doctest::Approx(1.0).epsilon(1e-2));
    CHECK(angular_density(sq, half, pi / 4, pi / 2).value == 0.0);
    const auto full = upper_density(cos_sqrt_zeros(), half);
    CHECK(full.value == doctest::Approx(1.0 / pi).epsilon(1e-2));

    const auto dz = density_of_zeros(cos_sqrt_zeros(), half);
    REQUIRE(dz.jumps().size() == 1);
    CHECK(dz.jumps()[0].mass == doctest::Approx(1.0 / pi));
}

TEST_CASE("indicator closed forms") {
    const auto cos_mass = AngularDensity::atoms({{0.0, 1.0 / pi}});
    CHECK(indicator_H(0.5, cos_mass, pi) == doctest::Approx(1.0));
    CHECK(std::abs(indicator_H(0.5, cos_mass, 0.0)) < 1e-15);
    const auto neg = AngularDensity::atoms({{pi, 1.0}});
    CHECK(indicator_H(1.0 / 3.0, neg, 0.0) == doctest::Approx(2.0 * pi / std::sqrt(3.0)));
    CHECK(code_of([&] { indicator_H(1.0, neg, 0.0); }) == ErrorCode::OrderIntegral);

    // single jump of mass d at phi0: (pi d / sin pi rho) cos rho (|psi - phi0| - pi)
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double rho = 0.05 + 0.9 * u(rng);
        if (std::abs(rho - 0.5) < 1e-3) continue;
        const double phi0 = 2.0 * pi * u(rng);
        const double mass = 2.0 * u(rng);
        const double psi = -pi + 2.0 * pi * u(rng);
        if (std::abs(psi - phi0) > pi) continue;
        const auto d = AngularDensity::atoms({{phi0, mass}});
        const double ref = pi * mass / std::sin(pi * rho) * std::cos(rho * (std::abs(psi - phi0) - pi));
        CHECK(indicator_H(rho, d, psi) == doctest::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("indicator against an absolutely continuous density") {
    // uniform density c on [0, 2 pi]: H = c pi / sin(pi rho) * int_0^{2 pi} cos rho (x - pi) dx
    const double c = 0.3, rho = 0.4;
    const auto d = AngularDensity::from_knots({{2.0 * pi, c * 2.0 * pi}});
    const double ref = c * pi / std::sin(pi * rho) * 2.0 * std::sin(rho * pi) / rho;
    for (double psi : {-2.0, 0.0, 1.3, pi})
        CHECK(indicator_H(rho, d, psi) == doctest::Approx(ref).epsilon(1e-7));
}

TEST_CASE("indicator positivity") {
    const auto rep = check_indicator_positivity(0.5, AngularDensity::atoms({{0.0, 1.0 / pi}}), 181);
    CHECK(rep.nonnegative);
    REQUIRE(rep.zero_points.size() == 1);
    CHECK(std::abs(rep.psi[rep.zero_points[0]]) < 1e-14);

    const auto rep2 = check_indicator_positivity(1.0 / 3.0, AngularDensity::atoms({{pi, 1.0}}), 181);
    CHECK(rep2.nonnegative);
    CHECK(rep2.zero_points.empty());
    CHECK(rep2.min_value > 0.0);

    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const double rho = trial == 0 ? 0.25 : 0.01 + 0.49 * u(rng);
        std::vector<double> angles;
        for (int k = 0; k < 8; ++k) angles.push_back(2.0 * pi * u(rng));
        std::sort(angles.begin(), angles.end());
        std::vector<AngularDensity::Knot> knots;
        double mass = 0.0;
        for (double a : angles) {
            mass += u(rng);
            knots.push_back({a, mass});
            if (u(rng) < 0.5) {
                mass += u(rng);
                knots.push_back({a, mass});
            }
        }
        const auto r = check_indicator_positivity(rho, AngularDensity::from_knots(knots), 61);
        CHECK(r.nonnegative);
    }
}

TEST_CASE("exceptional circles") {
    const auto neg_cubes = ZeroSequence::power(1.0, 3.0, 0.0, {pi});
    const ProximateOrder third{1.0 / 3.0, 0.0};
    const auto circ = exceptional_circles(neg_cubes, third, 0.1, ExceptionalCondition::II);
    CHECK(ray_clearance(circ, 0.0).clear);
    CHECK(ray_clearance(circ, 0.0).last_hit == 0);
    CHECK(circ.circles[9].radius == doctest::Approx(0.1 * std::pow(1000.0, 2.0 / 3.0)));

    const auto on_ray = exceptional_circles(ZeroSequence::power(1.0, 3.0), third, 0.1, ExceptionalCondition::II);
    CHECK_FALSE(ray_clearance(on_ray, 0.0).clear);

    CHECK(code_of([] {
              exceptional_circles(ZeroSequence::power(1.0, 1.0), ProximateOrder{1.0, 0.0}, 2.0,
                                  ExceptionalCondition::II);
          }) == ErrorCode::ConditionViolated);
    CHECK_NOTHROW(exceptional_circles(ZeroSequence::power(1.0, 2.0), ProximateOrder{0.5, 0.0}, 1.0,
                                      ExceptionalCondition::II));

    // condition I with well separated rays of a geometric family
    const auto geo = ZeroSequence::geometric(1.0, 3.0, {0.0, pi});
    const auto c1 = exceptional_circles(geo, ProximateOrder{0.1, 0.0}, 0.1, ExceptionalCondition::I, 60);
    CHECK(c1.circles.size() == 60);
    CHECK(c1.circles[0].radius == doctest::Approx(0.1 * std::pow(3.0, 0.95)));
    // zeros crowding one ray eventually overlap under the condition-I radius law
    CHECK(code_of([&] { exceptional_circles(neg_cubes, third, 0.1, ExceptionalCondition::I); }) ==
          ErrorCode::ConditionViolated);
}

TEST_CASE("growth estimates") {
    const auto ladder = radius_ladder(1000.0, 7);
    const auto cs = order_type_estimate([](cplx z) { return oracle::log_abs_cos_sqrt(z); }, ladder);
    CHECK(cs.order == doctest::Approx(0.5).epsilon(0.05));
    CHECK(cs.type == doctest::Approx(1.0).epsilon(0.1));

    const auto ex = order_type_estimate_values([](cplx z) { return std::exp(z); }, radius_ladder(10.0, 6));
    CHECK(ex.order == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(ex.type == doctest::Approx(1.0).epsilon(1e-2));

    const auto poly = order_type_estimate([](cplx z) { return 3.0 * std::log(std::abs(z)); }, radius_ladder(1e20, 8));
    CHECK(std::abs(poly.order) < 0.05);

    CHECK(code_of([] { order_type_estimate_values([](cplx z) { return std::exp(z); }, radius_ladder(400.0, 3)); }) ==
          ErrorCode::SamplingOverflow);
}

TEST_CASE("growth of products of order 1/4 and 1/3") {
    for (double e : {4.0, 3.0}) {
        const auto spec = neg_power_spec(e);
        const auto est = order_type_estimate(spec, radius_ladder(1e4, 6), 90);
        CHECK(std::abs(est.order - 1.0 / e) <= 0.05);
    }
}

TEST_CASE("cos sqrt z indicator asymptotics") {
    const auto spec = cos_sqrt_spec();
    for (double r : {1e4, 1e5, 1e6}) {
        for (double psi : {pi / 6, pi / 2, 5 * pi / 6}) {
            for (double sgn : {1.0, -1.0}) {
                const double lv = eval_product(spec, std::polar(r, sgn * psi)).log_value.real();
                CHECK(std::abs(lv / std::sqrt(r) - std::sin(psi / 2.0)) <= 0.05);
            }
        }
    }
}

TEST_CASE("lower bound on a ray") {
    const auto spec = neg_power_spec(3.0);
    const auto radii = radius_ladder(1e3, 10);
    const auto rep = lower_bound_on_ray(spec, 0.0, 0.5, radii);
    CHECK(rep.modulus_bound_holds);
    CHECK(rep.image_in_sector);
    CHECK(rep.real_part_bound_holds);
    CHECK(rep.indicator == doctest::Approx(2.0 * pi / std::sqrt(3.0)));
    CHECK(rep.empirical_exponent == doctest::Approx(1.0 / 3.0).epsilon(0.15));

    const auto rep45 = lower_bound_on_ray(spec, pi / 4, 0.5, radii);
    CHECK(rep45.modulus_bound_holds);
    CHECK(rep45.indicator == doctest::Approx(2.0 * pi / std::sqrt(3.0) * std::cos(pi / 12)));
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const cplx z = std::polar(radii[i], pi / 4);
        const auto direct = oracle::naive_product_genus0([](std::size_t n) { return -std::pow(double(n), 3.0); },
                                                         200000, z);
        CHECK(rep45.log_abs[i] == doctest::Approx(std::log(std::abs(direct))).epsilon(1e-6));
    }

    // an exponent above the indicator is detected
    RayBoundOptions greedy;
    greedy.epsilon = -0.3;
    CHECK(code_of([&] { lower_bound_on_ray(spec, 0.0, 0.5, radii, greedy); }) == ErrorCode::BoundViolated);

    EntireFunctionSpec on_ray;
    on_ray.zeros = ZeroSequence::power(1.0, 3.0);
    CHECK(code_of([&] { lower_bound_on_ray(on_ray, 0.0, 0.5, radii); }) == ErrorCode::PreconditionFailed);
}

TEST_CASE("jet of the log product matches finite differences") {
    const auto spec = neg_power_spec(3.0);
    const cplx z0{2.0, 0.5};
    const Jet j = log_product_jet(spec, Jet::variable(z0, 4));
    CHECK(std::abs(std::exp(j.value()) - eval_product(spec, z0).value) < 1e-12 * std::abs(eval_product(spec, z0).value));
    const double h = 1e-3;
    auto lf = [&](cplx z) { return std::log(eval_product(spec, z).value); };
    const cplx d1 = (lf(z0 + h) - lf(z0 - h)) / (2 * h);
    const cplx d2 = (lf(z0 + h) - 2.0 * lf(z0) + lf(z0 - h)) / (h * h);
    CHECK(std::abs(j[1] - d1) < 1e-6);
    CHECK(std::abs(j[2] - d2 / 2.0) < 1e-4);
}
