#include <cmath>
#include <random>

#include "doctest.h"

#include "fracevo/solver.hpp"
#include "specimens.hpp"

using namespace fracevo;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an exception");
    return ErrorCode::InvalidArgument;
}

Vec vec(std::initializer_list<cplx> xs) {
    Vec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (auto x : xs) v(i++) = x;
    return v;
}

// 5-point central difference of a complex function of a complex variable along the real direction.
cplx d5(const std::function<cplx(cplx)>& g, cplx z, double h) {
    return (-g(z + 2.0 * h) + 8.0 * g(z + h) - 8.0 * g(z - h) + g(z - 2.0 * h)) / (12.0 * h);
}

CauchyProblem diag_problem() {
    CauchyProblem p{SpectralOperator::assemble(specimen::diagonal({1.0, 0.5})), specimen::identity(), 2.0,
                    vec({1.0, 1.0}), {0.1, 0.5, 1.0, 5.0}};
    return p;
}

CauchyProblem jordan_problem() {
    CauchyProblem p{SpectralOperator::assemble(specimen::jordan2()), specimen::identity(), 1.0, vec({0.0, 1.0}),
                    {0.1, 0.5, 1.0, 5.0}};
    return p;
}

} // namespace

TEST_CASE("jet_of_exp_neg_phi_alpha: identity, alpha = 1") {
    const auto phi = specimen::identity();
    for (cplx mu : {cplx{1.0}, cplx{0.5}, cplx{0.8, 0.2}}) {
        for (double t : {0.3, 1.0, 2.5}) {
            const Jet j = jet_of_exp_neg_phi_alpha(phi, 1.0, t, mu, 3);
            const cplx lam = 1.0 / mu;
            const cplx e = std::exp(-lam * t);
            CHECK(std::abs(j[0] - e) <= 1e-15 * std::abs(e) + 1e-300);
            CHECK(std::abs(j[1] / e - t * lam * lam) <= 1e-13 * std::abs(t * lam * lam));
            const cplx h2 = t * t * std::pow(lam, 4) / 2.0 - t * std::pow(lam, 3);
            CHECK(std::abs(j[2] / e - h2) <= 1e-12 * (1.0 + std::abs(h2)));
        }
    }
}

TEST_CASE("jet coefficients match finite differences") {
    // d^m/dzeta^m exp(-phi^alpha(1/zeta) t) / m!, nested 5-point differences
    for (const auto& phi : {specimen::identity(), specimen::negative_power(3.0), specimen::negative_power(4.0)}) {
        for (double alpha : {1.5, 2.0}) {
            const cplx mu{0.9, 0.05};
            const double t = 0.7;
            const Jet j = jet_of_exp_neg_phi_alpha(phi, alpha, t, mu, 3);
            auto g0 = [&](cplx z) { return std::exp(-phi_alpha(phi, alpha, 1.0 / z) * t); };
            auto g1 = [&](cplx z) { return d5(g0, z, 1e-3); };
            auto g2 = [&](cplx z) { return d5(g1, z, 1e-2); };
            const cplx fd1 = d5(g0, mu, 1e-3);
            const cplx fd2 = d5(g1, mu, 1e-2) / 2.0;
            const cplx fd3 = d5(g2, mu, 2e-2) / 6.0;
            CHECK(std::abs(j[1] - fd1) <= 1e-5 * std::abs(j[1]));
            CHECK(std::abs(j[2] - fd2) <= 1e-5 * std::abs(j[2]));
            CHECK(std::abs(j[3] - fd3) <= 1e-4 * std::abs(j[3]));
        }
    }
}

TEST_CASE("h_coefficients: normalized jet") {
    const auto phi = specimen::negative_power(3.0);
    const cplx mu{0.9, 0.05};
    const auto h = h_coefficients(phi, 2.0, 0.7, mu, 3);
    const Jet j = jet_of_exp_neg_phi_alpha(phi, 2.0, 0.7, mu, 3);
    CHECK(h[0] == cplx{1.0});
    for (std::size_t m = 1; m <= 3; ++m) CHECK(std::abs(h[m] * j[0] - j[m]) <= 1e-14 * std::abs(j[m]));
    // identity, alpha = 1: H_1 = t / mu^2
    CHECK(std::abs(h_coefficients(specimen::identity(), 1.0, 0.5, 2.0, 1)[1] - 0.125) <= 1e-15);
}

TEST_CASE("coefficients: jet-weighted chain sums on small chains") {
    const auto op = SpectralOperator::assemble(specimen::jordan2());
    const auto bi = biorthogonal(op);
    const auto phi = specimen::identity();
    for (double t : {0.2, 1.0}) {
        const auto c = coefficients(op, bi, phi, 1.0, vec({0.0, 1.0}), t, 0);
        CHECK(std::abs(c[0] - t * std::exp(-t)) <= 1e-15);
        CHECK(std::abs(c[1] - std::exp(-t)) <= 1e-15);
    }
    const auto z = coefficients(op, bi, phi, 1.0, Vec::Zero(2), 1.0, 0);
    CHECK(z[0] == cplx{});
    CHECK(z[1] == cplx{});

    const auto dop = SpectralOperator::assemble(specimen::diagonal({1.0, 0.5}));
    const auto dbi = biorthogonal(dop);
    const auto c1 = coefficients(dop, dbi, phi, 2.0, vec({3.0, 1.0}), 0.5, 1);
    CHECK(std::abs(c1[0] - std::exp(-4.0 * 0.5)) <= 1e-15);
}

TEST_CASE("group_annuli") {
    const auto op = SpectralOperator::assemble(specimen::diagonal({1.0, 0.5}));
    const auto g = group_annuli(op, 1.0, 0.5);
    CHECK(g.nudged);
    REQUIRE(g.groups.size() >= 3);
    CHECK(g.groups[0].empty());
    CHECK(g.groups[1] == std::vector<std::size_t>{0});
    CHECK(g.groups[2] == std::vector<std::size_t>{1});
    CHECK(g.nonempty() == 2);

    const auto single = SpectralOperator::assemble(specimen::diagonal({0.7}));
    CHECK(group_annuli(single, 1.0, 0.5).nonempty() == 1);

    std::vector<cplx> mus;
    for (int k = 0; k <= 30; ++k) mus.push_back(std::pow(10.0, -3.0 * k / 30.0));
    const auto spread = SpectralOperator::assemble(specimen::diagonal(mus));
    const auto fine = group_annuli(spread, 0.9, 0.01);
    const double expected = std::log(1000.0 / 0.9) / -std::log(0.99);
    CHECK(static_cast<double>(fine.groups.size()) == doctest::Approx(expected).epsilon(0.02));
    CHECK(fine.nonempty() == 31);
    CHECK(code_of([&] { group_annuli(op, 1.0, 1.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("solve: diagonal closed form and small-t limit") {
    auto p = diag_problem();
    p.times = {1e-4, 1e-3, 0.1, 0.5, 1.0, 5.0};
    const auto sol = solve(p);
    for (std::size_t i = 0; i < p.times.size(); ++i) {
        const double t = p.times[i];
        CHECK(std::abs(sol.u[i](0) - std::exp(-t)) <= 1e-14);
        CHECK(std::abs(sol.u[i](1) - std::exp(-4.0 * t)) <= 1e-14);
    }
    CHECK((sol.u[0] - p.f).norm() <= 1e-3 * p.f.norm());
    CHECK(sol.audit.pass);
}

TEST_CASE("solve: Jordan block") {
    const auto p = jordan_problem();
    const auto sol = solve(p);
    for (std::size_t i = 0; i < p.times.size(); ++i) {
        const double t = p.times[i];
        CHECK(std::abs(sol.u[i](0) - t * std::exp(-t)) <= 1e-14);
        CHECK(std::abs(sol.u[i](1) - std::exp(-t)) <= 1e-14);
    }
}

TEST_CASE("solve agrees with the contour integral") {
    OperatorSpec s;
    s.eigenvalues = {cplx{1.0, 0.05}, 0.7, cplx{1.3, -0.05}, 0.9};
    s.chains = {{0, 3}, {1, 1}, {2, 2}, {3, 1}, {1, 2}};
    s.basis.kind = BasisKind::SeededRandom;
    s.basis.seed = 5;
    s.basis.scale = 0.2;
    s.sector = {-0.2, 0.2};
    CauchyProblem p{SpectralOperator::assemble(s), specimen::negative_power(3.0), 2.0, Vec::Ones(9),
                    {0.1, 0.5, 1.0, 5.0}};
    p.force = true;
    const auto sol = solve(p);
    const auto c = build_contour(p.op, p.phi, p.alpha, 0.1, 1e-12);
    const auto q = contour_integral(p.op, p.phi, p.alpha, p.times, p.f, c);
    for (std::size_t i = 0; i < p.times.size(); ++i)
        CHECK((sol.u[i] - q[i].value).norm() <= 1e-8 * p.f.norm());
}

TEST_CASE("solve: regrouping and diagonalizable reduction") {
    OperatorSpec s;
    s.eigenvalues = {1.0, 0.6, 0.35, 0.2};
    s.chains = {{0, 1}, {1, 2}, {2, 1}, {3, 1}};
    s.basis.kind = BasisKind::SeededRandom;
    s.basis.seed = 9;
    CauchyProblem p{SpectralOperator::assemble(s), specimen::identity(), 2.0, Vec::Ones(5), {0.2, 1.0}};
    p.force = true;
    p.kappa = 0.3;
    const auto a = solve(p);
    p.kappa = 0.7;
    const auto b = solve(p);
    CHECK(a.grouping.groups.size() != b.grouping.groups.size());
    for (std::size_t i = 0; i < 2; ++i) CHECK((a.u[i] - b.u[i]).norm() <= 1e-10 * a.u[i].norm());

    // all chains of length one: u = sum e^{-lambda^alpha t} (f, g_q) e_q
    const auto d = SpectralOperator::assemble([] {
        auto sp = specimen::diagonal({1.0, cplx{0.6, 0.1}, 0.3});
        sp.basis.kind = BasisKind::SeededRandom;
        sp.basis.seed = 4;
        return sp;
    }());
    CauchyProblem dp{d, specimen::identity(), 1.5, vec({1.0, cplx{0.0, 2.0}, -1.0}), {0.7}};
    dp.force = true;
    const auto ds = solve(dp);
    const auto bi = biorthogonal(d);
    Vec expect = Vec::Zero(3);
    for (Eigen::Index q = 0; q < 3; ++q) {
        const cplx lam = d.characteristic(static_cast<std::size_t>(q));
        expect += std::exp(-std::pow(lam, 1.5) * 0.7) * inner(dp.f, bi.dual.col(q)) * d.basis().col(q);
    }
    CHECK((ds.u[0] - expect).norm() <= 1e-14 * expect.norm());
}

TEST_CASE("solve is linear in f") {
    auto p = jordan_problem();
    p.f = vec({1.0, 0.0});
    const auto a = solve(p);
    p.f = vec({0.0, 1.0});
    const auto b = solve(p);
    p.f = vec({cplx{2.0, 1.0}, -3.0});
    const auto c = solve(p);
    for (std::size_t i = 0; i < p.times.size(); ++i)
        CHECK((c.u[i] - cplx{2.0, 1.0} * a.u[i] + 3.0 * b.u[i]).norm() <= 1e-14);
}

TEST_CASE("solve: audit gate and arguments") {
    CauchyProblem p = diag_problem();
    EntireFunctionSpec order1;
    order1.zeros = entire::ZeroSequence::power(1.0, 1.0, 0.0, {specimen::pi});
    order1.genus = 1;
    p.phi = order1;
    CHECK(code_of([&] { solve(p); }) == ErrorCode::AuditFailed);
    p.force = true;
    const auto sol = solve(p);
    CHECK(sol.forced);
    CHECK_FALSE(sol.audit.pass);

    auto q = diag_problem();
    q.alpha = 0.5;
    CHECK(code_of([&] { solve(q); }) == ErrorCode::InvalidArgument);
    q = diag_problem();
    q.times = {1.0, 0.5};
    CHECK(code_of([&] { solve(q); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("hypothesis_audit examples") {
    {
        CauchyProblem p{SpectralOperator::assemble(specimen::diagonal({1.0, 0.5}, specimen::pi / 8)),
                        specimen::negative_power(3.0), 2.0, Vec::Ones(2), {1.0}};
        const auto rep = hypothesis_audit(p);
        for (const auto& c : rep.checks) CHECK_MESSAGE(c.pass, c.name << ": " << c.evidence);
        CHECK(rep.pass);
    }
    {
        CauchyProblem p = diag_problem();
        EntireFunctionSpec order1;
        order1.zeros = entire::ZeroSequence::power(1.0, 1.0, 0.0, {specimen::pi});
        order1.genus = 1;
        p.phi = order1;
        const auto rep = hypothesis_audit(p);
        CHECK_FALSE(rep.checks[0].pass);
        CHECK(rep.checks[0].value == doctest::Approx(1.0).epsilon(0.1));
    }
    {
        CauchyProblem p = diag_problem();
        p.phi = specimen::negative_power(3.0);
        p.phi.zeros = entire::ZeroSequence::power(1.0, 3.0, 0.0, {0.0});
        const auto rep = hypothesis_audit(p);
        CHECK_FALSE(rep.checks[2].pass);
        CHECK(rep.checks[2].name == "zeros");
    }
}

TEST_CASE("uniqueness_indicator examples") {
    {
        const auto rep = uniqueness_indicator(diag_problem(), 1000);
        CHECK(rep.negative == 0);
        CHECK(rep.min_sampled > 0.0);
        CHECK(rep.field_min == doctest::Approx(1.0));
    }
    {
        CauchyProblem p = diag_problem();
        p.op = SpectralOperator::assemble(specimen::diagonal({std::polar(1.0, 3.0 * specimen::pi / 4), 1.0}, 3.0));
        const auto rep = uniqueness_indicator(p, 1000);
        CHECK(rep.negative > 0);
    }
    {
        const auto rep = uniqueness_indicator(jordan_problem(), 4000);
        CHECK(rep.field_min == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(rep.min_sampled >= 0.5 - 1e-12);
        CHECK(rep.min_sampled <= 0.52);
    }
}
