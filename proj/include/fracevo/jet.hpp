#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "fracevo/errors.hpp"

namespace fracevo {

using cplx = std::complex<double>;

/// Default cap on the number of Taylor coefficients a jet may carry.
inline constexpr std::size_t kJetCap = 64;

// Truncated power series sum_k c_k (x - point)^k, k = 0..order.
class Jet {
public:
    Jet() = default;
    Jet(cplx point, std::size_t order) : point_(point), c_(order + 1, cplx{0.0, 0.0}) {
        if (order + 1 > kJetCap)
            fail(ErrorCode::JetOverflow, "jet order " + std::to_string(order) + " exceeds cap");
    }

    static Jet constant(cplx point, std::size_t order, cplx value) {
        Jet j(point, order);
        j.c_[0] = value;
        return j;
    }
    // The independent variable x itself, expanded at `point`.
    static Jet variable(cplx point, std::size_t order) {
        Jet j(point, order);
        j.c_[0] = point;
        if (order >= 1) j.c_[1] = 1.0;
        return j;
    }

    std::size_t order() const noexcept { return c_.size() - 1; }
    cplx point() const noexcept { return point_; }
    cplx& operator[](std::size_t k) { return c_[k]; }
    const cplx& operator[](std::size_t k) const { return c_[k]; }
    const std::vector<cplx>& coefficients() const noexcept { return c_; }
    cplx value() const { return c_[0]; }

    Jet& operator+=(const Jet& o) {
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
        return *this;
    }
    Jet& operator*=(cplx s) {
        for (auto& v : c_) v *= s;
        return *this;
    }
    Jet& operator+=(cplx s) {
        c_[0] += s;
        return *this;
    }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(Jet a, cplx s) { return a *= s; }
    friend Jet operator*(cplx s, Jet a) { return a *= s; }
    friend Jet operator+(Jet a, cplx s) { return a += s; }
    friend Jet operator-(Jet a) { return a *= -1.0; }

    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r(a.point_, a.order());
        const std::size_t n = a.c_.size();
        for (std::size_t i = 0; i < n; ++i) {
            if (a.c_[i] == cplx{}) continue;
            for (std::size_t j = 0; i + j < n; ++j) r.c_[i + j] += a.c_[i] * b.c_[j];
        }
        return r;
    }

    friend Jet reciprocal(const Jet& a) {
        if (a.c_[0] == cplx{}) fail(ErrorCode::InvalidArgument, "reciprocal of a jet with zero constant term");
        Jet r(a.point_, a.order());
        const cplx inv0 = 1.0 / a.c_[0];
        r.c_[0] = inv0;
        for (std::size_t n = 1; n < a.c_.size(); ++n) {
            cplx s{};
            for (std::size_t k = 1; k <= n; ++k) s += a.c_[k] * r.c_[n - k];
            r.c_[n] = -inv0 * s;
        }
        return r;
    }
    friend Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

    friend Jet exp(const Jet& a) {
        Jet r(a.point_, a.order());
        r.c_[0] = std::exp(a.c_[0]);
        for (std::size_t n = 1; n < a.c_.size(); ++n) {
            cplx s{};
            for (std::size_t k = 1; k <= n; ++k) s += static_cast<double>(k) * a.c_[k] * r.c_[n - k];
            r.c_[n] = s / static_cast<double>(n);
        }
        return r;
    }

    // Logarithm with a caller-supplied constant term (branch and accuracy control).
    friend Jet log_with_constant(const Jet& a, cplx log_a0) {
        if (a.c_[0] == cplx{}) fail(ErrorCode::InvalidArgument, "log of a jet with zero constant term");
        Jet r(a.point_, a.order());
        r.c_[0] = log_a0;
        const cplx inv0 = 1.0 / a.c_[0];
        for (std::size_t n = 1; n < a.c_.size(); ++n) {
            cplx s{};
            for (std::size_t k = 1; k < n; ++k) s += static_cast<double>(k) * r.c_[k] * a.c_[n - k];
            r.c_[n] = (a.c_[n] - s / static_cast<double>(n)) * inv0;
        }
        return r;
    }
    friend Jet log(const Jet& a) { return log_with_constant(a, std::log(a.c_[0])); }

    // Principal power a^s.
    friend Jet pow(const Jet& a, cplx s) { return exp(log(a) * s); }

    // outer(inner(x)) where `outer` is expanded at inner(point).
    friend Jet compose(const Jet& outer, const Jet& inner) {
        Jet delta = inner;
        delta.c_[0] = 0.0;
        Jet r = Jet::constant(inner.point_, inner.order(), outer.c_.back());
        for (std::size_t k = outer.c_.size() - 1; k-- > 0;) r = r * delta + outer.c_[k];
        return r;
    }

    // Evaluate the truncated series at x.
    cplx evaluate(cplx x) const {
        cplx r{};
        const cplx d = x - point_;
        for (std::size_t k = c_.size(); k-- > 0;) r = r * d + c_[k];
        return r;
    }

private:
    cplx point_{};
    std::vector<cplx> c_{cplx{}};
};

} // namespace fracevo
