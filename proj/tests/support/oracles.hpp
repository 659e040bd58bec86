#pragma once

// Test-side reference computations. These deliberately avoid the library's
// own algorithms: closed forms, brute-force sums and finite differences.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
inline constexpr double pi = 3.14159265358979323846;

// cos(sqrt z) on the principal branch; even in sqrt z, so the branch does not matter.
inline cplx cos_sqrt(cplx z) { return std::cos(std::sqrt(z)); }

// ln|cos sqrt z| without overflow for large |Im sqrt z|.
inline double log_abs_cos_sqrt(cplx z) {
    const cplx w = std::sqrt(z);
    const double y = std::abs(w.imag());
    // |cos w| = e^{y}/2 * |1 + e^{2 i w'}| with w' chosen so the exponent decays
    const cplx e = std::exp(cplx{0.0, 2.0} * (w.imag() >= 0 ? w : -w));
    return y - std::log(2.0) + std::log(std::abs(1.0 + e));
}

// Direct product prod (1 - z/a_n) over a brute-force index range, genus 0.
inline cplx naive_product_genus0(const std::function<cplx(std::size_t)>& a, std::size_t terms, cplx z) {
    cplx s{};
    // smallest terms first
    for (std::size_t n = terms; n >= 1; --n) {
        const cplx u = z / a(n);
        // std::log loses the relative accuracy of log(1 - u) for tiny u
        s += std::abs(u) < 1e-3 ? -u * (1.0 + u * (0.5 + u * (1.0 / 3.0 + u * 0.25))) : std::log(1.0 - u);
    }
    return std::exp(s);
}

// Richardson-extrapolated central difference of order 2 for real functions.
inline double derivative(const std::function<double(double)>& f, double x, double h = 1e-3) {
    auto d = [&](double hh) { return (f(x + hh) - f(x - hh)) / (2.0 * hh); };
    return (4.0 * d(h / 2.0) - d(h)) / 3.0;
}

// Trapezoid rule; spectrally accurate for smooth periodic integrands.
inline double trapezoid_periodic(const std::function<double(double)>& f, double a, double b, std::size_t n) {
    const double h = (b - a) / static_cast<double>(n);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += f(a + h * static_cast<double>(i));
    return s * h;
}

// Composite Simpson rule.
inline double simpson(const std::function<double(double)>& f, double a, double b, std::size_t n) {
    if (n % 2) ++n;
    const double h = (b - a) / static_cast<double>(n);
    double s = f(a) + f(b);
    for (std::size_t i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(i));
    return s * h / 3.0;
}

} // namespace oracle
