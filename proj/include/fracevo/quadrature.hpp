#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "fracevo/operator_model.hpp"

namespace fracevo::quad {

struct Rule {
    std::vector<double> nodes;   // on [-1, 1]
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule (Newton iteration on P_n), cached per n.
const Rule& gauss_legendre(std::size_t n);

/// Composite Gauss-Legendre over `panels` equal panels of [a, b].
Vec composite(const std::function<Vec(double)>& f, double a, double b, std::size_t panels, std::size_t order = 16);
cplx composite_scalar(const std::function<cplx(double)>& f, double a, double b, std::size_t panels,
                      std::size_t order = 16);

struct AdaptiveResult {
    Vec value;
    double error = 0.0;
    std::size_t evaluations = 0;
    bool converged = true;
};

/// Adaptive Gauss-Kronrod (7/15) on [a, b]. Stops when the summed error estimate is below
/// max(abs_tol, rel_tol * |I|) or max_intervals is reached (converged = false).
AdaptiveResult gauss_kronrod(const std::function<Vec(double)>& f, double a, double b, double abs_tol,
                             double rel_tol = 0.0, std::size_t max_intervals = 2000);

} // namespace fracevo::quad
