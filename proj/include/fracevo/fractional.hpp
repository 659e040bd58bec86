#pragma once

// Right-sided Riemann-Liouville derivative D^{1/alpha} f(t) =
//   -(1 / Gamma(1 - 1/alpha)) d/dt int_0^inf f(t + x) x^{-1/alpha} dx
// for decaying vector trajectories, plus the residual of D^{1/alpha} u = phi(W) u.

#include <functional>
#include <limits>

#include "fracevo/solver.hpp"

namespace fracevo {

/// ||u(t)|| <= scale * exp(-rate * t) on the validity interval.
struct Envelope {
    double scale = 1.0;
    double rate = 0.0;

    double operator()(double t) const;
};

class TrajectorySampler {
public:
    using Fn = std::function<Vec(double)>;

    /// time_scale: shortest time over which u changes appreciably; 0 picks 1 / envelope.rate.
    TrajectorySampler(Fn fn, Envelope envelope, double t_min = 0.0,
                      double t_max = std::numeric_limits<double>::infinity(), double time_scale = 0.0);

    /// Throws InvalidArgument outside [t_min, t_max], EnvelopeViolated when the sample is
    /// non-finite or exceeds the envelope.
    Vec operator()(double t) const;

    const Envelope& envelope() const { return envelope_; }
    double t_min() const { return t_min_; }
    double t_max() const { return t_max_; }
    double time_scale() const { return time_scale_; }

private:
    Fn fn_;
    Envelope envelope_;
    double t_min_, t_max_, time_scale_;
};

/// Envelope with rate `rate`, scale = 2 * max ||u(t)|| e^{rate t} over `samples` points of [0, horizon].
Envelope fit_envelope(const TrajectorySampler::Fn& fn, double rate, double horizon, std::size_t samples = 400);

/// Sampler over the series solution; envelope rate is half the slowest decay rate.
TrajectorySampler series_sampler(const SeriesEvaluator& eval);

/// w^{1/alpha} e^{-w t} (principal branch). NonDecaying if Re w <= 0; alpha > 1.
cplx rl_mode_identity(cplx w, double alpha, double t);

struct RLResult {
    Vec value;
    double error = 0.0;     // derivative extrapolation + inner quadrature + truncation
    double step = 0.0;      // final difference step
    double truncation = 0.0; // x beyond which the inner integral is dropped
};

/// Numeric D^{1/alpha} u(t). tol is relative to ||value||. Throws ToleranceNotMet, EnvelopeViolated.
RLResult rl_derivative_numeric(const TrajectorySampler& u, double alpha, double t, double tol);

struct ResidualReport {
    double t = 0.0;
    double analytic = 0.0;      // from the series structure
    double numeric = 0.0;       // from rl_derivative_numeric on the sampled solution
    double numeric_error = 0.0; // its error estimate, relative
    double reference = 0.0;     // ||phi(W) u(t)||
};

/// ||D^{1/alpha} u(t) - phi(W) u(t)|| / ||phi(W) u(t)|| two ways; u is re-evaluated from the series.
/// Only t > 0 is accepted.
ResidualReport equation_residual(const CauchyProblem& problem, const SolutionSeries& solution, double t,
                                 double numeric_tol = 1e-7);

} // namespace fracevo
