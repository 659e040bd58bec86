#pragma once

// Contour integrals over the truncated boundary of a sector with the origin cut
// out, the operator function phi(W) as a power series, and the scalar checks
// built on them.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fracevo/entire_fn.hpp"
#include "fracevo/operator_model.hpp"

namespace fracevo {

using entire::EntireFunctionSpec;

/// Principal ln phi(lambda). Throws BranchCrossing at a zero of phi.
cplx log_phi(const EntireFunctionSpec& phi, cplx lambda);
/// phi(lambda)^alpha on the principal branch (may overflow to inf).
cplx phi_alpha(const EntireFunctionSpec& phi, double alpha, cplx lambda);

/// Boundary of {r < |lambda| < r_max, theta0 < arg lambda < theta1}, traversed inward along
/// theta0, across the inner arc, outward along theta1. With that orientation the N = 1 case
/// B = (mu), f = 1 integrates to e^{-phi^alpha(1/mu) t}.
struct Contour {
    double r = 0.0;
    double theta0 = 0.0;
    double theta1 = 0.0;
    double r_max = 0.0;
    std::size_t arc_panels = 8;
    std::size_t ray_panels = 8;  // uniform log-radius panels before grading
    double grading = 2.0;        // panel growth factor away from a pole
    std::vector<cplx> poles;     // characteristic numbers used to grade the meshes

    double alpha = 1.0;
    double t_min = 0.0;
    double tol = 0.0;
    /// min over the far arc of ln Re phi^alpha at each probed radius (-inf when Re <= 0)
    std::vector<double> probe_radii;
    std::vector<double> probe_log_min_re;
    /// ln ln Re phi^alpha(R) ~ decay_log_scale + decay_exponent ln R over the probes with Re > e
    double decay_exponent = 0.0;
    double decay_log_scale = 0.0;
};

/// r = 0.5 min |lambda_q| (or inner_radius when there are no poles); r_max is the first probe
/// radius where t_min min Re phi^alpha >= ln(2 pi R / tol) + 8 ln max(R, 1).
/// Throws NoDecay, PreconditionFailed (a pole outside the sector).
Contour build_contour(const Sector& sector, std::vector<cplx> poles, const EntireFunctionSpec& phi, double alpha,
                      double t_min, double tol, double inner_radius = 0.0);
Contour build_contour(const SpectralOperator& op, const EntireFunctionSpec& phi, double alpha, double t_min,
                      double tol);

struct QuadratureOptions {
    double tol = 1e-10;          // on the node-doubling difference, relative to ||f||
    std::size_t max_rounds = 8;  // each round halves every panel
};

struct QuadratureResult {
    Vec value;
    double truncation_error = 0.0;
    double discretization_error = 0.0;
    std::vector<double> refinement_diffs; // ||V_k - V_{k-1}|| per round
    std::size_t rounds = 0;
    std::size_t nodes = 0;
};

/// Extra factor w(lambda, ln phi(lambda)) under the integral.
using ContourWeight = std::function<cplx(cplx lambda, cplx log_phi)>;

/// (1/2 pi i) int e^{-phi^alpha(lambda) t} w(lambda) B (I - lambda B)^{-1} f d lambda for each t.
/// Resolvent solves are shared across the time points. Throws NodeOnPole, ToleranceNotMet,
/// BranchCrossing, NoDecay.
std::vector<QuadratureResult> contour_integral(const SpectralOperator& op, const EntireFunctionSpec& phi,
                                               double alpha, std::span<const double> times, const Vec& f,
                                               const Contour& contour, const ContourWeight& weight = {},
                                               const QuadratureOptions& options = {});

QuadratureResult semigroup_integral(const SpectralOperator& op, const EntireFunctionSpec& phi, double alpha,
                                    double t, const Vec& f, const Contour& contour,
                                    const QuadratureOptions& options = {});

struct TaylorCoefficients {
    std::vector<cplx> c;
    std::size_t terms = 0;        // product factors summed explicitly
    double log_error = 0.0;       // bound on the error of the log-coefficients from the product tail
};

/// First `count` Taylor coefficients of C z^m prod G(z / a_n; p) at 0. Throws JetOverflow.
TaylorCoefficients taylor_coeffs_at_zero(const EntireFunctionSpec& phi, std::size_t count);

struct SeriesResult {
    Vec value;
    std::size_t terms = 0;                 // N*
    double tail_bound = 0.0;
    std::string method;                    // "polynomial", "coefficient-bound" or "cauchy"
    std::vector<double> bound_trajectory;  // term bounds |c_n| ||W||^n ||f||, n = 0..
};

/// sum_{n <= N*} c_n W^n f with the tail bound below tol. Throws NoConvergence, JetOverflow.
SeriesResult phi_of_W_series(const SpectralOperator& op, const EntireFunctionSpec& phi, const Vec& f, double tol);
/// phi(W) as a dense matrix (columns by the same series).
Mat phi_of_W_matrix(const SpectralOperator& op, const EntireFunctionSpec& phi, double tol);

struct BetaResult {
    cplx value;           // int e^{-phi^alpha t} lambda^k over the truncated contour
    double error = 0.0;   // discretization + truncation
    cplx far_arc;         // closing arc at r_max; value + far_arc = 0 by Cauchy
    std::vector<double> refinement_diffs;
};

/// Throws ToleranceNotMet, InvalidArgument (k > 8).
BetaResult beta_k(const EntireFunctionSpec& phi, double alpha, double t, const Contour& contour, int k,
                  const QuadratureOptions& options = {});

/// beta_k for every t in `times` and k = 0..k_max from one pass over the contour; result[j][k].
/// Refinement differences and the error are shared by all k at a given t. Throws ToleranceNotMet.
std::vector<std::vector<BetaResult>> beta_table(const EntireFunctionSpec& phi, double alpha,
                                                std::span<const double> times, const Contour& contour, int k_max,
                                                const QuadratureOptions& options = {});

struct CommutationReport {
    Vec left;   // contour integral with the weight phi(lambda)
    Vec right;  // phi(W) applied to the plain contour integral
    double relative_difference = 0.0;
    std::size_t series_terms = 0;
};

CommutationReport commutation_check(const SpectralOperator& op, const EntireFunctionSpec& phi, double alpha,
                                    double t, const Vec& f, const Contour& contour,
                                    const QuadratureOptions& options = {});

} // namespace fracevo
