#pragma once

// Root-vector solution of D^{1/alpha} u = phi(W) u, u(0) = f: per-chain coefficient
// functions from Taylor jets of exp(-phi^alpha(1/zeta) t), summed in blocks over
// annuli of the lambda-plane.

#include <string>
#include <vector>

#include "fracevo/entire_fn.hpp"
#include "fracevo/functional_calculus.hpp"
#include "fracevo/operator_model.hpp"

namespace fracevo {

struct CauchyProblem {
    SpectralOperator op;
    EntireFunctionSpec phi;
    double alpha = 2.0;
    Vec f;
    std::vector<double> times;
    double R = 0.0;       // 0 selects 0.9 min |lambda_q|
    double kappa = 0.5;
    double tol = 1e-10;
    bool force = false;   // run even when the hypothesis audit fails
    /// Multiplies the exponent phi^alpha used by the series; 1 except in sensitivity probes.
    double exponent_scale = 1.0;
};

/// Taylor jet of zeta -> exp(-phi^alpha(1/zeta) t) at zeta = mu, order K.
/// Coefficient m equals e^{-phi^alpha(1/mu) t} H_m. Throws JetOverflow, BranchCrossing.
Jet jet_of_exp_neg_phi_alpha(const EntireFunctionSpec& phi, double alpha, double t, cplx mu, std::size_t order);
/// H_0..H_order; H_0 is exactly 1.
std::vector<cplx> h_coefficients(const EntireFunctionSpec& phi, double alpha, double t, cplx mu, std::size_t order);

/// c_{q xi + i}(t), i = 0..k, for the chain with index `chain` in op.chains().
std::vector<cplx> coefficients(const SpectralOperator& op, const BiorthogonalSystem& biorth,
                               const EntireFunctionSpec& phi, double alpha, const Vec& f, double t,
                               std::size_t chain);

struct AnnulusGrouping {
    std::vector<double> radii;                // R_1 < R_2 < ... (after nudging)
    std::vector<std::vector<std::size_t>> groups; // groups[nu]: eigenvalue indices with R_nu < |lambda_q| <= R_{nu+1}
    bool nudged = false;

    std::size_t nonempty() const;
};

/// Group 0 collects |lambda_q| <= R_1. A boundary within 1e-9 (relative) of some |lambda_q| is
/// moved down by that factor, so the characteristic number falls in the outer annulus.
AnnulusGrouping group_annuli(const SpectralOperator& op, double R, double kappa);

struct AuditCheck {
    std::string name;
    bool pass = false;
    double value = 0.0;   // the measured quantity
    double limit = 0.0;   // what it was compared against
    std::string evidence;
};

struct AuditReport {
    std::vector<AuditCheck> checks;
    bool pass = true;
    double window = 0.0;  // outer radius of the lambda-window sampled for the image check
};

/// Order < 1/2, phi-image of the sector window inside |arg| < pi / (2 alpha), zeros outside the
/// sector, numerical range in the mirrored sector, finite rank. Report only.
AuditReport hypothesis_audit(const CauchyProblem& problem);

/// Precomputed per-eigenvalue exponent jets and per-chain static coefficients; evaluates the
/// series at any t >= 0.
class SeriesEvaluator {
public:
    SeriesEvaluator(const CauchyProblem& problem, const AnnulusGrouping& grouping);

    Vec operator()(double t) const;
    /// A_nu(t) for every group.
    std::vector<Vec> blocks(double t) const;
    /// c_{q xi + i}(t) per chain.
    std::vector<std::vector<cplx>> coefficient_table(double t) const;
    /// D^{1/alpha} u(t) from the series structure: each exponential mode e^{-w t} maps to
    /// w^{1/alpha} e^{-w t}, carried through the jets.
    Vec fractional_derivative(double t) const;
    /// min_q Re of the exponent at lambda_q
    double min_decay_rate() const;
    double max_decay_rate() const;
    /// max_q |phi^alpha(lambda_q)|
    double max_exponent_modulus() const;
    std::size_t dimension() const { return static_cast<std::size_t>(basis_.rows()); }

private:
    struct Mode {
        std::size_t q;
        Jet exponent;   // phi^alpha(1/zeta) at zeta = mu_q, times exponent_scale
        Jet root;       // principal exponent^{1/alpha}
    };
    struct ChainData {
        std::size_t mode;   // index into modes_
        std::size_t offset;
        std::vector<cplx> statics;
        bool zero;
    };
    std::vector<cplx> chain_coefficients(const ChainData& c, double t, bool derivative) const;

    double alpha_;
    Mat basis_;
    std::vector<Mode> modes_;
    std::vector<ChainData> chains_;
    std::vector<std::size_t> group_of_mode_;
    std::size_t groups_ = 0;
};

struct SolutionSeries {
    std::vector<double> times;
    std::vector<Vec> u;                          // per time
    std::vector<std::vector<Vec>> blocks;        // per time, per annulus
    std::vector<std::vector<double>> block_norms;
    std::vector<std::vector<std::vector<cplx>>> coefficients; // per time, per chain
    AnnulusGrouping grouping;
    AuditReport audit;
    bool forced = false;
    std::vector<double> raw_pairings;            // pairings before normalization
};

/// Throws AuditFailed when the audit fails and force is off; InvalidArgument for alpha < 1.
SolutionSeries solve(const CauchyProblem& problem);

struct UniquenessReport {
    std::size_t samples = 0;
    double min_sampled = 0.0;   // min Re (phi(W) x, x) / (x, x)
    double max_sampled = 0.0;
    std::size_t negative = 0;
    double field_min = 0.0;     // smallest eigenvalue of the Hermitian part
    std::string note;
};

/// Samples Re (phi(W) x, x) over seeded random unit vectors. A necessary-condition probe for
/// accretivity of phi(W), not the uniqueness hypothesis itself.
UniquenessReport uniqueness_indicator(const CauchyProblem& problem, std::size_t samples = 2000,
                                      std::uint64_t seed = 1);

} // namespace fracevo
