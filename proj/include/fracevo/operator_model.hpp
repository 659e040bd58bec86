#pragma once

// Finite-dimensional compact operators B given by spectral data: eigenvalues,
// Jordan chain structure and the chain vectors. B = E J E^{-1}, W = B^{-1}.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fracevo/errors.hpp"
#include "fracevo/jet.hpp"

namespace fracevo {

using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

/// (x, y) = sum_i x_i conj(y_i): conjugate-linear in the second argument.
inline cplx inner(const Vec& x, const Vec& y) { return y.dot(x); }

struct ChainSpec {
    std::size_t eigenvalue = 0; // index into OperatorSpec::eigenvalues
    std::size_t length = 1;     // k + 1
};

enum class BasisKind { Standard, SeededRandom, Explicit };

struct BasisSpec {
    BasisKind kind = BasisKind::Standard;
    std::uint64_t seed = 0;
    double scale = 0.5; // seeded random: E = I + scale * G / sqrt(N), G complex Gaussian
    Mat vectors;        // explicit: columns are e_1..e_N in chain order
    /// Standard and seeded bases: column i of a chain of length k + 1 is multiplied by
    /// chain_scale^{k - i}, so B acts on the chain as mu + chain_scale * shift.
    double chain_scale = 1.0;
};

/// Sector of the lambda-plane, theta0 < arg lambda < theta1.
struct Sector {
    double theta0 = -0.5;
    double theta1 = 0.5;

    bool contains(cplx z, double margin = 0.0) const;
};

struct OperatorSpec {
    std::vector<cplx> eigenvalues; // mu_q
    std::vector<ChainSpec> chains; // basis order: chain after chain, eigenvector first
    BasisSpec basis;
    Sector sector;
};

struct JordanChain {
    std::size_t eigenvalue; // q
    std::size_t offset;     // column of e_{q xi}
    std::size_t length;     // k + 1
};

class SpectralOperator {
public:
    /// Throws ZeroEigenvalue, SingularBasis, InvalidArgument.
    static SpectralOperator assemble(const OperatorSpec& spec);

    std::size_t dimension() const noexcept { return static_cast<std::size_t>(b_.rows()); }
    const Mat& matrix() const noexcept { return b_; }
    const Mat& inverse() const noexcept { return w_; }
    const Mat& basis() const noexcept { return e_; }
    const Mat& basis_inverse() const noexcept { return e_inv_; }
    const std::vector<cplx>& eigenvalues() const noexcept { return mu_; }
    const std::vector<JordanChain>& chains() const noexcept { return chains_; }
    const Sector& sector() const noexcept { return sector_; }
    const OperatorSpec& spec() const noexcept { return spec_; }

    /// lambda_q = 1 / mu_q
    cplx characteristic(std::size_t q) const { return 1.0 / mu_.at(q); }
    std::vector<cplx> characteristic_numbers() const;
    double min_characteristic_modulus() const;

    double basis_condition() const noexcept { return cond_; }
    /// max_i ||(B - mu_q) e_i - e_{i-1}|| / ||E||
    double chain_residual() const noexcept { return chain_residual_; }

private:
    OperatorSpec spec_;
    Mat b_, w_, e_, e_inv_;
    std::vector<cplx> mu_;
    std::vector<JordanChain> chains_;
    Sector sector_;
    double cond_ = 1.0;
    double chain_residual_ = 0.0;
};

struct BiorthogonalSystem {
    /// Column j is g_j with (e_i, g_j) = delta_ij.
    Mat dual;
    /// Chain-reversed indexing: column offset + j holds dual column offset + k - j, so the
    /// pairing (e_{q xi + i}, g_{q xi + k - i}) equals 1 for every position of every chain.
    Mat chain_dual;
    /// (e_i, h_i) for the unit-norm adjoint-chain vectors h_i = g_i / ||g_i||, i.e. the pairing
    /// magnitudes before normalization.
    std::vector<double> raw_pairings;
    double max_deviation = 0.0; // max |(e_i, g_j) - delta_ij|
    double condition = 1.0;
    bool ill_conditioned = false;
};

BiorthogonalSystem biorthogonal(const SpectralOperator& op, double condition_threshold = 1e10);

/// Relative threshold for NearPole: |lambda - lambda_q| < 1e-8 (1 + |lambda_q|).
inline constexpr double kNearPole = 1e-8;

/// Distance from lambda to the closest characteristic number.
double pole_distance(const SpectralOperator& op, cplx lambda);

/// x solving (I - lambda B) x = f by dense LU.
Vec resolvent_solve(const SpectralOperator& op, cplx lambda, const Vec& f);

struct SectorReport {
    std::vector<cplx> points;  // sampled Rayleigh quotients (random and boundary)
    std::vector<cplx> boundary; // support points from the rotated Hermitian parts
    double min_arg = 0.0;
    double max_arg = 0.0;
    double half_angle = 0.0; // max |arg| over the samples
    double theta0 = 0.0;     // sector tested against
    double theta1 = 0.0;
    bool contains_origin_side = false; // some sample with Re <= 0
    bool pass = false;
    std::string verdict;
};

/// Samples Theta(B) and tests it against the sector (theta0, theta1) of the B-plane.
SectorReport numerical_range_sector(const Mat& b, double theta0, double theta1, std::size_t samples = 2000,
                                    std::uint64_t seed = 1);
/// Theta(B) against the mirror of the operator's lambda-sector: Theta(W) and the characteristic
/// numbers then share the lambda-sector.
SectorReport numerical_range_sector(const SpectralOperator& op, std::size_t samples = 2000, std::uint64_t seed = 1);

double schatten_norm(const Mat& b, double s);
inline double schatten_norm(const SpectralOperator& op, double s) { return schatten_norm(op.matrix(), s); }

} // namespace fracevo
