#include "fracevo/operator_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace fracevo {

namespace {

constexpr double kPi = 3.14159265358979323846;

Mat seeded_random_basis(std::size_t n, std::uint64_t seed, double scale) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Mat e = Mat::Identity(n, n);
    const double s = scale / std::sqrt(static_cast<double>(n));
    // column-major fill keeps the stream order independent of Eigen internals
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            e(i, j) += s * cplx{re, im} / std::sqrt(2.0);
        }
    return e;
}

// Inverse of the Jordan block mu I + N: sum_k (-1)^k N^k / mu^{k+1}.
void fill_block_inverse(Mat& jinv, std::size_t off, std::size_t len, cplx mu) {
    for (std::size_t i = 0; i < len; ++i)
        for (std::size_t j = i; j < len; ++j) {
            const std::size_t k = j - i;
            jinv(off + i, off + j) = (k % 2 ? -1.0 : 1.0) / std::pow(mu, static_cast<double>(k + 1));
        }
}

} // namespace

bool Sector::contains(cplx z, double margin) const {
    if (z == cplx{}) return false;
    const double a = std::arg(z);
    return a > theta0 + margin && a < theta1 - margin;
}

SpectralOperator SpectralOperator::assemble(const OperatorSpec& spec) {
    if (spec.eigenvalues.empty()) fail(ErrorCode::InvalidArgument, "operator needs at least one eigenvalue");
    if (spec.chains.empty()) fail(ErrorCode::InvalidArgument, "operator needs at least one Jordan chain");
    if (!(spec.sector.theta0 < spec.sector.theta1)) fail(ErrorCode::InvalidArgument, "sector needs theta0 < theta1");
    for (std::size_t q = 0; q < spec.eigenvalues.size(); ++q)
        if (spec.eigenvalues[q] == cplx{})
            fail(ErrorCode::ZeroEigenvalue, "eigenvalue " + std::to_string(q) + " is zero; B must be invertible");

    SpectralOperator op;
    op.spec_ = spec;
    op.mu_ = spec.eigenvalues;
    op.sector_ = spec.sector;
    std::size_t n = 0;
    std::vector<bool> used(spec.eigenvalues.size(), false);
    for (const auto& c : spec.chains) {
        if (c.eigenvalue >= spec.eigenvalues.size())
            fail(ErrorCode::InvalidArgument, "chain refers to eigenvalue index " + std::to_string(c.eigenvalue));
        if (c.length == 0) fail(ErrorCode::InvalidArgument, "chains need positive length");
        op.chains_.push_back({c.eigenvalue, n, c.length});
        used[c.eigenvalue] = true;
        n += c.length;
    }
    for (std::size_t q = 0; q < used.size(); ++q)
        if (!used[q]) fail(ErrorCode::InvalidArgument, "eigenvalue " + std::to_string(q) + " has no chain");

    switch (spec.basis.kind) {
    case BasisKind::Standard:
        op.e_ = Mat::Identity(n, n);
        break;
    case BasisKind::SeededRandom:
        op.e_ = seeded_random_basis(n, spec.basis.seed, spec.basis.scale);
        break;
    case BasisKind::Explicit:
        if (static_cast<std::size_t>(spec.basis.vectors.rows()) != n ||
            static_cast<std::size_t>(spec.basis.vectors.cols()) != n)
            fail(ErrorCode::InvalidArgument, "explicit basis must be " + std::to_string(n) + " x " + std::to_string(n));
        op.e_ = spec.basis.vectors;
        break;
    }
    if (!(spec.basis.chain_scale > 0.0)) fail(ErrorCode::InvalidArgument, "chain_scale must be positive");
    if (spec.basis.kind != BasisKind::Explicit && spec.basis.chain_scale != 1.0)
        for (const auto& c : op.chains_)
            for (std::size_t i = 0; i < c.length; ++i)
                op.e_.col(static_cast<Eigen::Index>(c.offset + i)) *=
                    std::pow(spec.basis.chain_scale, static_cast<double>(c.length - 1 - i));

    Eigen::JacobiSVD<Mat> svd(op.e_);
    const auto& sv = svd.singularValues();
    const double smax = sv(0), smin = sv(sv.size() - 1);
    op.cond_ = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    if (!(op.cond_ < 1e12))
        fail(ErrorCode::SingularBasis, "chain vectors are (numerically) dependent: condition number " +
                                           std::to_string(op.cond_));

    Eigen::PartialPivLU<Mat> lu(op.e_);
    op.e_inv_ = lu.inverse();
    Mat j = Mat::Zero(n, n), jinv = Mat::Zero(n, n);
    for (const auto& c : op.chains_) {
        const cplx mu = op.mu_[c.eigenvalue];
        for (std::size_t i = 0; i < c.length; ++i) {
            j(c.offset + i, c.offset + i) = mu;
            if (i + 1 < c.length) j(c.offset + i, c.offset + i + 1) = 1.0;
        }
        fill_block_inverse(jinv, c.offset, c.length, mu);
    }
    op.b_ = op.e_ * j * op.e_inv_;
    op.w_ = op.e_ * jinv * op.e_inv_;

    double res = 0.0;
    const double scale = std::max(1.0, op.e_.norm());
    for (const auto& c : op.chains_) {
        const cplx mu = op.mu_[c.eigenvalue];
        for (std::size_t i = 0; i < c.length; ++i) {
            Vec r = op.b_ * op.e_.col(c.offset + i) - mu * op.e_.col(c.offset + i);
            if (i > 0) r -= op.e_.col(c.offset + i - 1);
            res = std::max(res, r.norm() / scale);
        }
    }
    op.chain_residual_ = res;
    return op;
}

std::vector<cplx> SpectralOperator::characteristic_numbers() const {
    std::vector<cplx> out;
    out.reserve(mu_.size());
    for (const auto& m : mu_) out.push_back(1.0 / m);
    return out;
}

double SpectralOperator::min_characteristic_modulus() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& mu : mu_) m = std::min(m, 1.0 / std::abs(mu));
    return m;
}

BiorthogonalSystem biorthogonal(const SpectralOperator& op, double condition_threshold) {
    BiorthogonalSystem sys;
    // (e_i, g_j) = g_j^H e_i = delta_ij  <=>  G^H E = I  <=>  G = E^{-H}
    sys.dual = op.basis_inverse().adjoint();
    sys.chain_dual = Mat(sys.dual.rows(), sys.dual.cols());
    for (const auto& c : op.chains()) {
        for (std::size_t j = 0; j < c.length; ++j)
            sys.chain_dual.col(c.offset + j) = sys.dual.col(c.offset + c.length - 1 - j);
    }
    const Mat gram = sys.dual.adjoint() * op.basis();
    sys.max_deviation = (gram - Mat::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < sys.dual.cols(); ++i) sys.raw_pairings.push_back(1.0 / sys.dual.col(i).norm());
    sys.condition = op.basis_condition();
    sys.ill_conditioned = sys.condition > condition_threshold;
    return sys;
}

double pole_distance(const SpectralOperator& op, cplx lambda) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& mu : op.eigenvalues()) d = std::min(d, std::abs(lambda - 1.0 / mu));
    return d;
}

Vec resolvent_solve(const SpectralOperator& op, cplx lambda, const Vec& f) {
    for (const auto& mu : op.eigenvalues()) {
        const cplx lq = 1.0 / mu;
        if (std::abs(lambda - lq) < kNearPole * (1.0 + std::abs(lq)))
            fail(ErrorCode::NearPole, "lambda = (" + std::to_string(lambda.real()) + ", " +
                                          std::to_string(lambda.imag()) + ") is within " +
                                          std::to_string(std::abs(lambda - lq)) + " of a characteristic number");
    }
    const auto n = static_cast<Eigen::Index>(op.dimension());
    const Mat a = Mat::Identity(n, n) - lambda * op.matrix();
    Eigen::PartialPivLU<Mat> lu(a);
    Vec x = lu.solve(f);
    // one step of iterative refinement keeps the residual at rounding level near poles
    x += lu.solve(f - a * x);
    return x;
}

SectorReport numerical_range_sector(const Mat& b, double theta0, double theta1, std::size_t samples,
                                    std::uint64_t seed) {
    SectorReport rep;
    rep.theta0 = theta0;
    rep.theta1 = theta1;
    const auto n = b.rows();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto rayleigh = [&](const Vec& x) { return inner(b * x, x) / inner(x, x); };
    for (std::size_t s = 0; s < samples; ++s) {
        Vec x(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            x(i) = cplx{re, im};
        }
        rep.points.push_back(rayleigh(x));
    }
    // support points: extremal eigenvectors of Re(e^{-i phi} B)
    constexpr std::size_t directions = 360;
    for (std::size_t k = 0; k < directions; ++k) {
        const double phi = 2.0 * kPi * static_cast<double>(k) / directions;
        const cplx rot = std::polar(1.0, -phi);
        const Mat h = 0.5 * (rot * b + std::conj(rot) * b.adjoint());
        Eigen::SelfAdjointEigenSolver<Mat> es(h);
        rep.boundary.push_back(rayleigh(es.eigenvectors().col(n - 1)));
        rep.boundary.push_back(rayleigh(es.eigenvectors().col(0)));
    }
    rep.points.insert(rep.points.end(), rep.boundary.begin(), rep.boundary.end());

    rep.min_arg = std::numeric_limits<double>::infinity();
    rep.max_arg = -std::numeric_limits<double>::infinity();
    for (const auto& z : rep.points) {
        if (z.real() <= 0.0) rep.contains_origin_side = true;
        const double a = std::arg(z);
        rep.min_arg = std::min(rep.min_arg, a);
        rep.max_arg = std::max(rep.max_arg, a);
    }
    rep.half_angle = std::max(std::abs(rep.min_arg), std::abs(rep.max_arg));
    rep.pass = !rep.contains_origin_side && rep.min_arg >= theta0 && rep.max_arg <= theta1;
    rep.verdict = rep.pass ? "no counterexample found"
                           : "sampled Rayleigh quotient outside the sector (arg range [" + std::to_string(rep.min_arg) +
                                 ", " + std::to_string(rep.max_arg) + "])";
    return rep;
}

SectorReport numerical_range_sector(const SpectralOperator& op, std::size_t samples, std::uint64_t seed) {
    return numerical_range_sector(op.matrix(), -op.sector().theta1, -op.sector().theta0, samples, seed);
}

double schatten_norm(const Mat& b, double s) {
    if (!(s > 0.0)) fail(ErrorCode::InvalidArgument, "Schatten index must be positive");
    Eigen::JacobiSVD<Mat> svd(b);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) acc += std::pow(svd.singularValues()(i), s);
    return std::pow(acc, 1.0 / s);
}

} // namespace fracevo
