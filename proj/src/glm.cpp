#include "ser/glm.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "ser/random.hpp"

namespace ser {

namespace {

// Whitened observation kernel B = I + σ_z^{-2} Λ^{1/2} U^H R_x U Λ^{1/2}.
// Hermitian and >= I for any PSD gram, so both ln det and tr(B^{-1}Λ) are
// numerically benign even for ill-conditioned priors.
Matrix whitened_kernel(const GaussianPrior& prior, const WaveformGram& gram,
                       const NoiseModel& noise) {
    if (prior.dim() != gram.dim())
        throw DimensionMismatch("glm: prior and gram dimensions differ");
    const Matrix half = prior.covariance().sqrt_factor();  // U Λ^{1/2}
    Matrix b = (half.adjoint() * gram.gram() * half) / noise.sigma_z_sq;
    b += Matrix::Identity(b.rows(), b.cols());
    return 0.5 * (b + b.adjoint().eval());
}

double log_det_hermitian_pd(const Matrix& b, const Tolerances& tol) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(b);
    if (solver.info() != Eigen::Success)
        throw NumericalFailure("glm: eigensolver failed on the whitened kernel");
    double sum = 0.0;
    for (Index i = 0; i < b.rows(); ++i) {
        const double d = solver.eigenvalues()(i);
        if (d <= tol.psd)
            throw NumericalFailure("glm: whitened kernel not positive definite");
        sum += std::log(d);
    }
    return sum;
}

}  // namespace

double glm_mi(const GaussianPrior& prior, const WaveformGram& gram, const NoiseModel& noise,
              const Tolerances& tol) {
    tol.validate();
    const double mi = log_det_hermitian_pd(whitened_kernel(prior, gram, noise), tol);
    return std::max(mi, 0.0);  // clamp −0 rounding at the zero-waveform point
}

double glm_mmse(const GaussianPrior& prior, const WaveformGram& gram, const NoiseModel& noise,
                const Tolerances& tol) {
    tol.validate();
    if (!prior.full_rank()) throw SingularPrior("glm_mmse: prior covariance is singular");
    const Matrix b = whitened_kernel(prior, gram, noise);
    Eigen::LDLT<Matrix> ldlt(b);
    if (ldlt.info() != Eigen::Success)
        throw NumericalFailure("glm_mmse: factorization of the whitened kernel failed");
    const Matrix lambda = prior.variances().cast<Complex>().asDiagonal();
    const double mmse = ldlt.solve(lambda).trace().real();
    if (!(mmse > 0)) throw NumericalFailure("glm_mmse: non-positive posterior trace");
    return mmse;
}

GlmWaveform glm_optimal_waveform(const GaussianPrior& prior, const NoiseModel& noise,
                                 double budget, Index factor_rows, std::uint64_t seed,
                                 const Tolerances& tol) {
    tol.validate();
    if (budget < 0) throw NegativeBudget("glm_optimal_waveform: negative budget");
    const Index m = prior.dim();
    if (factor_rows < 1) throw DimensionMismatch("glm_optimal_waveform: factor_rows must be >= 1");

    // Floors σ_z²/σ²_i; zero-variance modes are excluded and stay unpowered.
    const RealVector& var = prior.variances();
    std::vector<Index> included;
    for (Index i = 0; i < m; ++i)
        if (var(i) > 0) included.push_back(i);
    RealVector floors(static_cast<Index>(included.size()));
    for (std::size_t k = 0; k < included.size(); ++k)
        floors(static_cast<Index>(k)) = noise.sigma_z_sq / var(included[k]);

    const auto sub = waterfill_direct(floors, budget, tol);
    RealVector levels = RealVector::Zero(m);
    for (std::size_t k = 0; k < included.size(); ++k)
        levels(included[k]) = sub.levels(static_cast<Index>(k));

    Index active = 0;
    for (Index i = 0; i < m; ++i)
        if (levels(i) > 0) ++active;
    if (factor_rows < active)
        throw InsufficientRows("glm_optimal_waveform: factor_rows below active mode count");

    const Matrix& u = prior.covariance().eigenvectors();
    const Matrix gram_matrix = u * levels.cast<Complex>().asDiagonal() * u.adjoint();

    // X = Φ diag(levels)^{1/2} U^H restricted to the active modes; Φ has
    // orthonormal columns so X^H X reproduces the gram exactly.
    Matrix factor = Matrix::Zero(factor_rows, m);
    if (active > 0) {
        const Matrix phi = random_orthonormal_columns(factor_rows, active, seed);
        Matrix scaled_basis(m, active);
        Index c = 0;
        for (Index i = 0; i < m; ++i)
            if (levels(i) > 0) scaled_basis.col(c++) = std::sqrt(levels(i)) * u.col(i);
        factor = phi * scaled_basis.adjoint();
    }

    WaterfillAllocation alloc{std::move(levels), sub.water_level, sub.budget_used};
    return {WaveformGram::from_matrix(gram_matrix, budget, factor_rows, tol), std::move(factor),
            std::move(alloc)};
}

GlmAnalysis glm_ser(const GaussianPrior& prior, const WaveformGram& gram, const NoiseModel& noise,
                    const Tolerances& tol) {
    tol.validate();
    GlmAnalysis out;
    out.mi_nats = glm_mi(prior, gram, noise, tol);
    out.mmse = glm_mmse(prior, gram, noise, tol);

    const double total = prior.total_variance();
    if (out.mmse > total * (1.0 + tol.rel))
        throw InvariantViolation("glm_ser: MMSE exceeds the prior variance");

    out.alloc = waterfill_inverse(prior.variances(), std::min(out.mmse, total), tol);
    out.per_mode_distortion = out.alloc.levels;
    out.ser_nats = rate_from_allocation(prior.variances(), out.alloc);

    if (out.ser_nats > out.mi_nats + tol.rel * (1.0 + out.mi_nats))
        throw InvariantViolation("glm_ser: estimation rate exceeds the mutual information");
    return out;
}

}  // namespace ser
