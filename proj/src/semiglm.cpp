#include "ser/semiglm.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace ser {

void SemiGlmProblem::validate() const {
    if (channel_map.cols() != prior.dim())
        throw DimensionMismatch("SemiGlmProblem: F columns must match the prior dimension");
    if (channel_map.rows() < 1) throw DimensionMismatch("SemiGlmProblem: empty channel map");
    if (!channel_map.allFinite())
        throw std::invalid_argument("SemiGlmProblem: non-finite channel map");
    if (budget < 0) throw NegativeBudget("SemiGlmProblem: negative budget");
}

namespace {

struct ChannelSpectra {
    HermitianSpectrum fsf;   // F Σ F^H
    RealVector lam_f;        // descending, length h_dim
    double include_clip = 0; // modes with lam_f <= clip carry no power
};

ChannelSpectra channel_spectra(const SemiGlmProblem& p, const Tolerances& tol) {
    p.validate();
    const Matrix fsf = p.channel_map * p.prior.covariance_matrix() * p.channel_map.adjoint();
    ChannelSpectra out{HermitianSpectrum::from_matrix(fsf, tol), RealVector(), 0.0};
    out.lam_f = out.fsf.eigenvalues();
    const double top = out.fsf.max_eigenvalue();
    if (!(top > 0)) throw ZeroChannel("semiglm: F Σ F^H vanishes");
    out.include_clip = tol.psd * top;
    return out;
}

WaveformGram gram_from_levels(const HermitianSpectrum& basis, const RealVector& levels,
                              double budget, const Tolerances& tol) {
    const Matrix& u = basis.eigenvectors();
    const Matrix g = u * levels.cast<Complex>().asDiagonal() * u.adjoint();
    return WaveformGram::from_matrix(g, budget, basis.dim(), tol);
}

// MMSE lower bound f(Λ_x) with the descending prior/channel pairing;
// prior modes beyond the channel rank keep their full variance.
double mmse_lower_bound_value(const RealVector& prior_var, const RealVector& lam_f,
                              const RealVector& levels, double sigma_z_sq) {
    double value = 0.0;
    for (Index i = 0; i < prior_var.size(); ++i) {
        const double gain =
            (i < lam_f.size()) ? lam_f(i) * levels(i) / sigma_z_sq : 0.0;
        value += prior_var(i) / (gain + 1.0);
    }
    return value;
}

}  // namespace

SemiGlmMiWaveform semiglm_mi_optimal(const SemiGlmProblem& problem, const Tolerances& tol) {
    tol.validate();
    const auto spectra = channel_spectra(problem, tol);
    const Index mh = spectra.lam_f.size();

    std::vector<Index> included;
    for (Index i = 0; i < mh; ++i)
        if (spectra.lam_f(i) > spectra.include_clip) included.push_back(i);

    RealVector floors(static_cast<Index>(included.size()));
    for (std::size_t k = 0; k < included.size(); ++k)
        floors(static_cast<Index>(k)) = problem.noise.sigma_z_sq / spectra.lam_f(included[k]);

    const auto sub = waterfill_direct(floors, problem.budget, tol);
    RealVector levels = RealVector::Zero(mh);
    for (std::size_t k = 0; k < included.size(); ++k)
        levels(included[k]) = sub.levels(static_cast<Index>(k));

    double mi = 0.0;
    for (const Index i : included)
        mi += std::log1p(spectra.lam_f(i) * levels(i) / problem.noise.sigma_z_sq);

    WaterfillAllocation alloc{levels, sub.water_level, sub.budget_used};
    return {gram_from_levels(spectra.fsf, levels, problem.budget, tol), std::move(alloc), mi};
}

SemiGlmMmseWaveform semiglm_mmse_optimal(const SemiGlmProblem& problem, const Tolerances& tol) {
    tol.validate();
    const auto spectra = channel_spectra(problem, tol);
    const Index mh = spectra.lam_f.size();
    const RealVector& prior_var = problem.prior.variances();
    const Index paired = std::min(mh, prior_var.size());

    // Weighted water-filling with slopes a_i = sqrt(σ_z² σ²_i / Λ_F_i); the
    // i-th prior eigenvalue (descending) pairs with the i-th channel mode.
    RealVector floors = RealVector::Zero(mh);
    RealVector weights = RealVector::Zero(mh);
    for (Index i = 0; i < paired; ++i) {
        if (spectra.lam_f(i) <= spectra.include_clip || prior_var(i) <= 0) continue;
        floors(i) = problem.noise.sigma_z_sq / spectra.lam_f(i);
        weights(i) = std::sqrt(problem.noise.sigma_z_sq * prior_var(i) / spectra.lam_f(i));
    }

    WaterfillAllocation alloc;
    if ((weights.array() > 0).any())
        alloc = waterfill_weighted(floors, weights, problem.budget, tol);
    else
        alloc = {RealVector::Zero(mh), 0.0, 0.0};  // power is useless; park it

    SemiGlmMmseWaveform out{gram_from_levels(spectra.fsf, alloc.levels, problem.budget, tol),
                            alloc, 0.0, 0.0};
    out.bound = mmse_lower_bound_value(prior_var, spectra.lam_f, alloc.levels,
                                       problem.noise.sigma_z_sq);
    out.exact = semiglm_mmse_at(problem, out.gram, tol);
    return out;
}

double semiglm_mmse_at(const SemiGlmProblem& problem, const WaveformGram& gram,
                       const Tolerances& tol) {
    tol.validate();
    problem.validate();
    if (!problem.prior.full_rank()) throw SingularPrior("semiglm_mmse_at: singular prior");
    if (gram.dim() != problem.h_dim())
        throw DimensionMismatch("semiglm_mmse_at: gram dimension must match F rows");

    const Matrix half = problem.prior.covariance().sqrt_factor();       // U Λ^{1/2}
    const Matrix fh = problem.channel_map * half;                       // F U Λ^{1/2}
    Matrix b = (fh.adjoint() * gram.gram() * fh) / problem.noise.sigma_z_sq;
    b += Matrix::Identity(b.rows(), b.cols());
    b = 0.5 * (b + b.adjoint().eval());

    Eigen::LDLT<Matrix> ldlt(b);
    if (ldlt.info() != Eigen::Success)
        throw NumericalFailure("semiglm_mmse_at: factorization failed");
    const Matrix lambda = problem.prior.variances().cast<Complex>().asDiagonal();
    return ldlt.solve(lambda).trace().real();
}

EqualityCertificate equality_certificate(const SemiGlmProblem& problem, const Tolerances& tol) {
    tol.validate();
    problem.validate();

    // Alignment condition through the SVD F U Λ^{1/2} = U_F Λ̃ U_R^H: after
    // canonical per-column phase alignment U_R must be the identity.
    const Matrix whitened = problem.channel_map * problem.prior.covariance().sqrt_factor();
    Eigen::JacobiSVD<Matrix> svd(whitened, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& sv = svd.singularValues();
    const double sv_max = sv.size() > 0 ? sv(0) : 0.0;
    if (!(sv_max > 0)) throw ZeroChannel("equality_certificate: F U Λ^{1/2} vanishes");

    Index rank = 0;
    for (Index i = 0; i < sv.size(); ++i)
        if (sv(i) > tol.psd * sv_max) ++rank;

    const Matrix& ur = svd.matrixV();
    double residual_alignment = 0.0;
    for (Index j = 0; j < rank; ++j) {
        Index peak = 0;
        ur.col(j).cwiseAbs().maxCoeff(&peak);
        const Complex phase = ur(peak, j) / std::max(std::abs(ur(peak, j)), 1e-300);
        for (Index i = 0; i < ur.rows(); ++i) {
            const Complex aligned = ur(i, j) * std::conj(phase);
            const double target = (i == j) ? 1.0 : 0.0;
            residual_alignment = std::max(residual_alignment, std::abs(aligned - Complex(target)));
        }
    }

    // Spread of the non-zero singular values of F itself.
    Eigen::JacobiSVD<Matrix> svd_f(problem.channel_map);
    const RealVector& sf = svd_f.singularValues();
    const double sf_max = sf.size() > 0 ? sf(0) : 0.0;
    double sf_min = sf_max;
    for (Index i = 0; i < sf.size(); ++i)
        if (sf(i) > tol.psd * sf_max) sf_min = std::min(sf_min, sf(i));
    const double residual_spread = sf_max > 0 ? (sf_max - sf_min) / sf_max : 0.0;

    EqualityCertificate cert{residual_alignment, residual_spread, false};
    cert.pass = residual_alignment <= tol.rel && residual_spread <= tol.rel;
    return cert;
}

TraceInequalityResult trace_inequality_check(const Matrix& a, const RealVector& lambda_diag, const Tolerances& tol) {
    tol.validate();
    if (a.rows() != a.cols() || a.rows() != lambda_diag.size())
        throw DimensionMismatch("trace_inequality_check: dimensions disagree");
    for (Index i = 0; i < lambda_diag.size(); ++i)
        if (!(lambda_diag(i) > 0))
            throw NonPositiveInput("trace_inequality_check: Λ entries must be positive");

    const auto spectrum = HermitianSpectrum::from_matrix(a, tol, /*require_psd=*/false);
    const double top = spectrum.max_eigenvalue();
    if (!(top > 0) || spectrum.eigenvalues()(a.rows() - 1) <= tol.psd * top)
        throw NotPositiveDefinite("trace_inequality_check: A is not positive definite");

    const Matrix sym = 0.5 * (a + a.adjoint());
    Eigen::LDLT<Matrix> ldlt(sym);
    const Matrix lambda = lambda_diag.cast<Complex>().asDiagonal();
    const double lhs = ldlt.solve(lambda).trace().real();

    double rhs = 0.0;
    double offdiag = 0.0;
    double maxdiag = 0.0;
    for (Index i = 0; i < a.rows(); ++i) {
        rhs += lambda_diag(i) / sym(i, i).real();
        maxdiag = std::max(maxdiag, std::abs(sym(i, i)));
        for (Index j = 0; j < a.cols(); ++j)
            if (i != j) offdiag = std::max(offdiag, std::abs(sym(i, j)));
    }

    TraceInequalityResult out;
    out.slack = lhs - rhs;
    out.holds = out.slack >= -tol.rel * (1.0 + std::abs(lhs));
    out.diagonal = offdiag <= tol.herm * std::max(1.0, maxdiag);
    return out;
}

SemiGlmAnalysis semiglm_analyze(const SemiGlmProblem& problem, const Tolerances& tol) {
    tol.validate();
    const auto mi_side = semiglm_mi_optimal(problem, tol);
    const auto mmse_side = semiglm_mmse_optimal(problem, tol);

    SemiGlmAnalysis out;
    out.mi_opt = mi_side.mi_nats;
    out.mmse_mi_waveform = semiglm_mmse_at(problem, mi_side.gram, tol);
    out.mmse_opt = mmse_side.bound;
    out.mmse_opt_exact = mmse_side.exact;
    out.certificate = equality_certificate(problem, tol);

    const RealVector& var = problem.prior.variances();
    const double total = problem.prior.total_variance();
    out.ser_mi = rate_from_allocation(
        var, waterfill_inverse(var, std::min(out.mmse_mi_waveform, total), tol));
    out.ser_mmse = rate_from_allocation(
        var, waterfill_inverse(var, std::min(out.mmse_opt, total), tol));

    const double slack = tol.rel * (1.0 + out.mi_opt);
    if (out.ser_mi > out.ser_mmse + slack || out.ser_mmse > out.mi_opt + slack)
        throw InvariantViolation("semiglm_analyze: rate ordering violated");
    return out;
}

}  // namespace ser
