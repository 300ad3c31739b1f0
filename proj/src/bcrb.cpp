#include "ser/bcrb.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "ser/random.hpp"

namespace ser {

Matrix prior_fim_gaussian(const GaussianPrior& prior, const Tolerances& tol) {
    tol.validate();
    if (!prior.full_rank()) throw SingularPrior("prior_fim_gaussian: singular covariance");
    const auto& spec = prior.covariance();
    const Matrix& u = spec.eigenvectors();
    return u * spec.eigenvalues().cwiseInverse().cast<Complex>().asDiagonal() * u.adjoint();
}

std::function<Matrix(const RealVector&)> finite_difference_jacobian(
    std::function<Vector(const RealVector&)> h_map, Index output_dim) {
    return [h_map = std::move(h_map), output_dim](const RealVector& eta) {
        Matrix jac(output_dim, eta.size());
        RealVector point = eta;
        for (Index j = 0; j < eta.size(); ++j) {
            const double step = 1e-5 * (1.0 + std::abs(eta(j)));
            point(j) = eta(j) + step;
            const Vector plus = h_map(point);
            point(j) = eta(j) - step;
            const Vector minus = h_map(point);
            point(j) = eta(j);
            if (plus.size() != output_dim || minus.size() != output_dim)
                throw DimensionMismatch("finite_difference_jacobian: h_map output size changed");
            jac.col(j) = (plus - minus) / (2.0 * step);
        }
        return jac;
    };
}

namespace {

Vector vec_of(const Matrix& m) {
    return Eigen::Map<const Vector>(m.data(), m.size());  // column-major stacking
}

Matrix mat_of(const Vector& v, Index rows, Index cols) {
    if (v.size() != rows * cols) throw DimensionMismatch("mat_of: size mismatch");
    return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

// Real draw η ~ N(0, Σ); the prior covariance must be (numerically) real.
RealVector sample_real_prior(const GaussianPrior& prior, std::mt19937_64& rng,
                             const Tolerances& tol) {
    const Matrix sigma = prior.covariance_matrix();
    if (sigma.imag().cwiseAbs().maxCoeff() > tol.herm * std::max(1.0, sigma.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("choi_reduce: Monte Carlo sampling needs a real prior covariance");
    std::normal_distribution<double> normal(0.0, 1.0);
    RealVector w(prior.dim());
    for (Index i = 0; i < w.size(); ++i) w(i) = normal(rng);
    const RealVector scale = prior.variances().cwiseSqrt();
    return prior.covariance().eigenvectors().real() * scale.asDiagonal() * w;
}

Matrix evaluate_jacobian(const NonlinearChannel& channel, const RealVector& eta) {
    if (!channel.jacobian) throw std::invalid_argument("NonlinearChannel: missing jacobian");
    const Matrix jac = channel.jacobian(eta);
    if (jac.rows() != channel.output_dim || jac.cols() != channel.param_dim())
        throw DimensionMismatch("NonlinearChannel: jacobian has wrong shape");
    if (!jac.allFinite()) throw JacobianFailure("NonlinearChannel: non-finite jacobian");
    return jac;
}

struct BcrbSpectra {
    RealVector lambda_j;  // eigenvalues of J_P^{-1}, descending (prior variances)
    Matrix u_j;
    RealVector lambda_g;  // eigenvalues of G J_P^{-1} G^H, descending
    Matrix u_g;
};

BcrbSpectra bcrb_spectra(const NonlinearChannel& channel, const ChoiReduction& reduction,
                         const Tolerances& tol) {
    const auto jp = HermitianSpectrum::from_matrix(channel.prior_fim, tol);
    if (!jp.full_rank()) throw SingularPrior("bcrb: prior Fisher information is singular");

    BcrbSpectra out;
    const Index k = jp.dim();
    out.lambda_j.resize(k);
    out.u_j.resize(k, k);
    for (Index i = 0; i < k; ++i) {  // invert and flip to descending
        out.lambda_j(i) = 1.0 / jp.eigenvalues()(k - 1 - i);
        out.u_j.col(i) = jp.eigenvectors().col(k - 1 - i);
    }

    const Matrix half = out.u_j * out.lambda_j.cwiseSqrt().cast<Complex>().asDiagonal();
    const Matrix gjg = (reduction.g * half) * (reduction.g * half).adjoint();
    const auto gs = HermitianSpectrum::from_matrix(gjg, tol);
    out.lambda_g = gs.eigenvalues();
    out.u_g = gs.eigenvectors();
    return out;
}

}  // namespace

ChoiReduction choi_reduce(const NonlinearChannel& channel, std::int64_t n_samples,
                          std::uint64_t seed, const Tolerances& tol) {
    tol.validate();
    if (n_samples < 1) throw std::invalid_argument("choi_reduce: n_samples must be >= 1");
    const Index mh = channel.output_dim;
    const Index k = channel.param_dim();
    if (mh < 1 || k < 1) throw DimensionMismatch("choi_reduce: empty channel");

    ChoiReduction out;
    if (channel.constant_jacobian) {
        // Exact: Ψ = vec(F) vec(F)^H is rank one by construction.
        const Matrix f = evaluate_jacobian(channel, RealVector::Zero(k));
        const Vector v = vec_of(f);
        const double norm = v.norm();
        if (!(norm > 0)) throw ZeroChannel("choi_reduce: constant jacobian is zero");
        out.psi = v * v.adjoint();
        out.lambda_psi = norm * norm;
        out.u = v / norm;
        out.rank1_residual = 0.0;
    } else {
        Matrix psi = Matrix::Zero(mh * k, mh * k);
        for (std::int64_t s = 0; s < n_samples; ++s) {
            std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(s)));
            const RealVector eta = sample_real_prior(channel.prior, rng, tol);
            const Vector v = vec_of(evaluate_jacobian(channel, eta));
            psi.noalias() += v * v.adjoint();
        }
        psi /= static_cast<double>(n_samples);
        const auto spec = HermitianSpectrum::from_matrix(psi, tol);
        out.psi = std::move(psi);
        out.lambda_psi = spec.max_eigenvalue();
        if (!(out.lambda_psi > 0)) throw ZeroChannel("choi_reduce: Ψ vanishes");
        out.u = spec.eigenvectors().col(0);
        out.rank1_residual = std::clamp(1.0 - out.lambda_psi / spec.trace(), 0.0, 1.0);
    }

    // Canonical phase: largest-magnitude entry of u made real positive.
    Index peak = 0;
    out.u.cwiseAbs().maxCoeff(&peak);
    const Complex phase = out.u(peak) / std::abs(out.u(peak));
    out.u *= std::conj(phase);
    out.g = std::sqrt(out.lambda_psi) * mat_of(out.u, mh, k);
    return out;
}

BcrbResult bcrb_min(const NonlinearChannel& channel, const ChoiReduction& reduction,
                    const NoiseModel& noise, double budget, const Tolerances& tol) {
    tol.validate();
    if (budget < 0) throw NegativeBudget("bcrb_min: negative budget");
    if (reduction.g.rows() != channel.output_dim || reduction.g.cols() != channel.param_dim())
        throw DimensionMismatch("bcrb_min: reduction does not match the channel");

    auto spectra = bcrb_spectra(channel, reduction, tol);
    const Index mh = spectra.lambda_g.size();
    const Index k = spectra.lambda_j.size();
    const Index paired = std::min(mh, k);
    const double clip = tol.psd * std::max(1.0, spectra.lambda_g(0));

    RealVector floors = RealVector::Zero(mh);
    RealVector weights = RealVector::Zero(mh);
    for (Index i = 0; i < paired; ++i) {
        if (spectra.lambda_g(i) <= clip) continue;
        floors(i) = noise.sigma_z_sq / spectra.lambda_g(i);
        weights(i) = std::sqrt(noise.sigma_z_sq * spectra.lambda_j(i) / spectra.lambda_g(i));
    }

    WaterfillAllocation alloc;
    if ((weights.array() > 0).any())
        alloc = waterfill_weighted(floors, weights, budget, tol);
    else
        alloc = {RealVector::Zero(mh), 0.0, 0.0};  // no usable mode; power changes nothing

    const Matrix gram_matrix =
        spectra.u_g * alloc.levels.cast<Complex>().asDiagonal() * spectra.u_g.adjoint();
    WaveformGram gram = WaveformGram::from_matrix(gram_matrix, budget, mh, tol);

    // Exact BCRB at the constructed gram.
    Matrix info = (reduction.g.adjoint() * gram.gram() * reduction.g) / noise.sigma_z_sq +
                  channel.prior_fim;
    info = 0.5 * (info + info.adjoint().eval());
    Eigen::LDLT<Matrix> ldlt(info);
    if (ldlt.info() != Eigen::Success) throw NumericalFailure("bcrb_min: BFIM factorization failed");
    const double bcrb = ldlt.solve(Matrix::Identity(k, k)).trace().real();

    double bound = 0.0;
    for (Index i = 0; i < k; ++i) {
        const double gain =
            (i < mh) ? spectra.lambda_g(i) * alloc.levels(i) / noise.sigma_z_sq : 0.0;
        bound += spectra.lambda_j(i) / (gain + 1.0);
    }

    return {bcrb, bound, std::move(gram), std::move(alloc), std::move(spectra.lambda_j),
            std::move(spectra.lambda_g)};
}

SerBoundResult ser_upper_bound(const NonlinearChannel& channel, const ChoiReduction& reduction,
                               const NoiseModel& noise, double budget, const Tolerances& tol) {
    tol.validate();
    const auto res = bcrb_min(channel, reduction, noise, budget, tol);
    const double sigma_z = std::sqrt(noise.sigma_z_sq);

    // Σ log^+(λ_m sqrt(Λ_J_i Λ_G_i)/σ_z): each active mode contributes its
    // ln(1 + σ_z^{-2} Λ_G_i p_i) term expressed through the water level.
    double bound = 0.0;
    const Index paired = std::min(res.lambda_j.size(), res.lambda_g.size());
    for (Index i = 0; i < paired; ++i) {
        if (!(res.lambda_g(i) > 0)) continue;
        const double arg =
            res.alloc.water_level * std::sqrt(res.lambda_j(i) * res.lambda_g(i)) / sigma_z;
        if (arg > 1.0) bound += std::log(arg);
    }

    const double total = res.lambda_j.sum();
    const double rate = rate_from_allocation(
        res.lambda_j, waterfill_inverse(res.lambda_j, std::min(res.bcrb, total), tol));
    if (rate > bound + tol.rel * (1.0 + bound))
        throw InvariantViolation("ser_upper_bound: R_E(BCRB) exceeds the closed-form bound");
    return {bound, rate, res.bcrb};
}

double effective_bandwidth(const RealVector& freqs, const RealVector& psd_samples) {
    const Index n = freqs.size();
    if (n != psd_samples.size()) throw DimensionMismatch("effective_bandwidth: size mismatch");
    if (n < 2) throw std::invalid_argument("effective_bandwidth: need at least 2 grid points");

    const double df = freqs(1) - freqs(0);
    if (!(df > 0)) throw std::invalid_argument("effective_bandwidth: grid must ascend");
    for (Index i = 1; i + 1 < n; ++i)
        if (std::abs((freqs(i + 1) - freqs(i)) - df) > 1e-9 * df)
            throw std::invalid_argument("effective_bandwidth: grid must be uniform");
    for (Index i = 0; i < n; ++i)
        if (psd_samples(i) < 0)
            throw std::invalid_argument("effective_bandwidth: negative spectrum sample");

    double energy = 0.0, second_moment = 0.0;
    for (Index i = 0; i + 1 < n; ++i) {  // trapezoid rule
        energy += 0.5 * (psd_samples(i) + psd_samples(i + 1)) * df;
        second_moment += 0.5 *
                         (freqs(i) * freqs(i) * psd_samples(i) +
                          freqs(i + 1) * freqs(i + 1) * psd_samples(i + 1)) *
                         df;
    }
    if (!(energy > 0)) throw ZeroEnergy("effective_bandwidth: zero total energy");
    return second_moment / energy;
}

double delay_crb(double b_rms_sq, double snr) {
    if (!(b_rms_sq > 0) || !(snr > 0))
        throw NonPositiveInput("delay_crb: bandwidth and SNR must be positive");
    constexpr double pi = std::numbers::pi;
    return 1.0 / (8.0 * pi * pi * b_rms_sq * snr);
}

double delay_bcrb(double sigma_eta_sq, double b_rms_sq, double snr) {
    if (!(sigma_eta_sq > 0)) throw NonPositiveInput("delay_bcrb: prior variance must be positive");
    return 1.0 / (1.0 / delay_crb(b_rms_sq, snr) + 1.0 / sigma_eta_sq);
}

double delay_ser(double sigma_eta_sq, double b_rms_sq, double snr) {
    if (!(sigma_eta_sq > 0)) throw NonPositiveInput("delay_ser: prior variance must be positive");
    const double crb = delay_crb(b_rms_sq, snr);
    const double rate = std::log1p(sigma_eta_sq / crb);

    // log^+(σ²_η / BCRB) is the same number by algebra; keep the identity honest.
    const double via_bcrb = std::max(0.0, std::log(sigma_eta_sq / delay_bcrb(sigma_eta_sq, b_rms_sq, snr)));
    if (std::abs(rate - via_bcrb) > 1e-12 * (1.0 + rate))
        throw InvariantViolation("delay_ser: the two closed forms disagree");
    return rate;
}

}  // namespace ser
