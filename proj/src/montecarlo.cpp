#include "ser/montecarlo.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "ser/random.hpp"

namespace ser {

namespace {

void check_model_dims(const Matrix& x_factor, const Matrix& f, const GaussianPrior& prior) {
    if (f.cols() != prior.dim())
        throw DimensionMismatch("montecarlo: F columns must match the prior dimension");
    if (x_factor.cols() != f.rows())
        throw DimensionMismatch("montecarlo: X columns must match F rows");
}

Vector complex_gaussian_vector(Index n, std::mt19937_64& rng) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = standard_complex_gaussian(rng);
    return v;
}

// LMMSE gain K = Σ A^H (A Σ A^H + σ_z² I)^{-1} with A = X F.
Matrix lmmse_gain(const Matrix& x_factor, const Matrix& f, const GaussianPrior& prior,
                  const NoiseModel& noise) {
    const Matrix a = x_factor * f;
    const Matrix cross = prior.covariance_matrix() * a.adjoint();  // Σ A^H
    Matrix innovation = a * cross;
    innovation += noise.sigma_z_sq * Matrix::Identity(a.rows(), a.rows());
    innovation = 0.5 * (innovation + innovation.adjoint().eval());
    Eigen::LDLT<Matrix> ldlt(innovation);
    if (ldlt.info() != Eigen::Success)
        throw SingularGram("lmmse: innovation covariance is numerically singular");
    // K = cross * S^{-1}  <=>  K^H = S^{-1} cross^H (S Hermitian).
    return ldlt.solve(cross.adjoint()).adjoint();
}

}  // namespace

ModelSample sample_model(const Matrix& x_factor, const Matrix& f, const GaussianPrior& prior,
                         const NoiseModel& noise, std::uint64_t seed) {
    check_model_dims(x_factor, f, prior);
    std::mt19937_64 rng(seed);
    const Vector w = complex_gaussian_vector(prior.dim(), rng);
    Vector eta = prior.covariance().sqrt_factor() * w;  // CN(0, Σ)
    Vector y = x_factor * (f * eta);
    y += std::sqrt(noise.sigma_z_sq) * complex_gaussian_vector(x_factor.rows(), rng);
    return {std::move(eta), std::move(y)};
}

Vector lmmse_estimate(const Vector& y, const Matrix& x_factor, const Matrix& f,
                      const GaussianPrior& prior, const NoiseModel& noise) {
    check_model_dims(x_factor, f, prior);
    if (!prior.full_rank()) throw SingularPrior("lmmse_estimate: singular prior");
    if (y.size() != x_factor.rows())
        throw DimensionMismatch("lmmse_estimate: observation length mismatch");
    return lmmse_gain(x_factor, f, prior, noise) * y;
}

McResult empirical_mmse(const Matrix& x_factor, const Matrix& f, const GaussianPrior& prior,
                        const NoiseModel& noise, const McConfig& cfg) {
    if (cfg.n_trials < 1) throw std::invalid_argument("empirical_mmse: n_trials must be >= 1");
    check_model_dims(x_factor, f, prior);
    if (!prior.full_rank()) throw SingularPrior("empirical_mmse: singular prior");
    const Matrix gain = lmmse_gain(x_factor, f, prior, noise);

    // Fixed trial order with per-trial substreams: reproducible regardless
    // of how the loop is ever scheduled.
    long double sum = 0.0L, sum_sq = 0.0L;
    for (std::int64_t trial = 0; trial < cfg.n_trials; ++trial) {
        const auto draw =
            sample_model(x_factor, f, prior, noise, mix_seed(cfg.seed, static_cast<std::uint64_t>(trial)));
        const double err = (draw.eta - gain * draw.y).squaredNorm();
        sum += err;
        sum_sq += static_cast<long double>(err) * err;
    }

    const double n = static_cast<double>(cfg.n_trials);
    const double mean = static_cast<double>(sum / cfg.n_trials);
    McResult out{mean, 0.0, cfg.n_trials};
    if (cfg.report_stderr && cfg.n_trials > 1) {
        const double var =
            std::max(0.0, static_cast<double>((sum_sq - sum * sum / cfg.n_trials) /
                                              static_cast<long double>(cfg.n_trials - 1)));
        out.stderr_of_mean = std::sqrt(var / n);
    }
    return out;
}

}  // namespace ser
