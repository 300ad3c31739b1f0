#pragma once

// Empirical oracles: draw (η, y) from the generative model y = X F η + z,
// run the LMMSE estimator, and estimate the MSE with a standard error.
// Trials use per-index substreams so the result is independent of
// evaluation order; accumulation happens in fixed trial order.

#include <cstdint>

#include "ser/core.hpp"

namespace ser {

struct McConfig {
    std::int64_t n_trials = 10000;
    std::uint64_t seed = 0;
    bool report_stderr = true;
};

struct McResult {
    double empirical_mmse = 0;
    double stderr_of_mean = 0;
    std::int64_t n_trials = 0;
};

struct ModelSample {
    Vector eta;  // parameter draw
    Vector y;    // observation
};

/// One draw of η ~ CN(0, Σ) and y = X F η + z with z ~ CN(0, σ_z² I).
ModelSample sample_model(const Matrix& x_factor, const Matrix& f, const GaussianPrior& prior,
                         const NoiseModel& noise, std::uint64_t seed);

/// Posterior mean η̂ = Σ A^H (A Σ A^H + σ_z² I)^{-1} y with A = X F.
Vector lmmse_estimate(const Vector& y, const Matrix& x_factor, const Matrix& f,
                      const GaussianPrior& prior, const NoiseModel& noise);

/// Mean of ‖η − η̂‖² over cfg.n_trials trials, substream per trial index.
McResult empirical_mmse(const Matrix& x_factor, const Matrix& f, const GaussianPrior& prior,
                        const NoiseModel& noise, const McConfig& cfg);

}  // namespace ser
