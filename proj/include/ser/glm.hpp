#pragma once

// Gaussian linear model y = X h + z with h ~ CN(0, Σ): closed-form mutual
// information, MMSE, the water-filling optimal waveform, and the sensing
// estimation rate evaluated at the achieved MMSE. At the optimal waveform
// the rate equals the mutual information; for any other feasible waveform
// it is strictly smaller in general.
//
// MI and MMSE are evaluated in the prior eigenbasis through the whitened
// form B = I + σ_z^{-2} Λ^{1/2} U^H R_x U Λ^{1/2}, which avoids inverting Σ.

#include <cstdint>

#include "ser/core.hpp"
#include "ser/waterfill.hpp"

namespace ser {

struct GlmAnalysis {
    double mi_nats = 0;               // I(X)
    double mmse = 0;                  // tr of the posterior covariance
    double ser_nats = 0;              // R_E at D_L = mmse
    WaterfillAllocation alloc;        // reverse water-filling of mmse
    RealVector per_mode_distortion;   // D_i, prior-eigenbasis order
};

struct GlmWaveform {
    WaveformGram gram;
    Matrix factor;             // explicit X with X^H X = gram
    WaterfillAllocation alloc; // power levels over the prior eigenmodes
};

/// ln det(σ_z^{-2} Σ R_x + I) in nats.
double glm_mi(const GaussianPrior& prior, const WaveformGram& gram, const NoiseModel& noise,
              const Tolerances& tol = {});

/// tr{(σ_z^{-2} R_x + Σ^{-1})^{-1}}; requires a full-rank prior.
double glm_mmse(const GaussianPrior& prior, const WaveformGram& gram, const NoiseModel& noise,
                const Tolerances& tol = {});

/// Water-filling optimal waveform X* = Φ diag(levels)^{1/2} U^H with a
/// seeded random orthonormal Φ. Throws InsufficientRows if factor_rows is
/// smaller than the number of active modes.
GlmWaveform glm_optimal_waveform(const GaussianPrior& prior, const NoiseModel& noise,
                                 double budget, Index factor_rows, std::uint64_t seed,
                                 const Tolerances& tol = {});

/// Full analysis bundle: MI, MMSE, and the estimation rate obtained by
/// reverse water-filling the achieved MMSE over the prior eigenvalues.
GlmAnalysis glm_ser(const GaussianPrior& prior, const WaveformGram& gram, const NoiseModel& noise,
                    const Tolerances& tol = {});

}  // namespace ser
