#pragma once

// Nonlinear Gaussian observation models h(η) with real η: Bayesian Fisher
// information, the rank-1 Choi reduction of the expected Jacobian outer
// product, the minimized BCRB with its waveform, the computable upper bound
// on the estimation rate, and the scalar time-delay worked example.

#include <cstdint>
#include <functional>

#include "ser/core.hpp"
#include "ser/waterfill.hpp"

namespace ser {

struct NonlinearChannel {
    std::function<Vector(const RealVector&)> h_map;     // η -> C^{M_h}
    std::function<Matrix(const RealVector&)> jacobian;  // η -> M_h x K
    bool constant_jacobian = false;  // enables the exact short-circuit in choi_reduce
    GaussianPrior prior;             // on η (real, K-dimensional)
    Matrix prior_fim;                // J_P, K x K PSD
    Index output_dim = 0;            // M_h

    Index param_dim() const { return prior.dim(); }
};

struct ChoiReduction {
    Matrix psi;                // E[vec(F_η) vec(F_η)^H], (M_h K) x (M_h K)
    double lambda_psi = 0;     // dominant eigenvalue
    Vector u;                  // dominant unit eigenvector
    Matrix g;                  // sqrt(λ_Ψ) · mat_{M_h x K}(u)
    double rank1_residual = 0; // 1 − λ_Ψ / tr(Ψ), in [0, 1]
};

struct BcrbResult {
    double bcrb = 0;            // exact tr{(σ_z^{-2} G^H R_x G + J_P)^{-1}} at the gram
    double bound_value = 0;     // minimized lower bound Σ Λ_J_i/(σ_z^{-2}Λ_G_i p_i + 1)
    WaveformGram gram;
    WaterfillAllocation alloc;  // power levels over the G J_P^{-1} G^H eigenmodes
    RealVector lambda_j;        // eigenvalues of J_P^{-1}, descending
    RealVector lambda_g;        // eigenvalues of G J_P^{-1} G^H, descending
};

struct SerBoundResult {
    double bound_nats = 0;  // Σ log^+(λ_m sqrt(Λ_J_i Λ_G_i)/σ_z)
    double rate_nats = 0;   // R_E at the achieved BCRB
    double bcrb = 0;
};

/// Fisher information of the Gaussian prior: Σ^{-1}.
Matrix prior_fim_gaussian(const GaussianPrior& prior, const Tolerances& tol = {});

/// Central-difference Jacobian with step h_i = 1e-5 (1 + |η_i|).
std::function<Matrix(const RealVector&)> finite_difference_jacobian(
    std::function<Vector(const RealVector&)> h_map, Index output_dim);

/// Monte Carlo estimate of Ψ = E[vec(F_η) vec(F_η)^H] over η ~ prior
/// (exact single evaluation when the Jacobian is declared constant),
/// dominant eigenpair, effective map G and the rank-1 truncation residual.
ChoiReduction choi_reduce(const NonlinearChannel& channel, std::int64_t n_samples,
                          std::uint64_t seed, const Tolerances& tol = {});

/// Minimizes the BCRB lower bound over trace-constrained grams by weighted
/// water-filling in the eigenbasis of G J_P^{-1} G^H, and evaluates the
/// exact BCRB at the resulting gram.
BcrbResult bcrb_min(const NonlinearChannel& channel, const ChoiReduction& reduction,
                    const NoiseModel& noise, double budget, const Tolerances& tol = {});

/// Computable upper bound on the estimation rate at the minimized BCRB,
/// evaluated from the weighted water level; also returns R_E(BCRB) via
/// reverse water-filling and checks R_E <= bound.
SerBoundResult ser_upper_bound(const NonlinearChannel& channel, const ChoiReduction& reduction,
                               const NoiseModel& noise, double budget,
                               const Tolerances& tol = {});

/// B²_rms = ∫ f²|X(f)|² df / ∫ |X(f)|² df by the trapezoid rule on a
/// uniform grid. Throws ZeroEnergy for an all-zero spectrum.
double effective_bandwidth(const RealVector& freqs, const RealVector& psd_samples);

/// Deterministic-parameter CRB of a time delay: (8π² B²_rms SNR)^{-1}.
double delay_crb(double b_rms_sq, double snr);

/// Bayesian CRB with a Gaussian prior folded in.
double delay_bcrb(double sigma_eta_sq, double b_rms_sq, double snr);

/// Estimation rate ln(1 + σ²_η/σ²_CRB) of scalar delay estimation; equal to
/// log^+(σ²_η / BCRB_η) identically (checked internally).
double delay_ser(double sigma_eta_sq, double b_rms_sq, double snr);

}  // namespace ser
