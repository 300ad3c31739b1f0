#pragma once

// Semi-controllable Gaussian linear model y = X F η + z: the channel map F
// is fixed, only X is designable. Maximizing MI and minimizing MMSE now
// lead to *different* water-fillings; they coincide exactly when F has
// identical non-zero singular values and its right singular space matches
// the prior eigenspace (the equality certificate below).
//
// The MMSE-side optimum is the minimizer of the trace-inequality lower bound
// f(Λ_x) = Σ σ²_i / (σ_z^{-2} Λ_{F_i} Λ_{x_i} + 1); when the certificate
// fails this is reported as a bound together with the exact MMSE evaluated
// at the constructed gram.

#include "ser/core.hpp"
#include "ser/glm.hpp"
#include "ser/waterfill.hpp"

namespace ser {

struct SemiGlmProblem {
    Matrix channel_map;   // F, (h-dim) x (eta-dim)
    GaussianPrior prior;  // on eta
    NoiseModel noise;
    double budget = 0;

    Index eta_dim() const { return prior.dim(); }
    Index h_dim() const { return channel_map.rows(); }
    void validate() const;
};

struct SemiGlmMiWaveform {
    WaveformGram gram;          // U_F diag(levels) U_F^H
    WaterfillAllocation alloc;  // levels over the F Σ F^H eigenmodes
    double mi_nats = 0;
};

struct SemiGlmMmseWaveform {
    WaveformGram gram;
    WaterfillAllocation alloc;
    double bound = 0;  // minimized f(Λ_x); the true MMSE when the certificate holds
    double exact = 0;  // exact MMSE at this gram
};

struct EqualityCertificate {
    double residual_alignment = 0;  // ‖U_R − I‖_max after phase alignment
    double residual_spread = 0;     // relative spread of F's non-zero singular values
    bool pass = false;
};

struct TraceInequalityResult {
    double slack = 0;  // tr(A^{-1}Λ) − Σ Λ_ii/A_ii
    bool holds = false;
    bool diagonal = false;  // off-diagonal mass of A negligible => equality
};

struct SemiGlmAnalysis {
    double mi_opt = 0;            // I(X*)
    double mmse_mi_waveform = 0;  // exact MMSE at the MI-optimal gram
    double mmse_opt = 0;          // minimized lower bound (true MMSE under the certificate)
    double mmse_opt_exact = 0;    // exact MMSE at the bound-optimal gram
    double ser_mi = 0;            // R_E at mmse_mi_waveform
    double ser_mmse = 0;          // R_E at mmse_opt
    EqualityCertificate certificate;
};

/// MI-optimal waveform: direct water-filling over the eigenmodes of FΣF^H.
/// Throws ZeroChannel when FΣF^H vanishes.
SemiGlmMiWaveform semiglm_mi_optimal(const SemiGlmProblem& problem, const Tolerances& tol = {});

/// Minimizer of the MMSE lower bound: weighted water-filling with
/// slopes a_i = sqrt(σ_z² σ²_i / Λ_{F_i}).
SemiGlmMmseWaveform semiglm_mmse_optimal(const SemiGlmProblem& problem, const Tolerances& tol = {});

/// Exact MMSE tr{(σ_z^{-2} F^H R_x F + Σ^{-1})^{-1}} at a given gram.
double semiglm_mmse_at(const SemiGlmProblem& problem, const WaveformGram& gram,
                       const Tolerances& tol = {});

/// Checks the two equality conditions through the SVD F U Λ^{1/2} = U_F Λ̃ U_R^H.
EqualityCertificate equality_certificate(const SemiGlmProblem& problem, const Tolerances& tol = {});

/// tr(A^{-1}Λ) >= Σ Λ_ii / A_ii for Hermitian positive definite A and a
/// positive diagonal Λ, with equality iff A is diagonal.
TraceInequalityResult trace_inequality_check(const Matrix& a, const RealVector& lambda_diag,
                          const Tolerances& tol = {});

/// Bundle of both waveforms, both MMSE figures, both rates and the
/// certificate; enforces ser_mi <= ser_mmse <= mi_opt.
SemiGlmAnalysis semiglm_analyze(const SemiGlmProblem& problem, const Tolerances& tol = {});

}  // namespace ser
