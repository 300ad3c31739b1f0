#pragma once

// Core domain types shared by every module: Hermitian eigen-spectra,
// zero-mean circularly symmetric Gaussian priors, the per-sample noise
// model, waveform Gram matrices with their power budget, and the numeric
// tolerances used throughout.
//
// Conventions (fixed project-wide):
//  - complex Gaussians are circularly symmetric with the total variance
//    split evenly between real and imaginary parts;
//  - all information quantities are natural-log (nats) internally;
//  - eigenvalues are stored in descending order.

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

#include "ser/errors.hpp"

namespace ser {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

struct Tolerances {
    double psd = 1e-10;      // eigenvalue clipping / PSD check
    double unitary = 1e-10;  // ‖U^H U − I‖_max bound
    double herm = 1e-10;     // Hermitian asymmetry bound
    double rel = 1e-9;       // generic relative comparisons
    double bisect = 1e-12;   // water-level / budget closure

    void validate() const;
};

/// Eigenvalues (descending, clipped at zero) plus the orthonormal
/// eigenbasis of a positive semidefinite Hermitian matrix.
class HermitianSpectrum {
public:
    /// Eigendecompose `a` after symmetrizing (a + a^H)/2.
    /// Throws NotHermitian if the asymmetry exceeds tol.herm (relative to
    /// the matrix scale) and IndefiniteInput if an eigenvalue falls below
    /// -tol.psd while `require_psd` is set. Eigenvalues below the clipping
    /// threshold are set to exactly zero.
    static HermitianSpectrum from_matrix(const Matrix& a,
                                         const Tolerances& tol = {},
                                         bool require_psd = true);

    /// Spectrum of diag(values); the eigenbasis is the permutation that
    /// sorts `values` descending.
    static HermitianSpectrum from_diagonal(const RealVector& values);

    const RealVector& eigenvalues() const { return eigenvalues_; }
    const Matrix& eigenvectors() const { return eigenvectors_; }
    Index dim() const { return eigenvalues_.size(); }

    /// U diag(λ) U^H
    Matrix reconstruct() const;
    /// U diag(sqrt λ) — convenient whitening factor.
    Matrix sqrt_factor() const;

    double max_eigenvalue() const { return dim() > 0 ? eigenvalues_(0) : 0.0; }
    double trace() const { return eigenvalues_.sum(); }
    bool full_rank() const { return dim() > 0 && eigenvalues_(dim() - 1) > 0.0; }

private:
    HermitianSpectrum(RealVector values, Matrix vectors);

    RealVector eigenvalues_;  // descending, >= 0
    Matrix eigenvectors_;     // columns, unitary
};

/// Zero-mean circularly symmetric Gaussian prior CN(0, Σ). The v1 library
/// fixes the mean at zero; the covariance is carried as a spectrum.
class GaussianPrior {
public:
    /// Throws SingularPrior for a rank-deficient covariance unless the
    /// caller explicitly allows a degenerate prior.
    explicit GaussianPrior(HermitianSpectrum covariance, bool allow_degenerate = false);

    static GaussianPrior from_covariance(const Matrix& sigma,
                                         const Tolerances& tol = {},
                                         bool allow_degenerate = false);

    Index dim() const { return covariance_.dim(); }
    const HermitianSpectrum& covariance() const { return covariance_; }
    /// Per-mode variances σ²_i, descending.
    const RealVector& variances() const { return covariance_.eigenvalues(); }
    double total_variance() const { return covariance_.trace(); }
    bool full_rank() const { return covariance_.full_rank(); }
    Matrix covariance_matrix() const { return covariance_.reconstruct(); }

private:
    HermitianSpectrum covariance_;
};

struct NoiseModel {
    double sigma_z_sq = 1.0;  // per-complex-sample noise variance

    explicit NoiseModel(double variance) : sigma_z_sq(variance) {
        if (!(variance > 0.0)) throw NonPositiveInput("noise variance must be > 0");
    }
};

/// Gram matrix R_x = X^H X of a transmit waveform, with the power budget
/// it was designed against and the row count available for factoring X.
class WaveformGram {
public:
    /// Validates Hermitian-PSD structure, trace(gram) <= budget(1+tol.rel)
    /// and rank(gram) <= min(dim, factor_rows).
    static WaveformGram from_matrix(Matrix gram, double budget, Index factor_rows,
                                    const Tolerances& tol = {});

    /// Gram of an explicit factor X (factor_rows = X.rows()).
    static WaveformGram from_factor(const Matrix& x, double budget,
                                    const Tolerances& tol = {});

    static WaveformGram zero(Index dim, double budget, Index factor_rows);

    const Matrix& gram() const { return gram_; }
    double budget() const { return budget_; }
    Index factor_rows() const { return factor_rows_; }
    Index dim() const { return gram_.rows(); }
    double trace() const { return gram_.trace().real(); }

private:
    WaveformGram(Matrix gram, double budget, Index factor_rows)
        : gram_(std::move(gram)), budget_(budget), factor_rows_(factor_rows) {}

    Matrix gram_;
    double budget_ = 0.0;
    Index factor_rows_ = 0;
};

}  // namespace ser
