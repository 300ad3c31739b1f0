#pragma once

// Concrete sensing channels used as fixtures: collocated MIMO radar with
// uniform linear arrays, and the cyclic-prefix OFDM time/frequency
// selective impulse response matrix.

#include <vector>

#include "ser/bcrb.hpp"
#include "ser/core.hpp"

namespace ser {

struct MimoRadarScene {
    Index m_t = 1;                  // transmit antennas
    Index m_r = 1;                  // receive antennas
    Vector alphas;                  // complex reflection coefficients, one per target
    RealVector thetas;              // target angles in radians, inside (−π/2, π/2)
    double element_spacing = 0.5;   // in wavelengths

    Index targets() const { return alphas.size(); }
    void validate() const;
};

struct MimoChannel {
    Matrix h;         // M_r x M_t
    Matrix jacobian;  // (M_r M_t) x 3L, columns = d vec(H)/d η
    RealVector eta;   // parameter point [θ; Re α; Im α]
};

/// H = Σ α_i a(θ_i) b^H(θ_i) with the first array element as phase
/// reference, plus the analytic Jacobian over η = [θ, Re α, Im α].
MimoChannel mimo_channel(const MimoRadarScene& scene);

/// ULA steering vector, entries exp(j 2π spacing k sin θ), k = 0..n−1.
Vector steering_vector(Index n, double spacing, double theta);

/// Wraps the radar scene as a NonlinearChannel over η for the BCRB module
/// (analytic Jacobian, prior supplied by the caller).
NonlinearChannel mimo_nonlinear_channel(const MimoRadarScene& scene, GaussianPrior prior,
                                        const Tolerances& tol = {});

struct OfdmScene {
    Index n = 0;                 // subcarriers
    Vector path_gains;           // α_i
    std::vector<Index> delays;   // τ_i in samples, distinct, 0 <= τ < n
    RealVector dopplers;         // f_D_i in cycles per sample

    Index paths() const { return path_gains.size(); }
    void validate() const;
};

/// N x N CIR matrix: entry (row n, col (n − τ_i) mod N) accumulates
/// α_i e^{j 2π f_D_i n}. Circulant when all Dopplers vanish.
Matrix ofdm_cir(const OfdmScene& scene);

}  // namespace ser
