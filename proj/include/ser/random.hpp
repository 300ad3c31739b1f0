#pragma once

// Seeded randomness helpers. Every draw in the library is reproducible:
// a 64-bit seed fully determines the output, and independent substreams
// are derived with mix_seed so results never depend on evaluation order.

#include <cstdint>
#include <random>

#include "ser/core.hpp"

namespace ser {

/// splitmix64-style combiner for deriving independent substream seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

/// i.i.d. circularly symmetric complex Gaussian entries with unit total
/// variance per entry (real and imaginary parts each N(0, 1/2)).
Matrix random_gaussian_matrix(Index rows, Index cols, std::uint64_t seed);

/// Haar-ish random unitary via QR of a complex Gaussian draw, with the
/// diagonal-phase fix that makes the factorization unique.
Matrix random_unitary(Index n, std::uint64_t seed);

/// Matrix with `cols` orthonormal columns (rows >= cols).
Matrix random_orthonormal_columns(Index rows, Index cols, std::uint64_t seed);

/// Seeded Wishart-style covariance B B^H / (2n) with B n x 2n, rescaled to
/// trace n. Well conditioned with overwhelming probability.
Matrix random_covariance(Index n, std::uint64_t seed);

/// Complex standard normal CN(0,1) from an existing engine.
Complex standard_complex_gaussian(std::mt19937_64& rng);

}  // namespace ser
