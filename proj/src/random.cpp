#include "ser/random.hpp"

#include <Eigen/QR>
#include <cmath>

namespace ser {

Complex standard_complex_gaussian(std::mt19937_64& rng) {
    static constexpr double kHalfSqrt = 0.70710678118654752440;  // 1/sqrt(2)
    std::normal_distribution<double> normal(0.0, kHalfSqrt);
    const double re = normal(rng);
    const double im = normal(rng);
    return {re, im};
}

Matrix random_gaussian_matrix(Index rows, Index cols, std::uint64_t seed) {
    if (rows < 1 || cols < 1)
        throw DimensionMismatch("random_gaussian_matrix: rows and cols must be >= 1");
    std::mt19937_64 rng(seed);
    Matrix out(rows, cols);
    // Fixed column-major fill order keeps draws reproducible.
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) out(i, j) = standard_complex_gaussian(rng);
    return out;
}

Matrix random_orthonormal_columns(Index rows, Index cols, std::uint64_t seed) {
    if (rows < cols) throw DimensionMismatch("random_orthonormal_columns: rows < cols");
    const Matrix g = random_gaussian_matrix(rows, cols, seed);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
    const Matrix r = qr.matrixQR().topLeftCorner(cols, cols).template triangularView<Eigen::Upper>();
    for (Index j = 0; j < cols; ++j) {
        const Complex d = r(j, j);
        const double mag = std::abs(d);
        if (mag > 0) q.col(j) *= d / mag;  // make the implicit R diagonal positive
    }
    return q;
}

Matrix random_unitary(Index n, std::uint64_t seed) {
    return random_orthonormal_columns(n, n, seed);
}

Matrix random_covariance(Index n, std::uint64_t seed) {
    const Matrix b = random_gaussian_matrix(n, 2 * n, seed);
    Matrix sigma = (b * b.adjoint()) / static_cast<double>(2 * n);
    sigma *= static_cast<double>(n) / sigma.trace().real();
    return sigma;
}

}  // namespace ser
