#include <doctest.h>

#include "oracles.hpp"
#include "ser/core.hpp"
#include "ser/random.hpp"

using namespace ser;

TEST_CASE("spectrum of the identity") {
    const auto spec = HermitianSpectrum::from_matrix(Matrix::Identity(2, 2));
    CHECK(spec.eigenvalues()(0) == doctest::Approx(1.0));
    CHECK(spec.eigenvalues()(1) == doctest::Approx(1.0));
    const Matrix gram = spec.eigenvectors().adjoint() * spec.eigenvectors();
    CHECK((gram - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("spectrum of diag(1,4) sorts descending with permutation basis") {
    RealVector d(2);
    d << 1.0, 4.0;
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = 1.0;
    a(1, 1) = 4.0;
    const auto spec = HermitianSpectrum::from_matrix(a);
    CHECK(spec.eigenvalues()(0) == doctest::Approx(4.0));
    CHECK(spec.eigenvalues()(1) == doctest::Approx(1.0));
    for (Index j = 0; j < 2; ++j) {
        Index peak = 0;
        spec.eigenvectors().col(j).cwiseAbs().maxCoeff(&peak);
        CHECK(std::abs(spec.eigenvectors()(peak, j)) == doctest::Approx(1.0));
    }
    const auto diag_spec = HermitianSpectrum::from_diagonal(d);
    CHECK(diag_spec.eigenvalues()(0) == doctest::Approx(4.0));
    CHECK((diag_spec.reconstruct() - a).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("random PSD matrix recomposes within tolerance") {
    const Matrix b = random_gaussian_matrix(4, 4, 91);
    const Matrix a = b.adjoint() * b;
    const auto spec = HermitianSpectrum::from_matrix(a);
    const double scale = spec.max_eigenvalue();
    CHECK((spec.reconstruct() - a).cwiseAbs().maxCoeff() < 1e-9 * scale);

    // Idempotence: a second pass over the reconstruction leaves the
    // eigenvalues in place.
    const auto again = HermitianSpectrum::from_matrix(spec.reconstruct());
    for (Index i = 0; i < 4; ++i)
        CHECK(again.eigenvalues()(i) == doctest::Approx(spec.eigenvalues()(i)).epsilon(1e-9));
}

TEST_CASE("non-Hermitian and indefinite inputs are rejected") {
    Matrix a(2, 2);
    a << Complex(1, 0), Complex(0.5, 0.2), Complex(0.1, 0.3), Complex(2, 0);
    CHECK_THROWS_AS(HermitianSpectrum::from_matrix(a), NotHermitian);

    Matrix indef = Matrix::Identity(2, 2);
    indef(1, 1) = -0.5;
    CHECK_THROWS_AS(HermitianSpectrum::from_matrix(indef), IndefiniteInput);
    CHECK_NOTHROW(HermitianSpectrum::from_matrix(indef, Tolerances{}, /*require_psd=*/false));
}

TEST_CASE("tiny eigenvalues get clipped to zero") {
    Matrix a = Matrix::Identity(3, 3);
    a(2, 2) = 1e-14;
    const auto spec = HermitianSpectrum::from_matrix(a);
    CHECK(spec.eigenvalues()(2) == 0.0);
    CHECK_FALSE(spec.full_rank());
}

TEST_CASE("random gaussian matrices: variance, determinism, seed sensitivity") {
    const Matrix big = random_gaussian_matrix(1000, 1, 7);
    const double var = big.squaredNorm() / 1000.0;
    CHECK(var > 0.9);
    CHECK(var < 1.1);

    const Matrix x1 = random_gaussian_matrix(2, 3, 1234);
    const Matrix x2 = random_gaussian_matrix(2, 3, 1234);
    CHECK((x1 - x2).cwiseAbs().maxCoeff() == 0.0);

    const Matrix x3 = random_gaussian_matrix(2, 3, 1235);
    CHECK((x1 - x3).cwiseAbs().maxCoeff() > 1e-6);
}

TEST_CASE("random unitary really is unitary") {
    const Matrix u = random_unitary(5, 42);
    CHECK((u.adjoint() * u - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("gaussian prior guards rank unless flagged degenerate") {
    RealVector vals(2);
    vals << 1.0, 0.0;
    auto spec = HermitianSpectrum::from_diagonal(vals);
    CHECK_THROWS_AS(GaussianPrior{spec}, SingularPrior);
    const GaussianPrior degenerate(spec, /*allow_degenerate=*/true);
    CHECK(degenerate.total_variance() == doctest::Approx(1.0));
}

TEST_CASE("waveform gram invariants") {
    const Matrix x = random_gaussian_matrix(6, 3, 5);
    const double budget = x.squaredNorm();
    const auto gram = WaveformGram::from_factor(x, budget);
    CHECK(gram.trace() == doctest::Approx(budget));
    CHECK(gram.factor_rows() == 6);

    // Trace above budget is rejected.
    CHECK_THROWS_AS(WaveformGram::from_factor(x, 0.5 * budget), InvariantViolation);
    // Rank above factor_rows is rejected.
    CHECK_THROWS_AS(WaveformGram::from_matrix(Matrix::Identity(3, 3), 10.0, 1), InvariantViolation);
    CHECK_THROWS_AS(WaveformGram::from_matrix(Matrix::Identity(3, 3), -1.0, 3), NegativeBudget);
}

TEST_CASE("tolerances must be positive") {
    Tolerances tol;
    tol.rel = 0.0;
    CHECK_THROWS_AS(tol.validate(), NonPositiveInput);
}
