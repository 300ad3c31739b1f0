#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "ser/glm.hpp"
#include "ser/random.hpp"

using namespace ser;

namespace {

GaussianPrior diag_prior(std::initializer_list<double> variances) {
    RealVector v(static_cast<Index>(variances.size()));
    Index i = 0;
    for (const double x : variances) v(i++) = x;
    return GaussianPrior(HermitianSpectrum::from_diagonal(v));
}

}  // namespace

TEST_CASE("scalar MI and MMSE at snr = 1") {
    const auto prior = diag_prior({1.0});
    const NoiseModel noise(1.0);
    const auto gram = WaveformGram::from_matrix(Matrix::Identity(1, 1), 1.0, 1);
    CHECK(glm_mi(prior, gram, noise) == doctest::Approx(std::log(2.0)));
    CHECK(glm_mmse(prior, gram, noise) == doctest::Approx(0.5));
}

TEST_CASE("zero waveform: zero MI, prior-variance MMSE") {
    const auto prior = diag_prior({2.0, 1.0});
    const NoiseModel noise(1.0);
    const auto gram = WaveformGram::zero(2, 1.0, 2);
    CHECK(glm_mi(prior, gram, noise) == 0.0);
    CHECK(glm_mmse(prior, gram, noise) == doctest::Approx(3.0));
    const auto analysis = glm_ser(prior, gram, noise);
    CHECK(analysis.ser_nats == 0.0);
}

TEST_CASE("two-mode hand example: eigenvalues [2,1], budget 3") {
    const auto prior = diag_prior({2.0, 1.0});
    const NoiseModel noise(1.0);
    const auto wf = glm_optimal_waveform(prior, noise, 3.0, 4, 7);

    // Water level 2.25 puts 1.75 and 1.25 on the two modes.
    CHECK(wf.alloc.water_level == doctest::Approx(2.25));
    CHECK(wf.alloc.levels(0) == doctest::Approx(1.75));
    CHECK(wf.alloc.levels(1) == doctest::Approx(1.25));

    CHECK(glm_mi(prior, wf.gram, noise) ==
          doctest::Approx(std::log(4.5) + std::log(2.25)).epsilon(1e-12));
    CHECK(glm_mmse(prior, wf.gram, noise) == doctest::Approx(2.0 / 2.25).epsilon(1e-12));

    // The explicit factor reproduces the gram and respects the budget.
    CHECK((wf.factor.adjoint() * wf.factor - wf.gram.gram()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(wf.factor.squaredNorm() == doctest::Approx(3.0));

    // Per-mode distortion matches the closed form sigma^2/((snr*lam-1)^+ +1).
    const auto analysis = glm_ser(prior, wf.gram, noise);
    CHECK(analysis.per_mode_distortion(0) == doctest::Approx(2.0 / 4.5).epsilon(1e-9));
    CHECK(analysis.per_mode_distortion(1) == doctest::Approx(1.0 / 2.25).epsilon(1e-9));
}

TEST_CASE("optimal waveform edge cases") {
    const auto prior = diag_prior({2.0, 1.0});
    const NoiseModel noise(1.0);

    const auto zero = glm_optimal_waveform(prior, noise, 0.0, 2, 1);
    CHECK(zero.gram.gram().cwiseAbs().maxCoeff() == 0.0);

    const auto uniform = glm_optimal_waveform(diag_prior({1.5, 1.5, 1.5}), noise, 6.0, 3, 1);
    for (Index i = 0; i < 3; ++i) CHECK(uniform.alloc.levels(i) == doctest::Approx(2.0));

    CHECK_THROWS_AS(glm_optimal_waveform(prior, noise, 3.0, 1, 1), InsufficientRows);
    CHECK_THROWS_AS(glm_optimal_waveform(prior, noise, -1.0, 2, 1), NegativeBudget);
}

TEST_CASE("SER equals MI at the optimal waveform") {
    std::mt19937_64 rng(314);
    const int sizes[] = {2, 4, 8, 10};
    for (int rep = 0; rep < 100; ++rep) {
        const int m = sizes[rep % 4];
        const double budget = (rep % 3 == 0) ? 0.1 : (rep % 3 == 1) ? 1.0 : 10.0;
        const auto prior = GaussianPrior::from_covariance(random_covariance(m, rng()));
        const NoiseModel noise(1.0);
        const auto wf = glm_optimal_waveform(prior, noise, budget, 2 * m, rng());
        const auto analysis = glm_ser(prior, wf.gram, noise);
        CHECK(std::abs(analysis.ser_nats - analysis.mi_nats) <= 1e-8 * (1.0 + analysis.mi_nats));
    }
}

TEST_CASE("bound chain: arbitrary waveforms stay below the optimum") {
    std::mt19937_64 rng(99);
    const auto prior = GaussianPrior::from_covariance(random_covariance(6, 11));
    const NoiseModel noise(1.0);
    const double budget = 6.0;
    const auto opt = glm_ser(prior, glm_optimal_waveform(prior, noise, budget, 12, 1).gram, noise);
    int strict_gap = 0;
    for (int rep = 0; rep < 50; ++rep) {
        Matrix x = random_gaussian_matrix(12, 6, rng());
        x *= std::sqrt(budget) / x.norm();
        const auto at = glm_ser(prior, WaveformGram::from_factor(x, budget), noise);
        CHECK(at.ser_nats <= at.mi_nats + 1e-9 * (1.0 + at.mi_nats));
        CHECK(at.mi_nats <= opt.mi_nats + 1e-9 * (1.0 + opt.mi_nats));
        if (at.mi_nats - at.ser_nats > 1e-3) ++strict_gap;
    }
    CHECK(strict_gap >= 48);  // the gap is generic for random waveforms
}

TEST_CASE("rotation of the orthonormal factor leaves everything invariant") {
    const auto prior = GaussianPrior::from_covariance(random_covariance(4, 3));
    const NoiseModel noise(0.5);
    const auto wf1 = glm_optimal_waveform(prior, noise, 2.0, 8, 100);
    const auto wf2 = glm_optimal_waveform(prior, noise, 2.0, 8, 200);
    CHECK((wf1.factor - wf2.factor).cwiseAbs().maxCoeff() > 1e-6);  // different Phi
    CHECK((wf1.gram.gram() - wf2.gram.gram()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(glm_mi(prior, wf1.gram, noise) == doctest::Approx(glm_mi(prior, wf2.gram, noise)));
}

TEST_CASE("monotonicity in the budget") {
    const auto prior = GaussianPrior::from_covariance(random_covariance(5, 21));
    const NoiseModel noise(1.0);
    double prev_mi = -1.0, prev_mmse = prior.total_variance() + 1.0;
    for (int k = 0; k <= 20; ++k) {
        const double budget = 0.5 * k;
        const auto wf = glm_optimal_waveform(prior, noise, budget, 10, 5);
        const double mi = glm_mi(prior, wf.gram, noise);
        const double mmse = glm_mmse(prior, wf.gram, noise);
        CHECK(mi >= prev_mi - 1e-12);
        CHECK(mmse <= prev_mmse + 1e-12);
        prev_mi = mi;
        prev_mmse = mmse;
    }
}

TEST_CASE("degenerate eigenspaces: results depend only on the covariance") {
    // diag(2,1,1) has a two-dimensional eigenspace; the permutation basis
    // and whatever basis the dense eigensolver picks must give identical
    // downstream numbers.
    RealVector v(3);
    v << 2.0, 1.0, 1.0;
    const GaussianPrior via_diagonal(HermitianSpectrum::from_diagonal(v));
    Matrix dense = Matrix::Zero(3, 3);
    dense.diagonal() = v.cast<Complex>();
    const auto via_solver = GaussianPrior::from_covariance(dense);

    const NoiseModel noise(1.0);
    const auto wf1 = glm_optimal_waveform(via_diagonal, noise, 4.0, 6, 9);
    const auto wf2 = glm_optimal_waveform(via_solver, noise, 4.0, 6, 10);
    CHECK((wf1.gram.gram() - wf2.gram.gram()).cwiseAbs().maxCoeff() < 1e-10);

    const auto a1 = glm_ser(via_diagonal, wf1.gram, noise);
    const auto a2 = glm_ser(via_solver, wf2.gram, noise);
    CHECK(a1.mi_nats == doctest::Approx(a2.mi_nats).epsilon(1e-12));
    CHECK(a1.mmse == doctest::Approx(a2.mmse).epsilon(1e-12));
    CHECK(a1.ser_nats == doctest::Approx(a2.ser_nats).epsilon(1e-12));
}

TEST_CASE("dimension and rank guards") {
    const auto prior = diag_prior({1.0, 1.0});
    const NoiseModel noise(1.0);
    const auto wrong = WaveformGram::from_matrix(Matrix::Identity(3, 3), 3.0, 3);
    CHECK_THROWS_AS(glm_mi(prior, wrong, noise), DimensionMismatch);
    CHECK_THROWS_AS(glm_mmse(prior, wrong, noise), DimensionMismatch);

    RealVector degenerate(2);
    degenerate << 1.0, 0.0;
    const GaussianPrior singular(HermitianSpectrum::from_diagonal(degenerate), true);
    const auto gram = WaveformGram::from_matrix(Matrix::Identity(2, 2), 2.0, 2);
    CHECK_THROWS_AS(glm_mmse(singular, gram, noise), SingularPrior);
    CHECK(glm_mi(singular, gram, noise) > 0.0);  // MI is still defined
}
