#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "ser/bcrb.hpp"
#include "ser/glm.hpp"
#include "ser/random.hpp"

using namespace ser;

namespace {

GaussianPrior real_prior(Index k, std::uint64_t seed) {
    const Matrix b = random_gaussian_matrix(k, 2 * k, seed);
    const RealMatrix real_part = (b * b.adjoint()).real() / static_cast<double>(2 * k);
    Matrix sigma = real_part.cast<Complex>();
    sigma *= static_cast<double>(k) / sigma.trace().real();
    return GaussianPrior::from_covariance(sigma);
}

// Channel with a constant (linear-map) Jacobian.
NonlinearChannel linear_channel(const Matrix& f, GaussianPrior prior) {
    NonlinearChannel channel{
        [f](const RealVector& eta) { return Vector(f * eta.cast<Complex>()); },
        [f](const RealVector&) { return f; },
        /*constant_jacobian=*/true,
        prior,
        prior_fim_gaussian(prior),
        f.rows()};
    return channel;
}

}  // namespace

TEST_CASE("prior Fisher information is the covariance inverse") {
    const auto scalar = GaussianPrior(HermitianSpectrum::from_diagonal(RealVector::Ones(1)));
    CHECK(prior_fim_gaussian(scalar)(0, 0).real() == doctest::Approx(1.0));

    RealVector d(2);
    d << 4.0, 1.0;
    const auto diag = GaussianPrior(HermitianSpectrum::from_diagonal(d));
    const Matrix jp = prior_fim_gaussian(diag);
    CHECK(jp(0, 0).real() == doctest::Approx(0.25));
    CHECK(jp(1, 1).real() == doctest::Approx(1.0));

    const auto prior = GaussianPrior::from_covariance(random_covariance(5, 3));
    const Matrix identity = prior_fim_gaussian(prior) * prior.covariance_matrix();
    CHECK((identity - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-9);

    RealVector degenerate(2);
    degenerate << 1.0, 0.0;
    const GaussianPrior singular(HermitianSpectrum::from_diagonal(degenerate), true);
    CHECK_THROWS_AS(prior_fim_gaussian(singular), SingularPrior);
}

TEST_CASE("choi reduction of a constant jacobian is exactly rank one") {
    const Matrix f = random_gaussian_matrix(3, 2, 15);
    const auto channel = linear_channel(f, real_prior(2, 16));
    const auto red = choi_reduce(channel, 1, 0);
    CHECK(red.rank1_residual == 0.0);
    CHECK(red.u.norm() == doctest::Approx(1.0));
    // G recovers F up to a unit phase.
    const Complex inner = red.g.conjugate().cwiseProduct(f).sum();
    const Complex phase = inner / std::abs(inner);
    CHECK((red.g * phase - f).cwiseAbs().maxCoeff() < 1e-12);

    // G^H R G == F^H R F for any Hermitian R (phase cancels).
    for (std::uint64_t seed = 77; seed < 82; ++seed) {
        const Matrix r = (random_gaussian_matrix(3, 3, seed) + Matrix::Identity(3, 3));
        const Matrix rh = r * r.adjoint();
        CHECK(((red.g.adjoint() * rh * red.g) - (f.adjoint() * rh * f)).cwiseAbs().maxCoeff() <
              1e-10);
    }
}

TEST_CASE("choi reduction flags an eta-dependent jacobian") {
    // h = [cos eta, sin eta]: the Jacobian direction rotates with eta.
    const auto prior = GaussianPrior(HermitianSpectrum::from_diagonal(RealVector::Ones(1)));
    NonlinearChannel channel{
        [](const RealVector& eta) {
            Vector h(2);
            h << Complex(std::cos(eta(0)), 0.0), Complex(std::sin(eta(0)), 0.0);
            return h;
        },
        {},
        false,
        prior,
        prior_fim_gaussian(prior),
        2};
    channel.jacobian = finite_difference_jacobian(channel.h_map, 2);

    const auto red = choi_reduce(channel, 10000, 42);
    CHECK(red.rank1_residual > 0.05);
    CHECK(red.rank1_residual <= 1.0);

    // The finite-difference Jacobian matches the analytic one.
    RealVector at(1);
    at << 0.3;
    const Matrix jac = channel.jacobian(at);
    CHECK(jac(0, 0).real() == doctest::Approx(-std::sin(0.3)).epsilon(1e-7));
    CHECK(jac(1, 0).real() == doctest::Approx(std::cos(0.3)).epsilon(1e-7));

    // Same seed, same reduction.
    const auto again = choi_reduce(channel, 10000, 42);
    CHECK(again.lambda_psi == red.lambda_psi);
}

TEST_CASE("unit-modulus delay channel keeps the reduction rank one") {
    // Sampled tone x(t) = e^{j2pi f t} delayed by eta: the Jacobian only
    // picks up a global phase as eta moves, so Psi stays rank one even
    // though the Jacobian is evaluated by Monte Carlo.
    const double freq = 0.3;
    const Index n = 6;
    const auto prior = GaussianPrior(HermitianSpectrum::from_diagonal(RealVector::Ones(1)));
    NonlinearChannel channel{
        [freq, n](const RealVector& eta) {
            Vector h(n);
            for (Index t = 0; t < n; ++t)
                h(t) = std::polar(1.0, 2.0 * std::numbers::pi * freq * (t - eta(0)));
            return h;
        },
        {},
        false,
        prior,
        prior_fim_gaussian(prior),
        n};
    channel.jacobian = finite_difference_jacobian(channel.h_map, n);
    const auto red = choi_reduce(channel, 2000, 5);
    CHECK(red.rank1_residual < 1e-8);
}

TEST_CASE("bcrb_min reduces to the GLM MMSE for G = I") {
    const Index m = 4;
    const auto prior = real_prior(m, 99);
    const auto channel = linear_channel(Matrix::Identity(m, m), prior);
    const auto red = choi_reduce(channel, 1, 0);
    const NoiseModel noise(1.0);
    const double budget = 5.0;

    const auto res = bcrb_min(channel, red, noise, budget);
    const auto wf = glm_optimal_waveform(prior, noise, budget, m, 3);
    CHECK(res.bcrb == doctest::Approx(glm_mmse(prior, wf.gram, noise)).epsilon(1e-10));
    CHECK(res.bound_value == doctest::Approx(res.bcrb).epsilon(1e-10));

    // Budget zero: only the prior informs the estimate.
    const auto idle = bcrb_min(channel, red, noise, 0.0);
    CHECK(idle.bcrb == doctest::Approx(prior.total_variance()).epsilon(1e-10));
}

TEST_CASE("scalar channel reproduces the delay closed forms") {
    // With unit gain and noise, a budget of 8 pi^2 B^2 snr makes the scalar
    // BFIM identical to the delay chain, so bcrb_min must land on the
    // closed-form BCRB and the rate bound must be tight.
    const double sigma_eta_sq = 1.7, b2 = 0.4, snr = 2.3;
    RealVector var(1);
    var << sigma_eta_sq;
    const GaussianPrior prior(HermitianSpectrum::from_diagonal(var));
    const auto channel = linear_channel(Matrix::Identity(1, 1), prior);
    const auto red = choi_reduce(channel, 1, 0);
    const double budget = 8.0 * std::numbers::pi * std::numbers::pi * b2 * snr;

    const auto res = bcrb_min(channel, red, NoiseModel(1.0), budget);
    CHECK(res.bcrb == doctest::Approx(delay_bcrb(sigma_eta_sq, b2, snr)).epsilon(1e-12));

    const auto bound = ser_upper_bound(channel, red, NoiseModel(1.0), budget);
    CHECK(bound.rate_nats == doctest::Approx(delay_ser(sigma_eta_sq, b2, snr)).epsilon(1e-12));
    CHECK(bound.bound_nats == doctest::Approx(bound.rate_nats).epsilon(1e-12));
}

TEST_CASE("ser upper bound: equality for the GLM reduction, inequality in general") {
    const Index m = 3;
    const auto prior = real_prior(m, 7);
    const NoiseModel noise(1.0);

    const auto glm_like = linear_channel(Matrix::Identity(m, m), prior);
    const auto red = choi_reduce(glm_like, 1, 0);
    const auto res = ser_upper_bound(glm_like, red, noise, 4.0);
    CHECK(res.rate_nats == doctest::Approx(res.bound_nats).epsilon(1e-9));

    // Misaligned right singular space: the bound is strictly loose.
    std::mt19937_64 rng(12);
    bool strict_seen = false;
    for (int rep = 0; rep < 10; ++rep) {
        const Matrix f = random_gaussian_matrix(m + 1, m, rng());
        const auto channel = linear_channel(f, prior);
        const auto r = choi_reduce(channel, 1, 0);
        const auto s = ser_upper_bound(channel, r, noise, 4.0);
        CHECK(s.rate_nats <= s.bound_nats + 1e-9 * (1.0 + s.bound_nats));
        if (s.bound_nats - s.rate_nats > 1e-3) strict_seen = true;
    }
    CHECK(strict_seen);
}

TEST_CASE("scalar delay model matches the closed-form chain") {
    // sigma_crb = 1 at B^2 = 1/(8 pi^2), snr = 1.
    const double b2 = 1.0 / (8.0 * std::numbers::pi * std::numbers::pi);
    CHECK(delay_crb(b2, 1.0) == doctest::Approx(1.0));
    CHECK(delay_ser(1.0, b2, 1.0) == doctest::Approx(std::log(2.0)));
    CHECK(delay_ser(1.0, b2, 2.0) == doctest::Approx(std::log(3.0)));
    CHECK(delay_bcrb(1.0, b2, 1.0) == doctest::Approx(0.5));

    // Equal-variance point and the no-information limit.
    CHECK(delay_ser(1.0, 1.0, 1.0 / (8.0 * std::numbers::pi * std::numbers::pi)) ==
          doctest::Approx(std::log(2.0)));
    CHECK(delay_ser(1.0, 1.0, 1e-15) < 1e-10);

    CHECK_THROWS_AS(delay_ser(0.0, 1.0, 1.0), NonPositiveInput);
    CHECK_THROWS_AS(delay_ser(1.0, -1.0, 1.0), NonPositiveInput);
    CHECK_THROWS_AS(delay_ser(1.0, 1.0, 0.0), NonPositiveInput);
}

TEST_CASE("delay identity holds across a log SNR grid and is monotone") {
    double prev = -1.0;
    for (int k = 0; k < 50; ++k) {
        const double snr = std::pow(10.0, -3.0 + 6.0 * k / 49.0);
        const double rate = delay_ser(2.0, 0.7, snr);
        const double via_bcrb = std::log(2.0 / delay_bcrb(2.0, 0.7, snr));
        CHECK(std::abs(rate - via_bcrb) <= 1e-12 * (1.0 + rate));
        CHECK(rate > prev);
        prev = rate;
    }
    // Also strictly increasing in the bandwidth.
    CHECK(delay_ser(1.0, 2.0, 1.0) > delay_ser(1.0, 1.0, 1.0));
}

TEST_CASE("effective bandwidth: flat, spikes, convergence") {
    const double band = 2.0;
    auto flat_case = [&](Index n) {
        RealVector f(n), s(n);
        for (Index i = 0; i < n; ++i) {
            f(i) = -band / 2 + band * static_cast<double>(i) / static_cast<double>(n - 1);
            s(i) = 1.0;
        }
        return effective_bandwidth(f, s);
    };
    const double exact = band * band / 12.0;
    CHECK(std::abs(flat_case(4096) - exact) < 1e-3 * exact);

    // Grid refinement changes the value by well under 0.1%.
    const double coarse = flat_case(2048);
    const double fine = flat_case(4096);
    CHECK(std::abs(fine - coarse) < 1e-3 * fine);

    // Two equal spikes at +-f0.
    RealVector f(5), s(5);
    f << -2.0, -1.0, 0.0, 1.0, 2.0;
    s << 0.0, 1.0, 0.0, 1.0, 0.0;
    CHECK(effective_bandwidth(f, s) == doctest::Approx(1.0));

    CHECK_THROWS_AS(effective_bandwidth(f, RealVector::Zero(5)), ZeroEnergy);
    CHECK_THROWS_AS(effective_bandwidth(RealVector::Zero(1), RealVector::Zero(1)),
                    std::invalid_argument);
}

TEST_CASE("jacobian failures surface as errors") {
    const auto prior = GaussianPrior(HermitianSpectrum::from_diagonal(RealVector::Ones(1)));
    NonlinearChannel channel{
        [](const RealVector& eta) {
            Vector h(1);
            h << Complex(eta(0), 0.0);
            return h;
        },
        [](const RealVector&) {
            Matrix j(1, 1);
            j(0, 0) = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
            return j;
        },
        true,
        prior,
        prior_fim_gaussian(prior),
        1};
    CHECK_THROWS_AS(choi_reduce(channel, 1, 0), JacobianFailure);
}
