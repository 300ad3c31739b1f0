#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "ser/channels.hpp"
#include "ser/random.hpp"
#include "ser/semiglm.hpp"

using namespace ser;

namespace {

MimoRadarScene one_target(Index m_t, Index m_r, Complex alpha, double theta) {
    MimoRadarScene scene;
    scene.m_t = m_t;
    scene.m_r = m_r;
    scene.alphas = Vector::Constant(1, alpha);
    scene.thetas = RealVector::Constant(1, theta);
    return scene;
}

}  // namespace

TEST_CASE("broadside target gives the all-ones channel") {
    const auto ch = mimo_channel(one_target(3, 4, Complex(1, 0), 0.0));
    CHECK(ch.h.rows() == 4);
    CHECK(ch.h.cols() == 3);
    CHECK((ch.h - Matrix::Ones(4, 3)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("zero reflection coefficient gives the zero channel") {
    const auto ch = mimo_channel(one_target(2, 2, Complex(0, 0), 0.4));
    CHECK(ch.h.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("channel is linear in the reflection coefficients") {
    MimoRadarScene two;
    two.m_t = 3;
    two.m_r = 2;
    two.alphas = Vector(2);
    two.alphas << Complex(1.0, 0.5), Complex(-0.3, 0.8);
    two.thetas = RealVector(2);
    two.thetas << 0.2, -0.7;

    const Matrix sum = mimo_channel(two).h;
    Matrix parts = Matrix::Zero(2, 3);
    for (Index i = 0; i < 2; ++i)
        parts += mimo_channel(one_target(3, 2, two.alphas(i), two.thetas(i))).h;
    CHECK((sum - parts).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("analytic jacobian matches central finite differences") {
    MimoRadarScene scene;
    scene.m_t = 3;
    scene.m_r = 2;
    scene.alphas = Vector(2);
    scene.alphas << Complex(0.8, -0.2), Complex(0.1, 1.1);
    scene.thetas = RealVector(2);
    scene.thetas << 0.35, -0.5;

    const auto prior =
        GaussianPrior(HermitianSpectrum::from_diagonal(RealVector::Ones(6)));
    const auto channel = mimo_nonlinear_channel(scene, prior);
    const auto analytic = channel.jacobian(mimo_channel(scene).eta);
    const auto numeric = finite_difference_jacobian(channel.h_map, 6)(mimo_channel(scene).eta);
    const double scale = analytic.cwiseAbs().maxCoeff();
    CHECK((analytic - numeric).cwiseAbs().maxCoeff() < 1e-6 * scale);
}

TEST_CASE("scene validation") {
    auto scene = one_target(2, 2, Complex(1, 0), 2.0);  // angle out of range
    CHECK_THROWS_AS(mimo_channel(scene), std::invalid_argument);
    scene.thetas(0) = 0.1;
    scene.alphas = Vector::Ones(2);  // length mismatch
    CHECK_THROWS_AS(mimo_channel(scene), DimensionMismatch);
}

TEST_CASE("ofdm: direct path is the identity") {
    OfdmScene scene;
    scene.n = 4;
    scene.path_gains = Vector::Constant(1, Complex(1, 0));
    scene.delays = {0};
    scene.dopplers = RealVector::Zero(1);
    CHECK((ofdm_cir(scene) - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ofdm: unit delay is the scaled cyclic shift") {
    OfdmScene scene;
    scene.n = 4;
    scene.path_gains = Vector::Constant(1, Complex(0.5, 0.25));
    scene.delays = {1};
    scene.dopplers = RealVector::Zero(1);
    const Matrix h = ofdm_cir(scene);
    for (Index row = 0; row < 4; ++row)
        for (Index col = 0; col < 4; ++col) {
            const bool hit = col == (row + 3) % 4;
            CHECK(std::abs(h(row, col) - (hit ? scene.path_gains(0) : Complex(0, 0))) < 1e-15);
        }
}

TEST_CASE("ofdm: doppler matches the per-entry rule") {
    OfdmScene scene;
    scene.n = 8;
    scene.path_gains = Vector(2);
    scene.path_gains << Complex(1.0, 0.0), Complex(0.3, -0.4);
    scene.delays = {0, 3};
    scene.dopplers = RealVector(2);
    scene.dopplers << 0.11, -0.05;

    const Matrix h = ofdm_cir(scene);
    // Entry-wise oracle straight from h(n, m) = sum_i a_i delta(m - tau_i) e^{j2pi f n}.
    for (Index row = 0; row < 8; ++row) {
        for (Index i = 0; i < 2; ++i) {
            const Index col = (row - scene.delays[static_cast<std::size_t>(i)] + 8) % 8;
            const Complex expected =
                scene.path_gains(i) *
                std::polar(1.0, 2.0 * std::numbers::pi * scene.dopplers(i) * row);
            // Delays are distinct so no accumulation at this entry.
            CHECK(std::abs(h(row, col) - expected) < 1e-13);
        }
    }
}

TEST_CASE("ofdm: zero doppler gives a circulant diagonalized by the DFT") {
    OfdmScene scene;
    scene.n = 8;
    scene.path_gains = Vector(3);
    scene.path_gains << Complex(1.0, 0.0), Complex(0.5, 0.2), Complex(-0.1, 0.3);
    scene.delays = {0, 2, 5};
    scene.dopplers = RealVector::Zero(3);

    const Matrix h = ofdm_cir(scene);
    const Matrix w = oracles::dft_matrix(8);
    const Matrix d = w * h * w.adjoint();
    double offdiag = 0.0;
    for (Index r = 0; r < 8; ++r)
        for (Index c = 0; c < 8; ++c)
            if (r != c) offdiag = std::max(offdiag, std::abs(d(r, c)));
    CHECK(offdiag < 1e-12);
}

TEST_CASE("integration: radar scene drives the full BCRB pipeline") {
    MimoRadarScene scene;
    scene.m_t = 3;
    scene.m_r = 3;
    scene.alphas = Vector(1);
    scene.alphas << Complex(0.9, 0.3);
    scene.thetas = RealVector::Constant(1, 0.4);

    // Prior over [theta, Re a, Im a]: tight on the angle, loose on the gain.
    RealVector var(3);
    var << 0.02, 0.5, 0.5;
    const GaussianPrior prior(HermitianSpectrum::from_diagonal(var));
    const auto channel = mimo_nonlinear_channel(scene, prior);

    const auto red = choi_reduce(channel, 3000, 21);
    CHECK(red.rank1_residual > 0.0);  // the angle Jacobian rotates with eta
    CHECK(red.rank1_residual < 0.9);

    const NoiseModel noise(1.0);
    const auto res = bcrb_min(channel, red, noise, 6.0);
    CHECK(res.bcrb > 0.0);
    CHECK(res.bcrb <= prior.total_variance() + 1e-9);

    const auto bound = ser_upper_bound(channel, red, noise, 6.0);
    CHECK(bound.rate_nats <= bound.bound_nats + 1e-9 * (1.0 + bound.bound_nats));
    CHECK(bound.rate_nats > 0.0);
}

TEST_CASE("integration: OFDM paths as a semi-controllable channel map") {
    // vec(H) is linear in the path gains, so the CIR defines F with
    // eta = alpha. Columns come from unit-gain single-path scenes.
    OfdmScene scene;
    scene.n = 6;
    scene.path_gains = Vector::Ones(3);
    scene.delays = {0, 2, 5};
    scene.dopplers = RealVector(3);
    scene.dopplers << 0.0, 0.07, -0.12;

    Matrix f(scene.n * scene.n, 3);
    for (Index p = 0; p < 3; ++p) {
        OfdmScene single = scene;
        single.path_gains = Vector::Zero(3);
        single.path_gains(p) = Complex(1.0, 0.0);
        const Matrix h = ofdm_cir(single);
        f.col(p) = Eigen::Map<const Vector>(h.data(), h.size());
    }
    // Superposition: the stacked columns reproduce the multi-path CIR.
    const Matrix full = ofdm_cir(scene);
    const Vector recombined = f * scene.path_gains;
    CHECK((recombined - Eigen::Map<const Vector>(full.data(), full.size())).cwiseAbs().maxCoeff()
          < 1e-13);

    RealVector gain_var(3);
    gain_var << 1.0, 0.6, 0.3;
    const GaussianPrior prior(HermitianSpectrum::from_diagonal(gain_var));
    const auto analysis = semiglm_analyze({f, prior, NoiseModel(1.0), 4.0});
    CHECK(analysis.ser_mi <= analysis.ser_mmse + 1e-9);
    CHECK(analysis.ser_mmse <= analysis.mi_opt + 1e-9);
    CHECK(analysis.mi_opt > 0.0);
}

TEST_CASE("ofdm scene validation") {
    OfdmScene scene;
    scene.n = 4;
    scene.path_gains = Vector::Ones(2);
    scene.delays = {1, 4};  // out of range
    scene.dopplers = RealVector::Zero(2);
    CHECK_THROWS_AS(ofdm_cir(scene), DelayOutOfRange);
    scene.delays = {1, 1};  // duplicate
    CHECK_THROWS_AS(ofdm_cir(scene), std::invalid_argument);
}
