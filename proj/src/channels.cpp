#include "ser/channels.hpp"

#include <cmath>
#include <numbers>
#include <set>

namespace ser {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void MimoRadarScene::validate() const {
    if (m_t < 1 || m_r < 1) throw DimensionMismatch("MimoRadarScene: need at least one antenna");
    if (alphas.size() != thetas.size())
        throw DimensionMismatch("MimoRadarScene: alphas/thetas length mismatch");
    if (!(element_spacing > 0))
        throw NonPositiveInput("MimoRadarScene: element spacing must be positive");
    for (Index i = 0; i < thetas.size(); ++i)
        if (!(thetas(i) > -std::numbers::pi / 2 && thetas(i) < std::numbers::pi / 2))
            throw std::invalid_argument("MimoRadarScene: angle outside (-pi/2, pi/2)");
}

Vector steering_vector(Index n, double spacing, double theta) {
    Vector a(n);
    const double phase_step = kTwoPi * spacing * std::sin(theta);
    for (Index k = 0; k < n; ++k) a(k) = std::polar(1.0, phase_step * static_cast<double>(k));
    return a;
}

namespace {

// d/dθ of the steering vector: entry k picks up j·2π·spacing·k·cosθ.
Vector steering_derivative(Index n, double spacing, double theta) {
    Vector a = steering_vector(n, spacing, theta);
    const double coeff = kTwoPi * spacing * std::cos(theta);
    for (Index k = 0; k < n; ++k) a(k) *= Complex(0.0, coeff * static_cast<double>(k));
    return a;
}

Matrix mimo_matrix(const MimoRadarScene& scene, const Vector& alphas, const RealVector& thetas) {
    Matrix h = Matrix::Zero(scene.m_r, scene.m_t);
    for (Index i = 0; i < alphas.size(); ++i) {
        const Vector a = steering_vector(scene.m_r, scene.element_spacing, thetas(i));
        const Vector b = steering_vector(scene.m_t, scene.element_spacing, thetas(i));
        h.noalias() += alphas(i) * a * b.adjoint();
    }
    return h;
}

Vector vec_of(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix mimo_jacobian(const MimoRadarScene& scene, const Vector& alphas, const RealVector& thetas) {
    const Index l = alphas.size();
    Matrix jac(scene.m_r * scene.m_t, 3 * l);
    for (Index i = 0; i < l; ++i) {
        const Vector a = steering_vector(scene.m_r, scene.element_spacing, thetas(i));
        const Vector b = steering_vector(scene.m_t, scene.element_spacing, thetas(i));
        const Vector da = steering_derivative(scene.m_r, scene.element_spacing, thetas(i));
        const Vector db = steering_derivative(scene.m_t, scene.element_spacing, thetas(i));
        // b enters conjugated, so d(b^H)/dθ = (db)^H flips the sign of j.
        const Matrix d_theta = alphas(i) * (da * b.adjoint() + a * db.adjoint());
        const Matrix outer = a * b.adjoint();
        jac.col(i) = vec_of(d_theta);
        jac.col(l + i) = vec_of(outer);                         // d/d Re α
        jac.col(2 * l + i) = vec_of((Complex(0, 1) * outer).eval());  // d/d Im α
    }
    return jac;
}

}  // namespace

MimoChannel mimo_channel(const MimoRadarScene& scene) {
    scene.validate();
    const Index l = scene.targets();
    RealVector eta(3 * l);
    for (Index i = 0; i < l; ++i) {
        eta(i) = scene.thetas(i);
        eta(l + i) = scene.alphas(i).real();
        eta(2 * l + i) = scene.alphas(i).imag();
    }
    return {mimo_matrix(scene, scene.alphas, scene.thetas),
            mimo_jacobian(scene, scene.alphas, scene.thetas), std::move(eta)};
}

NonlinearChannel mimo_nonlinear_channel(const MimoRadarScene& scene, GaussianPrior prior,
                                        const Tolerances& tol) {
    scene.validate();
    const Index l = scene.targets();
    if (prior.dim() != 3 * l)
        throw DimensionMismatch("mimo_nonlinear_channel: prior must cover [θ, Re α, Im α]");

    const auto unpack = [scene, l](const RealVector& eta) {
        Vector alphas(l);
        RealVector thetas(l);
        for (Index i = 0; i < l; ++i) {
            thetas(i) = eta(i);
            alphas(i) = Complex(eta(l + i), eta(2 * l + i));
        }
        return std::pair{std::move(alphas), std::move(thetas)};
    };

    NonlinearChannel channel{
        [scene, unpack](const RealVector& eta) {
            const auto [alphas, thetas] = unpack(eta);
            return vec_of(mimo_matrix(scene, alphas, thetas));
        },
        [scene, unpack](const RealVector& eta) {
            const auto [alphas, thetas] = unpack(eta);
            return mimo_jacobian(scene, alphas, thetas);
        },
        /*constant_jacobian=*/false,
        prior,
        prior_fim_gaussian(prior, tol),
        scene.m_r * scene.m_t};
    return channel;
}

void OfdmScene::validate() const {
    if (n < 1) throw DimensionMismatch("OfdmScene: need at least one subcarrier");
    const Index l = paths();
    if (static_cast<Index>(delays.size()) != l || dopplers.size() != l)
        throw DimensionMismatch("OfdmScene: per-path arrays must share one length");
    if (l > n) throw std::invalid_argument("OfdmScene: more paths than subcarriers");
    std::set<Index> seen;
    for (const Index tau : delays) {
        if (tau < 0 || tau >= n) throw DelayOutOfRange("OfdmScene: delay outside [0, N)");
        if (!seen.insert(tau).second) throw std::invalid_argument("OfdmScene: delays must be distinct");
    }
}

Matrix ofdm_cir(const OfdmScene& scene) {
    scene.validate();
    Matrix h = Matrix::Zero(scene.n, scene.n);
    for (Index i = 0; i < scene.paths(); ++i) {
        for (Index row = 0; row < scene.n; ++row) {
            const Index col = (row - scene.delays[static_cast<std::size_t>(i)] + scene.n) % scene.n;
            h(row, col) += scene.path_gains(i) *
                           std::polar(1.0, kTwoPi * scene.dopplers(i) * static_cast<double>(row));
        }
    }
    return h;
}

}  // namespace ser
