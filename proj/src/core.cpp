#include "ser/core.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace ser {

void Tolerances::validate() const {
    if (!(psd > 0 && unitary > 0 && herm > 0 && rel > 0 && bisect > 0))
        throw NonPositiveInput("all tolerances must be strictly positive");
}

namespace {

double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

void check_square(const Matrix& a, const char* what) {
    if (a.rows() != a.cols())
        throw DimensionMismatch(std::string(what) + ": matrix must be square");
}

// Asymmetry relative to the matrix scale; absolute for O(1) inputs.
void check_hermitian(const Matrix& a, double tol_herm, const char* what) {
    const double scale = std::max(1.0, max_abs(a));
    const double asym = max_abs(a - a.adjoint());
    if (asym > tol_herm * scale)
        throw NotHermitian(std::string(what) + ": asymmetry " + std::to_string(asym) +
                           " exceeds tolerance");
}

}  // namespace

HermitianSpectrum::HermitianSpectrum(RealVector values, Matrix vectors)
    : eigenvalues_(std::move(values)), eigenvectors_(std::move(vectors)) {}

HermitianSpectrum HermitianSpectrum::from_matrix(const Matrix& a, const Tolerances& tol,
                                                 bool require_psd) {
    tol.validate();
    check_square(a, "HermitianSpectrum");
    if (a.rows() == 0) throw DimensionMismatch("HermitianSpectrum: empty matrix");
    check_hermitian(a, tol.herm, "HermitianSpectrum");

    const Matrix sym = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    if (solver.info() != Eigen::Success)
        throw NumericalFailure("HermitianSpectrum: eigensolver did not converge");

    const Index n = a.rows();
    RealVector values(n);
    Matrix vectors(n, n);
    for (Index i = 0; i < n; ++i) {  // ascending -> descending
        values(i) = solver.eigenvalues()(n - 1 - i);
        vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
    }

    const double scale = std::max(1.0, std::abs(values(0)));
    const double clip = tol.psd * scale;
    for (Index i = 0; i < n; ++i) {
        if (values(i) < -clip) {
            if (require_psd)
                throw IndefiniteInput("HermitianSpectrum: eigenvalue " +
                                      std::to_string(values(i)) + " below -tol");
            values(i) = 0.0;
        } else if (values(i) < clip) {
            values(i) = 0.0;
        }
    }

    const double unitary_err = max_abs(vectors.adjoint() * vectors - Matrix::Identity(n, n));
    if (unitary_err > tol.unitary * std::max(1.0, static_cast<double>(n)))
        throw NumericalFailure("HermitianSpectrum: eigenbasis not unitary");

    return HermitianSpectrum(std::move(values), std::move(vectors));
}

HermitianSpectrum HermitianSpectrum::from_diagonal(const RealVector& values) {
    const Index n = values.size();
    if (n == 0) throw DimensionMismatch("HermitianSpectrum: empty diagonal");
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index i, Index j) { return values(i) > values(j); });
    RealVector sorted(n);
    Matrix vectors = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        const double v = values(order[static_cast<std::size_t>(i)]);
        if (v < 0) throw IndefiniteInput("HermitianSpectrum: negative diagonal entry");
        sorted(i) = v;
        vectors(order[static_cast<std::size_t>(i)], i) = Complex(1.0, 0.0);
    }
    return HermitianSpectrum(std::move(sorted), std::move(vectors));
}

Matrix HermitianSpectrum::reconstruct() const {
    return eigenvectors_ * eigenvalues_.asDiagonal() * eigenvectors_.adjoint();
}

Matrix HermitianSpectrum::sqrt_factor() const {
    return eigenvectors_ * eigenvalues_.cwiseSqrt().asDiagonal();
}

GaussianPrior::GaussianPrior(HermitianSpectrum covariance, bool allow_degenerate)
    : covariance_(std::move(covariance)) {
    if (!allow_degenerate && !covariance_.full_rank())
        throw SingularPrior("GaussianPrior: rank-deficient covariance (pass allow_degenerate)");
}

GaussianPrior GaussianPrior::from_covariance(const Matrix& sigma, const Tolerances& tol,
                                             bool allow_degenerate) {
    return GaussianPrior(HermitianSpectrum::from_matrix(sigma, tol), allow_degenerate);
}

WaveformGram WaveformGram::from_matrix(Matrix gram, double budget, Index factor_rows,
                                       const Tolerances& tol) {
    tol.validate();
    check_square(gram, "WaveformGram");
    if (budget < 0) throw NegativeBudget("WaveformGram: negative power budget");
    if (factor_rows < 1) throw DimensionMismatch("WaveformGram: factor_rows must be >= 1");
    check_hermitian(gram, tol.herm, "WaveformGram");
    gram = 0.5 * (gram + gram.adjoint().eval());

    const auto spectrum = HermitianSpectrum::from_matrix(gram, tol, /*require_psd=*/true);
    const double trace = spectrum.trace();
    if (trace > budget * (1.0 + tol.rel) + tol.rel)
        throw InvariantViolation("WaveformGram: trace " + std::to_string(trace) +
                                 " exceeds budget " + std::to_string(budget));

    const double rank_clip = tol.psd * std::max(1.0, spectrum.max_eigenvalue());
    Index rank = 0;
    for (Index i = 0; i < spectrum.dim(); ++i)
        if (spectrum.eigenvalues()(i) > rank_clip) ++rank;
    if (rank > std::min(gram.rows(), factor_rows))
        throw InvariantViolation("WaveformGram: rank exceeds min(dim, factor_rows)");

    return WaveformGram(std::move(gram), budget, factor_rows);
}

WaveformGram WaveformGram::from_factor(const Matrix& x, double budget, const Tolerances& tol) {
    if (x.rows() < 1 || x.cols() < 1)
        throw DimensionMismatch("WaveformGram: empty waveform factor");
    return from_matrix(x.adjoint() * x, budget, x.rows(), tol);
}

WaveformGram WaveformGram::zero(Index dim, double budget, Index factor_rows) {
    if (dim < 1 || factor_rows < 1) throw DimensionMismatch("WaveformGram: bad dimensions");
    if (budget < 0) throw NegativeBudget("WaveformGram: negative power budget");
    return WaveformGram(Matrix::Zero(dim, dim), budget, factor_rows);
}

}  // namespace ser
