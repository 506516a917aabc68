#include "mvarch/spectral.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mvarch/errors.hpp"

namespace mvarch {

namespace {

// V * diag(w) * V^T, symmetrized. All inverse-sqrt schemes funnel through this
// so that coinciding parameter choices produce bit-identical results.
Eigen::MatrixXd recompose(const SpectralDecomposition& dec, const Eigen::VectorXd& weights) {
    Eigen::MatrixXd m = dec.eigenvectors * weights.asDiagonal() * dec.eigenvectors.transpose();
    return ((m + m.transpose()) * 0.5).eval();
}

// Eigenvalues at rounding level of the top eigenvalue count as non-positive;
// inverting them would only amplify noise.
double positivity_floor(const SpectralDecomposition& dec) {
    return 1e-12 * std::max(dec.eigenvalues(0), 0.0);
}

}  // namespace

SpectralDecomposition eig_sym(const Eigen::MatrixXd& matrix) {
    if (matrix.rows() != matrix.cols())
        throw std::invalid_argument("eig_sym: matrix must be square");
    const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
    if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw std::invalid_argument("eig_sym: matrix is not symmetric");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix);
    if (solver.info() != Eigen::Success)
        throw NumericFailureError(30 * static_cast<int>(matrix.rows()));

    // Eigen returns ascending order; flip to descending and fix signs.
    const Eigen::Index n = matrix.rows();
    SpectralDecomposition dec;
    dec.eigenvalues = solver.eigenvalues().reverse();
    dec.eigenvectors = solver.eigenvectors().rowwise().reverse();
    for (Eigen::Index a = 0; a < n; ++a) {
        Eigen::Index imax = 0;
        dec.eigenvectors.col(a).cwiseAbs().maxCoeff(&imax);
        if (dec.eigenvectors(imax, a) < 0.0) dec.eigenvectors.col(a) = -dec.eigenvectors.col(a);
    }
    return dec;
}

Eigen::MatrixXd inverse_sqrt_full(const SpectralDecomposition& dec, double floor) {
    if (!(floor >= 0.0)) throw std::invalid_argument("inverse_sqrt_full: floor must be >= 0");
    const Eigen::Index n = dec.size();
    if (floor == 0.0) {
        const double tol = positivity_floor(dec);
        std::vector<int> bad;
        for (Eigen::Index a = 0; a < n; ++a)
            if (!(dec.eigenvalues(a) > tol)) bad.push_back(static_cast<int>(a) + 1);
        if (!bad.empty()) throw SingularMatrixError(std::move(bad));
    }
    Eigen::VectorXd w(n);
    for (Eigen::Index a = 0; a < n; ++a)
        w(a) = 1.0 / std::sqrt(std::max(dec.eigenvalues(a), floor));
    return recompose(dec, w);
}

Eigen::MatrixXd inverse_sqrt_projected(const SpectralDecomposition& dec, Eigen::Index k) {
    const Eigen::Index n = dec.size();
    if (k < 1 || k > n)
        throw std::invalid_argument("inverse_sqrt_projected: k must be in [1, N]");
    if (!(dec.eigenvalues(k - 1) > positivity_floor(dec)))
        throw InvalidRankError("inverse_sqrt_projected: e_k <= 0 at k = " + std::to_string(k));
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    for (Eigen::Index a = 0; a < k; ++a) w(a) = 1.0 / std::sqrt(dec.eigenvalues(a));
    return recompose(dec, w);
}

Eigen::MatrixXd inverse_sqrt_fullrank(const SpectralDecomposition& dec, Eigen::Index k) {
    const Eigen::Index n = dec.size();
    if (k < 1 || k >= n)
        throw std::invalid_argument("inverse_sqrt_fullrank: k must be in [1, N)");
    if (!(dec.eigenvalues(k) > positivity_floor(dec)))
        throw InvalidRankError("inverse_sqrt_fullrank: e_{k+1} <= 0 at k = " + std::to_string(k));
    Eigen::VectorXd w(n);
    for (Eigen::Index a = 0; a < k; ++a) w(a) = 1.0 / std::sqrt(dec.eigenvalues(a));
    const double tail = 1.0 / std::sqrt(dec.eigenvalues(k));
    for (Eigen::Index a = k; a < n; ++a) w(a) = tail;
    return recompose(dec, w);
}

Eigen::MatrixXd sqrt_psd(const SpectralDecomposition& dec) {
    const Eigen::Index n = dec.size();
    const double trace = dec.eigenvalues.sum();
    const double tol = 1e-10 * std::max(trace, 0.0) / static_cast<double>(n);
    Eigen::VectorXd w(n);
    for (Eigen::Index a = 0; a < n; ++a) {
        const double e = dec.eigenvalues(a);
        if (e < -tol)
            throw NotPsdError("sqrt_psd: eigenvalue " + std::to_string(e) +
                              " below -1e-10 * trace/N");
        w(a) = std::sqrt(std::max(e, 0.0));
    }
    return recompose(dec, w);
}

Eigen::MatrixXd trace_preserving_rescale(const Eigen::MatrixXd& inv_sqrt,
                                         const CovarianceEstimate& original) {
    const double max_entry = inv_sqrt.cwiseAbs().maxCoeff();
    if (max_entry == 0.0)
        throw std::invalid_argument("trace_preserving_rescale: zero matrix");

    // Implied covariance proxy: pseudo-inverse of inv_sqrt^2 on its span.
    SpectralDecomposition dec = eig_sym(inv_sqrt);
    const double tol = 1e-12 * dec.eigenvalues.cwiseAbs().maxCoeff();
    double proxy_trace = 0.0;
    for (Eigen::Index a = 0; a < dec.size(); ++a) {
        const double m = dec.eigenvalues(a);
        if (std::abs(m) > tol) proxy_trace += 1.0 / (m * m);
    }
    const double target = original.matrix.trace();
    if (!(target > 0.0))
        throw std::invalid_argument("trace_preserving_rescale: original trace must be > 0");
    return inv_sqrt * std::sqrt(proxy_trace / target);
}

}  // namespace mvarch
