#pragma once

#include <Eigen/Dense>

#include "mvarch/covariance.hpp"

namespace mvarch {

/// Eigendecomposition of a symmetric matrix. Eigenvalues are sorted in
/// descending order; eigenvector column alpha pairs with eigenvalues[alpha].
/// Sign convention: the largest-magnitude component of each eigenvector is
/// positive, so the output is reproducible across runs.
struct SpectralDecomposition {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;

    Eigen::Index size() const { return eigenvalues.size(); }
};

/// Decomposes a symmetric matrix. Throws std::invalid_argument for visibly
/// non-symmetric input and NumericFailureError if the solver does not converge.
SpectralDecomposition eig_sym(const Eigen::MatrixXd& matrix);

/// Inverse square root with a spectrum floor:
///   sum_a max(e_a, floor)^(-1/2) v_a v_a^T.
/// With floor == 0 all eigenvalues must be strictly positive; otherwise throws
/// SingularMatrixError listing the offending ranks.
Eigen::MatrixXd inverse_sqrt_full(const SpectralDecomposition& dec, double floor);

/// Inverse square root restricted to the leading k eigendirections (rank-k
/// result). Requires 1 <= k <= N and e_k > 0 (1-based rank).
Eigen::MatrixXd inverse_sqrt_projected(const SpectralDecomposition& dec, Eigen::Index k);

/// Leading-k inverse square root with the remaining N-k directions all
/// weighted e_{k+1}^(-1/2), so the result has full rank.
/// Requires 1 <= k < N and e_{k+1} > 0.
Eigen::MatrixXd inverse_sqrt_fullrank(const SpectralDecomposition& dec, Eigen::Index k);

/// Symmetric PSD square root. Eigenvalues within -1e-10 * (trace/N) of zero are
/// clamped to zero; genuinely negative ones raise NotPsdError.
Eigen::MatrixXd sqrt_psd(const SpectralDecomposition& dec);

/// Rescales an inverse-volatility matrix by the scalar that makes the trace of
/// its implied covariance proxy (the pseudo-inverse of inv_sqrt^2 on the
/// retained subspace) match the trace of the original covariance. Off by
/// default in the pipeline; the effect is a global scale only.
Eigen::MatrixXd trace_preserving_rescale(const Eigen::MatrixXd& inv_sqrt,
                                         const CovarianceEstimate& original);

}  // namespace mvarch
