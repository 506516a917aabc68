#pragma once

#include <Eigen/Dense>
#include <string>

#include "mvarch/kernels.hpp"
#include "mvarch/panel.hpp"

namespace mvarch {

/// An N x N symmetric covariance estimate (units: squared daily return)
/// together with the shrinkage/regularization parameters already applied
/// and the kernel it was built from.
struct CovarianceEstimate {
    Eigen::MatrixXd matrix;
    double gamma = 0.0;
    double xi = 0.0;
    std::string kernel_id;
    Eigen::Index asof = -1;  // row index of the panel the window ends at
};

/// Weighted cross product of past return vectors:
///   Sigma(t) = sum_i lambda(i) r(t-i) r(t-i)^T,  i = 0..i_max.
/// Requires t >= i_max; throws WindowTooShortError otherwise. The result is
/// exactly symmetric and positive semi-definite with rank <= min(N, i_max+1).
CovarianceEstimate cross_product_covariance(const ReturnPanel& panel, Eigen::Index t,
                                            const WeightKernel& kernel);

/// Shrinks the correlation toward the identity: every off-diagonal entry is
/// multiplied by (1-gamma), the diagonal is untouched. Requires cov.gamma == 0.
CovarianceEstimate shrink_correlation(const CovarianceEstimate& cov, double gamma);

/// Shrinks the spectrum toward a multiple of the identity:
///   Sigma(xi) = (1-xi) Sigma + xi <sigma^2> I,   <sigma^2> = trace/N.
/// Preserves the trace; each eigenvalue maps to (1-xi) e + xi <sigma^2>.
CovarianceEstimate regularize(const CovarianceEstimate& cov, double xi);

/// Mean variance across assets, trace/N.
double mean_variance(const CovarianceEstimate& cov);

/// Correlation matrix rho_ab = Sigma_ab / sqrt(Sigma_aa Sigma_bb).
/// Throws DegenerateAssetError when a diagonal entry is not positive.
Eigen::MatrixXd correlation_from_covariance(const CovarianceEstimate& cov);

/// cross_product_covariance followed by shrink_correlation and regularize,
/// the composition order used everywhere in the pipeline.
CovarianceEstimate effective_covariance(const ReturnPanel& panel, Eigen::Index t,
                                        const WeightKernel& kernel, double gamma,
                                        double xi);

}  // namespace mvarch
