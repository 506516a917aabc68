#include "mvarch/covariance.hpp"

#include <cmath>
#include <stdexcept>

#include "mvarch/errors.hpp"

namespace mvarch {

namespace {

void symmetrize(Eigen::MatrixXd& m) { m = ((m + m.transpose()) * 0.5).eval(); }

}  // namespace

CovarianceEstimate cross_product_covariance(const ReturnPanel& panel, Eigen::Index t,
                                            const WeightKernel& kernel) {
    const Eigen::Index i_max = kernel.i_max();
    if (t < 0 || t >= panel.n_obs())
        throw std::invalid_argument("cross_product_covariance: index out of range");
    if (t < i_max)
        throw WindowTooShortError(static_cast<std::size_t>(i_max) + 1,
                                  static_cast<std::size_t>(t) + 1);

    // Sigma = W^T diag(lambda) W with W the window rows; scaling the rows by
    // sqrt(lambda) and forming S^T S keeps the result PSD to rounding.
    Eigen::MatrixXd scaled(i_max + 1, panel.n_assets());
    for (Eigen::Index i = 0; i <= i_max; ++i)
        scaled.row(i) = panel.returns.row(t - i) * std::sqrt(kernel[static_cast<std::size_t>(i)]);

    CovarianceEstimate cov;
    cov.matrix = Eigen::MatrixXd::Zero(panel.n_assets(), panel.n_assets());
    cov.matrix.selfadjointView<Eigen::Lower>().rankUpdate(scaled.transpose());
    cov.matrix = cov.matrix.selfadjointView<Eigen::Lower>();
    symmetrize(cov.matrix);
    cov.kernel_id = kernel.id();
    cov.asof = t;
    return cov;
}

CovarianceEstimate shrink_correlation(const CovarianceEstimate& cov, double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw std::invalid_argument("shrink_correlation: gamma must be in [0,1]");
    if (cov.gamma != 0.0)
        throw std::invalid_argument("shrink_correlation: covariance already shrunk");

    CovarianceEstimate out = cov;
    const double keep = 1.0 - gamma;
    const Eigen::Index n = out.matrix.rows();
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i)
            if (i != j) out.matrix(i, j) *= keep;
    out.gamma = gamma;
    return out;
}

CovarianceEstimate regularize(const CovarianceEstimate& cov, double xi) {
    if (!(xi >= 0.0 && xi <= 1.0))
        throw std::invalid_argument("regularize: xi must be in [0,1]");

    CovarianceEstimate out = cov;
    if (xi != 0.0) {
        const double msq = mean_variance(cov);
        out.matrix *= (1.0 - xi);
        out.matrix.diagonal().array() += xi * msq;
    }
    out.xi = xi;
    return out;
}

double mean_variance(const CovarianceEstimate& cov) {
    return cov.matrix.trace() / static_cast<double>(cov.matrix.rows());
}

Eigen::MatrixXd correlation_from_covariance(const CovarianceEstimate& cov) {
    const Eigen::Index n = cov.matrix.rows();
    Eigen::VectorXd inv_vol(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double var = cov.matrix(i, i);
        if (!(var > 0.0)) throw DegenerateAssetError("asset " + std::to_string(i));
        inv_vol(i) = 1.0 / std::sqrt(var);
    }
    Eigen::MatrixXd rho = inv_vol.asDiagonal() * cov.matrix * inv_vol.asDiagonal();
    rho.diagonal().setOnes();
    return rho;
}

CovarianceEstimate effective_covariance(const ReturnPanel& panel, Eigen::Index t,
                                        const WeightKernel& kernel, double gamma,
                                        double xi) {
    return regularize(shrink_correlation(cross_product_covariance(panel, t, kernel), gamma),
                      xi);
}

}  // namespace mvarch
