#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mvarch/covariance.hpp"
#include "mvarch/kernels.hpp"
#include "mvarch/panel.hpp"

namespace mvarch {

/// Full inverse square root with a spectrum floor. The floor defaults to
/// relative_floor * <sigma^2> of each date's covariance so the behavior is
/// scale-free; absolute_floor overrides it with a fixed value.
struct FullInverse {
    double relative_floor = 1e-12;
    std::optional<double> absolute_floor;
};

/// Inverse restricted to the leading k eigendirections.
struct ProjectedInverse {
    Eigen::Index rank = 1;
};

/// Leading-k inverse with the spectrum tail flattened at e_{k+1}.
struct FullRankInverse {
    Eigen::Index rank = 1;
};

using InverseScheme = std::variant<FullInverse, ProjectedInverse, FullRankInverse>;

/// Short identifier such as "full(floor_rel=1e-12)" or "projected(k=10)".
std::string scheme_id(const InverseScheme& scheme);

/// Everything that determines a residual run besides the input panel.
struct ResidualConfig {
    WeightKernel kernel;
    double gamma = 0.0;
    double xi = 0.0;
    InverseScheme scheme = FullInverse{};
    bool trace_rescale = false;
};

/// Inferred innovations eps(t+1) = Sigma_eff(t)^(-1/2) r(t+1). The first
/// residual is at panel row i_max + 1, so there are T - i_max - 1 rows.
struct ResidualPanel {
    Eigen::MatrixXd residuals;
    std::vector<std::string> dates;
    std::vector<std::string> labels;
    ResidualConfig config;

    Eigen::Index n_obs() const { return residuals.rows(); }
    Eigen::Index n_assets() const { return residuals.cols(); }
};

/// Residual run plus the spectrum of Sigma_eff averaged over the analysis
/// window (descending rank order), used for spectrum exports and for mapping
/// a regularization xi to an equivalent cut-off rank.
struct ResidualRun {
    ResidualPanel panel;
    Eigen::VectorXd mean_spectrum;
};

/// Applies the chosen inverse-square-root scheme to one covariance estimate.
Eigen::MatrixXd inverse_volatility(const CovarianceEstimate& cov, const InverseScheme& scheme,
                                   bool trace_rescale = false);

/// Rolls over the panel: for each t from i_max to T-2 builds
/// Sigma_eff(t) = regularize(shrink(cross_product(t)), ...), decomposes it and
/// maps r(t+1) to a residual. Strictly out of sample: the covariance at t never
/// sees r(t+1). Time steps run in parallel; failures carry the offending date.
ResidualRun compute_residuals_run(const ReturnPanel& panel, const ResidualConfig& config,
                                  int n_threads = 0);

/// compute_residuals_run without the spectrum bookkeeping in the result.
ResidualPanel compute_residuals(const ReturnPanel& panel, const WeightKernel& kernel,
                                double gamma, double xi,
                                const InverseScheme& scheme = FullInverse{},
                                bool trace_rescale = false, int n_threads = 0);

}  // namespace mvarch
