#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mvarch/simulate.hpp"

namespace mvarch {

/// Pearson correlation between the columns of x and the columns of y, both
/// T x Nx / T x Ny with aligned rows. Column means are taken over the given
/// rows only. Throws DegenerateSeriesError (naming x_name/y_name and the
/// column) when a column has zero variance. When x and y are the same series
/// (same_series = true) the diagonal is exactly 1.
Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                   const std::string& x_name, const std::string& y_name,
                                   bool same_series = false);

/// rho(L[x], y): x lagged by one, aligned on the T-1 overlapping rows.
/// Equivalent to correlation_matrix(x without its last row, y without its first).
Eigen::MatrixXd lagged_correlation_matrix(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                          const std::string& x_name, const std::string& y_name);

/// The seven lag <= 1 correlation matrices of a panel y (returns or residuals):
/// rho(y,y), rho(y2,y2), rho(y,y2), rho(L[y],y), rho(L[y2],y2), rho(L[y],y2),
/// rho(L[y2],y).
struct CorrelationSet {
    Eigen::MatrixXd rr, r2r2, rr2, lr_r, lr2_r2, lr_r2, lr2_r;
};

CorrelationSet lagged_correlation_matrices(const Eigen::MatrixXd& panel);

/// 100 * sqrt( (1/(N(N-1))) sum_{a != b} rho_ab^2 ). Requires N >= 2.
double whitening_quality_offdiag(const Eigen::MatrixXd& rho);

/// 100 * sqrt( (1/N^2) sum_{a,b} rho_ab^2 ).
double whitening_quality_full(const Eigen::MatrixXd& rho);

/// sqrt( (1/N) sum_a (<eps_a^2> - 1)^2 ): departure of the sample second
/// moments from unit variance.
double unit_variance_quality(const Eigen::MatrixXd& residuals);

/// (1/N) sum_a <eps_a^2>.
double mean_residual_variance(const Eigen::MatrixXd& residuals);

/// The eight scalar whitening measures plus the mean residual variance.
/// q_rr / q_r2r2 need at least two assets and are absent for N = 1.
struct QualitySummary {
    std::optional<double> q_rr, q_r2r2;
    double q_rr2 = 0.0, q_lr_r = 0.0, q_lr2_r2 = 0.0, q_lr_r2 = 0.0, q_lr2_r = 0.0;
    double q_unit_variance = 0.0;
    double mean_residual_variance = 0.0;
};

/// Stable measure keys used in JSON/CSV outputs and MC bands, in Table order.
inline constexpr std::array<const char*, 9> kMeasureNames = {
    "q_rr",     "q_r2r2", "q_rr2",            "q_lr_r",
    "q_lr2_r",  "q_lr_r2", "q_lr2_r2",        "q_unit_variance",
    "mean_residual_variance"};

QualitySummary quality_summary(const CorrelationSet& corr, const Eigen::MatrixXd& panel);
QualitySummary quality_summary(const Eigen::MatrixXd& panel);

/// One measure's Monte Carlo summary: empirical quantiles and mean over reps.
struct Band {
    double low = 0.0;
    double high = 0.0;
    double mean = 0.0;
};

/// 5%/95% (or custom) quantile bands of the quality measures under the
/// white-noise hypothesis, estimated from n_rep iid panels.
struct McBand {
    std::map<std::string, Band> measures;
    int n_assets = 0;
    int n_obs = 0;
    int n_rep = 0;
    InnovationDist innovation;
    std::pair<double, double> quantiles{0.05, 0.95};
    std::uint64_t seed = 0;
};

/// Draws n_rep iid unit-variance panels (Student-t by default), computes every
/// quality measure per replication and returns per-measure quantile bands and
/// means. Replication r uses a seed derived from (seed, r), so the result is
/// independent of the thread count and reproducible.
McBand mc_confidence_band(int n_assets, int n_obs, int n_rep,
                          const InnovationDist& innovation = StudentInnovations{},
                          std::pair<double, double> quantiles = {0.05, 0.95},
                          std::uint64_t seed = 0, int n_threads = 0);

/// Full diagnostics bundle for one panel: the seven correlation matrices, the
/// quality summary and (optionally) the attached white-noise band.
struct WhiteningReport {
    CorrelationSet correlations;
    QualitySummary quality;
    std::optional<McBand> band;
    std::vector<std::string> labels;
    std::string config_id;
};

WhiteningReport whitening_report(const Eigen::MatrixXd& panel,
                                 std::vector<std::string> labels, std::string config_id);

}  // namespace mvarch
