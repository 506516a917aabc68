#include "mvarch/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mvarch/errors.hpp"
#include "mvarch/parallel.hpp"

namespace mvarch {

namespace {

// Compensated (Kahan) sum.
class KahanSum {
public:
    void add(double x) {
        double y = x - comp_;
        double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Sum that only depends on the multiset of addends: sort, then compensate.
// Keeps every q scalar exactly invariant under asset relabeling.
double stable_sum(std::vector<double>& values) {
    std::sort(values.begin(), values.end());
    KahanSum sum;
    for (double v : values) sum.add(v);
    return sum.value();
}

Eigen::VectorXd centered_sumsq(const Eigen::MatrixXd& centered) {
    return centered.array().square().colwise().sum();
}

}  // namespace

Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                   const std::string& x_name, const std::string& y_name,
                                   bool same_series) {
    if (x.rows() != y.rows())
        throw std::invalid_argument("correlation_matrix: row count mismatch");
    if (x.rows() < 2)
        throw std::invalid_argument("correlation_matrix: need at least 2 observations");

    const Eigen::MatrixXd xc = x.rowwise() - x.colwise().mean();
    const Eigen::MatrixXd yc = y.rowwise() - y.colwise().mean();
    const Eigen::VectorXd sx = centered_sumsq(xc);
    const Eigen::VectorXd sy = centered_sumsq(yc);
    for (Eigen::Index i = 0; i < sx.size(); ++i)
        if (!(sx(i) > 0.0)) throw DegenerateSeriesError(static_cast<std::size_t>(i), x_name);
    for (Eigen::Index j = 0; j < sy.size(); ++j)
        if (!(sy(j) > 0.0)) throw DegenerateSeriesError(static_cast<std::size_t>(j), y_name);

    Eigen::MatrixXd rho = xc.transpose() * yc;
    rho.array() /= (sx.cwiseSqrt() * sy.cwiseSqrt().transpose()).array();
    if (same_series) rho.diagonal().setOnes();
    return rho;
}

Eigen::MatrixXd lagged_correlation_matrix(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                          const std::string& x_name,
                                          const std::string& y_name) {
    if (x.rows() != y.rows())
        throw std::invalid_argument("lagged_correlation_matrix: row count mismatch");
    if (x.rows() < 3)
        throw std::invalid_argument("lagged_correlation_matrix: need at least 3 observations");
    const Eigen::Index T = x.rows();
    return correlation_matrix(x.topRows(T - 1), y.bottomRows(T - 1), "L[" + x_name + "]",
                              y_name);
}

CorrelationSet lagged_correlation_matrices(const Eigen::MatrixXd& panel) {
    if (panel.rows() < 3)
        throw std::invalid_argument("lagged_correlation_matrices: need at least 3 observations");
    const Eigen::MatrixXd sq = panel.array().square();

    CorrelationSet set;
    set.rr = correlation_matrix(panel, panel, "r", "r", true);
    set.r2r2 = correlation_matrix(sq, sq, "r2", "r2", true);
    set.rr2 = correlation_matrix(panel, sq, "r", "r2");
    set.lr_r = lagged_correlation_matrix(panel, panel, "r", "r");
    set.lr2_r2 = lagged_correlation_matrix(sq, sq, "r2", "r2");
    set.lr_r2 = lagged_correlation_matrix(panel, sq, "r", "r2");
    set.lr2_r = lagged_correlation_matrix(sq, panel, "r2", "r");
    return set;
}

double whitening_quality_offdiag(const Eigen::MatrixXd& rho) {
    const Eigen::Index n = rho.rows();
    if (n != rho.cols()) throw std::invalid_argument("whitening_quality_offdiag: square input");
    if (n < 2) throw std::invalid_argument("whitening_quality_offdiag: need N >= 2");
    std::vector<double> squares;
    squares.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1));
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i)
            if (i != j) squares.push_back(rho(i, j) * rho(i, j));
    return 100.0 *
           std::sqrt(stable_sum(squares) / (static_cast<double>(n) * static_cast<double>(n - 1)));
}

double whitening_quality_full(const Eigen::MatrixXd& rho) {
    const Eigen::Index n = rho.rows();
    if (n != rho.cols() || n < 1)
        throw std::invalid_argument("whitening_quality_full: square non-empty input");
    std::vector<double> squares;
    squares.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < rho.cols(); ++j)
        for (Eigen::Index i = 0; i < rho.rows(); ++i) squares.push_back(rho(i, j) * rho(i, j));
    return 100.0 *
           std::sqrt(stable_sum(squares) / (static_cast<double>(n) * static_cast<double>(n)));
}

double unit_variance_quality(const Eigen::MatrixXd& residuals) {
    if (residuals.rows() < 2)
        throw std::invalid_argument("unit_variance_quality: need at least 2 observations");
    // <eps^2> is the raw second moment over the window, not the centered variance.
    const Eigen::VectorXd second = residuals.array().square().colwise().mean();
    std::vector<double> squares(static_cast<std::size_t>(second.size()));
    for (Eigen::Index a = 0; a < second.size(); ++a)
        squares[static_cast<std::size_t>(a)] = (second(a) - 1.0) * (second(a) - 1.0);
    return std::sqrt(stable_sum(squares) / static_cast<double>(second.size()));
}

double mean_residual_variance(const Eigen::MatrixXd& residuals) {
    if (residuals.rows() < 2)
        throw std::invalid_argument("mean_residual_variance: need at least 2 observations");
    const Eigen::VectorXd second = residuals.array().square().colwise().mean();
    std::vector<double> values(second.data(), second.data() + second.size());
    return stable_sum(values) / static_cast<double>(second.size());
}

QualitySummary quality_summary(const CorrelationSet& corr, const Eigen::MatrixXd& panel) {
    QualitySummary q;
    if (panel.cols() >= 2) {
        q.q_rr = whitening_quality_offdiag(corr.rr);
        q.q_r2r2 = whitening_quality_offdiag(corr.r2r2);
    }
    q.q_rr2 = whitening_quality_full(corr.rr2);
    q.q_lr_r = whitening_quality_full(corr.lr_r);
    q.q_lr2_r2 = whitening_quality_full(corr.lr2_r2);
    q.q_lr_r2 = whitening_quality_full(corr.lr_r2);
    q.q_lr2_r = whitening_quality_full(corr.lr2_r);
    q.q_unit_variance = unit_variance_quality(panel);
    q.mean_residual_variance = mean_residual_variance(panel);
    return q;
}

QualitySummary quality_summary(const Eigen::MatrixXd& panel) {
    return quality_summary(lagged_correlation_matrices(panel), panel);
}

namespace {

std::vector<double> summary_values(const QualitySummary& q) {
    // Order must match kMeasureNames; offdiag entries are NaN when absent.
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {q.q_rr.value_or(nan), q.q_r2r2.value_or(nan), q.q_rr2,
            q.q_lr_r,             q.q_lr2_r,              q.q_lr_r2,
            q.q_lr2_r2,           q.q_unit_variance,      q.mean_residual_variance};
}

double interpolated_quantile(const std::vector<double>& sorted, double p) {
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const std::size_t lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

McBand mc_confidence_band(int n_assets, int n_obs, int n_rep, const InnovationDist& innovation,
                          std::pair<double, double> quantiles, std::uint64_t seed,
                          int n_threads) {
    if (n_assets < 1) throw std::invalid_argument("mc_confidence_band: n_assets must be >= 1");
    if (n_obs < 3) throw std::invalid_argument("mc_confidence_band: n_obs must be >= 3");
    if (n_rep < 2) throw std::invalid_argument("mc_confidence_band: n_rep must be >= 2");
    if (!(quantiles.first >= 0.0 && quantiles.first < quantiles.second && quantiles.second <= 1.0))
        throw std::invalid_argument("mc_confidence_band: need 0 <= low < high <= 1");
    if (const auto* st = std::get_if<StudentInnovations>(&innovation))
        if (!(st->dof > 2.0))
            throw std::invalid_argument("mc_confidence_band: Student dof must be > 2");

    std::vector<std::vector<double>> per_rep(static_cast<std::size_t>(n_rep));
    parallel_for(
        static_cast<std::size_t>(n_rep),
        [&](std::size_t rep) {
            const Eigen::MatrixXd panel = draw_innovations(
                n_assets, n_obs, innovation, mix_seed(seed, static_cast<std::uint64_t>(rep)));
            per_rep[rep] = summary_values(quality_summary(panel));
        },
        n_threads);

    McBand band;
    band.n_assets = n_assets;
    band.n_obs = n_obs;
    band.n_rep = n_rep;
    band.innovation = innovation;
    band.quantiles = quantiles;
    band.seed = seed;
    for (std::size_t m = 0; m < kMeasureNames.size(); ++m) {
        std::vector<double> values;
        values.reserve(per_rep.size());
        for (const auto& rep : per_rep) values.push_back(rep[m]);
        if (std::any_of(values.begin(), values.end(),
                        [](double v) { return std::isnan(v); }))
            continue;  // measure unavailable (N = 1 off-diagonal qualities)
        KahanSum mean;
        for (double v : values) mean.add(v);
        std::sort(values.begin(), values.end());
        Band b;
        b.low = interpolated_quantile(values, quantiles.first);
        b.high = interpolated_quantile(values, quantiles.second);
        b.mean = mean.value() / static_cast<double>(values.size());
        band.measures[kMeasureNames[m]] = b;
    }
    return band;
}

WhiteningReport whitening_report(const Eigen::MatrixXd& panel, std::vector<std::string> labels,
                                 std::string config_id) {
    WhiteningReport report;
    report.correlations = lagged_correlation_matrices(panel);
    report.quality = quality_summary(report.correlations, panel);
    report.labels = std::move(labels);
    report.config_id = std::move(config_id);
    return report;
}

}  // namespace mvarch
