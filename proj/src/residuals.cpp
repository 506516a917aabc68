#include "mvarch/residuals.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "mvarch/errors.hpp"
#include "mvarch/parallel.hpp"
#include "mvarch/spectral.hpp"

namespace mvarch {

namespace {

std::string format_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace

std::string scheme_id(const InverseScheme& scheme) {
    if (const auto* full = std::get_if<FullInverse>(&scheme)) {
        if (full->absolute_floor)
            return "full(floor_abs=" + format_num(*full->absolute_floor) + ")";
        return "full(floor_rel=" + format_num(full->relative_floor) + ")";
    }
    if (const auto* proj = std::get_if<ProjectedInverse>(&scheme))
        return "projected(k=" + std::to_string(proj->rank) + ")";
    const auto& fr = std::get<FullRankInverse>(scheme);
    return "fullrank(k=" + std::to_string(fr.rank) + ")";
}

Eigen::MatrixXd inverse_volatility(const CovarianceEstimate& cov, const InverseScheme& scheme,
                                   bool trace_rescale) {
    const SpectralDecomposition dec = eig_sym(cov.matrix);
    Eigen::MatrixXd inv;
    if (const auto* full = std::get_if<FullInverse>(&scheme)) {
        const double floor = full->absolute_floor
                                 ? *full->absolute_floor
                                 : full->relative_floor * mean_variance(cov);
        inv = inverse_sqrt_full(dec, floor);
    } else if (const auto* proj = std::get_if<ProjectedInverse>(&scheme)) {
        inv = inverse_sqrt_projected(dec, proj->rank);
    } else {
        inv = inverse_sqrt_fullrank(dec, std::get<FullRankInverse>(scheme).rank);
    }
    if (trace_rescale) inv = trace_preserving_rescale(inv, cov);
    return inv;
}

ResidualRun compute_residuals_run(const ReturnPanel& panel, const ResidualConfig& config,
                                  int n_threads) {
    validate_panel(panel);
    const Eigen::Index i_max = config.kernel.i_max();
    const Eigen::Index T = panel.n_obs();
    const Eigen::Index N = panel.n_assets();
    if (T < i_max + 2)
        throw WindowTooShortError(static_cast<std::size_t>(i_max) + 2,
                                  static_cast<std::size_t>(T));

    const Eigen::Index n_res = T - i_max - 1;
    Eigen::MatrixXd residuals(n_res, N);
    Eigen::MatrixXd spectra(n_res, N);

    parallel_for(
        static_cast<std::size_t>(n_res),
        [&](std::size_t idx) {
            const Eigen::Index t = i_max + static_cast<Eigen::Index>(idx);
            try {
                CovarianceEstimate cov =
                    effective_covariance(panel, t, config.kernel, config.gamma, config.xi);
                const SpectralDecomposition dec = eig_sym(cov.matrix);
                spectra.row(static_cast<Eigen::Index>(idx)) = dec.eigenvalues.transpose();

                Eigen::MatrixXd inv;
                if (const auto* full = std::get_if<FullInverse>(&config.scheme)) {
                    const double floor = full->absolute_floor
                                             ? *full->absolute_floor
                                             : full->relative_floor * mean_variance(cov);
                    inv = inverse_sqrt_full(dec, floor);
                } else if (const auto* proj = std::get_if<ProjectedInverse>(&config.scheme)) {
                    inv = inverse_sqrt_projected(dec, proj->rank);
                } else {
                    inv = inverse_sqrt_fullrank(dec, std::get<FullRankInverse>(config.scheme).rank);
                }
                if (config.trace_rescale) inv = trace_preserving_rescale(inv, cov);

                residuals.row(static_cast<Eigen::Index>(idx)) =
                    (inv * panel.returns.row(t + 1).transpose()).transpose();
            } catch (const std::exception&) {
                std::throw_with_nested(
                    Error("residual computation failed at date " + panel.dates[t]));
            }
        },
        n_threads);

    std::vector<std::string> dates(panel.dates.begin() + i_max + 1, panel.dates.end());
    return ResidualRun{
        ResidualPanel{std::move(residuals), std::move(dates), panel.labels, config},
        spectra.colwise().mean().transpose()};
}

ResidualPanel compute_residuals(const ReturnPanel& panel, const WeightKernel& kernel,
                                double gamma, double xi, const InverseScheme& scheme,
                                bool trace_rescale, int n_threads) {
    ResidualConfig config{kernel, gamma, xi, scheme, trace_rescale};
    return compute_residuals_run(panel, config, n_threads).panel;
}

}  // namespace mvarch
