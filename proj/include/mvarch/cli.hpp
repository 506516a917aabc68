#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mvarch/kernels.hpp"
#include "mvarch/residuals.hpp"

namespace mvarch {

/// Parsed command configuration shared by all subcommands. Each cmd_* uses the
/// subset of fields its flags expose.
struct RunConfig {
    // input/output
    std::filesystem::path input;
    std::filesystem::path out_dir = ".";
    bool lenient = false;

    // kernel
    std::string kernel = "lm";  // equal | exp | lm
    double mu = 0.94;
    double tau0 = 1560.0;
    LongMemoryConfig lm_config{};
    int i_max = 260;

    // estimator grids (analyze)
    std::vector<double> gamma_grid{0.0, 0.05, 0.1, 0.2, 0.4};
    std::vector<double> xi_grid{0.0, 1e-4, 1e-3, 1e-2, 1e-1, 1.0};

    // inverse-volatility scheme
    std::string scheme = "full";  // full | projected | fullrank
    Eigen::Index k = 0;
    double relative_floor = 1e-12;
    std::optional<double> absolute_floor;
    bool trace_rescale = false;

    // Monte Carlo band
    int mc_reps = 1000;
    double dof = 5.0;
    double q_low = 0.05;
    double q_high = 0.95;
    int band_assets = 54;
    int band_obs = 2088;

    // simulate
    Eigen::Index sim_assets = 10;
    Eigen::Index sim_obs = 600;
    std::string sigma_spec = "identity";  // identity | equicorr=<rho> | <matrix csv>
    bool dynamic = false;
    double sim_gamma = 0.0;
    double sim_xi = 0.0;
    std::string dist = "student";  // student | gaussian

    // compare-kernels
    double compare_gamma = 0.05;
    double compare_xi = 0.01;
    double base_xi = 0.0;

    // scheme-compare
    std::vector<Eigen::Index> k_grid;        // empty -> spread over the spectrum rank
    std::vector<double> sc_gammas{0.05, 0.1};

    std::uint64_t seed = 12345;
    int threads = 0;
};

WeightKernel make_kernel(const RunConfig& config);
InverseScheme make_scheme(const RunConfig& config);

/// Residual sweep over the gamma x xi grid: per grid point residuals, the
/// whitening report, correlation heatmaps and the mean spectrum; plus the
/// returns' own report as baseline and the white-noise MC band. Exit 0 iff
/// every grid point completed; failures are listed in manifest.json.
int cmd_analyze(const RunConfig& config);

/// Table of whitening qualities for equal weights, exponential, long memory
/// and long memory + shrinkage/regularization kernels, against the returns
/// baseline and the white-noise Monte Carlo mean.
int cmd_compare_kernels(const RunConfig& config);

/// Quality-vs-rank curves for the projected and full-rank schemes at
/// gamma = xi = 0, and for the regularized covariance with xi mapped to an
/// equivalent rank through the mean spectrum.
int cmd_scheme_compare(const RunConfig& config);

/// Writes a simulated price panel (CSV + sidecar) that cmd_analyze can read.
int cmd_simulate(const RunConfig& config);

/// Writes the white-noise confidence band for (n_assets, n_obs) as JSON.
int cmd_mc_band(const RunConfig& config);

}  // namespace mvarch
