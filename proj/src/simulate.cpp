#include "mvarch/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "mvarch/covariance.hpp"
#include "mvarch/errors.hpp"
#include "mvarch/spectral.hpp"

namespace mvarch {

std::string innovation_id(const InnovationDist& dist) {
    if (const auto* st = std::get_if<StudentInnovations>(&dist)) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "student(dof=%g)", st->dof);
        return buf;
    }
    return "gaussian";
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Eigen::MatrixXd draw_innovations(Eigen::Index n_assets, Eigen::Index n_obs,
                                 const InnovationDist& dist, std::uint64_t seed) {
    if (n_assets < 1 || n_obs < 1)
        throw std::invalid_argument("draw_innovations: need n_assets >= 1 and n_obs >= 1");

    std::mt19937_64 engine(seed);
    Eigen::MatrixXd out(n_obs, n_assets);
    if (const auto* st = std::get_if<StudentInnovations>(&dist)) {
        if (!(st->dof > 2.0))
            throw std::invalid_argument("draw_innovations: Student dof must be > 2");
        std::student_t_distribution<double> draw(st->dof);
        const double unit_scale = std::sqrt((st->dof - 2.0) / st->dof);
        for (Eigen::Index t = 0; t < n_obs; ++t)
            for (Eigen::Index a = 0; a < n_assets; ++a)
                out(t, a) = draw(engine) * unit_scale;
    } else {
        std::normal_distribution<double> draw(0.0, 1.0);
        for (Eigen::Index t = 0; t < n_obs; ++t)
            for (Eigen::Index a = 0; a < n_assets; ++a) out(t, a) = draw(engine);
    }
    return out;
}

namespace {

Eigen::MatrixXd psd_sqrt_of(const Eigen::MatrixXd& sigma) {
    return sqrt_psd(eig_sym(sigma));
}

}  // namespace

ReturnPanel simulate_dgp(const SimulationConfig& config) {
    const Eigen::Index N = config.n_assets;
    const Eigen::Index T = config.n_obs;
    if (N < 1) throw std::invalid_argument("simulate_dgp: n_assets must be >= 1");

    const Eigen::MatrixXd eps = draw_innovations(N, T, config.innovation, config.seed);

    ReturnPanel panel;
    panel.labels = default_labels(N);
    panel.dates = default_dates(T);
    panel.returns.resize(T, N);

    if (const auto* constant = std::get_if<ConstantSigma>(&config.sigma)) {
        if (constant->sigma.rows() != N || constant->sigma.cols() != N)
            throw std::invalid_argument("simulate_dgp: sigma shape does not match n_assets");
        if (T < 2) throw std::invalid_argument("simulate_dgp: need n_obs >= 2");
        const SpectralDecomposition dec = eig_sym(constant->sigma);
        if (!(dec.eigenvalues.minCoeff() > 0.0))
            throw NotPsdError("simulate_dgp: constant sigma must be positive definite");
        const Eigen::MatrixXd root = sqrt_psd(dec);
        panel.returns = eps * root.transpose();
        return panel;
    }

    const auto& dyn = std::get<DynamicSigma>(config.sigma);
    const Eigen::Index i_max = dyn.kernel.i_max();
    if (T < i_max + 2)
        throw std::invalid_argument("simulate_dgp: dynamic mode needs n_obs >= i_max + 2");

    Eigen::MatrixXd init = dyn.initial_sigma.value_or(Eigen::MatrixXd::Identity(N, N));
    if (init.rows() != N || init.cols() != N)
        throw std::invalid_argument("simulate_dgp: initial sigma shape mismatch");
    {
        const SpectralDecomposition dec = eig_sym(init);
        if (!(dec.eigenvalues.minCoeff() > 0.0))
            throw NotPsdError("simulate_dgp: initial sigma must be positive definite");
        const Eigen::MatrixXd root0 = sqrt_psd(dec);
        // Burn-in: the first i_max+1 returns come from the fixed seed covariance.
        panel.returns.topRows(i_max + 1) = eps.topRows(i_max + 1) * root0.transpose();
    }

    for (Eigen::Index t = i_max; t + 1 < T; ++t) {
        const CovarianceEstimate cov =
            effective_covariance(panel, t, dyn.kernel, dyn.gamma, dyn.xi);
        const Eigen::MatrixXd root = psd_sqrt_of(cov.matrix);
        panel.returns.row(t + 1) = (root * eps.row(t + 1).transpose()).transpose();
    }
    return panel;
}

}  // namespace mvarch
