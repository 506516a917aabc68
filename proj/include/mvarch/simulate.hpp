#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "mvarch/kernels.hpp"
#include "mvarch/panel.hpp"

namespace mvarch {

/// Student-t innovations scaled by sqrt((dof-2)/dof) so the variance is
/// exactly one. Requires dof > 2.
struct StudentInnovations {
    double dof = 5.0;
};

struct GaussianInnovations {};

using InnovationDist = std::variant<StudentInnovations, GaussianInnovations>;

std::string innovation_id(const InnovationDist& dist);

/// SplitMix64 seed scrambler; used to derive independent per-replication and
/// per-path seeds from a master seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// T x N matrix of iid unit-variance innovations, filled row by row.
/// Deterministic given the seed.
Eigen::MatrixXd draw_innovations(Eigen::Index n_assets, Eigen::Index n_obs,
                                 const InnovationDist& dist, std::uint64_t seed);

/// Constant covariance: r(t) = Sigma^(1/2) eps(t).
struct ConstantSigma {
    Eigen::MatrixXd sigma;
};

/// Self-consistent recursion: Sigma_eff(t) is rebuilt each step from the
/// simulated history with the given kernel, gamma and xi. The first i_max+1
/// returns are drawn from initial_sigma (identity when absent) to seed the
/// window.
struct DynamicSigma {
    WeightKernel kernel;
    double gamma = 0.0;
    double xi = 0.0;
    std::optional<Eigen::MatrixXd> initial_sigma;
};

struct SimulationConfig {
    Eigen::Index n_assets = 1;
    Eigen::Index n_obs = 2;
    std::variant<ConstantSigma, DynamicSigma> sigma = ConstantSigma{};
    InnovationDist innovation = StudentInnovations{};
    std::uint64_t seed = 0;
};

/// Simulates the data generating process r(t+1) = Sigma_eff(t)^(1/2) eps(t+1).
/// The innovation stream is exactly draw_innovations(N, T, innovation, seed),
/// so callers can regenerate it for round-trip checks.
ReturnPanel simulate_dgp(const SimulationConfig& config);

}  // namespace mvarch
