#include "mvarch/kernels.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace mvarch {

namespace {

void normalize(std::vector<double>& w) {
    double sum = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) x /= sum;
}

std::string format_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace

WeightKernel equal_weights(int i_max) {
    if (i_max < 1) throw std::invalid_argument("equal_weights: i_max must be >= 1");
    std::vector<double> w(static_cast<std::size_t>(i_max) + 1,
                          1.0 / (static_cast<double>(i_max) + 1.0));
    return WeightKernel(std::move(w), KernelShape::EqualWeights,
                        "equal(imax=" + std::to_string(i_max) + ")");
}

WeightKernel exponential_weights(int i_max, double mu) {
    if (i_max < 1) throw std::invalid_argument("exponential_weights: i_max must be >= 1");
    if (!(mu > 0.0 && mu < 1.0))
        throw std::invalid_argument("exponential_weights: mu must be in (0,1), got " +
                                    format_num(mu));
    std::vector<double> w(static_cast<std::size_t>(i_max) + 1);
    w[0] = 1.0;
    for (std::size_t i = 1; i < w.size(); ++i) w[i] = w[i - 1] * mu;
    normalize(w);
    return WeightKernel(std::move(w), KernelShape::Exponential,
                        "exp(mu=" + format_num(mu) + ",imax=" + std::to_string(i_max) + ")");
}

WeightKernel long_memory_weights(int i_max, double tau0_days,
                                 const LongMemoryConfig& config) {
    if (i_max < 1) throw std::invalid_argument("long_memory_weights: i_max must be >= 1");
    if (!(tau0_days > 1.0))
        throw std::invalid_argument("long_memory_weights: tau0_days must be > 1, got " +
                                    format_num(tau0_days));
    if (!(config.tau1 > 0.0) || !(config.rho > 1.0) || config.n_components < 1)
        throw std::invalid_argument("long_memory_weights: invalid component config");

    // Component scales tau_k = tau1 * rho^(k-1) with logarithmic weights,
    // clipped at zero. Scales beyond tau0 drop out.
    const double log_tau0 = std::log(tau0_days);
    std::vector<double> taus, comp_w;
    for (int k = 0; k < config.n_components; ++k) {
        double tau = config.tau1 * std::pow(config.rho, k);
        double wk = 1.0 - std::log(tau) / log_tau0;
        if (wk > 0.0) {
            taus.push_back(tau);
            comp_w.push_back(wk);
        }
    }
    if (taus.empty())
        throw std::invalid_argument(
            "long_memory_weights: no active components (tau0 too close to 1 or below tau1)");

    std::vector<double> w(static_cast<std::size_t>(i_max) + 1, 0.0);
    for (std::size_t c = 0; c < taus.size(); ++c) {
        const double mu = std::exp(-1.0 / taus[c]);
        double term = comp_w[c];
        for (std::size_t i = 0; i < w.size(); ++i) {
            w[i] += term;
            term *= mu;
        }
    }
    normalize(w);
    return WeightKernel(std::move(w), KernelShape::LongMemory,
                        "lm(tau0=" + format_num(tau0_days) + ",tau1=" + format_num(config.tau1) +
                            ",rho=" + format_num(config.rho) +
                            ",K=" + std::to_string(config.n_components) +
                            ",imax=" + std::to_string(i_max) + ")");
}

WeightKernel custom_weights(std::vector<double> weights) {
    if (weights.empty()) throw std::invalid_argument("custom_weights: empty weight vector");
    double sum = 0.0;
    for (double x : weights) {
        if (!(x >= 0.0)) throw std::invalid_argument("custom_weights: negative weight");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("custom_weights: weights must sum to 1 within 1e-12");
    auto i_max = weights.size() - 1;
    return WeightKernel(std::move(weights), KernelShape::Custom,
                        "custom(imax=" + std::to_string(i_max) + ")");
}

}  // namespace mvarch
