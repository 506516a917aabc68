#pragma once

#include <string>
#include <vector>

namespace mvarch {

enum class KernelShape { EqualWeights, Exponential, LongMemory, Custom };

/// Constants of the long-memory kernel: a normalized sum of exponentials with
/// geometrically spaced time scales tau_k = tau1 * rho^(k-1), k = 1..n_components,
/// and component weights proportional to max(0, 1 - ln(tau_k) / ln(tau0)).
struct LongMemoryConfig {
    double tau1 = 4.0;
    double rho = 1.4142135623730951;  // sqrt(2)
    int n_components = 15;
};

/// Normalized lag weights lambda(0..i_max) defining the covariance memory.
/// Weights are non-negative and sum to one; immutable after construction.
class WeightKernel {
public:
    const std::vector<double>& weights() const { return weights_; }
    double operator[](std::size_t i) const { return weights_[i]; }
    int i_max() const { return static_cast<int>(weights_.size()) - 1; }
    KernelShape shape() const { return shape_; }

    /// Human-readable identifier recorded in covariance provenance,
    /// e.g. "exp(mu=0.94,imax=260)".
    const std::string& id() const { return id_; }

private:
    WeightKernel(std::vector<double> weights, KernelShape shape, std::string id)
        : weights_(std::move(weights)), shape_(shape), id_(std::move(id)) {}

    std::vector<double> weights_;
    KernelShape shape_;
    std::string id_;

    friend WeightKernel equal_weights(int);
    friend WeightKernel exponential_weights(int, double);
    friend WeightKernel long_memory_weights(int, double, const LongMemoryConfig&);
    friend WeightKernel custom_weights(std::vector<double>);
};

/// Rectangular window: every weight equals 1/(i_max+1).
WeightKernel equal_weights(int i_max);

/// Exponential moving average weights, lambda(i) proportional to mu^i.
WeightKernel exponential_weights(int i_max, double mu);

/// Long-memory weights with logarithmic decay up to tau0_days (business days).
/// The profile follows lambda(i) ~ 1 - log(i)/log(tau0).
WeightKernel long_memory_weights(int i_max, double tau0_days,
                                 const LongMemoryConfig& config = {});

/// Arbitrary validated weights (non-negative, sum 1 within 1e-12).
WeightKernel custom_weights(std::vector<double> weights);

}  // namespace mvarch
