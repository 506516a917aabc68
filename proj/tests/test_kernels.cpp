#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "mvarch/kernels.hpp"

using namespace mvarch;

namespace {

double weight_sum(const WeightKernel& k) {
    return std::accumulate(k.weights().begin(), k.weights().end(), 0.0);
}

}  // namespace

TEST_CASE("equal weights are uniform and normalized") {
    auto k3 = equal_weights(3);
    REQUIRE(k3.weights().size() == 4);
    for (double w : k3.weights()) CHECK(w == doctest::Approx(0.25).epsilon(1e-15));

    auto k1 = equal_weights(1);
    CHECK(k1[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(k1[1] == doctest::Approx(0.5).epsilon(1e-15));

    auto k260 = equal_weights(260);
    CHECK(k260.weights().size() == 261);
    for (double w : k260.weights()) CHECK(w == doctest::Approx(1.0 / 261.0).epsilon(1e-15));
    CHECK(std::abs(weight_sum(k260) - 1.0) < 1e-12);

    // flatness: max - min < 1e-15
    auto [mn, mx] = std::minmax_element(k260.weights().begin(), k260.weights().end());
    CHECK(*mx - *mn < 1e-15);
}

TEST_CASE("equal weights rejects i_max < 1") {
    CHECK_THROWS_AS(equal_weights(0), std::invalid_argument);
    CHECK_THROWS_AS(equal_weights(-5), std::invalid_argument);
}

TEST_CASE("exponential weights: hand-normalized small cases") {
    auto k = exponential_weights(1, 0.94);
    CHECK(k[0] == doctest::Approx(1.0 / 1.94).epsilon(1e-14));
    CHECK(k[1] == doctest::Approx(0.94 / 1.94).epsilon(1e-14));

    auto k2 = exponential_weights(2, 0.5);
    CHECK(k2[0] == doctest::Approx(4.0 / 7.0).epsilon(1e-14));
    CHECK(k2[1] == doctest::Approx(2.0 / 7.0).epsilon(1e-14));
    CHECK(k2[2] == doctest::Approx(1.0 / 7.0).epsilon(1e-14));
}

TEST_CASE("exponential weights: ratio law and normalization") {
    std::mt19937 rng(11);
    // mu^i_max must stay well above the denormal range for the ratio law
    std::uniform_real_distribution<double> mu_draw(0.3, 0.99);
    std::uniform_int_distribution<int> imax_draw(1, 400);
    for (int rep = 0; rep < 50; ++rep) {
        const double mu = mu_draw(rng);
        auto k = exponential_weights(imax_draw(rng), mu);
        CHECK(std::abs(weight_sum(k) - 1.0) < 1e-12);
        for (int i = 0; i < k.i_max(); ++i) {
            CHECK(k[i + 1] / k[i] == doctest::Approx(mu).epsilon(1e-12));
            CHECK(k[i + 1] <= k[i]);
        }
    }
}

TEST_CASE("exponential weights rejects mu outside (0,1)") {
    CHECK_THROWS_AS(exponential_weights(10, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(exponential_weights(10, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(exponential_weights(10, -0.2), std::invalid_argument);
    CHECK_THROWS_AS(exponential_weights(10, 1.7), std::invalid_argument);
}

TEST_CASE("long memory weights: monotone, normalized, non-negative") {
    auto k = long_memory_weights(260, 1560.0);
    REQUIRE(k.weights().size() == 261);
    CHECK(std::abs(weight_sum(k) - 1.0) < 1e-12);
    for (int i = 0; i < k.i_max(); ++i) {
        CHECK(k[i] > k[i + 1]);
        CHECK(k[i + 1] >= 0.0);
    }
}

TEST_CASE("long memory decays much slower than the exponential kernel") {
    auto lm = long_memory_weights(260, 1560.0);
    auto ex = exponential_weights(260, 0.94);
    const double lm_ratio = lm[0] / lm[130];
    const double ex_ratio = ex[0] / ex[130];
    // reference values: lm_ratio ~ 8.4, ex_ratio ~ 3114
    CHECK(lm_ratio * 10.0 < ex_ratio);
    CHECK(lm_ratio < 50.0);
}

TEST_CASE("long memory explicit five-term profile") {
    // Direct evaluation of the construction at i_max=4, tau0=10 with default
    // components (only the scales 4, 4*sqrt(2), 8 stay active). Reference
    // values computed with 40-digit arithmetic.
    auto k = long_memory_weights(4, 10.0);
    const double expected[5] = {0.28961633371715032, 0.23518618312326005,
                                0.19140971300885026, 0.15613443619918231,
                                0.12765333395155705};
    REQUIRE(k.weights().size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(k[i] == doctest::Approx(expected[i]).epsilon(1e-14));
}

TEST_CASE("long memory rejects bad horizons") {
    CHECK_THROWS_AS(long_memory_weights(260, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(long_memory_weights(260, 0.5), std::invalid_argument);
    // tau0 below the shortest component scale clips every component weight
    CHECK_THROWS_AS(long_memory_weights(260, 2.0), std::invalid_argument);
}

TEST_CASE("long memory honors custom component config") {
    LongMemoryConfig cfg;
    cfg.tau1 = 2.0;
    cfg.rho = 2.0;
    cfg.n_components = 5;
    auto k = long_memory_weights(100, 500.0, cfg);
    CHECK(std::abs(weight_sum(k) - 1.0) < 1e-12);
    CHECK(k.shape() == KernelShape::LongMemory);
    CHECK(k.id().find("tau1=2") != std::string::npos);
}

TEST_CASE("custom weights validate the sum rule") {
    auto k = custom_weights({1.0});
    CHECK(k.i_max() == 0);
    CHECK(k.shape() == KernelShape::Custom);
    CHECK_THROWS_AS(custom_weights({0.5, 0.4}), std::invalid_argument);
    CHECK_THROWS_AS(custom_weights({1.5, -0.5}), std::invalid_argument);
    CHECK_THROWS_AS(custom_weights({}), std::invalid_argument);
}

TEST_CASE("all constructors produce non-negative normalized weights") {
    std::mt19937 rng(99);
    std::uniform_int_distribution<int> imax_draw(1, 300);
    std::uniform_real_distribution<double> tau_draw(10.0, 4000.0);
    for (int rep = 0; rep < 20; ++rep) {
        const int imax = imax_draw(rng);
        for (const auto& k : {equal_weights(imax), exponential_weights(imax, 0.9),
                              long_memory_weights(imax, tau_draw(rng))}) {
            CHECK(std::abs(weight_sum(k) - 1.0) < 1e-12);
            for (double w : k.weights()) CHECK(w >= 0.0);
        }
    }
}
