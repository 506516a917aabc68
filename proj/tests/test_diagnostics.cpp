#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "mvarch/diagnostics.hpp"
#include "mvarch/errors.hpp"
#include "mvarch/simulate.hpp"
#include "mvarch/spectral.hpp"

using namespace mvarch;

namespace {

// Straightforward per-entry Pearson correlation, the oracle for the GEMM path.
Eigen::MatrixXd naive_pearson(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    const Eigen::Index T = x.rows();
    Eigen::MatrixXd rho(x.cols(), y.cols());
    for (Eigen::Index a = 0; a < x.cols(); ++a) {
        for (Eigen::Index b = 0; b < y.cols(); ++b) {
            double mx = 0.0, my = 0.0;
            for (Eigen::Index t = 0; t < T; ++t) {
                mx += x(t, a);
                my += y(t, b);
            }
            mx /= static_cast<double>(T);
            my /= static_cast<double>(T);
            double sxy = 0.0, sxx = 0.0, syy = 0.0;
            for (Eigen::Index t = 0; t < T; ++t) {
                sxy += (x(t, a) - mx) * (y(t, b) - my);
                sxx += (x(t, a) - mx) * (x(t, a) - mx);
                syy += (y(t, b) - my) * (y(t, b) - my);
            }
            rho(a, b) = sxy / std::sqrt(sxx * syy);
        }
    }
    return rho;
}

Eigen::MatrixXd random_panel(Eigen::Index T, Eigen::Index N, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd m(T, N);
    for (Eigen::Index t = 0; t < T; ++t)
        for (Eigen::Index c = 0; c < N; ++c) m(t, c) = gauss(rng);
    return m;
}

}  // namespace

TEST_CASE("the seven correlation matrices match a naive Pearson oracle") {
    const Eigen::MatrixXd panel = random_panel(50, 4, 101);
    const Eigen::MatrixXd sq = panel.array().square();
    const Eigen::Index T = panel.rows();
    auto set = lagged_correlation_matrices(panel);

    auto close = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
        return (a - b).cwiseAbs().maxCoeff() < 1e-12;
    };
    Eigen::MatrixXd rr = naive_pearson(panel, panel);
    rr.diagonal().setOnes();
    Eigen::MatrixXd r2r2 = naive_pearson(sq, sq);
    r2r2.diagonal().setOnes();
    CHECK(close(set.rr, rr));
    CHECK(close(set.r2r2, r2r2));
    CHECK(close(set.rr2, naive_pearson(panel, sq)));
    CHECK(close(set.lr_r, naive_pearson(panel.topRows(T - 1), panel.bottomRows(T - 1))));
    CHECK(close(set.lr2_r2, naive_pearson(sq.topRows(T - 1), sq.bottomRows(T - 1))));
    CHECK(close(set.lr_r2, naive_pearson(panel.topRows(T - 1), sq.bottomRows(T - 1))));
    CHECK(close(set.lr2_r, naive_pearson(sq.topRows(T - 1), panel.bottomRows(T - 1))));
}

TEST_CASE("self-correlation diagonals are exactly one") {
    const Eigen::MatrixXd panel = random_panel(40, 5, 103);
    auto set = lagged_correlation_matrices(panel);
    for (Eigen::Index a = 0; a < 5; ++a) {
        CHECK(set.rr(a, a) == 1.0);
        CHECK(set.r2r2(a, a) == 1.0);
    }
}

TEST_CASE("lag alignment drops the last and first rows") {
    const Eigen::MatrixXd panel = random_panel(30, 3, 107);
    const Eigen::Index T = panel.rows();
    Eigen::MatrixXd via_op = lagged_correlation_matrix(panel, panel, "y", "y");
    Eigen::MatrixXd direct = correlation_matrix(panel.topRows(T - 1), panel.bottomRows(T - 1),
                                                "y'", "z'");
    CHECK((via_op - direct).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("alternating series has perfect negative lag-one autocorrelation") {
    Eigen::MatrixXd y(12, 2);
    for (Eigen::Index t = 0; t < 12; ++t) {
        y(t, 0) = (t % 2 == 0) ? 1.0 : -1.0;
        y(t, 1) = (t % 2 == 0) ? -1.0 : 1.0;
    }
    Eigen::MatrixXd rho = lagged_correlation_matrix(y, y, "y", "y");
    CHECK(rho(0, 0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(rho(1, 1) == doctest::Approx(-1.0).epsilon(1e-12));

    // the squared series is constant, so the full bundle must refuse
    try {
        lagged_correlation_matrices(y);
        FAIL("expected DegenerateSeriesError");
    } catch (const DegenerateSeriesError& e) {
        CHECK(e.measure() == "r2");
        CHECK(e.column() == 0);
    }
}

TEST_CASE("iid heavy-tailed panel has small cross-correlations") {
    const Eigen::MatrixXd panel = draw_innovations(5, 10000, StudentInnovations{5.0}, 2024);
    auto set = lagged_correlation_matrices(panel);
    for (const Eigen::MatrixXd* rho : {&set.rr, &set.r2r2, &set.lr_r, &set.lr2_r2}) {
        for (Eigen::Index a = 0; a < 5; ++a)
            for (Eigen::Index b = 0; b < 5; ++b)
                if (a != b) CHECK(std::abs((*rho)(a, b)) < 0.05);
    }
}

TEST_CASE("whitening_quality_offdiag") {
    CHECK(whitening_quality_offdiag(Eigen::MatrixXd::Identity(7, 7)) == 0.0);
    Eigen::MatrixXd half = Eigen::MatrixXd::Constant(4, 4, 0.5);
    half.diagonal().setOnes();
    CHECK(whitening_quality_offdiag(half) == doctest::Approx(50.0).epsilon(1e-14));
    CHECK_THROWS_AS(whitening_quality_offdiag(Eigen::MatrixXd::Identity(1, 1)),
                    std::invalid_argument);
}

TEST_CASE("whitening_quality_full") {
    CHECK(whitening_quality_full(Eigen::MatrixXd::Zero(5, 5)) == 0.0);
    for (Eigen::Index n : {1, 4, 9}) {
        CHECK(whitening_quality_full(Eigen::MatrixXd::Identity(n, n)) ==
              doctest::Approx(100.0 / std::sqrt(static_cast<double>(n))).epsilon(1e-14));
    }
}

TEST_CASE("unit_variance_quality") {
    // +/-1 entries: second moment exactly one
    Eigen::MatrixXd unit(4, 3);
    unit << 1, -1, 1, -1, 1, -1, 1, 1, -1, -1, -1, 1;
    CHECK(unit_variance_quality(unit) == 0.0);

    Eigen::MatrixXd two = Eigen::MatrixXd::Constant(10, 1, std::sqrt(2.0));
    CHECK(unit_variance_quality(two) == doctest::Approx(1.0).epsilon(1e-12));

    const Eigen::MatrixXd panel = draw_innovations(54, 2088, StudentInnovations{5.0}, 77);
    const double q = unit_variance_quality(panel);
    CHECK(q > 0.0);
    CHECK(q < 0.2);
}

TEST_CASE("mean_residual_variance") {
    CHECK(mean_residual_variance(Eigen::MatrixXd::Ones(6, 4)) == 1.0);
    CHECK(mean_residual_variance(Eigen::MatrixXd::Zero(6, 4)) == 0.0);
    const Eigen::MatrixXd panel = draw_innovations(10, 10000, StudentInnovations{5.0}, 31);
    CHECK(mean_residual_variance(panel) == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("relabeling assets leaves every quality scalar unchanged") {
    const Eigen::MatrixXd panel = random_panel(200, 8, 109);
    Eigen::VectorXi perm(8);
    perm << 5, 2, 7, 0, 3, 6, 1, 4;
    Eigen::MatrixXd permuted(200, 8);
    for (Eigen::Index c = 0; c < 8; ++c) permuted.col(c) = panel.col(perm(c));

    const QualitySummary a = quality_summary(panel);
    const QualitySummary b = quality_summary(permuted);
    CHECK(*a.q_rr == *b.q_rr);
    CHECK(*a.q_r2r2 == *b.q_r2r2);
    CHECK(a.q_rr2 == b.q_rr2);
    CHECK(a.q_lr_r == b.q_lr_r);
    CHECK(a.q_lr2_r2 == b.q_lr2_r2);
    CHECK(a.q_lr_r2 == b.q_lr_r2);
    CHECK(a.q_lr2_r == b.q_lr2_r);
    CHECK(a.q_unit_variance == b.q_unit_variance);
    CHECK(a.mean_residual_variance == b.mean_residual_variance);
}

TEST_CASE("mc_confidence_band is deterministic and ordered") {
    const McBand a = mc_confidence_band(5, 60, 50, StudentInnovations{5.0}, {0.05, 0.95}, 99);
    const McBand b = mc_confidence_band(5, 60, 50, StudentInnovations{5.0}, {0.05, 0.95}, 99);
    REQUIRE(a.measures.size() == b.measures.size());
    for (const auto& [name, band] : a.measures) {
        const Band& other = b.measures.at(name);
        CHECK(band.low == other.low);
        CHECK(band.high == other.high);
        CHECK(band.mean == other.mean);
        CHECK(band.low <= band.high);
    }
}

TEST_CASE("mc_confidence_band does not depend on the thread count") {
    const McBand one = mc_confidence_band(4, 50, 40, StudentInnovations{5.0}, {0.05, 0.95}, 7, 1);
    const McBand four = mc_confidence_band(4, 50, 40, StudentInnovations{5.0}, {0.05, 0.95}, 7, 4);
    for (const auto& [name, band] : one.measures) {
        CHECK(band.low == four.measures.at(name).low);
        CHECK(band.high == four.measures.at(name).high);
        CHECK(band.mean == four.measures.at(name).mean);
    }
}

TEST_CASE("mc_confidence_band brackets the iid sampling scale") {
    const McBand band = mc_confidence_band(10, 500, 200, StudentInnovations{5.0}, {0.05, 0.95}, 3);
    const Band q = band.measures.at("q_rr");
    const double iid_scale = 100.0 / std::sqrt(500.0);
    CHECK(q.low < iid_scale);
    CHECK(q.high > iid_scale);
    const Band mrv = band.measures.at("mean_residual_variance");
    CHECK(mrv.low < 1.0);
    CHECK(mrv.high > 1.0);
}

TEST_CASE("mc_confidence_band argument checks") {
    CHECK_THROWS_AS(mc_confidence_band(5, 60, 50, StudentInnovations{2.0}, {0.05, 0.95}, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(mc_confidence_band(5, 60, 1, StudentInnovations{5.0}, {0.05, 0.95}, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(mc_confidence_band(5, 60, 50, StudentInnovations{5.0}, {0.95, 0.05}, 1),
                    std::invalid_argument);
    // small replication counts are allowed; the band is just wide
    CHECK_NOTHROW(mc_confidence_band(3, 30, 10, StudentInnovations{5.0}, {0.05, 0.95}, 1));
}

TEST_CASE("whitening with the true covariance removes the return structure") {
    // Strongly correlated constant Sigma: the returns' q(r,r) is large, the
    // residuals computed with the exact Sigma^(-1/2) drop to the noise level.
    const Eigen::Index n = 10;
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Constant(n, n, 0.6);
    sigma.diagonal().setOnes();
    SimulationConfig config;
    config.n_assets = n;
    config.n_obs = 500;
    config.sigma = ConstantSigma{sigma};
    config.innovation = StudentInnovations{5.0};
    config.seed = 3001;
    const ReturnPanel panel = simulate_dgp(config);

    const Eigen::MatrixXd inv = inverse_sqrt_full(eig_sym(sigma), 0.0);
    const Eigen::MatrixXd residuals = panel.returns * inv.transpose();

    const double q_returns = whitening_quality_offdiag(
        correlation_matrix(panel.returns, panel.returns, "r", "r", true));
    const double q_residuals = whitening_quality_offdiag(
        correlation_matrix(residuals, residuals, "e", "e", true));
    CHECK(q_returns > 30.0);
    CHECK(q_residuals < 10.0);
    CHECK(q_residuals < q_returns);
}

TEST_CASE("whitening_report bundles correlations, qualities and the band") {
    const Eigen::MatrixXd panel = random_panel(60, 3, 113);
    WhiteningReport report = whitening_report(panel, {"a", "b", "c"}, "test");
    CHECK(report.quality.q_rr.has_value());
    CHECK(report.correlations.rr.rows() == 3);
    CHECK(report.config_id == "test");
    CHECK(!report.band.has_value());

    // N = 1 panels have no off-diagonal measures
    WhiteningReport single = whitening_report(random_panel(60, 1, 117), {"a"}, "single");
    CHECK(!single.quality.q_rr.has_value());
    CHECK(single.quality.q_lr_r >= 0.0);
}
