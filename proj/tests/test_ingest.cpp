#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "mvarch/errors.hpp"
#include "mvarch/ingest.hpp"
#include "mvarch/io.hpp"
#include "mvarch/simulate.hpp"

using namespace mvarch;

namespace {

std::filesystem::path test_dir() {
    auto dir = std::filesystem::temp_directory_path() / "mvarch_ingest_tests";
    std::filesystem::create_directories(dir);
    return dir;
}

std::filesystem::path write_file(const std::string& name, const std::string& content) {
    auto path = test_dir() / name;
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("well-formed price file loads") {
    auto path = write_file("ok.csv",
                           "date,AAA,BBB\n"
                           "2001-01-01,100.0,50.0\n"
                           "2001-01-02,101.0,49.5\n"
                           "2001-01-03,102.5,50.5\n");
    PricePanel panel = load_price_csv(path);
    CHECK(panel.n_obs() == 3);
    CHECK(panel.n_assets() == 2);
    CHECK(panel.labels == std::vector<std::string>{"AAA", "BBB"});
    CHECK(panel.prices(2, 0) == 102.5);
    CHECK(panel.gap_report.empty());
}

TEST_CASE("strict mode rejects gaps, naming the date") {
    auto path = write_file("gap.csv",
                           "date,AAA,BBB\n"
                           "2001-01-01,100.0,50.0\n"
                           "2001-01-02,,49.5\n");
    try {
        load_price_csv(path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find("2001-01-02") != std::string::npos);
        CHECK(std::string(e.what()).find("AAA") != std::string::npos);
    }
}

TEST_CASE("lenient mode forward-fills and reports the gap") {
    auto path = write_file("gap2.csv",
                           "date,AAA,BBB\n"
                           "2001-01-01,100.0,50.0\n"
                           "2001-01-02,,49.5\n"
                           "2001-01-03,104.0,48.0\n");
    CsvSchema schema;
    schema.lenient = true;
    PricePanel panel = load_price_csv(path, schema);
    CHECK(panel.prices(1, 0) == 100.0);
    REQUIRE(panel.gap_report.size() == 1);
    CHECK(panel.gap_report[0].row == 1);
    CHECK(panel.gap_report[0].col == 0);
    CHECK(panel.gap_report[0].date == "2001-01-02");
    CHECK(panel.gap_report[0].label == "AAA");
}

TEST_CASE("a gap in the first row cannot be filled") {
    auto path = write_file("gap3.csv",
                           "date,AAA\n"
                           "2001-01-01,\n"
                           "2001-01-02,100.0\n");
    CsvSchema schema;
    schema.lenient = true;
    CHECK_THROWS_AS(load_price_csv(path, schema), ParseError);
}

TEST_CASE("non-ascending dates are an ordering error") {
    auto path = write_file("dates.csv",
                           "date,AAA\n"
                           "2001-01-02,100.0\n"
                           "2001-01-01,101.0\n");
    CHECK_THROWS_AS(load_price_csv(path), OrderingError);
    auto dup = write_file("dates2.csv",
                          "date,AAA\n"
                          "2001-01-02,100.0\n"
                          "2001-01-02,101.0\n");
    CHECK_THROWS_AS(load_price_csv(dup), OrderingError);
}

TEST_CASE("malformed numbers carry the line number") {
    auto path = write_file("bad.csv",
                           "date,AAA\n"
                           "2001-01-01,100.0\n"
                           "2001-01-02,abc\n");
    try {
        load_price_csv(path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("map_prices on log-price and interest-rate columns") {
    PricePanel panel;
    panel.prices.resize(1, 3);
    panel.prices << std::exp(1.0), 0.04, 0.0;
    panel.dates = {"2001-01-01"};
    panel.labels = {"P", "R1", "R2"};
    panel.columns = {ColumnMapping{AssetClass::LogPrice, 0.04},
                     ColumnMapping{AssetClass::InterestRate, 0.04},
                     ColumnMapping{AssetClass::InterestRate, 0.04}};
    Eigen::MatrixXd x = map_prices(panel);
    CHECK(x(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(x(0, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(x(0, 2) == 0.0);
}

TEST_CASE("mapping errors name the cell") {
    PricePanel panel;
    panel.prices.resize(2, 1);
    panel.prices << 100.0, -1.0;
    panel.dates = {"2001-01-01", "2001-01-02"};
    panel.labels = {"P"};
    panel.columns = {ColumnMapping{}};
    try {
        map_prices(panel);
        FAIL("expected MappingError");
    } catch (const MappingError& e) {
        CHECK(e.date() == "2001-01-02");
        CHECK(e.label() == "P");
    }

    panel.columns = {ColumnMapping{AssetClass::InterestRate, 0.04}};
    panel.prices << 0.02, -0.05;  // 1 + R/R0 = -0.25
    CHECK_THROWS_AS(map_prices(panel), MappingError);
}

TEST_CASE("returns_from_mapped differences the mapped prices") {
    Eigen::MatrixXd x(3, 1);
    x << 0.0, 1.0, 3.0;
    auto panel = returns_from_mapped(x, {"d1", "d2", "d3"}, {"A"});
    CHECK(panel.returns(0, 0) == 1.0);
    CHECK(panel.returns(1, 0) == 2.0);
    CHECK(panel.dates == std::vector<std::string>{"d2", "d3"});

    Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(4, 2, 0.7);
    auto zero = returns_from_mapped(flat, {"a", "b", "c", "d"}, {"A", "B"});
    CHECK(zero.returns.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("mapping is invertible") {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> price_draw(0.5, 500.0);
    std::uniform_real_distribution<double> rate_draw(-0.01, 0.2);
    PricePanel panel;
    panel.prices.resize(50, 2);
    for (int t = 0; t < 50; ++t) {
        panel.prices(t, 0) = price_draw(rng);
        panel.prices(t, 1) = rate_draw(rng);
    }
    panel.dates = default_dates(50);
    panel.labels = {"P", "R"};
    panel.columns = {ColumnMapping{AssetClass::LogPrice, 0.04},
                     ColumnMapping{AssetClass::InterestRate, 0.05}};
    Eigen::MatrixXd x = map_prices(panel);
    for (int t = 0; t < 50; ++t) {
        const double p_back = std::exp(x(t, 0));
        const double r_back = 0.05 * (std::exp(x(t, 1)) - 1.0);
        CHECK(p_back == doctest::Approx(panel.prices(t, 0)).epsilon(1e-12));
        CHECK(r_back == doctest::Approx(panel.prices(t, 1)).epsilon(1e-12));
    }
}

TEST_CASE("returns telescope back to the endpoints") {
    std::mt19937 rng(43);
    std::normal_distribution<double> gauss(0.0, 0.02);
    Eigen::MatrixXd x(80, 3);
    x.row(0).setZero();
    for (int t = 1; t < 80; ++t)
        for (int c = 0; c < 3; ++c) x(t, c) = x(t - 1, c) + gauss(rng);
    auto panel = returns_from_mapped(x, default_dates(80), default_labels(3));
    Eigen::RowVectorXd total = panel.returns.colwise().sum();
    CHECK((total - (x.row(79) - x.row(0))).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("simulate -> emit -> load -> map round trip") {
    SimulationConfig config;
    config.n_assets = 3;
    config.n_obs = 50;
    config.sigma = ConstantSigma{Eigen::MatrixXd::Identity(3, 3)};
    config.innovation = StudentInnovations{5.0};
    config.seed = 47;
    const ReturnPanel panel = simulate_dgp(config);

    // emit prices exactly like the simulate command does
    Eigen::MatrixXd prices(51, 3);
    prices.row(0).setOnes();
    Eigen::RowVectorXd x = Eigen::RowVectorXd::Zero(3);
    for (Eigen::Index t = 0; t < 50; ++t) {
        x += panel.returns.row(t);
        prices.row(t + 1) = x.array().exp();
    }
    std::vector<std::string> dates;
    dates.push_back("2000-01-02");
    dates.insert(dates.end(), panel.dates.begin(), panel.dates.end());

    auto path = test_dir() / "roundtrip.csv";
    write_price_panel(path, prices, dates, panel.labels,
                      std::vector<ColumnMapping>(3));
    const ReturnPanel loaded = load_return_panel(path, read_sidecar_schema(path));
    CHECK(loaded.dates == panel.dates);
    CHECK(loaded.labels == panel.labels);
    CHECK((loaded.returns - panel.returns).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sidecar schema declares interest-rate columns") {
    auto csv = write_file("sidecar.csv",
                          "date,FX,IR\n"
                          "2001-01-01,1.0,0.05\n"
                          "2001-01-02,1.1,0.06\n");
    write_file("sidecar.csv.meta.json",
               R"({"columns": {"IR": {"asset_class": "interest_rate", "r0": 0.03}}})");
    CsvSchema schema = read_sidecar_schema(csv);
    CHECK(schema.columns.at("IR").asset_class == AssetClass::InterestRate);
    CHECK(schema.columns.at("IR").r0 == 0.03);
    PricePanel panel = load_price_csv(csv, schema);
    CHECK(panel.columns[0].asset_class == AssetClass::LogPrice);
    CHECK(panel.columns[1].asset_class == AssetClass::InterestRate);
    Eigen::MatrixXd x = map_prices(panel);
    CHECK(x(0, 1) == doctest::Approx(std::log(1.0 + 0.05 / 0.03)).epsilon(1e-14));
}
