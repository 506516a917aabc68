#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mvarch/panel.hpp"

namespace mvarch {

/// How a column's quotes map to the additive price x:
///   LogPrice:     x = ln(p)               (stocks, indexes, FX, commodities)
///   InterestRate: x = ln(1 + R/R0)        (rates at fixed time to maturity)
enum class AssetClass { LogPrice, InterestRate };

struct ColumnMapping {
    AssetClass asset_class = AssetClass::LogPrice;
    double r0 = 0.04;
};

/// Loader options. Missing cells fail the load in strict mode (default);
/// lenient mode forward-fills them and records each fill in the gap report.
struct CsvSchema {
    bool lenient = false;
    std::map<std::string, ColumnMapping> columns;  // by label; absent -> LogPrice
};

struct GapFill {
    Eigen::Index row = 0;
    Eigen::Index col = 0;
    std::string date;
    std::string label;
};

struct PricePanel {
    Eigen::MatrixXd prices;  // T x N, raw quotes (prices or rates)
    std::vector<std::string> dates;
    std::vector<std::string> labels;
    std::vector<ColumnMapping> columns;
    std::vector<GapFill> gap_report;

    Eigen::Index n_obs() const { return prices.rows(); }
    Eigen::Index n_assets() const { return prices.cols(); }
};

/// Reads `date,LABEL1,LABEL2,...` CSV with ISO-8601 dates in the first column.
/// Throws ParseError with the line number on malformed input and OrderingError
/// when dates are not strictly ascending.
PricePanel load_price_csv(const std::filesystem::path& path, const CsvSchema& schema = {});

/// Applies the per-column price mapping. Throws MappingError naming the cell
/// when the mapping is undefined (p <= 0, or 1 + R/R0 <= 0).
Eigen::MatrixXd map_prices(const PricePanel& panel);

/// Daily differences of the mapped prices: r(t) = x(t) - x(t-1), length T-1.
ReturnPanel returns_from_mapped(const Eigen::MatrixXd& x, const std::vector<std::string>& dates,
                                const std::vector<std::string>& labels);

/// load_price_csv + map_prices + returns_from_mapped.
ReturnPanel load_return_panel(const std::filesystem::path& path, const CsvSchema& schema = {});

/// Reads the `<path>.meta.json` sidecar (per-column asset_class and R0) into a
/// schema, if present.
CsvSchema read_sidecar_schema(const std::filesystem::path& csv_path, bool lenient = false);

}  // namespace mvarch
