#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mvarch/diagnostics.hpp"
#include "mvarch/ingest.hpp"
#include "mvarch/residuals.hpp"

namespace mvarch {

/// Formats a double with 17 significant digits, enough for a bit-exact
/// round trip through text.
std::string format_double(double v);

/// Parses exactly what format_double wrote.
double parse_double_strict(const std::string& s);

/// Labeled matrix as CSV: header row of column labels, one row label per line.
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& row_labels,
                      const std::vector<std::string>& col_labels);

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path,
                                std::vector<std::string>* row_labels = nullptr,
                                std::vector<std::string>* col_labels = nullptr);

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);

/// Generic `date,LABEL1,...` table (returns, residuals, prices).
void write_panel_csv(const std::filesystem::path& path, const Eigen::MatrixXd& values,
                     const std::vector<std::string>& dates,
                     const std::vector<std::string>& labels);

struct PanelData {
    Eigen::MatrixXd values;
    std::vector<std::string> dates;
    std::vector<std::string> labels;
};
PanelData read_panel_csv(const std::filesystem::path& path);

/// Price CSV plus its `<path>.meta.json` sidecar declaring per-column
/// asset classes, in the format load_price_csv/read_sidecar_schema expect.
void write_price_panel(const std::filesystem::path& path, const Eigen::MatrixXd& prices,
                       const std::vector<std::string>& dates,
                       const std::vector<std::string>& labels,
                       const std::vector<ColumnMapping>& columns);

/// Residual CSV plus a `<path>.meta.json` sidecar with the run configuration.
void write_residual_panel(const std::filesystem::path& path, const ResidualPanel& panel);

/// Spectrum as `rank,eigenvalue` CSV (rank is 1-based, descending eigenvalues).
void write_spectrum_csv(const std::filesystem::path& path, const Eigen::VectorXd& spectrum);

nlohmann::json kernel_to_json(const WeightKernel& kernel);
nlohmann::json scheme_to_json(const InverseScheme& scheme);
nlohmann::json residual_config_to_json(const ResidualConfig& config);
nlohmann::json band_to_json(const McBand& band);
McBand band_from_json(const nlohmann::json& j);
nlohmann::json quality_to_json(const QualitySummary& q);
nlohmann::json report_to_json(const WhiteningReport& report);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace mvarch
