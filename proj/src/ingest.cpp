#include "mvarch/ingest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mvarch/errors.hpp"

namespace mvarch {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

bool parse_double(const std::string& s, double& out) {
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    while (ptr < end && (*ptr == ' ' || *ptr == '\t' || *ptr == '\r')) ++ptr;
    return ec == std::errc() && ptr == end;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

}  // namespace

PricePanel load_price_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), 0, "cannot open file");

    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) throw ParseError(path.string(), 1, "empty file");
    ++line_no;
    auto header = split_csv_line(line);
    if (header.size() < 2) throw ParseError(path.string(), line_no, "need a date column and at least one asset");

    PricePanel panel;
    for (std::size_t i = 1; i < header.size(); ++i) {
        const std::string label = trim(header[i]);
        if (label.empty()) throw ParseError(path.string(), line_no, "empty asset label");
        panel.labels.push_back(label);
    }
    const Eigen::Index n_assets = static_cast<Eigen::Index>(panel.labels.size());

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw ParseError(path.string(), line_no,
                             "expected " + std::to_string(header.size()) + " fields, got " +
                                 std::to_string(fields.size()));
        const std::string date = trim(fields[0]);
        if (date.empty()) throw ParseError(path.string(), line_no, "missing date");
        if (!panel.dates.empty() && !(panel.dates.back() < date))
            throw OrderingError(path.string() + ":" + std::to_string(line_no) +
                                ": dates not strictly ascending (" + date + ")");

        std::vector<double> row(static_cast<std::size_t>(n_assets));
        for (Eigen::Index c = 0; c < n_assets; ++c) {
            const std::string cell = trim(fields[static_cast<std::size_t>(c) + 1]);
            if (cell.empty()) {
                if (!schema.lenient)
                    throw ParseError(path.string(), line_no,
                                     "missing value for " + panel.labels[static_cast<std::size_t>(c)] +
                                         " on " + date);
                if (rows.empty())
                    throw ParseError(path.string(), line_no,
                                     "missing value in first row cannot be forward-filled");
                row[static_cast<std::size_t>(c)] = rows.back()[static_cast<std::size_t>(c)];
                panel.gap_report.push_back({static_cast<Eigen::Index>(rows.size()), c, date,
                                            panel.labels[static_cast<std::size_t>(c)]});
            } else if (!parse_double(cell, row[static_cast<std::size_t>(c)])) {
                throw ParseError(path.string(), line_no, "not a number: '" + cell + "'");
            }
        }
        panel.dates.push_back(date);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(path.string(), line_no, "no data rows");

    panel.prices.resize(static_cast<Eigen::Index>(rows.size()), n_assets);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (Eigen::Index c = 0; c < n_assets; ++c)
            panel.prices(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];

    panel.columns.resize(static_cast<std::size_t>(n_assets));
    for (Eigen::Index c = 0; c < n_assets; ++c) {
        auto it = schema.columns.find(panel.labels[static_cast<std::size_t>(c)]);
        if (it != schema.columns.end()) panel.columns[static_cast<std::size_t>(c)] = it->second;
    }
    return panel;
}

Eigen::MatrixXd map_prices(const PricePanel& panel) {
    Eigen::MatrixXd x(panel.n_obs(), panel.n_assets());
    for (Eigen::Index c = 0; c < panel.n_assets(); ++c) {
        const ColumnMapping& mapping = panel.columns[static_cast<std::size_t>(c)];
        for (Eigen::Index t = 0; t < panel.n_obs(); ++t) {
            const double v = panel.prices(t, c);
            if (mapping.asset_class == AssetClass::LogPrice) {
                if (!(v > 0.0))
                    throw MappingError(panel.dates[static_cast<std::size_t>(t)],
                                       panel.labels[static_cast<std::size_t>(c)], v);
                x(t, c) = std::log(v);
            } else {
                const double arg = 1.0 + v / mapping.r0;
                if (!(arg > 0.0))
                    throw MappingError(panel.dates[static_cast<std::size_t>(t)],
                                       panel.labels[static_cast<std::size_t>(c)], v);
                x(t, c) = std::log(arg);
            }
        }
    }
    return x;
}

ReturnPanel returns_from_mapped(const Eigen::MatrixXd& x, const std::vector<std::string>& dates,
                                const std::vector<std::string>& labels) {
    if (x.rows() < 2) throw std::invalid_argument("returns_from_mapped: need at least 2 rows");
    if (static_cast<Eigen::Index>(dates.size()) != x.rows())
        throw std::invalid_argument("returns_from_mapped: date index length mismatch");

    ReturnPanel panel;
    panel.returns = x.bottomRows(x.rows() - 1) - x.topRows(x.rows() - 1);
    panel.dates.assign(dates.begin() + 1, dates.end());
    panel.labels = labels;
    validate_panel(panel);
    return panel;
}

ReturnPanel load_return_panel(const std::filesystem::path& path, const CsvSchema& schema) {
    const PricePanel prices = load_price_csv(path, schema);
    return returns_from_mapped(map_prices(prices), prices.dates, prices.labels);
}

CsvSchema read_sidecar_schema(const std::filesystem::path& csv_path, bool lenient) {
    CsvSchema schema;
    schema.lenient = lenient;
    const std::filesystem::path sidecar = csv_path.string() + ".meta.json";
    if (!std::filesystem::exists(sidecar)) return schema;

    std::ifstream in(sidecar);
    nlohmann::json j;
    in >> j;
    const nlohmann::json columns = j.value("columns", nlohmann::json::object());
    for (const auto& [label, spec] : columns.items()) {
        ColumnMapping mapping;
        const std::string cls = spec.value("asset_class", "log_price");
        if (cls == "interest_rate")
            mapping.asset_class = AssetClass::InterestRate;
        else if (cls != "log_price")
            throw ParseError(sidecar.string(), 0, "unknown asset_class '" + cls + "'");
        mapping.r0 = spec.value("r0", 0.04);
        schema.columns[label] = mapping;
    }
    return schema;
}

}  // namespace mvarch
