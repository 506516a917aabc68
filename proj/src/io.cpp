#include "mvarch/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

#include "mvarch/errors.hpp"

namespace mvarch {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, ptr);
}

double parse_double_strict(const std::string& s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::invalid_argument("not a number: '" + s + "'");
    return v;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        if (!field.empty() && field.back() == '\r') field.pop_back();
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path.string());
    return in;
}

}  // namespace

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& row_labels,
                      const std::vector<std::string>& col_labels) {
    auto out = open_out(path);
    out << "";
    for (const auto& label : col_labels) out << ',' << label;
    out << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out << row_labels[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << format_double(m(i, j));
        out << '\n';
    }
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path,
                                std::vector<std::string>* row_labels,
                                std::vector<std::string>* col_labels) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path.string(), 1, "empty file");
    auto header = split_line(line);
    const std::size_t n_cols = header.size() - 1;
    if (col_labels) col_labels->assign(header.begin() + 1, header.end());

    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split_line(line);
        if (fields.size() != n_cols + 1)
            throw ParseError(path.string(), line_no, "field count mismatch");
        if (row_labels) row_labels->push_back(fields[0]);
        std::vector<double> row(n_cols);
        for (std::size_t j = 0; j < n_cols; ++j) row[j] = parse_double_strict(fields[j + 1]);
        rows.push_back(std::move(row));
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n_cols));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < n_cols; ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
    const auto n_rows = static_cast<Eigen::Index>(j.size());
    const auto n_cols = n_rows > 0 ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
    Eigen::MatrixXd m(n_rows, n_cols);
    for (Eigen::Index i = 0; i < n_rows; ++i)
        for (Eigen::Index c = 0; c < n_cols; ++c)
            m(i, c) = j.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(c)).get<double>();
    return m;
}

void write_panel_csv(const std::filesystem::path& path, const Eigen::MatrixXd& values,
                     const std::vector<std::string>& dates,
                     const std::vector<std::string>& labels) {
    auto out = open_out(path);
    out << "date";
    for (const auto& label : labels) out << ',' << label;
    out << '\n';
    for (Eigen::Index t = 0; t < values.rows(); ++t) {
        out << dates[static_cast<std::size_t>(t)];
        for (Eigen::Index c = 0; c < values.cols(); ++c) out << ',' << format_double(values(t, c));
        out << '\n';
    }
}

PanelData read_panel_csv(const std::filesystem::path& path) {
    PanelData data;
    std::vector<std::string> row_labels;
    data.values = read_matrix_csv(path, &row_labels, &data.labels);
    data.dates = std::move(row_labels);
    return data;
}

void write_price_panel(const std::filesystem::path& path, const Eigen::MatrixXd& prices,
                       const std::vector<std::string>& dates,
                       const std::vector<std::string>& labels,
                       const std::vector<ColumnMapping>& columns) {
    write_panel_csv(path, prices, dates, labels);
    nlohmann::json cols = nlohmann::json::object();
    for (std::size_t c = 0; c < labels.size(); ++c) {
        const ColumnMapping& mapping = columns[c];
        nlohmann::json spec;
        spec["asset_class"] =
            mapping.asset_class == AssetClass::LogPrice ? "log_price" : "interest_rate";
        if (mapping.asset_class == AssetClass::InterestRate) spec["r0"] = mapping.r0;
        cols[labels[c]] = spec;
    }
    write_json(path.string() + ".meta.json", nlohmann::json{{"columns", cols}});
}

void write_residual_panel(const std::filesystem::path& path, const ResidualPanel& panel) {
    write_panel_csv(path, panel.residuals, panel.dates, panel.labels);
    write_json(path.string() + ".meta.json", residual_config_to_json(panel.config));
}

void write_spectrum_csv(const std::filesystem::path& path, const Eigen::VectorXd& spectrum) {
    auto out = open_out(path);
    out << "rank,eigenvalue\n";
    for (Eigen::Index a = 0; a < spectrum.size(); ++a)
        out << (a + 1) << ',' << format_double(spectrum(a)) << '\n';
}

nlohmann::json kernel_to_json(const WeightKernel& kernel) {
    nlohmann::json j;
    switch (kernel.shape()) {
        case KernelShape::EqualWeights: j["shape"] = "equal"; break;
        case KernelShape::Exponential: j["shape"] = "exponential"; break;
        case KernelShape::LongMemory: j["shape"] = "long_memory"; break;
        case KernelShape::Custom: j["shape"] = "custom"; break;
    }
    j["i_max"] = kernel.i_max();
    j["id"] = kernel.id();
    return j;
}

nlohmann::json scheme_to_json(const InverseScheme& scheme) {
    nlohmann::json j;
    if (const auto* full = std::get_if<FullInverse>(&scheme)) {
        j["type"] = "full";
        j["relative_floor"] = full->relative_floor;
        if (full->absolute_floor) j["absolute_floor"] = *full->absolute_floor;
    } else if (const auto* proj = std::get_if<ProjectedInverse>(&scheme)) {
        j["type"] = "projected";
        j["rank"] = proj->rank;
    } else {
        j["type"] = "fullrank";
        j["rank"] = std::get<FullRankInverse>(scheme).rank;
    }
    return j;
}

nlohmann::json residual_config_to_json(const ResidualConfig& config) {
    nlohmann::json j;
    j["kernel"] = kernel_to_json(config.kernel);
    j["gamma"] = config.gamma;
    j["xi"] = config.xi;
    j["scheme"] = scheme_to_json(config.scheme);
    j["trace_rescale"] = config.trace_rescale;
    j["warmup"] = config.kernel.i_max();
    return j;
}

nlohmann::json band_to_json(const McBand& band) {
    nlohmann::json j;
    j["n_assets"] = band.n_assets;
    j["n_obs"] = band.n_obs;
    j["n_rep"] = band.n_rep;
    j["innovation"] = innovation_id(band.innovation);
    j["quantile_low"] = band.quantiles.first;
    j["quantile_high"] = band.quantiles.second;
    j["seed"] = band.seed;
    nlohmann::json measures = nlohmann::json::object();
    for (const auto& [name, b] : band.measures)
        measures[name] = {{"low", b.low}, {"high", b.high}, {"mean", b.mean}};
    j["measures"] = measures;
    return j;
}

McBand band_from_json(const nlohmann::json& j) {
    McBand band;
    band.n_assets = j.at("n_assets").get<int>();
    band.n_obs = j.at("n_obs").get<int>();
    band.n_rep = j.at("n_rep").get<int>();
    band.quantiles = {j.at("quantile_low").get<double>(), j.at("quantile_high").get<double>()};
    band.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& [name, b] : j.at("measures").items())
        band.measures[name] = Band{b.at("low").get<double>(), b.at("high").get<double>(),
                                   b.at("mean").get<double>()};
    return band;
}

nlohmann::json quality_to_json(const QualitySummary& q) {
    nlohmann::json j;
    j["q_rr"] = q.q_rr ? nlohmann::json(*q.q_rr) : nlohmann::json(nullptr);
    j["q_r2r2"] = q.q_r2r2 ? nlohmann::json(*q.q_r2r2) : nlohmann::json(nullptr);
    j["q_rr2"] = q.q_rr2;
    j["q_lr_r"] = q.q_lr_r;
    j["q_lr2_r"] = q.q_lr2_r;
    j["q_lr_r2"] = q.q_lr_r2;
    j["q_lr2_r2"] = q.q_lr2_r2;
    j["q_unit_variance"] = q.q_unit_variance;
    j["mean_residual_variance"] = q.mean_residual_variance;
    return j;
}

nlohmann::json report_to_json(const WhiteningReport& report) {
    nlohmann::json j;
    j["config"] = report.config_id;
    j["labels"] = report.labels;
    j["quality"] = quality_to_json(report.quality);
    if (report.band) j["mc_band"] = band_to_json(*report.band);
    return j;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

nlohmann::json read_json(const std::filesystem::path& path) {
    auto in = open_in(path);
    nlohmann::json j;
    in >> j;
    return j;
}

}  // namespace mvarch
