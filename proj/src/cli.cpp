#include "mvarch/cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "mvarch/diagnostics.hpp"
#include "mvarch/errors.hpp"
#include "mvarch/ingest.hpp"
#include "mvarch/io.hpp"
#include "mvarch/parallel.hpp"
#include "mvarch/simulate.hpp"
#include "mvarch/spectral.hpp"

namespace mvarch {

namespace {

std::string format_param(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

void validate_grid(const std::vector<double>& grid, const std::string& name) {
    if (grid.empty()) throw std::invalid_argument(name + " grid must not be empty");
    for (double v : grid)
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument(name + " grid values must lie in [0,1]");
}

InnovationDist make_innovation(const RunConfig& config) {
    if (config.dist == "student") return StudentInnovations{config.dof};
    if (config.dist == "gaussian") return GaussianInnovations{};
    throw std::invalid_argument("unknown distribution '" + config.dist + "'");
}

/// Wraps a command body: any exception becomes a JSON error record in out_dir
/// plus a nonzero exit code.
int guarded(const RunConfig& config, const std::function<int()>& body) {
    try {
        return body();
    } catch (const std::exception& e) {
        try {
            write_json(config.out_dir / "error.json", nlohmann::json{{"error", e.what()}});
        } catch (...) {
        }
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

ReturnPanel load_input(const RunConfig& config) {
    if (config.input.empty()) throw std::invalid_argument("--input is required");
    CsvSchema schema = read_sidecar_schema(config.input, config.lenient);
    const PricePanel prices = load_price_csv(config.input, schema);
    if (!prices.gap_report.empty()) {
        nlohmann::json gaps = nlohmann::json::array();
        for (const GapFill& gap : prices.gap_report)
            gaps.push_back({{"date", gap.date}, {"label", gap.label},
                            {"row", gap.row}, {"column", gap.col}});
        write_json(config.out_dir / "gaps.json", nlohmann::json{{"forward_filled", gaps}});
    }
    return returns_from_mapped(map_prices(prices), prices.dates, prices.labels);
}

struct CorrExport {
    const char* short_name;
    const Eigen::MatrixXd* matrix;
};

std::vector<CorrExport> corr_exports(const CorrelationSet& set) {
    return {{"rr", &set.rr},         {"r2r2", &set.r2r2}, {"rr2", &set.rr2},
            {"lr_r", &set.lr_r},     {"lr2_r2", &set.lr2_r2}, {"lr_r2", &set.lr_r2},
            {"lr2_r", &set.lr2_r}};
}

void write_correlations(const std::filesystem::path& dir, const std::string& tag,
                        const CorrelationSet& set, const std::vector<std::string>& labels,
                        std::vector<std::string>& files) {
    for (const auto& [short_name, matrix] : corr_exports(set)) {
        const std::string name = "corr_" + std::string(short_name) + "_" + tag + ".csv";
        write_matrix_csv(dir / name, *matrix, labels, labels);
        files.push_back(name);
    }
}

Eigen::MatrixXd parse_sigma_spec(const std::string& spec, Eigen::Index n) {
    if (spec == "identity") return Eigen::MatrixXd::Identity(n, n);
    if (spec.rfind("equicorr=", 0) == 0) {
        const double rho = parse_double_strict(spec.substr(9));
        if (!(rho > -1.0 && rho < 1.0))
            throw std::invalid_argument("equicorr rho must be in (-1,1)");
        Eigen::MatrixXd sigma = Eigen::MatrixXd::Constant(n, n, rho);
        sigma.diagonal().setOnes();
        return sigma;
    }
    Eigen::MatrixXd sigma = read_matrix_csv(spec);
    if (sigma.rows() != n || sigma.cols() != n)
        throw std::invalid_argument("sigma matrix in '" + spec + "' is not " +
                                    std::to_string(n) + "x" + std::to_string(n));
    return sigma;
}

}  // namespace

WeightKernel make_kernel(const RunConfig& config) {
    if (config.kernel == "equal") return equal_weights(config.i_max);
    if (config.kernel == "exp") return exponential_weights(config.i_max, config.mu);
    if (config.kernel == "lm")
        return long_memory_weights(config.i_max, config.tau0, config.lm_config);
    throw std::invalid_argument("unknown kernel '" + config.kernel + "'");
}

InverseScheme make_scheme(const RunConfig& config) {
    if (config.scheme == "full") return FullInverse{config.relative_floor, config.absolute_floor};
    if (config.scheme == "projected") {
        if (config.k < 1) throw std::invalid_argument("--k is required for the projected scheme");
        return ProjectedInverse{config.k};
    }
    if (config.scheme == "fullrank") {
        if (config.k < 1) throw std::invalid_argument("--k is required for the fullrank scheme");
        return FullRankInverse{config.k};
    }
    throw std::invalid_argument("unknown scheme '" + config.scheme + "'");
}

int cmd_analyze(const RunConfig& config) {
    return guarded(config, [&]() -> int {
        validate_grid(config.gamma_grid, "gamma");
        validate_grid(config.xi_grid, "xi");
        const ReturnPanel panel = load_input(config);
        const WeightKernel kernel = make_kernel(config);
        const InverseScheme scheme = make_scheme(config);

        const Eigen::Index i_max = kernel.i_max();
        if (panel.n_obs() < i_max + 2)
            throw WindowTooShortError(static_cast<std::size_t>(i_max) + 2,
                                      static_cast<std::size_t>(panel.n_obs()));
        const Eigen::Index n_res = panel.n_obs() - i_max - 1;
        if (n_res < 3)
            throw std::invalid_argument("analysis window too short for diagnostics");

        nlohmann::json manifest;
        manifest["command"] = "analyze";
        manifest["kernel"] = kernel_to_json(kernel);
        manifest["scheme"] = scheme_to_json(scheme);
        manifest["seed"] = config.seed;
        // plotting hint: on a log axis, xi = 0 is conventionally drawn at 1e-5
        manifest["xi_zero_log_position"] = 1e-5;

        // Returns baseline over the same analysis window as the residuals.
        const Eigen::MatrixXd window = panel.returns.bottomRows(n_res);
        WhiteningReport baseline = whitening_report(window, panel.labels, "returns");
        std::vector<std::string> baseline_files;
        write_correlations(config.out_dir, "returns", baseline.correlations, panel.labels,
                           baseline_files);

        // White-noise band for the panel's (N, T').
        const McBand band = mc_confidence_band(
            static_cast<int>(panel.n_assets()), static_cast<int>(n_res), config.mc_reps,
            StudentInnovations{config.dof}, {config.q_low, config.q_high}, config.seed,
            config.threads);
        write_json(config.out_dir / "mc_band.json", band_to_json(band));
        baseline.band = band;
        write_json(config.out_dir / "report_returns.json", report_to_json(baseline));
        baseline_files.push_back("report_returns.json");
        manifest["baseline"] = baseline_files;
        manifest["mc_band"] = "mc_band.json";

        bool all_ok = true;
        nlohmann::json points = nlohmann::json::array();
        for (double gamma : config.gamma_grid) {
            for (double xi : config.xi_grid) {
                const std::string tag = "g" + format_param(gamma) + "_x" + format_param(xi);
                nlohmann::json point;
                point["gamma"] = gamma;
                point["xi"] = xi;
                try {
                    ResidualConfig rc{kernel, gamma, xi, scheme, config.trace_rescale};
                    const ResidualRun run = compute_residuals_run(panel, rc, config.threads);

                    std::vector<std::string> files;
                    const std::string res_name = "residuals_" + tag + ".csv";
                    write_residual_panel(config.out_dir / res_name, run.panel);
                    files.push_back(res_name);

                    WhiteningReport report =
                        whitening_report(run.panel.residuals, panel.labels,
                                         kernel.id() + ",gamma=" + format_param(gamma) +
                                             ",xi=" + format_param(xi) + "," + scheme_id(scheme));
                    report.band = band;
                    const std::string report_name = "report_" + tag + ".json";
                    write_json(config.out_dir / report_name, report_to_json(report));
                    files.push_back(report_name);

                    write_correlations(config.out_dir, tag, report.correlations, panel.labels,
                                       files);

                    const std::string spec_name = "spectrum_" + tag + ".csv";
                    write_spectrum_csv(config.out_dir / spec_name, run.mean_spectrum);
                    files.push_back(spec_name);

                    point["status"] = "ok";
                    point["files"] = files;
                } catch (const std::exception& e) {
                    all_ok = false;
                    point["status"] = "failed";
                    point["error"] = e.what();
                }
                points.push_back(std::move(point));
            }
        }
        manifest["grid_points"] = points;
        write_json(config.out_dir / "manifest.json", manifest);
        return all_ok ? 0 : 1;
    });
}

namespace {

nlohmann::json summary_column(const QualitySummary& q) {
    return quality_to_json(q);
}

const std::array<const char*, 8> kTableMeasures = {
    "q_rr", "q_r2r2", "q_rr2", "q_lr_r", "q_lr2_r", "q_lr_r2", "q_lr2_r2", "q_unit_variance"};

std::string table_cell(const nlohmann::json& column, const std::string& measure) {
    if (!column.contains(measure) || column.at(measure).is_null()) return "";
    return format_double(column.at(measure).get<double>());
}

}  // namespace

int cmd_compare_kernels(const RunConfig& config) {
    return guarded(config, [&]() -> int {
        const ReturnPanel panel = load_input(config);
        const InverseScheme scheme = make_scheme(config);
        const Eigen::Index i_max = config.i_max;
        if (panel.n_obs() < i_max + 2)
            throw WindowTooShortError(static_cast<std::size_t>(i_max) + 2,
                                      static_cast<std::size_t>(panel.n_obs()));
        const Eigen::Index n_res = panel.n_obs() - i_max - 1;

        struct Column {
            std::string name;
            WeightKernel kernel;
            double gamma;
            double xi;
        };
        const std::vector<Column> columns = {
            {"equal_weights", equal_weights(config.i_max), 0.0, config.base_xi},
            {"exponential", exponential_weights(config.i_max, config.mu), 0.0, config.base_xi},
            {"long_memory", long_memory_weights(config.i_max, config.tau0, config.lm_config),
             0.0, config.base_xi},
            {"lm_regularized",
             long_memory_weights(config.i_max, config.tau0, config.lm_config),
             config.compare_gamma, config.compare_xi},
        };

        nlohmann::json result;
        result["command"] = "compare-kernels";
        result["i_max"] = config.i_max;
        result["mu"] = config.mu;
        result["tau0"] = config.tau0;
        result["compare_gamma"] = config.compare_gamma;
        result["compare_xi"] = config.compare_xi;
        result["base_xi"] = config.base_xi;
        result["seed"] = config.seed;

        const Eigen::MatrixXd window = panel.returns.bottomRows(n_res);
        nlohmann::json cols;
        cols["returns"] = summary_column(quality_summary(window));
        // Table convention: the unit-variance row is meaningless for raw returns.
        cols["returns"].erase("q_unit_variance");
        cols["returns"].erase("mean_residual_variance");

        for (const auto& column : columns) {
            const ResidualPanel res = compute_residuals(panel, column.kernel, column.gamma,
                                                        column.xi, scheme,
                                                        config.trace_rescale, config.threads);
            cols[column.name] = summary_column(quality_summary(res.residuals));
        }

        const McBand band = mc_confidence_band(
            static_cast<int>(panel.n_assets()), static_cast<int>(n_res), config.mc_reps,
            StudentInnovations{config.dof}, {config.q_low, config.q_high}, config.seed,
            config.threads);
        nlohmann::json white;
        for (const auto& [name, b] : band.measures) white[name] = b.mean;
        cols["white_noise"] = white;
        result["columns"] = cols;
        write_json(config.out_dir / "kernel_comparison.json", result);

        const std::array<const char*, 6> order = {"returns",     "equal_weights", "exponential",
                                                  "long_memory", "lm_regularized", "white_noise"};
        std::ofstream csv(config.out_dir / "kernel_comparison.csv");
        csv << "measure";
        for (const auto* col : order) csv << ',' << col;
        csv << '\n';
        for (const auto* measure : kTableMeasures) {
            csv << measure;
            for (const auto* col : order) csv << ',' << table_cell(cols[col], measure);
            csv << '\n';
        }
        return 0;
    });
}

int cmd_scheme_compare(const RunConfig& config) {
    return guarded(config, [&]() -> int {
        validate_grid(config.xi_grid, "xi");
        validate_grid(config.sc_gammas, "gamma");
        const ReturnPanel panel = load_input(config);
        const WeightKernel kernel = make_kernel(config);
        const Eigen::Index i_max = kernel.i_max();
        const Eigen::Index N = panel.n_assets();
        if (panel.n_obs() < i_max + 2)
            throw WindowTooShortError(static_cast<std::size_t>(i_max) + 2,
                                      static_cast<std::size_t>(panel.n_obs()));
        const Eigen::Index n_res = panel.n_obs() - i_max - 1;
        if (n_res < 3)
            throw std::invalid_argument("analysis window too short for diagnostics");

        // Pass 1: gamma = xi = 0. One decomposition per date serves the mean
        // spectrum and every cut-off rank of both schemes. The default grid
        // spreads over ranks both schemes can support: the window caps the
        // spectrum rank at min(N, i_max + 1) and the full-rank tail needs
        // e_{k+1} > 0, hence k <= rank - 1.
        Eigen::MatrixXd spectra(n_res, N);
        std::vector<Eigen::Index> ks = config.k_grid;
        if (ks.empty()) {
            const Eigen::Index cap = std::min(N - 1, std::min(N, i_max + 1) - 1);
            const auto expected_rank = static_cast<double>(std::min(N, i_max + 1));
            for (double f : {0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}) {
                auto k = static_cast<Eigen::Index>(std::lround(f * expected_rank));
                k = std::min(k, cap);
                if (k >= 1 && (ks.empty() || ks.back() != k)) ks.push_back(k);
            }
            if (ks.empty() && N > 1) ks.push_back(1);
        }
        for (Eigen::Index k : ks)
            if (k < 1 || k >= N)
                throw std::invalid_argument("k grid values must lie in [1, N)");

        std::vector<Eigen::MatrixXd> proj_res(ks.size(), Eigen::MatrixXd(n_res, N));
        std::vector<Eigen::MatrixXd> fr_res(ks.size(), Eigen::MatrixXd(n_res, N));
        std::vector<std::atomic<bool>> proj_failed(ks.size()), fr_failed(ks.size());
        for (std::size_t ki = 0; ki < ks.size(); ++ki) {
            proj_failed[ki] = false;
            fr_failed[ki] = false;
        }

        parallel_for(
            static_cast<std::size_t>(n_res),
            [&](std::size_t idx) {
                const Eigen::Index t = i_max + static_cast<Eigen::Index>(idx);
                const CovarianceEstimate cov = effective_covariance(panel, t, kernel, 0.0, 0.0);
                const SpectralDecomposition dec = eig_sym(cov.matrix);
                spectra.row(static_cast<Eigen::Index>(idx)) = dec.eigenvalues.transpose();
                const Eigen::VectorXd r_next = panel.returns.row(t + 1).transpose();
                for (std::size_t ki = 0; ki < ks.size(); ++ki) {
                    if (!proj_failed[ki]) {
                        try {
                            proj_res[ki].row(static_cast<Eigen::Index>(idx)) =
                                (inverse_sqrt_projected(dec, ks[ki]) * r_next).transpose();
                        } catch (const std::exception&) {
                            proj_failed[ki] = true;
                        }
                    }
                    if (!fr_failed[ki]) {
                        try {
                            fr_res[ki].row(static_cast<Eigen::Index>(idx)) =
                                (inverse_sqrt_fullrank(dec, ks[ki]) * r_next).transpose();
                        } catch (const std::exception&) {
                            fr_failed[ki] = true;
                        }
                    }
                }
            },
            config.threads);

        const Eigen::VectorXd mean_spectrum = spectra.colwise().mean().transpose();
        const double mean_var = mean_spectrum.sum() / static_cast<double>(N);
        Eigen::Index rank = 0;
        for (Eigen::Index a = 0; a < N; ++a)
            if (mean_spectrum(a) > 1e-10 * mean_var) ++rank;

        write_spectrum_csv(config.out_dir / "mean_spectrum.csv", mean_spectrum);

        std::ofstream csv(config.out_dir / "scheme_curves.csv");
        csv << "scheme,gamma,xi,k,q_rr,q_unit_variance\n";
        auto emit = [&](const std::string& scheme, double gamma, std::optional<double> xi,
                        Eigen::Index k, const Eigen::MatrixXd& res) {
            const QualitySummary q = quality_summary(res);
            csv << scheme << ',' << format_param(gamma) << ','
                << (xi ? format_param(*xi) : std::string()) << ',' << k << ','
                << (q.q_rr ? format_double(*q.q_rr) : std::string()) << ','
                << format_double(q.q_unit_variance) << '\n';
        };

        for (std::size_t ki = 0; ki < ks.size(); ++ki) {
            if (!proj_failed[ki]) emit("projected", 0.0, std::nullopt, ks[ki], proj_res[ki]);
            if (!fr_failed[ki]) emit("fullrank", 0.0, std::nullopt, ks[ki], fr_res[ki]);
        }

        // Pass 2: regularized covariance; xi mapped to the equivalent rank
        // k(xi) = #{ mean-spectrum eigenvalues > xi * <sigma^2> }.
        for (double gamma : config.sc_gammas) {
            for (double xi : config.xi_grid) {
                const ResidualPanel res = compute_residuals(
                    panel, kernel, gamma, xi,
                    FullInverse{config.relative_floor, config.absolute_floor},
                    config.trace_rescale, config.threads);
                Eigen::Index k_equiv = 0;
                for (Eigen::Index a = 0; a < N; ++a)
                    if (mean_spectrum(a) > xi * mean_var) ++k_equiv;
                emit("regularized", gamma, xi, k_equiv, res.residuals);
            }
        }

        nlohmann::json meta;
        meta["command"] = "scheme-compare";
        meta["kernel"] = kernel_to_json(kernel);
        meta["spectrum_rank"] = rank;
        meta["mean_variance"] = mean_var;
        // Practical guidance from the quality-vs-rank curves: cut-offs around
        // 30% to 60% of the spectrum rank tend to score well.
        meta["rule_of_thumb_k"] = {
            {"low", static_cast<Eigen::Index>(std::lround(0.3 * static_cast<double>(rank)))},
            {"high", static_cast<Eigen::Index>(std::lround(0.6 * static_cast<double>(rank)))}};
        meta["k_grid"] = ks;
        nlohmann::json failed = nlohmann::json::array();
        for (std::size_t ki = 0; ki < ks.size(); ++ki) {
            if (proj_failed[ki]) failed.push_back({{"scheme", "projected"}, {"k", ks[ki]}});
            if (fr_failed[ki]) failed.push_back({{"scheme", "fullrank"}, {"k", ks[ki]}});
        }
        meta["failed"] = failed;
        write_json(config.out_dir / "scheme_metadata.json", meta);
        return failed.empty() ? 0 : 1;
    });
}

int cmd_simulate(const RunConfig& config) {
    return guarded(config, [&]() -> int {
        SimulationConfig sim;
        sim.n_assets = config.sim_assets;
        sim.n_obs = config.sim_obs;
        sim.innovation = make_innovation(config);
        sim.seed = config.seed;
        if (config.dynamic) {
            DynamicSigma dyn{make_kernel(config), config.sim_gamma, config.sim_xi, std::nullopt};
            if (config.sigma_spec != "identity")
                dyn.initial_sigma = parse_sigma_spec(config.sigma_spec, config.sim_assets);
            sim.sigma = dyn;
        } else {
            sim.sigma = ConstantSigma{parse_sigma_spec(config.sigma_spec, config.sim_assets)};
        }

        const ReturnPanel panel = simulate_dgp(sim);

        // Price levels x(t) = cumulative return with x = 0 one day before the
        // first return row, so ingest recovers the panel exactly.
        const Eigen::Index T = panel.n_obs();
        const Eigen::Index N = panel.n_assets();
        Eigen::MatrixXd prices(T + 1, N);
        prices.row(0).setOnes();
        Eigen::RowVectorXd x = Eigen::RowVectorXd::Zero(N);
        for (Eigen::Index t = 0; t < T; ++t) {
            x += panel.returns.row(t);
            prices.row(t + 1) = x.array().exp();
        }
        std::vector<std::string> price_dates;
        price_dates.reserve(static_cast<std::size_t>(T) + 1);
        price_dates.push_back("2000-01-02");
        price_dates.insert(price_dates.end(), panel.dates.begin(), panel.dates.end());

        write_price_panel(config.out_dir / "panel.csv", prices, price_dates, panel.labels,
                          std::vector<ColumnMapping>(static_cast<std::size_t>(N)));

        nlohmann::json meta;
        meta["command"] = "simulate";
        meta["n_assets"] = N;
        meta["n_obs"] = T;
        meta["innovation"] = innovation_id(sim.innovation);
        meta["seed"] = config.seed;
        meta["dynamic"] = config.dynamic;
        if (config.dynamic) {
            meta["gamma"] = config.sim_gamma;
            meta["xi"] = config.sim_xi;
            meta["kernel"] = kernel_to_json(std::get<DynamicSigma>(sim.sigma).kernel);
        }
        meta["sigma"] = config.sigma_spec;
        write_json(config.out_dir / "simulation.json", meta);
        return 0;
    });
}

int cmd_mc_band(const RunConfig& config) {
    return guarded(config, [&]() -> int {
        const McBand band = mc_confidence_band(
            config.band_assets, config.band_obs, config.mc_reps, make_innovation(config),
            {config.q_low, config.q_high}, config.seed, config.threads);
        write_json(config.out_dir / "mc_band.json", band_to_json(band));
        return 0;
    });
}

}  // namespace mvarch
