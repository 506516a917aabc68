#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <memory>
#include <string>
#include <vector>

#include "mvarch/cli.hpp"

namespace {

/// JSON flavor of CLI11's config file support (the default formatter handles
/// TOML/INI). Top-level keys are subcommand names mapping to option objects.
class ConfigJson : public CLI::Config {
public:
    std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
        nlohmann::json j;
        for (const CLI::Option* opt : app->get_options({})) {
            if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
            const std::string& name = opt->get_lnames()[0];
            if (opt->get_type_size() != 0) {
                if (opt->count() == 1)
                    j[name] = opt->results().at(0);
                else if (opt->count() > 1)
                    j[name] = opt->results();
                else if (default_also && !opt->get_default_str().empty())
                    j[name] = opt->get_default_str();
            } else if (opt->count() > 0) {
                j[name] = opt->count() == 1 ? nlohmann::json(true) : nlohmann::json(opt->count());
            }
        }
        for (const CLI::App* sub : app->get_subcommands({}))
            j[sub->get_name()] = nlohmann::json::parse(to_config(sub, default_also, false, ""));
        return j.dump(2);
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        nlohmann::json j;
        input >> j;
        return walk(j, "", {});
    }

private:
    std::vector<CLI::ConfigItem> walk(const nlohmann::json& j, const std::string& name,
                                      std::vector<std::string> prefix) const {
        std::vector<CLI::ConfigItem> items;
        if (j.is_object()) {
            if (!name.empty()) prefix.push_back(name);
            for (auto it = j.cbegin(); it != j.cend(); ++it) {
                auto sub = walk(it.value(), it.key(), prefix);
                items.insert(items.end(), sub.begin(), sub.end());
            }
            return items;
        }
        if (name.empty())
            throw CLI::ConversionError("top-level JSON config values must be objects");
        items.emplace_back();
        CLI::ConfigItem& item = items.back();
        item.name = name;
        item.parents = std::move(prefix);
        if (j.is_array()) {
            for (const auto& v : j)
                item.inputs.push_back(v.is_string() ? v.get<std::string>() : v.dump());
        } else {
            item.inputs.push_back(j.is_string() ? j.get<std::string>() : j.dump());
        }
        return items;
    }
};

void add_io_options(CLI::App* cmd, mvarch::RunConfig& config, bool needs_input) {
    auto* input = cmd->add_option("--input", config.input, "price panel CSV (with optional .meta.json sidecar)");
    if (needs_input) input->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", config.out_dir, "output directory");
    cmd->add_flag("--lenient", config.lenient, "forward-fill missing cells instead of failing");
}

void add_kernel_options(CLI::App* cmd, mvarch::RunConfig& config) {
    cmd->add_option("--kernel", config.kernel, "weight kernel")
        ->check(CLI::IsMember({"equal", "exp", "lm"}));
    cmd->add_option("--mu", config.mu, "exponential decay");
    cmd->add_option("--tau0", config.tau0, "long-memory horizon in business days");
    cmd->add_option("--imax", config.i_max, "memory length in business days");
    cmd->add_option("--lm-tau1", config.lm_config.tau1, "shortest long-memory component scale");
    cmd->add_option("--lm-rho", config.lm_config.rho, "long-memory component scale spacing");
    cmd->add_option("--lm-components", config.lm_config.n_components, "long-memory component count");
}

void add_scheme_options(CLI::App* cmd, mvarch::RunConfig& config) {
    cmd->add_option("--scheme", config.scheme, "inverse-volatility scheme")
        ->check(CLI::IsMember({"full", "projected", "fullrank"}));
    cmd->add_option("--k", config.k, "cut-off rank for projected/fullrank");
    cmd->add_option("--floor", config.absolute_floor, "absolute spectrum floor for the full scheme");
    cmd->add_option("--floor-rel", config.relative_floor,
                    "spectrum floor relative to the mean variance");
    cmd->add_flag("--trace-rescale", config.trace_rescale,
                  "rescale the inverse volatility to preserve the trace");
}

void add_mc_options(CLI::App* cmd, mvarch::RunConfig& config) {
    cmd->add_option("--reps", config.mc_reps, "Monte Carlo replications");
    cmd->add_option("--dof", config.dof, "Student degrees of freedom");
    cmd->add_option("--q-low", config.q_low, "lower band quantile");
    cmd->add_option("--q-high", config.q_high, "upper band quantile");
}

void add_common(CLI::App* cmd, mvarch::RunConfig& config) {
    cmd->add_option("--seed", config.seed, "master RNG seed");
    cmd->add_option("--threads", config.threads, "worker threads (0 = hardware)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multivariate long-memory ARCH covariance estimation and residual whitening diagnostics"};
    app.require_subcommand(1);

    // Config files: TOML/INI natively, JSON by extension. The flag may appear
    // before or after the subcommand name; it is extracted here and applied at
    // the app level, with sections/keys named after the subcommands.
    std::string config_path;
    std::vector<char*> args;
    args.push_back(argv[0]);
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) {
            config_path = argv[++i];
        } else if (arg.rfind("--config=", 0) == 0) {
            config_path = arg.substr(9);
        } else {
            args.push_back(argv[i]);
        }
    }
    app.set_config("--config", config_path, "configuration file (TOML or JSON)");
    if (config_path.size() > 5 && config_path.substr(config_path.size() - 5) == ".json")
        app.config_formatter(std::make_shared<ConfigJson>());

    mvarch::RunConfig config;

    auto* analyze = app.add_subcommand(
        "analyze", "residual whitening sweep over the gamma x xi grid");
    add_io_options(analyze, config, true);
    add_kernel_options(analyze, config);
    add_scheme_options(analyze, config);
    add_mc_options(analyze, config);
    add_common(analyze, config);
    analyze->add_option("--gamma-grid", config.gamma_grid, "shrinkage grid")->delimiter(',');
    analyze->add_option("--xi-grid", config.xi_grid, "regularization grid")->delimiter(',');

    auto* compare = app.add_subcommand(
        "compare-kernels", "whitening qualities per kernel shape against the white-noise baseline");
    add_io_options(compare, config, true);
    add_kernel_options(compare, config);
    add_scheme_options(compare, config);
    add_mc_options(compare, config);
    add_common(compare, config);
    compare->add_option("--base-xi", config.base_xi,
                        "regularization applied to the plain kernels (0 unless singular)");
    compare->add_option("--compare-gamma", config.compare_gamma,
                        "shrinkage of the regularized long-memory column");
    compare->add_option("--compare-xi", config.compare_xi,
                        "regularization of the regularized long-memory column");

    auto* scheme = app.add_subcommand(
        "scheme-compare", "projected vs full-rank vs regularized quality curves");
    add_io_options(scheme, config, true);
    add_kernel_options(scheme, config);
    add_scheme_options(scheme, config);
    add_common(scheme, config);
    scheme->add_option("--xi-grid", config.xi_grid, "regularization grid")->delimiter(',');
    scheme->add_option("--k-grid", config.k_grid, "cut-off ranks")->delimiter(',');
    scheme->add_option("--sc-gamma", config.sc_gammas, "shrinkage values for the regularized curves")
        ->delimiter(',');

    auto* simulate = app.add_subcommand("simulate", "generate a synthetic price panel from the DGP");
    add_io_options(simulate, config, false);
    add_kernel_options(simulate, config);
    add_common(simulate, config);
    simulate->add_option("--n", config.sim_assets, "number of assets")->required();
    simulate->add_option("--t", config.sim_obs, "number of return observations")->required();
    simulate->add_option("--sigma", config.sigma_spec,
                         "identity | equicorr=<rho> | <matrix csv>");
    simulate->add_flag("--dynamic", config.dynamic, "self-consistent ARCH covariance recursion");
    simulate->add_option("--gamma", config.sim_gamma, "shrinkage in dynamic mode");
    simulate->add_option("--xi", config.sim_xi, "regularization in dynamic mode");
    simulate->add_option("--dist", config.dist, "innovation distribution")
        ->check(CLI::IsMember({"student", "gaussian"}));
    simulate->add_option("--dof", config.dof, "Student degrees of freedom");

    auto* band = app.add_subcommand("mc-band", "white-noise quantile band for given (N, T)");
    add_io_options(band, config, false);
    add_mc_options(band, config);
    add_common(band, config);
    band->add_option("--n", config.band_assets, "number of assets")->required();
    band->add_option("--t", config.band_obs, "sample length")->required();
    band->add_option("--dist", config.dist, "innovation distribution")
        ->check(CLI::IsMember({"student", "gaussian"}));

    CLI11_PARSE(app, static_cast<int>(args.size()), args.data());

    if (analyze->parsed()) return mvarch::cmd_analyze(config);
    if (compare->parsed()) return mvarch::cmd_compare_kernels(config);
    if (scheme->parsed()) return mvarch::cmd_scheme_compare(config);
    if (simulate->parsed()) return mvarch::cmd_simulate(config);
    if (band->parsed()) return mvarch::cmd_mc_band(config);
    return 1;
}
