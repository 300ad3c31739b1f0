// sertool — batch runner for the sensing estimation rate library.
//
// Subcommands: glm-sweep, semiglm-sweep, delay-sweep, waterfill, validate.
// Sweeps write a CSV plus a key=value manifest sufficient to reproduce the
// CSV byte-for-byte. Exit codes: 0 success, 1 invariant violation,
// 2 config error, 3 numerical failure.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "ser/errors.hpp"
#include "ser/sweep.hpp"
#include "ser/version.hpp"
#include "ser/waterfill.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_path;
    std::string log_base;
    std::string snr_grid;
    std::string f_mode;
    std::string prior_mode;
    std::uint64_t seed = 0;
    int m = 0;
    int t = 0;
    double power = 0;
    double sigma_eta_sq = 0;
    double b_rms_sq = 0;
};

void add_common_options(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "key = value config file");
    cmd->add_option("--out", flags.out_path, "output CSV path (manifest at <out>.manifest)");
    cmd->add_option("--seed", flags.seed, "RNG seed");
    cmd->add_option("--log-base", flags.log_base, "nats|bits for rate columns");
    cmd->add_option("--m", flags.m, "parameter dimension");
    cmd->add_option("--t", flags.t, "sample count (budget = t * power)");
    cmd->add_option("--power", flags.power, "transmit power P_T in watts");
    cmd->add_option("--snr-grid", flags.snr_grid, "dB grid: 'a,b,c' or 'lo:hi:count'");
    cmd->add_option("--f-mode", flags.f_mode,
                    "identity|equal_eigs_aligned|random_eigs_aligned|random_eigs_random_ur");
    cmd->add_option("--prior-mode", flags.prior_mode, "wishart|identity");
    cmd->add_option("--sigma-eta-sq", flags.sigma_eta_sq, "delay sweep prior variance");
    cmd->add_option("--b-rms-sq", flags.b_rms_sq, "delay sweep effective bandwidth squared");
}

// Config file first, explicit flags on top.
ser::ExperimentConfig resolve_config(const CLI::App* cmd, const CommonFlags& flags,
                                     ser::ModelKind model) {
    ser::ExperimentConfig config;
    if (!flags.config_path.empty()) config = ser::load_config_file(flags.config_path);
    config.model = model;

    std::map<std::string, std::string> overrides;
    if (cmd->count("--seed")) overrides["seed"] = std::to_string(flags.seed);
    if (cmd->count("--log-base")) overrides["log_base"] = flags.log_base;
    if (cmd->count("--m")) overrides["m"] = std::to_string(flags.m);
    if (cmd->count("--t")) overrides["t"] = std::to_string(flags.t);
    if (cmd->count("--power")) overrides["power"] = std::to_string(flags.power);
    if (cmd->count("--snr-grid")) overrides["snr_grid_db"] = flags.snr_grid;
    if (cmd->count("--f-mode")) overrides["f_mode"] = flags.f_mode;
    if (cmd->count("--prior-mode")) overrides["prior_mode"] = flags.prior_mode;
    if (cmd->count("--sigma-eta-sq")) overrides["sigma_eta_sq"] = std::to_string(flags.sigma_eta_sq);
    if (cmd->count("--b-rms-sq")) overrides["b_rms_sq"] = std::to_string(flags.b_rms_sq);
    ser::apply_config_entries(overrides, config);
    return config;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ser::ConfigError("cannot open output file '" + path + "'");
    file << content;
    if (!file) throw ser::ConfigError("failed writing '" + path + "'");
}

void emit(const std::string& out_path, const std::string& csv, const std::string& manifest) {
    if (out_path.empty()) {
        std::cout << csv;
        return;
    }
    write_file(out_path, csv);
    write_file(out_path + ".manifest", manifest);
    std::cout << "wrote " << out_path << " and " << out_path << ".manifest\n";
}

std::string first_line(const std::string& csv) {
    return csv.substr(0, csv.find('\n'));
}

int run_sweep(const CLI::App* cmd, const CommonFlags& flags, ser::ModelKind model,
              const std::string& command_name) {
    auto config = resolve_config(cmd, flags, model);
    std::string csv;
    switch (model) {
        case ser::ModelKind::glm:
            csv = ser::glm_sweep_csv(ser::run_glm_sweep(config), config.log_base);
            break;
        case ser::ModelKind::semiglm:
            csv = ser::semiglm_sweep_csv(ser::run_semiglm_sweep(config), config.log_base);
            break;
        case ser::ModelKind::delay:
            csv = ser::delay_sweep_csv(ser::run_delay_sweep(config), config.log_base);
            break;
    }
    emit(flags.out_path, csv, ser::sweep_manifest(config, command_name, first_line(csv)));
    return 0;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
    try {
        return ser::parse_grid(text);
    } catch (const ser::ConfigError&) {
        throw ser::ConfigError("bad " + what + " list: '" + text + "'");
    }
}

ser::RealVector to_vector(const std::vector<double>& values) {
    ser::RealVector v(static_cast<ser::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) v(static_cast<ser::Index>(i)) = values[i];
    return v;
}

void print_allocation(const ser::WaterfillAllocation& alloc, const char* level_name) {
    std::printf("%s = %.12g\n", level_name, alloc.water_level);
    std::printf("levels =");
    for (ser::Index i = 0; i < alloc.levels.size(); ++i)
        std::printf("%s%.12g", i ? "," : " ", alloc.levels(i));
    std::printf("\nbudget_used = %.12g\n", alloc.budget_used);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sensing estimation rate toolbox"};
    app.set_version_flag("--version", std::string("sertool ") + ser::kVersion);
    app.require_subcommand(1);

    CommonFlags glm_flags, semi_flags, delay_flags;
    auto* glm = app.add_subcommand("glm-sweep", "MI/MMSE/SER sweep for the Gaussian linear model");
    add_common_options(glm, glm_flags);
    auto* semi = app.add_subcommand("semiglm-sweep", "sweep for the semi-controllable GLM");
    add_common_options(semi, semi_flags);
    auto* delay = app.add_subcommand("delay-sweep", "scalar time-delay estimation rate sweep");
    add_common_options(delay, delay_flags);

    std::string wf_floors, wf_weights, wf_variances;
    double wf_budget = 0, wf_distortion = 0;
    auto* wf = app.add_subcommand("waterfill", "run a water-filling solver directly");
    wf->add_option("--floors", wf_floors, "noise floors (comma list)");
    wf->add_option("--weights", wf_weights, "per-mode weights; enables the weighted solver");
    wf->add_option("--budget", wf_budget, "total power budget");
    wf->add_option("--variances", wf_variances, "prior variances; enables inverse water-filling");
    wf->add_option("--distortion", wf_distortion, "target distortion for the inverse solver");

    ser::ValidateOptions validate_options;
    std::string validate_sizes;
    auto* validate = app.add_subcommand("validate", "run the built-in property suite");
    validate->add_option("--seed", validate_options.seed, "RNG seed");
    validate->add_option("--m-sizes", validate_sizes, "dimensions to exercise (comma list)");
    validate->add_option("--trials", validate_options.mc_trials,
                         "Monte Carlo trials (0 skips the oracle check)");
    validate->add_option("--equality-tol", validate_options.equality_tol,
                         "rate-equality residual threshold");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*glm) return run_sweep(glm, glm_flags, ser::ModelKind::glm, "glm-sweep");
        if (*semi) return run_sweep(semi, semi_flags, ser::ModelKind::semiglm, "semiglm-sweep");
        if (*delay) return run_sweep(delay, delay_flags, ser::ModelKind::delay, "delay-sweep");

        if (*wf) {
            if (!wf_variances.empty()) {
                if (!wf->count("--distortion"))
                    throw ser::ConfigError("inverse water-filling needs --distortion");
                const auto variances = to_vector(parse_list(wf_variances, "variances"));
                const auto alloc = ser::waterfill_inverse(variances, wf_distortion);
                print_allocation(alloc, "inverse_water_level");
                std::printf("rate_nats = %.12g\n", ser::rate_from_allocation(variances, alloc));
            } else if (!wf_floors.empty()) {
                const auto floors = to_vector(parse_list(wf_floors, "floors"));
                const auto alloc =
                    wf_weights.empty()
                        ? ser::waterfill_direct(floors, wf_budget)
                        : ser::waterfill_weighted(floors, to_vector(parse_list(wf_weights, "weights")),
                                                  wf_budget);
                print_allocation(alloc, "water_level");
            } else {
                throw ser::ConfigError("waterfill needs --floors (direct/weighted) or --variances");
            }
            return 0;
        }

        if (*validate) {
            if (validate->count("--m-sizes")) {
                validate_options.m_sizes.clear();
                for (const double v : parse_list(validate_sizes, "m-sizes")) {
                    if (v < 1 || v != static_cast<int>(v))
                        throw ser::ConfigError("m-sizes must be positive integers");
                    validate_options.m_sizes.push_back(static_cast<int>(v));
                }
            }
            const auto report = ser::run_validate(validate_options);
            for (const auto& check : report.checks)
                std::printf("[%s] %-20s residual %.3e (threshold %.1e)\n",
                            check.pass ? "PASS" : "FAIL", check.name.c_str(), check.residual,
                            check.threshold);
            if (!report.all_pass()) {
                std::fprintf(stderr, "validation failed\n");
                return 1;
            }
            std::printf("all checks passed\n");
            return 0;
        }
    } catch (const ser::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const ser::InvariantViolation& e) {
        std::fprintf(stderr, "invariant violation: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 2;
}
