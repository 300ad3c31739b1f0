#pragma once

// Batch experiment runner backing the CLI: configuration (flat key=value
// file plus flag overrides), the SNR sweeps for the GLM, semi-controllable
// GLM and scalar-delay models, deterministic CSV/manifest serialization,
// and the one-shot validation suite.
//
// Sweep convention: SNR(dB) = 10 log10(budget / (M σ_z²)) with the budget
// held at T·P_T; each grid point derives its noise variance from the SNR.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ser/core.hpp"

namespace ser {

enum class ModelKind { glm, semiglm, delay };
enum class FMode { identity, equal_eigs_aligned, random_eigs_aligned, random_eigs_random_ur };
enum class LogBase { nats, bits };
enum class PriorMode { wishart, identity };

struct ExperimentConfig {
    ModelKind model = ModelKind::glm;
    int m = 10;          // parameter dimension
    int t = 20;          // samples; budget = t * power
    double power = 1.0;  // P_T in watts
    std::vector<double> snr_grid_db = {};  // defaulted in validate() if empty
    double sigma_z_sq = 1.0;               // base noise for non-sweep operations
    std::uint64_t seed = 1;
    FMode f_mode = FMode::random_eigs_aligned;
    std::int64_t mc_trials = 0;  // 0 disables the Monte Carlo cross-check column
    LogBase log_base = LogBase::nats;
    PriorMode prior_mode = PriorMode::wishart;
    double sigma_eta_sq = 1.0;  // delay sweep: prior variance of the delay
    double b_rms_sq = 1.0;      // delay sweep: effective bandwidth squared

    double budget() const { return static_cast<double>(t) * power; }
    void validate() const;  // throws ConfigError
};

/// One row of a GLM / semi-GLM sweep. For the GLM sweep the *_rand fields
/// hold the seeded arbitrary-waveform results; for the semi-GLM sweep the
/// mmse_opt / ser_mmse_waveform pair holds the MMSE-side quantities.
struct SweepRecord {
    double snr_db = 0;
    double sigma_z_sq = 0;
    double mi = 0;    // MI(X*)
    double mmse = 0;  // glm: MMSE(X*); semiglm: exact MMSE at the MI waveform
    double ser = 0;   // glm: SER at X*; semiglm: SER-MI
    double mi_rand = 0;
    double mmse_rand = 0;
    double ser_rand = 0;
    double mmse_opt = 0;
    double ser_mmse_waveform = 0;
    double gap = 0;  // glm: mi_rand − ser_rand; semiglm: mi − ser_mmse_waveform
    double residual_alignment = 0;
    double residual_spread = 0;
    bool certificate_pass = false;
};

struct DelayRecord {
    double snr_db = 0;
    double sigma_crb_sq = 0;
    double bcrb = 0;
    double rate = 0;
};

std::vector<SweepRecord> run_glm_sweep(const ExperimentConfig& config);
std::vector<SweepRecord> run_semiglm_sweep(const ExperimentConfig& config);
std::vector<DelayRecord> run_delay_sweep(const ExperimentConfig& config);

// Deterministic serialization ("%.12g"); rate-like columns honor log_base.
std::string glm_sweep_csv(const std::vector<SweepRecord>& rows, LogBase base);
std::string semiglm_sweep_csv(const std::vector<SweepRecord>& rows, LogBase base);
std::string delay_sweep_csv(const std::vector<DelayRecord>& rows, LogBase base);

/// key = value manifest with the full resolved config, seed, tool version
/// and per-column units; enough to reproduce the CSV byte-for-byte.
std::string sweep_manifest(const ExperimentConfig& config, const std::string& command,
                           const std::string& columns);

// Flat key=value config format ('#' comments, blank lines ignored).
std::map<std::string, std::string> parse_key_values(const std::string& text);
void apply_config_entries(const std::map<std::string, std::string>& entries,
                          ExperimentConfig& config);
ExperimentConfig load_config_file(const std::string& path);
/// Grid syntax: "a,b,c" or "lo:hi:count" (inclusive linspace).
std::vector<double> parse_grid(const std::string& text);

struct CheckResult {
    std::string name;
    double residual = 0;
    double threshold = 0;
    bool pass = false;
};

struct ValidateOptions {
    std::uint64_t seed = 1;
    std::vector<int> m_sizes = {2, 4, 8};
    std::int64_t mc_trials = 20000;
    double equality_tol = 1e-8;  // rate-equality residual threshold
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    bool all_pass() const;
};

/// One-shot property suite: rate equalities and orderings, the trace inequality,
/// Monte Carlo oracle agreement, water-filling budget closure.
ValidationReport run_validate(const ValidateOptions& options);

}  // namespace ser
