#include "ser/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ser/bcrb.hpp"
#include "ser/glm.hpp"
#include "ser/montecarlo.hpp"
#include "ser/random.hpp"
#include "ser/semiglm.hpp"
#include "ser/version.hpp"

namespace ser {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

// Substream tags for everything the sweeps draw.
enum : std::uint64_t {
    kTagPrior = 1,
    kTagChannelLeft = 11,
    kTagChannelRight = 12,
    kTagChannelSingulars = 13,
    kTagPhi = 2000,
    kTagRandomWaveform = 3000,
};

std::vector<double> default_snr_grid() {
    std::vector<double> grid;
    for (int db = -10; db <= 30; db += 2) grid.push_back(static_cast<double>(db));
    return grid;
}

double snr_linear(double snr_db) { return std::pow(10.0, snr_db / 10.0); }

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size() || !std::isfinite(v))
            throw ConfigError("config: bad number for " + key + ": '" + value + "'");
        return v;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("config: bad number for " + key + ": '" + value + "'");
    }
}

long long parse_int(const std::string& key, const std::string& value) {
    const double v = parse_double(key, value);
    const long long i = static_cast<long long>(v);
    if (static_cast<double>(i) != v)
        throw ConfigError("config: expected an integer for " + key + ": '" + value + "'");
    return i;
}

GaussianPrior sweep_prior(const ExperimentConfig& config) {
    if (config.prior_mode == PriorMode::identity)
        return GaussianPrior::from_covariance(Matrix::Identity(config.m, config.m));
    return GaussianPrior::from_covariance(
        random_covariance(config.m, mix_seed(config.seed, kTagPrior)));
}

double uniform_draw(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    return dist(rng);
}

// F per f_mode. Singular values are seeded uniform[0.5, 2]; the aligned
// modes pair them descending with the descending prior eigenvalues.
Matrix build_channel_map(const ExperimentConfig& config, const GaussianPrior& prior) {
    const Index m = config.m;
    if (config.f_mode == FMode::identity) return Matrix::Identity(m, m);

    std::mt19937_64 rng(mix_seed(config.seed, kTagChannelSingulars));
    RealVector s(m);
    if (config.f_mode == FMode::equal_eigs_aligned) {
        s.setConstant(uniform_draw(rng, 0.5, 2.0));
    } else {
        for (Index i = 0; i < m; ++i) s(i) = uniform_draw(rng, 0.5, 2.0);
        std::sort(s.data(), s.data() + m, std::greater<double>());
    }

    const Matrix left = random_unitary(m, mix_seed(config.seed, kTagChannelLeft));
    const Matrix right = (config.f_mode == FMode::random_eigs_random_ur)
                             ? random_unitary(m, mix_seed(config.seed, kTagChannelRight))
                             : prior.covariance().eigenvectors();
    return left * s.cast<Complex>().asDiagonal() * right.adjoint();
}

void check_bound_chain(const SweepRecord& row, bool has_rand) {
    const double tol = 1e-9;
    auto above = [tol](double x, double cap) { return x > cap + tol * (1.0 + std::abs(cap)); };
    if (above(row.ser, row.mi)) throw InvariantViolation("sweep row: SER exceeds MI");
    if (has_rand) {
        if (above(row.ser_rand, row.mi_rand))
            throw InvariantViolation("sweep row: arbitrary-waveform SER exceeds its MI");
        if (above(row.mi_rand, row.mi))
            throw InvariantViolation("sweep row: arbitrary-waveform MI exceeds MI(X*)");
    }
}

}  // namespace

void ExperimentConfig::validate() const {
    if (m < 1 || t < 1) throw ConfigError("config: m and t must be >= 1");
    if (power < 0) throw ConfigError("config: power must be >= 0");
    if (!(sigma_z_sq > 0)) throw ConfigError("config: sigma_z_sq must be > 0");
    if (mc_trials < 0) throw ConfigError("config: mc_trials must be >= 0");
    if (snr_grid_db.empty()) throw ConfigError("config: empty SNR grid");
    for (const double db : snr_grid_db)
        if (!std::isfinite(db)) throw ConfigError("config: non-finite SNR grid entry");
    if (model != ModelKind::delay && t < m)
        throw ConfigError("config: sweeps factor the waveform as t x m and need t >= m");
    if (model == ModelKind::delay && (!(sigma_eta_sq > 0) || !(b_rms_sq > 0)))
        throw ConfigError("config: delay sweep needs positive sigma_eta_sq and b_rms_sq");
}

std::vector<SweepRecord> run_glm_sweep(const ExperimentConfig& config) {
    ExperimentConfig cfg = config;
    if (cfg.snr_grid_db.empty()) cfg.snr_grid_db = default_snr_grid();
    cfg.validate();
    if (cfg.model != ModelKind::glm) throw ConfigError("run_glm_sweep: model must be glm");

    const GaussianPrior prior = sweep_prior(cfg);
    const double budget = cfg.budget();
    std::vector<SweepRecord> rows;
    rows.reserve(cfg.snr_grid_db.size());

    for (std::size_t i = 0; i < cfg.snr_grid_db.size(); ++i) {
        const double db = cfg.snr_grid_db[i];
        SweepRecord row;
        row.snr_db = db;
        // A zero budget has no SNR to derive the noise from; keep the base value.
        row.sigma_z_sq = budget > 0 ? budget / (static_cast<double>(cfg.m) * snr_linear(db))
                                    : cfg.sigma_z_sq;
        const NoiseModel noise(row.sigma_z_sq);

        const auto optimal = glm_optimal_waveform(prior, noise, budget, cfg.t,
                                                  mix_seed(cfg.seed, kTagPhi + i));
        const auto at_optimal = glm_ser(prior, optimal.gram, noise);
        row.mi = at_optimal.mi_nats;
        row.mmse = at_optimal.mmse;
        row.ser = at_optimal.ser_nats;

        Matrix x = random_gaussian_matrix(cfg.t, cfg.m, mix_seed(cfg.seed, kTagRandomWaveform + i));
        x *= budget > 0 ? std::sqrt(budget) / x.norm() : 0.0;
        const auto at_random = glm_ser(prior, WaveformGram::from_factor(x, budget), noise);
        row.mi_rand = at_random.mi_nats;
        row.mmse_rand = at_random.mmse;
        row.ser_rand = at_random.ser_nats;
        row.gap = row.mi_rand - row.ser_rand;

        check_bound_chain(row, /*has_rand=*/true);
        rows.push_back(row);
    }
    return rows;
}

std::vector<SweepRecord> run_semiglm_sweep(const ExperimentConfig& config) {
    ExperimentConfig cfg = config;
    if (cfg.snr_grid_db.empty()) cfg.snr_grid_db = default_snr_grid();
    cfg.validate();
    if (cfg.model != ModelKind::semiglm) throw ConfigError("run_semiglm_sweep: model must be semiglm");

    const GaussianPrior prior = sweep_prior(cfg);
    const Matrix f = build_channel_map(cfg, prior);
    const double budget = cfg.budget();
    std::vector<SweepRecord> rows;
    rows.reserve(cfg.snr_grid_db.size());

    for (const double db : cfg.snr_grid_db) {
        SweepRecord row;
        row.snr_db = db;
        row.sigma_z_sq = budget > 0 ? budget / (static_cast<double>(cfg.m) * snr_linear(db))
                                    : cfg.sigma_z_sq;
        const SemiGlmProblem problem{f, prior, NoiseModel(row.sigma_z_sq), budget};
        const auto analysis = semiglm_analyze(problem);

        row.mi = analysis.mi_opt;
        row.mmse = analysis.mmse_mi_waveform;
        row.ser = analysis.ser_mi;
        row.mmse_opt = analysis.mmse_opt;
        row.ser_mmse_waveform = analysis.ser_mmse;
        row.gap = analysis.mi_opt - analysis.ser_mmse;
        row.residual_alignment = analysis.certificate.residual_alignment;
        row.residual_spread = analysis.certificate.residual_spread;
        row.certificate_pass = analysis.certificate.pass;

        check_bound_chain(row, /*has_rand=*/false);
        if (row.ser > row.ser_mmse_waveform + 1e-9 * (1.0 + row.ser_mmse_waveform))
            throw InvariantViolation("sweep row: SER-MI exceeds SER-MMSE");
        rows.push_back(row);
    }
    return rows;
}

std::vector<DelayRecord> run_delay_sweep(const ExperimentConfig& config) {
    ExperimentConfig cfg = config;
    cfg.model = ModelKind::delay;
    if (cfg.snr_grid_db.empty()) cfg.snr_grid_db = default_snr_grid();
    cfg.validate();

    std::vector<DelayRecord> rows;
    rows.reserve(cfg.snr_grid_db.size());
    for (const double db : cfg.snr_grid_db) {
        DelayRecord row;
        row.snr_db = db;
        const double snr = snr_linear(db);
        row.sigma_crb_sq = delay_crb(cfg.b_rms_sq, snr);
        row.bcrb = delay_bcrb(cfg.sigma_eta_sq, cfg.b_rms_sq, snr);
        row.rate = delay_ser(cfg.sigma_eta_sq, cfg.b_rms_sq, snr);
        rows.push_back(row);
    }
    return rows;
}

namespace {

void append_row(std::string& out, const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += format_value(values[i]);
    }
    out += '\n';
}

}  // namespace

std::string glm_sweep_csv(const std::vector<SweepRecord>& rows, LogBase base) {
    const double scale = base == LogBase::bits ? 1.0 / kLn2 : 1.0;
    std::string out = "snr_db,sigma_z_sq,mi,mmse,ser,mi_rand,mmse_rand,ser_rand,gap\n";
    for (const auto& r : rows)
        append_row(out, {r.snr_db, r.sigma_z_sq, r.mi * scale, r.mmse, r.ser * scale,
                         r.mi_rand * scale, r.mmse_rand, r.ser_rand * scale, r.gap * scale});
    return out;
}

std::string semiglm_sweep_csv(const std::vector<SweepRecord>& rows, LogBase base) {
    const double scale = base == LogBase::bits ? 1.0 / kLn2 : 1.0;
    std::string out =
        "snr_db,sigma_z_sq,mi,mmse_mi_waveform,ser_mi,mmse_opt,ser_mmse,gap,"
        "residual_alignment,residual_spread,certificate_pass\n";
    for (const auto& r : rows)
        append_row(out, {r.snr_db, r.sigma_z_sq, r.mi * scale, r.mmse, r.ser * scale, r.mmse_opt,
                         r.ser_mmse_waveform * scale, r.gap * scale, r.residual_alignment,
                         r.residual_spread, r.certificate_pass ? 1.0 : 0.0});
    return out;
}

std::string delay_sweep_csv(const std::vector<DelayRecord>& rows, LogBase base) {
    const double scale = base == LogBase::bits ? 1.0 / kLn2 : 1.0;
    std::string out = "snr_db,sigma_crb_sq,bcrb,rate\n";
    for (const auto& r : rows)
        append_row(out, {r.snr_db, r.sigma_crb_sq, r.bcrb, r.rate * scale});
    return out;
}

namespace {

const char* to_string(ModelKind m) {
    switch (m) {
        case ModelKind::glm: return "glm";
        case ModelKind::semiglm: return "semiglm";
        case ModelKind::delay: return "delay";
    }
    return "?";
}

const char* to_string(FMode f) {
    switch (f) {
        case FMode::identity: return "identity";
        case FMode::equal_eigs_aligned: return "equal_eigs_aligned";
        case FMode::random_eigs_aligned: return "random_eigs_aligned";
        case FMode::random_eigs_random_ur: return "random_eigs_random_ur";
    }
    return "?";
}

const char* to_string(LogBase b) { return b == LogBase::bits ? "bits" : "nats"; }
const char* to_string(PriorMode p) { return p == PriorMode::identity ? "identity" : "wishart"; }

}  // namespace

std::string sweep_manifest(const ExperimentConfig& config, const std::string& command,
                           const std::string& columns) {
    std::ostringstream out;
    out << "tool = sertool\n";
    out << "version = " << kVersion << "\n";
    out << "command = " << command << "\n";
    out << "model = " << to_string(config.model) << "\n";
    out << "m = " << config.m << "\n";
    out << "t = " << config.t << "\n";
    out << "power_watts = " << format_value(config.power) << "\n";
    out << "budget = " << format_value(config.budget()) << "\n";
    out << "seed = " << config.seed << "\n";
    out << "f_mode = " << to_string(config.f_mode) << "\n";
    out << "prior_mode = " << to_string(config.prior_mode) << "\n";
    out << "log_base = " << to_string(config.log_base) << "\n";
    out << "sigma_z_sq = " << format_value(config.sigma_z_sq) << "\n";
    out << "sigma_eta_sq = " << format_value(config.sigma_eta_sq) << "\n";
    out << "b_rms_sq = " << format_value(config.b_rms_sq) << "\n";
    out << "mc_trials = " << config.mc_trials << "\n";
    out << "snr_grid_db = ";
    for (std::size_t i = 0; i < config.snr_grid_db.size(); ++i) {
        if (i) out << ",";
        out << format_value(config.snr_grid_db[i]);
    }
    out << "\n";
    out << "snr_definition = snr_db = 10*log10(budget/(m*sigma_z_sq)); "
           "glm/semiglm rows derive sigma_z_sq from the grid at fixed budget\n";
    out << "rate_units = " << to_string(config.log_base)
        << "; mmse/bcrb/crb columns are variances and ignore log_base\n";
    out << "columns = " << columns << "\n";
    return out.str();
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> entries;
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string trimmed = trim(line);
        if (trimmed.empty()) continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(trimmed.substr(0, eq));
        const std::string value = trim(trimmed.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        entries[key] = value;
    }
    return entries;
}

std::vector<double> parse_grid(const std::string& text) {
    const std::string spec = trim(text);
    if (spec.empty()) throw ConfigError("config: empty grid");
    std::vector<double> grid;
    const auto colons = std::count(spec.begin(), spec.end(), ':');
    if (colons == 2) {  // lo:hi:count inclusive linspace
        std::istringstream stream(spec);
        std::string lo_s, hi_s, count_s;
        std::getline(stream, lo_s, ':');
        std::getline(stream, hi_s, ':');
        std::getline(stream, count_s, ':');
        const double lo = parse_double("grid", trim(lo_s));
        const double hi = parse_double("grid", trim(hi_s));
        const long long count = parse_int("grid", trim(count_s));
        if (count < 1) throw ConfigError("config: grid count must be >= 1");
        if (count == 1) return {lo};
        for (long long i = 0; i < count; ++i)
            grid.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
        return grid;
    }
    std::istringstream stream(spec);
    std::string item;
    while (std::getline(stream, item, ',')) grid.push_back(parse_double("grid", trim(item)));
    if (grid.empty()) throw ConfigError("config: empty grid");
    return grid;
}

void apply_config_entries(const std::map<std::string, std::string>& entries,
                          ExperimentConfig& config) {
    for (const auto& [key, value] : entries) {
        if (key == "model") {
            if (value == "glm") config.model = ModelKind::glm;
            else if (value == "semiglm") config.model = ModelKind::semiglm;
            else if (value == "delay") config.model = ModelKind::delay;
            else throw ConfigError("config: unknown model '" + value + "'");
        } else if (key == "m") {
            config.m = static_cast<int>(parse_int(key, value));
        } else if (key == "t") {
            config.t = static_cast<int>(parse_int(key, value));
        } else if (key == "power") {
            config.power = parse_double(key, value);
        } else if (key == "snr_grid_db") {
            config.snr_grid_db = parse_grid(value);
        } else if (key == "sigma_z_sq") {
            config.sigma_z_sq = parse_double(key, value);
        } else if (key == "seed") {
            config.seed = static_cast<std::uint64_t>(parse_int(key, value));
        } else if (key == "f_mode") {
            if (value == "identity") config.f_mode = FMode::identity;
            else if (value == "equal_eigs_aligned") config.f_mode = FMode::equal_eigs_aligned;
            else if (value == "random_eigs_aligned") config.f_mode = FMode::random_eigs_aligned;
            else if (value == "random_eigs_random_ur") config.f_mode = FMode::random_eigs_random_ur;
            else throw ConfigError("config: unknown f_mode '" + value + "'");
        } else if (key == "mc_trials") {
            config.mc_trials = parse_int(key, value);
        } else if (key == "log_base") {
            if (value == "nats") config.log_base = LogBase::nats;
            else if (value == "bits") config.log_base = LogBase::bits;
            else throw ConfigError("config: unknown log_base '" + value + "'");
        } else if (key == "prior_mode") {
            if (value == "wishart") config.prior_mode = PriorMode::wishart;
            else if (value == "identity") config.prior_mode = PriorMode::identity;
            else throw ConfigError("config: unknown prior_mode '" + value + "'");
        } else if (key == "sigma_eta_sq") {
            config.sigma_eta_sq = parse_double(key, value);
        } else if (key == "b_rms_sq") {
            config.b_rms_sq = parse_double(key, value);
        } else {
            throw ConfigError("config: unknown key '" + key + "'");
        }
    }
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << file.rdbuf();
    ExperimentConfig config;
    apply_config_entries(parse_key_values(buffer.str()), config);
    return config;
}

bool ValidationReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

namespace {

CheckResult make_check(std::string name, double residual, double threshold) {
    const bool pass = residual <= threshold;
    return {std::move(name), residual, threshold, pass};
}

}  // namespace

ValidationReport run_validate(const ValidateOptions& options) {
    ValidationReport report;
    std::uint64_t seq = 0;
    auto next_seed = [&] { return mix_seed(options.seed, seq++); };

    // Rate equality: SER equals MI at the optimal GLM waveform.
    {
        double worst = 0.0;
        for (const int m : options.m_sizes) {
            for (const double budget : {0.1, 1.0, 10.0}) {
                for (int rep = 0; rep < 3; ++rep) {
                    const auto prior = GaussianPrior::from_covariance(random_covariance(m, next_seed()));
                    const NoiseModel noise(1.0);
                    const auto wf = glm_optimal_waveform(prior, noise, budget, 2 * m, next_seed());
                    const auto a = glm_ser(prior, wf.gram, noise);
                    worst = std::max(worst, std::abs(a.ser_nats - a.mi_nats) / (1.0 + a.mi_nats));
                }
            }
        }
        report.checks.push_back(make_check("glm-rate-equality", worst, options.equality_tol));
    }

    // Semi-controllable model: constructed equality case plus the rate ordering.
    {
        double worst_eq = 0.0;
        double worst_order = 0.0;
        for (const int m : options.m_sizes) {
            for (int rep = 0; rep < 4; ++rep) {
                const auto prior = GaussianPrior::from_covariance(random_covariance(m, next_seed()));
                std::mt19937_64 rng(next_seed());
                const double scale = uniform_draw(rng, 0.5, 2.0);
                const double budget = uniform_draw(rng, 0.5, 4.0 * m);

                const Matrix w = random_unitary(m, next_seed());
                const Matrix f_eq =
                    w * (scale * Matrix::Identity(m, m)) * prior.covariance().eigenvectors().adjoint();
                const auto eq = semiglm_analyze({f_eq, prior, NoiseModel(1.0), budget});
                worst_eq = std::max(worst_eq,
                                    std::abs(eq.ser_mmse - eq.mi_opt) / (1.0 + eq.mi_opt));

                RealVector s(m);
                for (Index i = 0; i < m; ++i) s(i) = uniform_draw(rng, 0.5, 2.0);
                const Matrix f = w * s.cast<Complex>().asDiagonal() *
                                 random_unitary(m, next_seed()).adjoint();
                const auto gen = semiglm_analyze({f, prior, NoiseModel(1.0), budget});
                worst_order = std::max({worst_order,
                                        (gen.ser_mi - gen.ser_mmse) / (1.0 + gen.ser_mmse),
                                        (gen.ser_mmse - gen.mi_opt) / (1.0 + gen.mi_opt)});
            }
        }
        report.checks.push_back(make_check("semiglm-equality-case", worst_eq, options.equality_tol));
        report.checks.push_back(make_check("semiglm-rate-ordering", std::max(worst_order, 0.0), 1e-9));
    }

    // Trace inequality: non-negative slack, zero for diagonal A.
    {
        double worst = 0.0;
        std::mt19937_64 rng(next_seed());
        for (int rep = 0; rep < 200; ++rep) {
            const Index n = 2 + static_cast<Index>(rng() % 6);
            const Matrix g = random_gaussian_matrix(n, n, next_seed());
            const Matrix a = g * g.adjoint() / static_cast<double>(n) +
                             0.05 * Matrix::Identity(n, n);
            RealVector lam(n);
            for (Index i = 0; i < n; ++i) lam(i) = uniform_draw(rng, 0.1, 10.0);
            const auto res = trace_inequality_check(a, lam);
            worst = std::max(worst, -res.slack);
            const auto diag = trace_inequality_check(Matrix(a.diagonal().asDiagonal()), lam);
            worst = std::max(worst, std::abs(diag.slack));
        }
        report.checks.push_back(make_check("trace-inequality", worst, 1e-10));
    }

    // Monte Carlo LMMSE oracle against the closed forms, in stderr units.
    if (options.mc_trials > 0) {
        double worst = 0.0;
        for (int rep = 0; rep < 4; ++rep) {
            const int m = options.m_sizes[rep % options.m_sizes.size()];
            const auto prior = GaussianPrior::from_covariance(random_covariance(m, next_seed()));
            const NoiseModel noise(1.0);
            const double budget = static_cast<double>(m);
            const Matrix f = (rep % 2 == 0)
                                 ? Matrix(Matrix::Identity(m, m))
                                 : random_gaussian_matrix(m, m, next_seed());
            const auto wf = glm_optimal_waveform(prior, noise, budget, 2 * m, next_seed());
            Matrix x = (rep % 2 == 0) ? wf.factor : random_gaussian_matrix(2 * m, m, next_seed());
            x *= std::sqrt(budget) / x.norm();
            const double analytic =
                semiglm_mmse_at({f, prior, noise, budget}, WaveformGram::from_factor(x, budget));
            const auto mc = empirical_mmse(x, f, prior, noise,
                                           {options.mc_trials, next_seed(), true});
            if (mc.stderr_of_mean > 0)
                worst = std::max(worst,
                                 std::abs(mc.empirical_mmse - analytic) / (3.0 * mc.stderr_of_mean));
        }
        report.checks.push_back(make_check("mc-oracle-3sigma", worst, 1.0));
    }

    // Water-filling closure across all three solvers.
    {
        double worst = 0.0;
        std::mt19937_64 rng(next_seed());
        for (int rep = 0; rep < 100; ++rep) {
            const Index n = 2 + static_cast<Index>(rng() % 7);
            RealVector floors(n), weights(n), variances(n);
            for (Index i = 0; i < n; ++i) {
                floors(i) = uniform_draw(rng, 0.05, 5.0);
                weights(i) = uniform_draw(rng, 0.2, 3.0);
                variances(i) = uniform_draw(rng, 0.1, 4.0);
            }
            const double budget = uniform_draw(rng, 0.0, 10.0);
            const auto direct = waterfill_direct(floors, budget);
            const auto weighted = waterfill_weighted(floors, weights, budget);
            const double target = uniform_draw(rng, 1e-3, 1.0) * variances.sum();
            const auto inverse = waterfill_inverse(variances, target);
            worst = std::max({worst, std::abs(direct.budget_used - budget) / (1.0 + budget),
                              std::abs(weighted.budget_used - budget) / (1.0 + budget),
                              std::abs(inverse.budget_used - target) / (1.0 + target)});
        }
        report.checks.push_back(make_check("waterfill-closure", worst, 1e-12));
    }

    return report;
}

}  // namespace ser
