#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "qtomo/apparatus.hpp"
#include "qtomo/design.hpp"
#include "qtomo/io.hpp"
#include "qtomo/likelihood.hpp"
#include "qtomo/particle_filter.hpp"
#include "qtomo/priors.hpp"
#include "qtomo/version.hpp"

namespace qtomo {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct StrategyConfig {
    Strategy::Kind kind = Strategy::Kind::Adaptive;
    MubAlignment alignment = MubAlignment::Generic;
    CandidateConfig candidates{};

    std::string name() const {
        switch (kind) {
            case Strategy::Kind::Adaptive:
                return "adaptive";
            case Strategy::Kind::Random:
                return "random";
            case Strategy::Kind::MubCycle:
                switch (alignment) {
                    case MubAlignment::Generic:
                        return "mub";
                    case MubAlignment::Best:
                        return "mub_best";
                    case MubAlignment::Worst:
                        return "mub_worst";
                }
        }
        return "unknown";
    }

    Strategy build() const {
        switch (kind) {
            case Strategy::Kind::Adaptive:
                return Strategy::adaptive(candidates);
            case Strategy::Kind::Random:
                return Strategy::random();
            case Strategy::Kind::MubCycle:
                return Strategy::mub(alignment);
        }
        throw std::logic_error("StrategyConfig: bad kind");
    }

    static StrategyConfig from_name(const std::string& name) {
        StrategyConfig s;
        if (name == "adaptive") {
            s.kind = Strategy::Kind::Adaptive;
        } else if (name == "random") {
            s.kind = Strategy::Kind::Random;
        } else if (name == "mub") {
            s.kind = Strategy::Kind::MubCycle;
        } else if (name == "mub_best") {
            s.kind = Strategy::Kind::MubCycle;
            s.alignment = MubAlignment::Best;
        } else if (name == "mub_worst") {
            s.kind = Strategy::Kind::MubCycle;
            s.alignment = MubAlignment::Worst;
        } else {
            throw std::invalid_argument("unknown strategy '" + name + "'");
        }
        return s;
    }
};

struct TrueStateSpec {
    enum class Kind { RandomPure, Fixed };
    Kind kind = Kind::RandomPure;
    QubitState fixed{};
};

struct FitWindow {
    double lo = 0.0;  // 0 = auto: max(32, N/100)
    double hi = 0.0;  // 0 = auto: N
};

struct RunConfig {
    StrategyConfig strategy{};
    Prior prior = Prior::bures_haar();
    FilterConfig filter{};
    NoiseModel noise{};
    std::int64_t total_measurements = 10000;
    bool use_blocks = true;
    int runs = 20;
    std::uint64_t master_seed = 1;
    TrueStateSpec true_state{};
    int checkpoints = 25;
    FitWindow fit_window{};
    bool apparatus_realism = false;
    int threads = 0;  // 0 = hardware concurrency

    void validate() const {
        filter.validate();
        noise.validate(2);
        strategy.candidates.validate();
        if (total_measurements < 0)
            throw std::invalid_argument("RunConfig: total_measurements < 0");
        if (runs < 1) throw std::invalid_argument("RunConfig: runs must be >= 1");
        if (checkpoints < 1)
            throw std::invalid_argument("RunConfig: checkpoints must be >= 1");
        if (fit_window.lo < 0.0 || fit_window.hi < 0.0)
            throw std::invalid_argument("RunConfig: negative fit window");
    }

    double fit_lo() const {
        return fit_window.lo > 0.0
                   ? fit_window.lo
                   : std::max(32.0, static_cast<double>(total_measurements) / 100.0);
    }
    double fit_hi() const {
        return fit_window.hi > 0.0 ? fit_window.hi
                                   : static_cast<double>(total_measurements);
    }
};

// --- JSON (config file schema, version field included) ---------------------

inline nlohmann::json strategy_to_json(const StrategyConfig& s) {
    nlohmann::json j;
    j["kind"] = s.kind == Strategy::Kind::Adaptive  ? "adaptive"
                : s.kind == Strategy::Kind::Random  ? "random"
                                                    : "mub";
    if (s.kind == Strategy::Kind::MubCycle)
        j["alignment"] = s.alignment == MubAlignment::Generic ? "generic"
                         : s.alignment == MubAlignment::Best  ? "best"
                                                              : "worst";
    if (s.kind == Strategy::Kind::Adaptive)
        j["candidates"] = {{"n_grid", s.candidates.n_grid},
                           {"n_fresh", s.candidates.n_fresh},
                           {"include_mean_axis", s.candidates.include_mean_axis}};
    return j;
}

inline StrategyConfig strategy_from_json(const nlohmann::json& j) {
    StrategyConfig s = StrategyConfig::from_name(j.at("kind").get<std::string>());
    if (j.contains("alignment")) {
        const auto a = j.at("alignment").get<std::string>();
        s.alignment = a == "generic" ? MubAlignment::Generic
                      : a == "best"  ? MubAlignment::Best
                      : a == "worst" ? MubAlignment::Worst
                                     : throw std::invalid_argument(
                                           "unknown alignment '" + a + "'");
    }
    if (j.contains("candidates")) {
        const auto& c = j.at("candidates");
        s.candidates.n_grid = c.value("n_grid", s.candidates.n_grid);
        s.candidates.n_fresh = c.value("n_fresh", s.candidates.n_fresh);
        s.candidates.include_mean_axis =
            c.value("include_mean_axis", s.candidates.include_mean_axis);
    }
    return s;
}

inline nlohmann::json run_config_to_json(const RunConfig& c) {
    nlohmann::json j;
    j["schema_version"] = kConfigSchemaVersion;
    j["strategy"] = strategy_to_json(c.strategy);
    j["prior"] = c.prior.kind == Prior::Kind::BuresHaar
                     ? nlohmann::json{{"kind", "bures_haar"}}
                     : nlohmann::json{{"kind", "induced_pure"},
                                      {"env_dim", c.prior.env_dim}};
    j["filter"] = {{"particles", c.filter.particle_count},
                   {"ess_threshold", c.filter.ess_threshold},
                   {"mh_steps", c.filter.mh_steps},
                   {"mh_step_scale", c.filter.mh_step_scale},
                   {"target_acceptance", c.filter.target_acceptance}};
    j["noise"] = {{"dark_enabled", c.noise.dark_enabled},
                  {"efficiency_enabled", c.noise.efficiency_enabled},
                  {"source_rate", c.noise.source_rate},
                  {"dark_rates", c.noise.dark_rates},
                  {"efficiencies", c.noise.efficiencies}};
    j["total_measurements"] = c.total_measurements;
    j["use_blocks"] = c.use_blocks;
    j["runs"] = c.runs;
    j["master_seed"] = c.master_seed;
    if (c.true_state.kind == TrueStateSpec::Kind::RandomPure) {
        j["true_state"] = {{"kind", "random_pure"}};
    } else {
        j["true_state"] = {{"kind", "fixed"},
                           {"stokes",
                            {c.true_state.fixed.s1(), c.true_state.fixed.s2(),
                             c.true_state.fixed.s3()}}};
    }
    j["checkpoints"] = c.checkpoints;
    j["fit_window"] = {{"min", c.fit_window.lo}, {"max", c.fit_window.hi}};
    j["apparatus_realism"] = c.apparatus_realism;
    j["threads"] = c.threads;
    return j;
}

inline RunConfig run_config_from_json(const nlohmann::json& j) {
    if (j.value("schema_version", kConfigSchemaVersion) != kConfigSchemaVersion)
        throw std::invalid_argument("config: unsupported schema version");
    RunConfig c;
    if (j.contains("strategy")) c.strategy = strategy_from_json(j.at("strategy"));
    if (j.contains("prior")) {
        const auto& p = j.at("prior");
        const auto kind = p.at("kind").get<std::string>();
        if (kind == "bures_haar")
            c.prior = Prior::bures_haar();
        else if (kind == "induced_pure")
            c.prior = Prior::induced_pure(p.value("env_dim", 2));
        else
            throw std::invalid_argument("config: unknown prior '" + kind + "'");
    }
    if (j.contains("filter")) {
        const auto& f = j.at("filter");
        c.filter.particle_count = f.value("particles", c.filter.particle_count);
        c.filter.ess_threshold = f.value("ess_threshold", c.filter.ess_threshold);
        c.filter.mh_steps = f.value("mh_steps", c.filter.mh_steps);
        c.filter.mh_step_scale = f.value("mh_step_scale", c.filter.mh_step_scale);
        c.filter.target_acceptance =
            f.value("target_acceptance", c.filter.target_acceptance);
    }
    if (j.contains("noise")) {
        const auto& n = j.at("noise");
        c.noise.dark_enabled = n.value("dark_enabled", false);
        c.noise.efficiency_enabled = n.value("efficiency_enabled", false);
        c.noise.source_rate = n.value("source_rate", 1.0);
        c.noise.dark_rates =
            n.value("dark_rates", std::vector<double>{0.0, 0.0});
        c.noise.efficiencies =
            n.value("efficiencies", std::vector<double>{1.0, 1.0});
    }
    c.total_measurements = j.value("total_measurements", c.total_measurements);
    c.use_blocks = j.value("use_blocks", c.use_blocks);
    c.runs = j.value("runs", c.runs);
    c.master_seed = j.value("master_seed", c.master_seed);
    if (j.contains("true_state")) {
        const auto& t = j.at("true_state");
        const auto kind = t.at("kind").get<std::string>();
        if (kind == "random_pure") {
            c.true_state.kind = TrueStateSpec::Kind::RandomPure;
        } else if (kind == "fixed") {
            c.true_state.kind = TrueStateSpec::Kind::Fixed;
            const auto& s = t.at("stokes");
            c.true_state.fixed = QubitState(s.at(0).get<double>(),
                                            s.at(1).get<double>(),
                                            s.at(2).get<double>());
        } else {
            throw std::invalid_argument("config: unknown true_state '" + kind +
                                        "'");
        }
    }
    c.checkpoints = j.value("checkpoints", c.checkpoints);
    if (j.contains("fit_window")) {
        c.fit_window.lo = j.at("fit_window").value("min", 0.0);
        c.fit_window.hi = j.at("fit_window").value("max", 0.0);
    }
    c.apparatus_realism = j.value("apparatus_realism", c.apparatus_realism);
    c.threads = j.value("threads", c.threads);
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
// Records and results
// ---------------------------------------------------------------------------

struct RunRecord {
    std::int64_t n = 0;
    MeasurementConfig config{Vec3{0.0, 0.0, 1.0}};
    std::int64_t k = 0;
    std::array<std::int64_t, 2> counts{0, 0};
    double infid_to_mean = 0.0;
    double infid_to_true = 0.0;
    double ess = 0.0;
    double wall_seconds = 0.0;  // in-memory diagnostic, never serialized
};

struct RunOutput {
    std::uint64_t run_seed = 0;
    QubitState true_state{};
    std::vector<RunRecord> records;
    std::vector<EventRecord> events;
    std::int64_t resamples = 0;
};

struct CurvePoint {
    std::int64_t n = 0;
    double infid_to_mean = 0.0;
    double infid_to_true = 0.0;
};

struct PowerLawFit {
    double exponent = 0.0;  // signed; negative for decaying infidelity
    double prefactor = 0.0;
    double exponent_se = 0.0;
    double window_lo = 0.0;
    double window_hi = 0.0;
    int points = 0;
};

struct ExperimentResult {
    RunConfig config{};
    std::vector<RunOutput> runs;
    std::vector<CurvePoint> curve;  // averaged over runs, includes n = 0
    std::optional<PowerLawFit> fit_to_true;
    std::optional<PowerLawFit> fit_to_mean;
    std::string fit_error;
    double wall_seconds = 0.0;
};

// Roughly `count` log-spaced measurement checkpoints in [1, total].
inline std::vector<std::int64_t> checkpoint_grid(std::int64_t total, int count) {
    std::vector<std::int64_t> cps;
    if (total < 1) return cps;
    const double lo = 0.0;
    const double hi = std::log10(static_cast<double>(total));
    for (int i = 0; i < count; ++i) {
        const double f = count == 1 ? 1.0 : static_cast<double>(i) / (count - 1);
        const auto n = static_cast<std::int64_t>(
            std::llround(std::pow(10.0, lo + f * (hi - lo))));
        if (cps.empty() || n > cps.back()) cps.push_back(std::max<std::int64_t>(1, n));
    }
    if (cps.empty() || cps.back() != total) cps.push_back(total);
    return cps;
}

// ---------------------------------------------------------------------------
// Power-law fit: ordinary least squares on log(infidelity) vs log(N).
// ---------------------------------------------------------------------------

inline PowerLawFit fit_power_law(const std::vector<std::int64_t>& n,
                                 const std::vector<double>& infidelity,
                                 double window_lo, double window_hi) {
    if (n.size() != infidelity.size())
        throw std::invalid_argument("fit_power_law: size mismatch");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < n.size(); ++i) {
        if (n[i] < 1) continue;
        const auto nd = static_cast<double>(n[i]);
        if (nd < window_lo || nd > window_hi) continue;
        if (!(infidelity[i] > 0.0))
            throw std::invalid_argument(
                "fit_power_law: non-positive infidelity inside the fit window");
        xs.push_back(std::log(nd));
        ys.push_back(std::log(infidelity[i]));
    }
    const auto m = xs.size();
    if (m < 5)
        throw std::invalid_argument(
            "fit_power_law: need at least 5 points in the fit window");
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx <= 0.0)
        throw std::invalid_argument("fit_power_law: degenerate abscissa");
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = ys[i] - (intercept + slope * xs[i]);
        rss += r * r;
    }
    PowerLawFit fit;
    fit.exponent = slope;
    fit.prefactor = std::exp(intercept);
    fit.exponent_se =
        m > 2 ? std::sqrt(rss / static_cast<double>(m - 2) / sxx) : 0.0;
    fit.window_lo = window_lo;
    fit.window_hi = window_hi;
    fit.points = static_cast<int>(m);
    return fit;
}

inline PowerLawFit fit_power_law(const std::vector<CurvePoint>& curve,
                                 double window_lo, double window_hi,
                                 bool to_true = true) {
    std::vector<std::int64_t> n;
    std::vector<double> y;
    for (const auto& p : curve) {
        n.push_back(p.n);
        y.push_back(to_true ? p.infid_to_true : p.infid_to_mean);
    }
    return fit_power_law(n, y, window_lo, window_hi);
}

// ---------------------------------------------------------------------------
// Experiment execution
// ---------------------------------------------------------------------------

namespace detail {

// Per-role RNG stream ids hung off the run seed.
inline constexpr std::uint64_t kStreamTrueState = 1;
inline constexpr std::uint64_t kStreamApparatus = 2;
inline constexpr std::uint64_t kStreamFilter = 3;
inline constexpr std::uint64_t kStreamStrategy = 4;

inline RunRecord make_record(std::int64_t n, const MeasurementConfig& config,
                             std::int64_t k,
                             const std::array<std::int64_t, 2>& counts,
                             const Posterior& post, const QubitState& truth,
                             double wall_seconds) {
    RunRecord rec;
    rec.n = n;
    rec.config = config;
    rec.k = k;
    rec.counts = counts;
    rec.infid_to_mean = post.mean_infidelity(post.mean_state());
    rec.infid_to_true = post.mean_infidelity(truth);
    rec.ess = post.ess();
    rec.wall_seconds = wall_seconds;
    return rec;
}

}  // namespace detail

inline RunOutput run_single(const RunConfig& cfg, int run_index) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t run_seed = derive_seed(cfg.master_seed,
                                               static_cast<std::uint64_t>(run_index));
    RunOutput out;
    out.run_seed = run_seed;

    Rng truestate_rng(derive_seed(run_seed, detail::kStreamTrueState));
    if (cfg.true_state.kind == TrueStateSpec::Kind::Fixed) {
        out.true_state = cfg.true_state.fixed;
    } else {
        out.true_state = QubitState(truestate_rng.unit_vector3());
    }

    Strategy strategy = cfg.strategy.build();
    if (strategy.needs_true_state()) strategy.align_to_true_state(out.true_state);

    Apparatus apparatus(out.true_state, cfg.noise,
                        derive_seed(run_seed, detail::kStreamApparatus));
    Posterior post(cfg.prior, cfg.filter,
                   derive_seed(run_seed, detail::kStreamFilter));
    Rng strategy_rng(derive_seed(run_seed, detail::kStreamStrategy));

    const auto elapsed = [&t0] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    };

    const MeasurementConfig placeholder(Vec3{0.0, 0.0, 1.0});
    out.records.push_back(detail::make_record(0, placeholder, 0, {0, 0}, post,
                                              out.true_state, elapsed()));

    const auto cps = checkpoint_grid(cfg.total_measurements, cfg.checkpoints);
    std::size_t next_cp = 0;
    std::int64_t n = 0;
    std::int64_t selections = 0;
    while (n < cfg.total_measurements) {
        std::int64_t k = cfg.use_blocks ? block_size(n) : 1;
        k = std::min(k, cfg.total_measurements - n);
        MeasurementConfig config =
            select_measurement(strategy, post, cfg.noise, selections, strategy_rng);
        if (cfg.apparatus_realism)
            config = waveplate_config_for_axis(config.axis());
        const OutcomeCounts counts = apparatus.draw_block(config, k);
        post.update(config, counts, cfg.noise);
        n += k;
        ++selections;
        while (next_cp < cps.size() && cps[next_cp] <= n) {
            out.records.push_back(detail::make_record(
                n, config, k, {counts.counts[0], counts.counts[1]}, post,
                out.true_state, elapsed()));
            ++next_cp;
        }
    }
    out.events = apparatus.events();
    out.resamples = post.resample_count();
    return out;
}

// Runs execute independently (one posterior and apparatus each) and in
// parallel; aggregation is a deterministic post-pass over run indices.
inline ExperimentResult run_experiment(const RunConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentResult result;
    result.config = cfg;
    result.runs.resize(cfg.runs);

    unsigned thread_count = cfg.threads > 0
                                ? static_cast<unsigned>(cfg.threads)
                                : std::max(1u, std::thread::hardware_concurrency());
    thread_count = std::min<unsigned>(thread_count, cfg.runs);
    if (thread_count <= 1) {
        for (int r = 0; r < cfg.runs; ++r) result.runs[r] = run_single(cfg, r);
    } else {
        std::vector<std::thread> pool;
        std::exception_ptr first_error;
        std::mutex error_mutex;
        for (unsigned t = 0; t < thread_count; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (int r = static_cast<int>(t); r < cfg.runs;
                         r += static_cast<int>(thread_count)) {
                        result.runs[r] = run_single(cfg, r);
                    }
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    // Every run logs the same checkpoint sequence, so averaging is
    // element-wise per checkpoint index.
    const std::size_t rows = result.runs.front().records.size();
    for (const auto& run : result.runs)
        if (run.records.size() != rows)
            throw std::logic_error("run_experiment: ragged checkpoint records");
    result.curve.resize(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        std::vector<double> to_mean, to_true;
        to_mean.reserve(result.runs.size());
        to_true.reserve(result.runs.size());
        for (const auto& run : result.runs) {
            to_mean.push_back(run.records[i].infid_to_mean);
            to_true.push_back(run.records[i].infid_to_true);
        }
        result.curve[i].n = result.runs.front().records[i].n;
        result.curve[i].infid_to_mean = kahan_sum(to_mean) / result.runs.size();
        result.curve[i].infid_to_true = kahan_sum(to_true) / result.runs.size();
    }
    // Nominal checkpoint values keep the averaged abscissa identical across
    // runs even when block boundaries overshoot a checkpoint.
    const auto cps = checkpoint_grid(cfg.total_measurements, cfg.checkpoints);
    for (std::size_t i = 1; i < result.curve.size() && i <= cps.size(); ++i)
        result.curve[i].n = cps[i - 1];

    try {
        result.fit_to_true = fit_power_law(result.curve, cfg.fit_lo(), cfg.fit_hi(), true);
        result.fit_to_mean = fit_power_law(result.curve, cfg.fit_lo(), cfg.fit_hi(), false);
    } catch (const std::exception& e) {
        result.fit_to_true.reset();
        result.fit_to_mean.reset();
        result.fit_error = e.what();
    }
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

struct ComparisonResult {
    std::vector<ExperimentResult> results;  // one per strategy, same seeds
};

// Runs each strategy against identical seeds and true states (the true-state
// stream is independent of the strategy stream, so the hidden states match).
inline ComparisonResult compare_strategies(
    const RunConfig& base, const std::vector<StrategyConfig>& strategies) {
    if (strategies.empty())
        throw std::invalid_argument("compare_strategies: no strategies");
    ComparisonResult cmp;
    for (const auto& s : strategies) {
        RunConfig cfg = base;
        cfg.strategy = s;
        cmp.results.push_back(run_experiment(cfg));
    }
    return cmp;
}

// ---------------------------------------------------------------------------
// File output
// ---------------------------------------------------------------------------

inline std::string trajectory_csv(const RunOutput& run, bool waveplate_columns) {
    std::ostringstream os;
    os << (waveplate_columns
               ? "n,theta_q,theta_h,k,count_0,count_1,infid_to_mean,infid_to_true,ess\n"
               : "n,s_axis_1,s_axis_2,s_axis_3,k,count_0,count_1,infid_to_mean,"
                 "infid_to_true,ess\n");
    for (const auto& r : run.records) {
        os << r.n << ',';
        if (waveplate_columns) {
            const auto& wp = r.config.waveplate_angles();
            os << fmt_double(wp ? wp->quarter_deg : 0.0) << ','
               << fmt_double(wp ? wp->half_deg : 0.0) << ',';
        } else {
            const bool blank = r.n == 0 && r.k == 0;
            const Vec3 axis = blank ? Vec3{0.0, 0.0, 0.0} : r.config.axis();
            os << fmt_double(axis[0]) << ',' << fmt_double(axis[1]) << ','
               << fmt_double(axis[2]) << ',';
        }
        os << r.k << ',' << r.counts[0] << ',' << r.counts[1] << ','
           << fmt_double(r.infid_to_mean) << ',' << fmt_double(r.infid_to_true)
           << ',' << fmt_double(r.ess) << '\n';
    }
    return os.str();
}

inline std::string curve_csv(const std::vector<CurvePoint>& curve) {
    std::ostringstream os;
    os << "n,infid_to_mean,infid_to_true\n";
    for (const auto& p : curve)
        os << p.n << ',' << fmt_double(p.infid_to_mean) << ','
           << fmt_double(p.infid_to_true) << '\n';
    return os.str();
}

inline nlohmann::json fit_to_json(const PowerLawFit& fit) {
    return {{"exponent", fit.exponent},
            {"prefactor", fit.prefactor},
            {"exponent_se", fit.exponent_se},
            {"window", {fit.window_lo, fit.window_hi}},
            {"points", fit.points}};
}

inline nlohmann::json summary_json(const ExperimentResult& result) {
    nlohmann::json j;
    j["schema_version"] = kConfigSchemaVersion;
    j["qtomo_version"] = kVersion;
    j["config"] = run_config_to_json(result.config);
    auto seeds = nlohmann::json::array();
    auto states = nlohmann::json::array();
    auto resamples = nlohmann::json::array();
    for (const auto& run : result.runs) {
        seeds.push_back(run.run_seed);
        states.push_back({run.true_state.s1(), run.true_state.s2(),
                          run.true_state.s3()});
        resamples.push_back(run.resamples);
    }
    j["run_seeds"] = std::move(seeds);
    j["true_states"] = std::move(states);
    j["resamples"] = std::move(resamples);
    j["fit_to_true"] =
        result.fit_to_true ? fit_to_json(*result.fit_to_true) : nlohmann::json();
    j["fit_to_mean"] =
        result.fit_to_mean ? fit_to_json(*result.fit_to_mean) : nlohmann::json();
    if (!result.fit_error.empty()) j["fit_error"] = result.fit_error;
    if (!result.curve.empty()) {
        j["final"] = {{"n", result.curve.back().n},
                      {"infid_to_mean", result.curve.back().infid_to_mean},
                      {"infid_to_true", result.curve.back().infid_to_true}};
    }
    return j;
}

}  // namespace qtomo
