// qtomo command-line front end: simulated tomography experiments, power-law
// fits, strategy comparisons, event-log replay and prior histograms.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qtomo/qtomo.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string run_file_name(const char* prefix, int index, const char* ext) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_%03d.%s", prefix, index, ext);
    return buf;
}

qtomo::RunConfig load_config(const std::string& path) {
    const auto text = qtomo::read_file(path);
    return qtomo::run_config_from_json(json::parse(text));
}

void write_experiment_outputs(const qtomo::ExperimentResult& result,
                              const fs::path& out_dir) {
    fs::create_directories(out_dir);
    for (std::size_t r = 0; r < result.runs.size(); ++r) {
        const auto& run = result.runs[r];
        qtomo::write_file(
            out_dir / run_file_name("run", static_cast<int>(r), "csv"),
            qtomo::trajectory_csv(run, result.config.apparatus_realism));
        std::ostringstream events;
        events << "n,kind,p1,p2,p3,k,count_0,count_1\n";
        for (const auto& e : run.events) qtomo::Apparatus::write_event(events, e);
        qtomo::write_file(
            out_dir / run_file_name("events", static_cast<int>(r), "csv"),
            events.str());
    }
    qtomo::write_file(out_dir / "curve.csv", qtomo::curve_csv(result.curve));
    qtomo::write_file(out_dir / "summary.json",
                      qtomo::summary_json(result).dump(2) + "\n");
}

void print_fit(const char* label, const std::optional<qtomo::PowerLawFit>& fit) {
    if (fit) {
        std::cout << label << ": exponent " << qtomo::fmt_double(fit->exponent)
                  << " +- " << qtomo::fmt_double(fit->exponent_se)
                  << ", prefactor " << qtomo::fmt_double(fit->prefactor) << "\n";
    } else {
        std::cout << label << ": no fit\n";
    }
}

struct CliOverrides {
    std::uint64_t seed = 0;
    bool seed_set = false;
    int runs = 0;
    std::int64_t measurements = -1;
    std::string strategy;
    int particles = 0;
    std::string blocks;  // "on" / "off"
    int threads = -1;

    void apply(qtomo::RunConfig& cfg) const {
        if (seed_set) cfg.master_seed = seed;
        if (runs > 0) cfg.runs = runs;
        if (measurements >= 0) cfg.total_measurements = measurements;
        if (!strategy.empty())
            cfg.strategy = qtomo::StrategyConfig::from_name(strategy);
        if (particles > 0) cfg.filter.particle_count = particles;
        if (blocks == "on") cfg.use_blocks = true;
        if (blocks == "off") cfg.use_blocks = false;
        if (threads >= 0) cfg.threads = threads;
        cfg.validate();
    }
};

void add_override_flags(CLI::App* cmd, CliOverrides& ov) {
    cmd->add_option("--seed", ov.seed, "Master seed override")
        ->each([&ov](const std::string&) { ov.seed_set = true; });
    cmd->add_option("--runs", ov.runs, "Number of runs override");
    cmd->add_option("--measurements", ov.measurements,
                    "Total measurements override");
    cmd->add_option("--strategy", ov.strategy,
                    "Strategy override: adaptive|random|mub|mub_best|mub_worst");
    cmd->add_option("--particles", ov.particles, "Particle count override");
    cmd->add_option("--blocks", ov.blocks, "Block schedule override: on|off")
        ->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--threads", ov.threads, "Worker threads (0 = hardware)");
}

int cmd_simulate(const std::string& config_path, const CliOverrides& ov,
                 const std::string& out_dir) {
    qtomo::RunConfig cfg = load_config(config_path);
    ov.apply(cfg);
    const auto result = qtomo::run_experiment(cfg);
    write_experiment_outputs(result, out_dir);
    std::cout << "simulate: " << cfg.runs << " runs x "
              << cfg.total_measurements << " measurements ("
              << cfg.strategy.name() << ") -> " << out_dir << "\n";
    print_fit("fit_to_true", result.fit_to_true);
    print_fit("fit_to_mean", result.fit_to_mean);
    return 0;
}

int cmd_fit(const std::string& curve_path, const std::string& out_path,
            double window_min, double window_max, const std::string& column) {
    std::istringstream is(qtomo::read_file(curve_path));
    std::string line;
    if (!std::getline(is, line))
        throw std::runtime_error("fit: empty curve file");
    const auto header = qtomo::split(line, ',');
    std::size_t n_col = 0, y_col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "n") n_col = i;
        if (header[i] == column) y_col = i;
    }
    if (y_col == header.size())
        throw std::runtime_error("fit: column '" + column + "' not found");
    std::vector<std::int64_t> n;
    std::vector<double> y;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = qtomo::split(line, ',');
        n.push_back(std::stoll(f.at(n_col)));
        y.push_back(qtomo::parse_double(f.at(y_col)));
    }
    double lo = window_min, hi = window_max;
    if (lo <= 0.0 || hi <= 0.0) {
        const double nmax =
            n.empty() ? 1.0 : static_cast<double>(*std::max_element(n.begin(), n.end()));
        if (lo <= 0.0) lo = std::max(32.0, nmax / 100.0);
        if (hi <= 0.0) hi = nmax;
    }
    const auto fit = qtomo::fit_power_law(n, y, lo, hi);
    json j = qtomo::fit_to_json(fit);
    j["column"] = column;
    j["source"] = curve_path;
    qtomo::write_file(out_path, j.dump(2) + "\n");
    std::cout << "fit: exponent " << qtomo::fmt_double(fit.exponent) << " +- "
              << qtomo::fmt_double(fit.exponent_se) << " -> " << out_path << "\n";
    return 0;
}

int cmd_compare(const std::string& config_path, const CliOverrides& ov,
                const std::string& out_dir) {
    const auto text = qtomo::read_file(config_path);
    const json j = json::parse(text);
    qtomo::RunConfig base = qtomo::run_config_from_json(j);
    ov.apply(base);
    std::vector<qtomo::StrategyConfig> strategies;
    if (j.contains("strategies")) {
        for (const auto& s : j.at("strategies"))
            strategies.push_back(qtomo::strategy_from_json(s));
    } else {
        strategies = {qtomo::StrategyConfig::from_name("random"),
                      qtomo::StrategyConfig::from_name("mub"),
                      qtomo::StrategyConfig::from_name("adaptive")};
    }
    const auto cmp = qtomo::compare_strategies(base, strategies);
    const fs::path out_path(out_dir);
    fs::create_directories(out_path);
    json table = json::array();
    for (std::size_t i = 0; i < cmp.results.size(); ++i) {
        const auto& res = cmp.results[i];
        const std::string name = strategies[i].name();
        qtomo::write_file(out_path / ("curve_" + name + ".csv"),
                          qtomo::curve_csv(res.curve));
        json row;
        row["strategy"] = name;
        row["fit_to_true"] = res.fit_to_true ? qtomo::fit_to_json(*res.fit_to_true)
                                             : json();
        row["final_infid_to_true"] =
            res.curve.empty() ? 0.0 : res.curve.back().infid_to_true;
        table.push_back(std::move(row));
        std::cout << name << ": ";
        print_fit("fit_to_true", res.fit_to_true);
    }
    json outj;
    outj["schema_version"] = qtomo::kConfigSchemaVersion;
    outj["qtomo_version"] = qtomo::kVersion;
    outj["config"] = qtomo::run_config_to_json(base);
    outj["comparison"] = std::move(table);
    qtomo::write_file(out_path / "comparison.json", outj.dump(2) + "\n");
    return 0;
}

int cmd_replay(const std::string& events_path, const std::string& out_path,
               int particles, std::uint64_t seed, const std::string& prior_name,
               const std::string& noise_json) {
    std::istringstream is(qtomo::read_file(events_path));
    const auto events = qtomo::Apparatus::read_event_log(is);
    qtomo::FilterConfig fcfg;
    if (particles > 0) fcfg.particle_count = particles;
    qtomo::Prior prior = prior_name == "induced2" ? qtomo::Prior::induced_pure(2)
                         : prior_name == "induced3"
                             ? qtomo::Prior::induced_pure(3)
                             : qtomo::Prior::bures_haar();
    qtomo::NoiseModel noise;
    if (!noise_json.empty()) {
        const json nj = json::parse(qtomo::read_file(noise_json));
        qtomo::RunConfig tmp;
        json wrapper;
        wrapper["noise"] = nj.contains("noise") ? nj.at("noise") : nj;
        tmp = qtomo::run_config_from_json(wrapper);
        noise = tmp.noise;
    }
    qtomo::Posterior post(prior, fcfg, seed);
    std::ostringstream os;
    os << "n,mean_s1,mean_s2,mean_s3,ess\n";
    std::int64_t n = 0;
    for (const auto& e : events) {
        post.update(e.config, qtomo::OutcomeCounts::pair(e.counts[0], e.counts[1]),
                    noise);
        n += e.k;
        const auto m = post.mean_state();
        os << n << ',' << qtomo::fmt_double(m.s1()) << ','
           << qtomo::fmt_double(m.s2()) << ',' << qtomo::fmt_double(m.s3()) << ','
           << qtomo::fmt_double(post.ess()) << '\n';
    }
    qtomo::write_file(out_path, os.str());
    std::cout << "replay: " << events.size() << " blocks (" << n
              << " measurements) -> " << out_path << "\n";
    return 0;
}

int cmd_prior_hist(const std::string& prior_name, std::int64_t count,
                   std::uint64_t seed, double halfwidth, std::size_t bins,
                   const std::string& out_path) {
    qtomo::Prior prior = prior_name == "induced2" ? qtomo::Prior::induced_pure(2)
                         : prior_name == "induced3"
                             ? qtomo::Prior::induced_pure(3)
                             : qtomo::Prior::bures_haar();
    const auto samples = qtomo::sample_prior(prior, count, seed);
    const auto hist = qtomo::slab_density_profile(samples, halfwidth, bins);
    if (hist.empty())
        std::cerr << "prior-hist: warning: no samples inside |s3| < "
                  << halfwidth << "\n";
    std::ostringstream os;
    hist.write_csv(os);
    qtomo::write_file(out_path, os.str());
    std::cout << "prior-hist: " << hist.total << " of " << count
              << " samples in slab -> " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive Bayesian single-qubit tomography simulator"};
    app.require_subcommand(1);

    // simulate
    std::string sim_config, sim_out = "out";
    CliOverrides sim_ov;
    auto* sim = app.add_subcommand("simulate", "Run a simulated experiment");
    sim->add_option("--config", sim_config, "Run configuration (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sim->add_option("--out-dir", sim_out, "Output directory");
    add_override_flags(sim, sim_ov);

    // fit
    std::string fit_curve, fit_out = "fit.json", fit_column = "infid_to_true";
    double fit_min = 0.0, fit_max = 0.0;
    auto* fit = app.add_subcommand("fit", "Fit a power law to a curve CSV");
    fit->add_option("--curve", fit_curve, "Curve CSV path")
        ->required()
        ->check(CLI::ExistingFile);
    fit->add_option("--out", fit_out, "Output JSON path");
    fit->add_option("--min", fit_min, "Fit window lower edge (0 = auto)");
    fit->add_option("--max", fit_max, "Fit window upper edge (0 = auto)");
    fit->add_option("--column", fit_column, "Curve column to fit");

    // compare
    std::string cmp_config, cmp_out = "compare_out";
    CliOverrides cmp_ov;
    auto* cmp = app.add_subcommand("compare",
                                   "Run several strategies on identical seeds");
    cmp->add_option("--config", cmp_config, "Run configuration (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmp->add_option("--out-dir", cmp_out, "Output directory");
    add_override_flags(cmp, cmp_ov);

    // replay
    std::string rp_events, rp_out = "trajectory.csv", rp_prior = "bures",
                rp_noise;
    int rp_particles = 0;
    std::uint64_t rp_seed = 1;
    auto* rp = app.add_subcommand("replay",
                                  "Re-run inference over a recorded event log");
    rp->add_option("--events", rp_events, "Event log path")
        ->required()
        ->check(CLI::ExistingFile);
    rp->add_option("--out", rp_out, "Trajectory CSV path");
    rp->add_option("--particles", rp_particles, "Particle count");
    rp->add_option("--seed", rp_seed, "Filter seed");
    rp->add_option("--prior", rp_prior, "Prior: bures|induced2|induced3");
    rp->add_option("--noise", rp_noise, "JSON file with a noise model");

    // prior-hist
    std::string ph_prior = "bures", ph_out = "prior_hist.csv";
    std::int64_t ph_count = 100000;
    std::uint64_t ph_seed = 1;
    double ph_halfwidth = 0.05;
    std::size_t ph_bins = 20;
    auto* ph = app.add_subcommand("prior-hist",
                                  "Radial slab histogram of a prior measure");
    ph->add_option("--prior", ph_prior, "Prior: bures|induced2|induced3");
    ph->add_option("--count", ph_count, "Sample count");
    ph->add_option("--seed", ph_seed, "Sampler seed");
    ph->add_option("--halfwidth", ph_halfwidth, "Slab halfwidth on |s3|");
    ph->add_option("--bins", ph_bins, "Radial bin count");
    ph->add_option("--out", ph_out, "Output CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(sim_config, sim_ov, sim_out);
        if (fit->parsed())
            return cmd_fit(fit_curve, fit_out, fit_min, fit_max, fit_column);
        if (cmp->parsed()) return cmd_compare(cmp_config, cmp_ov, cmp_out);
        if (rp->parsed())
            return cmd_replay(rp_events, rp_out, rp_particles, rp_seed, rp_prior,
                              rp_noise);
        if (ph->parsed())
            return cmd_prior_hist(ph_prior, ph_count, ph_seed, ph_halfwidth,
                                  ph_bins, ph_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
