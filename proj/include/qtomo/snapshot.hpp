#pragma once

#include <string>

#include <json.hpp>

#include "qtomo/particle_filter.hpp"
#include "qtomo/version.hpp"

namespace qtomo {

// Versioned checkpoint of a Posterior: particle sphere coordinates,
// normalized log-weights, compressed history, adaptation state and the RNG
// words, enough to resume a run bit-exactly.
inline nlohmann::json snapshot_to_json(const Posterior& post) {
    nlohmann::json j;
    j["schema_version"] = kSnapshotSchemaVersion;
    j["step_count"] = post.step_count();
    j["rng_state"] = post.rng().state_hex();
    j["mh_scale"] = post.mh_scale();
    j["adapt_steps"] = post.adapt_steps();
    j["filter"] = {{"particles", post.config().particle_count},
                   {"ess_threshold", post.config().ess_threshold},
                   {"mh_steps", post.config().mh_steps},
                   {"mh_step_scale", post.config().mh_step_scale},
                   {"target_acceptance", post.config().target_acceptance}};
    auto particles = nlohmann::json::array();
    for (int i = 0; i < post.particle_count(); ++i) {
        const auto& x = post.raw_coords()[i];
        particles.push_back({x[0], x[1], x[2], x[3], post.raw_log_weights()[i]});
    }
    j["particles"] = std::move(particles);
    auto history = nlohmann::json::array();
    for (const auto& h : post.history()) {
        nlohmann::json entry;
        entry["axis"] = {h.config.axis()[0], h.config.axis()[1],
                         h.config.axis()[2]};
        if (h.config.waveplate_angles()) {
            entry["theta_q"] = h.config.waveplate_angles()->quarter_deg;
            entry["theta_h"] = h.config.waveplate_angles()->half_deg;
        }
        entry["counts"] = {h.counts[0], h.counts[1]};
        history.push_back(std::move(entry));
    }
    j["history"] = std::move(history);
    return j;
}

inline Posterior snapshot_from_json(const nlohmann::json& j) {
    if (j.at("schema_version").get<int>() != kSnapshotSchemaVersion)
        throw std::invalid_argument("snapshot: unsupported schema version");
    FilterConfig cfg;
    const auto& f = j.at("filter");
    cfg.particle_count = f.at("particles").get<int>();
    cfg.ess_threshold = f.at("ess_threshold").get<double>();
    cfg.mh_steps = f.at("mh_steps").get<int>();
    cfg.mh_step_scale = f.at("mh_step_scale").get<double>();
    cfg.target_acceptance = f.at("target_acceptance").get<double>();

    std::vector<Vec4> coords;
    std::vector<double> log_weights;
    for (const auto& p : j.at("particles")) {
        coords.push_back(Vec4{p.at(0).get<double>(), p.at(1).get<double>(),
                              p.at(2).get<double>(), p.at(3).get<double>()});
        log_weights.push_back(p.at(4).get<double>());
    }
    std::vector<HistoryEntry> history;
    for (const auto& h : j.at("history")) {
        const auto& ax = h.at("axis");
        Vec3 axis{ax.at(0).get<double>(), ax.at(1).get<double>(),
                  ax.at(2).get<double>()};
        std::optional<WaveplateAngles> plates;
        if (h.contains("theta_q"))
            plates = WaveplateAngles{h.at("theta_q").get<double>(),
                                     h.at("theta_h").get<double>()};
        HistoryEntry entry{MeasurementConfig(axis, plates),
                           {h.at("counts").at(0).get<std::int64_t>(),
                            h.at("counts").at(1).get<std::int64_t>()}};
        history.push_back(std::move(entry));
    }
    Posterior post(Prior::bures_haar(), cfg, 0);
    post.restore(coords, log_weights, history,
                 j.at("step_count").get<std::int64_t>(),
                 j.at("mh_scale").get<double>(),
                 j.at("adapt_steps").get<std::int64_t>(),
                 Rng::from_state_hex(j.at("rng_state").get<std::string>()));
    return post;
}

}  // namespace qtomo
