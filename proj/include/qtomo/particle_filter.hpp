#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtomo/likelihood.hpp"
#include "qtomo/measurement.hpp"
#include "qtomo/priors.hpp"
#include "qtomo/qubit.hpp"
#include "qtomo/rng.hpp"

namespace qtomo {

class FilterDegeneracyError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct FilterConfig {
    int particle_count = 1000;
    double ess_threshold = 0.5;  // resample when ESS < threshold * S
    int mh_steps = 20;
    double mh_step_scale = 0.1;  // initial tangent step, radians
    double target_acceptance = 0.35;

    void validate() const {
        if (particle_count < 2)
            throw std::invalid_argument("FilterConfig: need at least 2 particles");
        if (!(ess_threshold > 0.0) || ess_threshold > 1.0)
            throw std::invalid_argument("FilterConfig: ess_threshold in (0, 1]");
        if (mh_steps < 0)
            throw std::invalid_argument("FilterConfig: mh_steps must be >= 0");
        if (!(mh_step_scale > 0.0))
            throw std::invalid_argument("FilterConfig: mh_step_scale must be > 0");
        if (!(target_acceptance > 0.0) || target_acceptance >= 1.0)
            throw std::invalid_argument("FilterConfig: target_acceptance in (0, 1)");
    }
};

struct Particle {
    SphereCoord coord;
    QubitState state;
    double log_weight = 0.0;
};

// One compressed-history slot: all observations taken at one configuration.
struct HistoryEntry {
    MeasurementConfig config;
    std::array<std::int64_t, 2> counts{0, 0};
};

inline double kahan_sum(const std::vector<double>& v) {
    double sum = 0.0, comp = 0.0;
    for (double x : v) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

// Sequential-importance-sampling posterior over qubit states. Weight updates
// are incremental (O(S) per block, independent of the amount of data seen);
// the full data set enters only through the compressed history, which the
// resample-move rejuvenation rescans.
class Posterior {
  public:
    Posterior(const Prior& prior, const FilterConfig& config, std::uint64_t seed)
        : config_(config), rng_(seed) {
        config_.validate();
        mh_scale_ = config_.mh_step_scale;
        const int s = config_.particle_count;
        coords_.reserve(s);
        states_.reserve(s);
        for (int i = 0; i < s; ++i) {
            SphereCoord c = prior.kind == Prior::Kind::BuresHaar
                                ? sample_bures_coord(rng_)
                                : embed(sample_induced_pure(prior.env_dim, rng_));
            coords_.push_back(c.coords());
            states_.push_back(project(c).stokes());
        }
        log_weights_.assign(s, -std::log(static_cast<double>(s)));
        weights_.assign(s, 1.0 / s);
        ess_ = static_cast<double>(s);
    }

    int particle_count() const { return static_cast<int>(coords_.size()); }
    const FilterConfig& config() const { return config_; }
    std::int64_t step_count() const { return step_count_; }
    const std::vector<HistoryEntry>& history() const { return history_; }
    double ess() const { return ess_; }
    double mh_scale() const { return mh_scale_; }

    Particle particle(int i) const {
        return {SphereCoord(coords_[i]), QubitState(states_[i]), log_weights_[i]};
    }
    double weight(int i) const { return weights_[i]; }
    const Vec3& particle_stokes(int i) const { return states_[i]; }

    // Diagnostics from the most recent update/resample.
    std::int64_t last_update_prob_evals() const { return last_prob_evals_; }
    std::int64_t resample_count() const { return resample_count_; }
    double last_acceptance_rate() const { return last_acceptance_rate_; }

    // Test hook and replay entry point: build a posterior from explicit
    // particles (weights get normalized).
    static Posterior from_particles(const std::vector<Particle>& particles,
                                    const FilterConfig& config,
                                    std::uint64_t seed) {
        if (particles.size() < 2)
            throw std::invalid_argument("from_particles: need at least 2 particles");
        FilterConfig cfg = config;
        cfg.particle_count = static_cast<int>(particles.size());
        Posterior post(Prior::bures_haar(), cfg, seed);
        post.coords_.clear();
        post.states_.clear();
        post.log_weights_.clear();
        for (const auto& p : particles) {
            post.coords_.push_back(p.coord.coords());
            post.states_.push_back(p.state.stokes());
            post.log_weights_.push_back(p.log_weight);
        }
        post.renormalize();
        return post;
    }

    // Bayes update with one block of outcomes at one configuration. Appends
    // to the compressed history and rejuvenates automatically when the
    // effective sample size falls below threshold * S.
    void update(const MeasurementConfig& config, const OutcomeCounts& counts,
                const NoiseModel& noise) {
        if (counts.counts.size() != 2)
            throw std::invalid_argument("update: expected two-outcome counts");
        const auto c0 = static_cast<double>(counts.counts[0]);
        const auto c1 = static_cast<double>(counts.counts[1]);
        if (counts.total() < 1)
            throw std::invalid_argument("update: empty block");

        const TwoOutcomeNoise k = TwoOutcomeNoise::from(noise);
        const Vec3 axis = config.axis();
        const int s = particle_count();
        for (int i = 0; i < s; ++i) {
            const double born0 =
                std::min(1.0, std::max(0.0, 0.5 * (1.0 + dot(axis, states_[i]))));
            const double p0 = k.prob0(born0);
            log_weights_[i] += log_term(c0, p0) + log_term(c1, 1.0 - p0);
        }
        last_prob_evals_ = s;
        renormalize();

        append_history(config, counts);
        step_count_ += counts.total();

        if (ess_ < config_.ess_threshold * s) resample_move(noise);
    }

    // Effective sample size 1 / sum(w^2).
    static double effective_sample_size(const std::vector<double>& weights) {
        std::vector<double> sq(weights.size());
        for (std::size_t i = 0; i < weights.size(); ++i) sq[i] = weights[i] * weights[i];
        const double s2 = kahan_sum(sq);
        return s2 > 0.0 ? 1.0 / s2 : 0.0;
    }

    QubitState mean_state() const {
        std::vector<double> a(particle_count()), b(particle_count()),
            c(particle_count());
        for (int i = 0; i < particle_count(); ++i) {
            a[i] = weights_[i] * states_[i][0];
            b[i] = weights_[i] * states_[i][1];
            c[i] = weights_[i] * states_[i][2];
        }
        Vec3 m{kahan_sum(a), kahan_sum(b), kahan_sum(c)};
        // Convexity keeps |m| <= 1; trim rounding spill.
        const double r2 = norm2(m);
        if (r2 > 1.0) m = scaled(m, 1.0 / std::sqrt(r2));
        return QubitState(m);
    }

    // Posterior-expected infidelity against a reference state.
    double mean_infidelity(const QubitState& reference) const {
        std::vector<double> terms(particle_count());
        for (int i = 0; i < particle_count(); ++i)
            terms[i] = weights_[i] * (1.0 - fidelity(QubitState(states_[i]), reference));
        return std::min(1.0, std::max(0.0, kahan_sum(terms)));
    }

    // p(outcome | config, data) = sum_s w_s P(outcome | rho_s, config).
    std::array<double, 2> predictive_probs(const MeasurementConfig& config,
                                           const NoiseModel& noise) const {
        const TwoOutcomeNoise k = TwoOutcomeNoise::from(noise);
        const Vec3 axis = config.axis();
        std::vector<double> terms(particle_count());
        for (int i = 0; i < particle_count(); ++i) {
            const double born0 =
                std::min(1.0, std::max(0.0, 0.5 * (1.0 + dot(axis, states_[i]))));
            terms[i] = weights_[i] * k.prob0(born0);
        }
        const double p0 = std::min(1.0, std::max(0.0, kahan_sum(terms)));
        return {p0, 1.0 - p0};
    }

    // Resample-move rejuvenation: multinomial redraw by weight (weights reset
    // to uniform), then mh_steps Metropolis-Hastings sweeps targeting the
    // full posterior through the compressed history. Moves live on the
    // 3-sphere: a symmetric tangent-space Gaussian step, renormalized back to
    // the sphere and folded into the x4 >= 0 hemisphere. The step scale is
    // adapted toward target_acceptance (Robbins-Monro, persistent across
    // resamples so it tracks the shrinking posterior).
    void resample_move(const NoiseModel& noise) {
        const int s = particle_count();
        ++resample_count_;

        // Multinomial redraw.
        std::vector<double> cdf(s);
        double acc = 0.0;
        for (int i = 0; i < s; ++i) {
            acc += weights_[i];
            cdf[i] = acc;
        }
        cdf[s - 1] = 1.0;
        std::vector<Vec4> new_coords(s);
        std::vector<Vec3> new_states(s);
        for (int i = 0; i < s; ++i) {
            const double u = rng_.uniform();
            const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
            const int j = static_cast<int>(it - cdf.begin());
            new_coords[i] = coords_[j];
            new_states[i] = states_[j];
        }
        coords_ = std::move(new_coords);
        states_ = std::move(new_states);
        log_weights_.assign(s, -std::log(static_cast<double>(s)));
        weights_.assign(s, 1.0 / s);
        ess_ = static_cast<double>(s);

        if (config_.mh_steps == 0) return;

        const TwoOutcomeNoise k = TwoOutcomeNoise::from(noise);
        std::vector<double> cur_ll(s);
        for (int i = 0; i < s; ++i) cur_ll[i] = history_log_likelihood(states_[i], k);

        std::int64_t total_accepts = 0;
        for (int sweep = 0; sweep < config_.mh_steps; ++sweep) {
            const int phase_step = sweep + 1;
            int accepts = 0;
            for (int i = 0; i < s; ++i) {
                const Vec4& x = coords_[i];
                // Tangent-space Gaussian step of angular scale mh_scale_.
                const auto g = rng_.normal4();
                const double radial =
                    4.0 * (g[0] * x[0] + g[1] * x[1] + g[2] * x[2] + g[3] * x[3]);
                Vec4 prop;
                const double step = 0.5 * mh_scale_;
                for (int d = 0; d < 4; ++d)
                    prop[d] = x[d] + step * (g[d] - radial * x[d]);
                const double n = std::sqrt(prop[0] * prop[0] + prop[1] * prop[1] +
                                           prop[2] * prop[2] + prop[3] * prop[3]);
                const double c = 0.5 / n;
                prop = {prop[0] * c, prop[1] * c, prop[2] * c,
                        std::abs(prop[3]) * c};
                const Vec3 prop_state{2.0 * prop[0], 2.0 * prop[1], 2.0 * prop[2]};
                const double prop_ll = history_log_likelihood(prop_state, k);
                const double diff = prop_ll - cur_ll[i];
                bool take = diff >= 0.0;
                if (!take && diff > -745.0) take = rng_.uniform() < std::exp(diff);
                if (take) {
                    coords_[i] = prop;
                    states_[i] = prop_state;
                    cur_ll[i] = prop_ll;
                    ++accepts;
                }
            }
            total_accepts += accepts;
            // Robbins-Monro on log(scale). The gain restarts each move phase:
            // the posterior keeps shrinking between rejuvenations, so the
            // scale must track a moving target rather than settle.
            ++adapt_steps_;
            const double rate = static_cast<double>(accepts) / s;
            const double gain = 0.5 / std::sqrt(static_cast<double>(phase_step));
            mh_scale_ *= std::exp(gain * (rate - config_.target_acceptance));
            mh_scale_ = std::min(3.0, std::max(1e-5, mh_scale_));
        }
        last_acceptance_rate_ = static_cast<double>(total_accepts) /
                                (static_cast<double>(s) * config_.mh_steps);
    }

    // Full-data log likelihood of a Stokes vector from the compressed
    // history; O(#distinct configurations), not O(n).
    double history_log_likelihood(const Vec3& s, const TwoOutcomeNoise& k) const {
        double ll = 0.0;
        for (const auto& h : hist_flat_) {
            const double born0 = std::min(
                1.0, std::max(0.0, 0.5 * (1.0 + s[0] * h.bx + s[1] * h.by +
                                          s[2] * h.bz)));
            const double p0 = k.prob0(born0);
            ll += log_term(h.c0, p0) + log_term(h.c1, 1.0 - p0);
        }
        return ll;
    }

    Rng& rng() { return rng_; }
    const Rng& rng() const { return rng_; }

    // --- snapshot hooks (see snapshot.hpp) ------------------------------
    const std::vector<Vec4>& raw_coords() const { return coords_; }
    const std::vector<double>& raw_log_weights() const { return log_weights_; }
    void restore(const std::vector<Vec4>& coords,
                 const std::vector<double>& log_weights,
                 const std::vector<HistoryEntry>& history, std::int64_t steps,
                 double mh_scale, std::int64_t adapt_steps, const Rng& rng) {
        if (coords.size() != log_weights.size() || coords.size() < 2)
            throw std::invalid_argument("restore: inconsistent particle arrays");
        coords_ = coords;
        states_.resize(coords_.size());
        for (std::size_t i = 0; i < coords_.size(); ++i)
            states_[i] = {2.0 * coords_[i][0], 2.0 * coords_[i][1],
                          2.0 * coords_[i][2]};
        log_weights_ = log_weights;
        config_.particle_count = static_cast<int>(coords_.size());
        history_.clear();
        hist_flat_.clear();
        hist_index_.clear();
        for (const auto& h : history)
            append_history(h.config, OutcomeCounts({h.counts[0], h.counts[1]}));
        step_count_ = steps;
        mh_scale_ = mh_scale;
        adapt_steps_ = adapt_steps;
        rng_ = rng;
        renormalize();
    }
    std::int64_t adapt_steps() const { return adapt_steps_; }

  private:
    static double log_term(double count, double p) {
        if (count == 0.0) return 0.0;
        if (p <= 0.0) return -std::numeric_limits<double>::infinity();
        return count * std::log(p);
    }

    void renormalize() {
        const int s = particle_count();
        double max_lw = -std::numeric_limits<double>::infinity();
        for (double lw : log_weights_) max_lw = std::max(max_lw, lw);
        if (!std::isfinite(max_lw))
            throw FilterDegeneracyError(
                "particle filter degenerate: every particle has zero "
                "likelihood; restart with more particles or a noise floor");
        std::vector<double> ex(s);
        for (int i = 0; i < s; ++i) ex[i] = std::exp(log_weights_[i] - max_lw);
        const double norm = kahan_sum(ex);
        const double log_norm = max_lw + std::log(norm);
        weights_.resize(s);
        for (int i = 0; i < s; ++i) {
            log_weights_[i] -= log_norm;
            weights_[i] = ex[i] / norm;
        }
        ess_ = effective_sample_size(weights_);
    }

    void append_history(const MeasurementConfig& config,
                        const OutcomeCounts& counts) {
        const auto key = config.canonical_key();
        auto it = hist_index_.find(key);
        if (it == hist_index_.end()) {
            hist_index_.emplace(key, history_.size());
            history_.push_back({config, {counts.counts[0], counts.counts[1]}});
            hist_flat_.push_back({config.axis()[0], config.axis()[1],
                                  config.axis()[2],
                                  static_cast<double>(counts.counts[0]),
                                  static_cast<double>(counts.counts[1])});
        } else {
            auto& entry = history_[it->second];
            entry.counts[0] += counts.counts[0];
            entry.counts[1] += counts.counts[1];
            hist_flat_[it->second].c0 = static_cast<double>(entry.counts[0]);
            hist_flat_[it->second].c1 = static_cast<double>(entry.counts[1]);
        }
    }

    struct FlatEntry {
        double bx, by, bz;
        double c0, c1;
    };

    FilterConfig config_;
    Rng rng_;
    std::vector<Vec4> coords_;
    std::vector<Vec3> states_;
    std::vector<double> log_weights_;  // normalized: logsumexp == 0
    std::vector<double> weights_;
    double ess_ = 0.0;

    std::vector<HistoryEntry> history_;
    std::vector<FlatEntry> hist_flat_;
    std::map<std::array<std::int64_t, 3>, std::size_t> hist_index_;
    std::int64_t step_count_ = 0;

    double mh_scale_ = 0.1;
    std::int64_t adapt_steps_ = 0;
    std::int64_t resample_count_ = 0;
    std::int64_t last_prob_evals_ = 0;
    double last_acceptance_rate_ = 0.0;
};

}  // namespace qtomo
