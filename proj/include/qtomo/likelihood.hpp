#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "qtomo/measurement.hpp"
#include "qtomo/qubit.hpp"

namespace qtomo {

class DegenerateModelError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Detector noise description. Only the ratios lambda_d/lambda_s and
// eta_1/eta_2 enter the outcome probabilities; the absolute rates are kept
// because that is what a pilot experiment reports.
struct NoiseModel {
    bool dark_enabled = false;
    bool efficiency_enabled = false;
    double source_rate = 1.0;                    // lambda_s, events/s
    std::vector<double> dark_rates{0.0, 0.0};    // lambda_d per detector
    std::vector<double> efficiencies{1.0, 1.0};  // eta per channel

    static NoiseModel ideal() { return NoiseModel{}; }

    bool is_ideal() const { return !dark_enabled && !efficiency_enabled; }

    void validate(std::size_t outcomes) const {
        if (!(source_rate > 0.0) || !std::isfinite(source_rate))
            throw std::invalid_argument("NoiseModel: source_rate must be > 0");
        if (dark_enabled) {
            if (dark_rates.size() != outcomes)
                throw std::invalid_argument("NoiseModel: dark_rates size mismatch");
            for (double d : dark_rates)
                if (d < 0.0 || !std::isfinite(d))
                    throw std::invalid_argument("NoiseModel: invalid dark rate");
        }
        if (efficiency_enabled) {
            if (efficiencies.size() != outcomes)
                throw std::invalid_argument("NoiseModel: efficiencies size mismatch");
            for (double e : efficiencies)
                if (!(e > 0.0) || e > 1.0 || !std::isfinite(e))
                    throw std::invalid_argument(
                        "NoiseModel: efficiency must be in (0, 1]");
        }
    }
};

// Counts per detector for one block of measurements at a fixed configuration.
struct OutcomeCounts {
    std::vector<std::int64_t> counts;

    OutcomeCounts() = default;
    explicit OutcomeCounts(std::vector<std::int64_t> c) : counts(std::move(c)) {
        for (auto v : counts)
            if (v < 0) throw std::invalid_argument("OutcomeCounts: negative count");
    }
    static OutcomeCounts pair(std::int64_t c0, std::int64_t c1) {
        return OutcomeCounts({c0, c1});
    }

    std::int64_t total() const {
        return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
    }
};

// Per-run constants of the two-outcome noise map. With p the Born probability
// of outcome 0, the detector-event probability is
//   P(0) = (e0 p + d0) / (e0 p + d0 + e1 (1 - p) + d1),
// which covers the ideal (e = 1, d = 0), dark-count (e = lambda_s,
// d = lambda_d), efficiency (e = eta, d = 0) and combined
// (e = eta lambda_s, d = lambda_d) models. Dark counts originate in the
// detectors, downstream of the lossy channel, so efficiency scales only the
// Born terms and the dark rates are superposed afterwards.
struct TwoOutcomeNoise {
    double e0 = 1.0, d0 = 0.0, e1 = 1.0, d1 = 0.0;

    static TwoOutcomeNoise from(const NoiseModel& noise) {
        noise.validate(2);
        TwoOutcomeNoise c;
        const double ls = noise.dark_enabled ? noise.source_rate : 1.0;
        c.e0 = ls * (noise.efficiency_enabled ? noise.efficiencies[0] : 1.0);
        c.e1 = ls * (noise.efficiency_enabled ? noise.efficiencies[1] : 1.0);
        c.d0 = noise.dark_enabled ? noise.dark_rates[0] : 0.0;
        c.d1 = noise.dark_enabled ? noise.dark_rates[1] : 0.0;
        return c;
    }

    // p0 = Born probability of outcome 0; returns detector-event P(0).
    double prob0(double p0) const {
        const double n0 = e0 * p0 + d0;
        const double n1 = e1 * (1.0 - p0) + d1;
        return n0 / (n0 + n1);
    }
};

// Detector-event distribution for a state measured with `povm` under `noise`.
inline std::vector<double> outcome_probs(const QubitState& state,
                                         const Povm& povm,
                                         const NoiseModel& noise) {
    const std::size_t m = povm.outcome_count();
    noise.validate(m);
    std::vector<double> born = born_probs(state, povm);
    std::vector<double> nums(m);
    double denom = 0.0;
    for (std::size_t g = 0; g < m; ++g) {
        const double e =
            (noise.dark_enabled ? noise.source_rate : 1.0) *
            (noise.efficiency_enabled ? noise.efficiencies[g] : 1.0);
        const double d = noise.dark_enabled ? noise.dark_rates[g] : 0.0;
        nums[g] = e * born[g] + d;
        denom += nums[g];
    }
    if (!(denom > 0.0))
        throw DegenerateModelError(
            "outcome_probs: all detector-event rates are zero");
    for (auto& v : nums) v /= denom;
    return nums;
}

inline std::vector<double> outcome_probs(const QubitState& state,
                                         const MeasurementConfig& config,
                                         const NoiseModel& noise) {
    return outcome_probs(state, config.povm(), noise);
}

// log L of a measurement block, dropping the multinomial coefficient (it is
// constant in rho and cancels from posterior weights). A positive count on a
// zero-probability outcome yields -inf, which the filter maps to zero weight.
inline double block_log_likelihood(const OutcomeCounts& counts,
                                   const std::vector<double>& probs) {
    if (counts.counts.size() != probs.size())
        throw std::invalid_argument("block_log_likelihood: size mismatch");
    double ll = 0.0;
    for (std::size_t g = 0; g < probs.size(); ++g) {
        const auto c = counts.counts[g];
        if (c == 0) continue;
        if (probs[g] <= 0.0) return -std::numeric_limits<double>::infinity();
        ll += static_cast<double>(c) * std::log(probs[g]);
    }
    return ll;
}

}  // namespace qtomo
