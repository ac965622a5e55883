#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtomo/io.hpp"
#include "qtomo/likelihood.hpp"
#include "qtomo/measurement.hpp"
#include "qtomo/qubit.hpp"
#include "qtomo/rng.hpp"

namespace qtomo {

class PilotEstimationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// One simulated measurement block; `n` is the measurement count before the
// block was taken.
struct EventRecord {
    std::int64_t n = 0;
    MeasurementConfig config{Vec3{0.0, 0.0, 1.0}};
    std::int64_t k = 0;
    std::array<std::int64_t, 2> counts{0, 0};
};

struct PilotEstimate {
    std::array<double, 2> dark_ratio{0.0, 0.0};     // lambda_d / lambda_s
    std::array<double, 2> dark_ratio_se{0.0, 0.0};
    double efficiency_ratio = 1.0;                  // eta_1 / eta_2
    double efficiency_ratio_se = 0.0;
};

// Simulated measurement apparatus: a hidden true state, a noise model, and a
// seeded outcome stream. Outcomes are drawn directly from the categorical
// detector-event distribution, which coincides with the per-event law of the
// underlying Poisson processes.
class Apparatus {
  public:
    Apparatus(const QubitState& true_state, const NoiseModel& noise,
              std::uint64_t seed)
        : true_state_(true_state), noise_(noise), rng_(seed) {
        noise_.validate(2);
    }

    const QubitState& true_state() const { return true_state_; }
    const NoiseModel& noise() const { return noise_; }
    const std::vector<EventRecord>& events() const { return events_; }
    std::int64_t measurements_taken() const { return measurements_; }

    OutcomeCounts draw_block(const MeasurementConfig& config, std::int64_t k) {
        if (k < 1) throw std::invalid_argument("draw_block: k must be >= 1");
        const auto probs = outcome_probs(true_state_, config, noise_);
        std::int64_t c0 = 0;
        for (std::int64_t i = 0; i < k; ++i)
            if (rng_.uniform() < probs[0]) ++c0;
        EventRecord rec;
        rec.n = measurements_;
        rec.config = config;
        rec.k = k;
        rec.counts = {c0, k - c0};
        events_.push_back(rec);
        measurements_ += k;
        return OutcomeCounts::pair(c0, k - c0);
    }

    // Pilot calibration: a source-blocked phase measures the dark rates, a
    // balanced phase (analyzer axis orthogonal to the prepared state, so both
    // Born terms are 1/2) measures the bright rates. Efficiencies are only
    // identifiable up to a common scale; estimates are reported with the
    // larger channel normalized to 1, which leaves the likelihood unchanged.
    // n_dark and n_bright are expected event counts for the two phases.
    PilotEstimate pilot_estimate(std::int64_t n_dark, std::int64_t n_bright) {
        if (n_dark < 1 || n_bright < 1)
            throw std::invalid_argument("pilot_estimate: counts must be >= 1");
        const double ls = noise_.dark_enabled ? noise_.source_rate : 1.0;
        const double ld0 = noise_.dark_enabled ? noise_.dark_rates[0] : 0.0;
        const double ld1 = noise_.dark_enabled ? noise_.dark_rates[1] : 0.0;
        const double eta0 = noise_.efficiency_enabled ? noise_.efficiencies[0] : 1.0;
        const double eta1 = noise_.efficiency_enabled ? noise_.efficiencies[1] : 1.0;

        // Phase A: source blocked for a fixed duration.
        const double dark_total = ld0 + ld1;
        const double t_dark =
            dark_total > 0.0 ? n_dark / dark_total : n_dark / ls;
        const double a0 = static_cast<double>(draw_poisson(ld0 * t_dark));
        const double a1 = static_cast<double>(draw_poisson(ld1 * t_dark));

        // Phase B: balanced bright run for a fixed duration.
        const double r0 = 0.5 * eta0 * ls + ld0;
        const double r1 = 0.5 * eta1 * ls + ld1;
        const double t_bright = n_bright / (r0 + r1);
        const double b0 = static_cast<double>(draw_poisson(r0 * t_bright));
        const double b1 = static_cast<double>(draw_poisson(r1 * t_bright));

        const double dark0 = a0 / t_dark;
        const double dark1 = a1 / t_dark;
        const double bright0 = b0 / t_bright - dark0;  // eta_0 lambda_s / 2
        const double bright1 = b1 / t_bright - dark1;
        if (bright0 <= 0.0 || bright1 <= 0.0)
            throw PilotEstimationError(
                "pilot_estimate: no source events detected in the bright run");

        PilotEstimate est;
        est.efficiency_ratio = bright0 / bright1;
        // Rate variances: Poisson counts over known durations.
        const double var_b0 = b0 / (t_bright * t_bright) + a0 / (t_dark * t_dark);
        const double var_b1 = b1 / (t_bright * t_bright) + a1 / (t_dark * t_dark);
        est.efficiency_ratio_se =
            est.efficiency_ratio *
            std::sqrt(var_b0 / (bright0 * bright0) + var_b1 / (bright1 * bright1));

        // Source rate with the larger channel's efficiency set to 1.
        const double source = 2.0 * std::max(bright0, bright1);
        const double var_source =
            4.0 * (bright0 >= bright1 ? var_b0 : var_b1);
        for (int g = 0; g < 2; ++g) {
            const double dg = g == 0 ? dark0 : dark1;
            const double var_dg =
                (g == 0 ? a0 : a1) / (t_dark * t_dark);
            est.dark_ratio[g] = dg / source;
            if (dg > 0.0) {
                est.dark_ratio_se[g] =
                    est.dark_ratio[g] *
                    std::sqrt(var_dg / (dg * dg) + var_source / (source * source));
            } else {
                // Zero observed dark counts: quote the one-count resolution.
                est.dark_ratio_se[g] = 1.0 / (t_dark * source);
            }
        }
        return est;
    }

    void write_event_log(std::ostream& os) const {
        os << "n,kind,p1,p2,p3,k,count_0,count_1\n";
        for (const auto& e : events_) write_event(os, e);
    }

    // Line format (documented field order): measurement index before the
    // block, configuration kind, three parameters (axis components, or the
    // two waveplate angles and a zero), block size, per-detector counts.
    static void write_event(std::ostream& os, const EventRecord& e) {
        const auto& cfg = e.config;
        os << e.n << ',';
        if (cfg.waveplate_angles()) {
            os << "wp," << fmt_double(cfg.waveplate_angles()->quarter_deg) << ','
               << fmt_double(cfg.waveplate_angles()->half_deg) << ",0";
        } else {
            os << "axis," << fmt_double(cfg.axis()[0]) << ','
               << fmt_double(cfg.axis()[1]) << ',' << fmt_double(cfg.axis()[2]);
        }
        os << ',' << e.k << ',' << e.counts[0] << ',' << e.counts[1] << '\n';
    }

    static EventRecord parse_event(const std::string& line) {
        const auto f = split(line, ',');
        if (f.size() != 8)
            throw std::invalid_argument("event log: expected 8 fields, got line '" +
                                        line + "'");
        EventRecord rec;
        rec.n = std::stoll(f[0]);
        if (f[1] == "wp") {
            const double q = parse_double(f[2]);
            const double h = parse_double(f[3]);
            rec.config = MeasurementConfig(waveplate_axis(q, h),
                                           WaveplateAngles{q, h});
        } else if (f[1] == "axis") {
            rec.config = MeasurementConfig(normalized(
                {parse_double(f[2]), parse_double(f[3]), parse_double(f[4])}));
        } else {
            throw std::invalid_argument("event log: unknown kind '" + f[1] + "'");
        }
        rec.k = std::stoll(f[5]);
        rec.counts = {std::stoll(f[6]), std::stoll(f[7])};
        if (rec.counts[0] + rec.counts[1] != rec.k)
            throw std::invalid_argument("event log: counts do not sum to k");
        return rec;
    }

    static std::vector<EventRecord> read_event_log(std::istream& is) {
        std::vector<EventRecord> out;
        std::string line;
        bool first = true;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            if (first) {
                first = false;
                if (line.rfind("n,", 0) == 0) continue;  // header
            }
            out.push_back(parse_event(line));
        }
        return out;
    }

  private:
    // Counting draw: number of exponential arrivals before the deadline.
    std::int64_t draw_poisson(double mean) {
        if (mean < 0.0 || !std::isfinite(mean))
            throw std::invalid_argument("draw_poisson: invalid mean");
        if (mean == 0.0) return 0;
        std::int64_t n = 0;
        double t = 0.0;
        for (;;) {
            const double u = rng_.uniform();
            t += -std::log(1.0 - u);
            if (t > mean) return n;
            ++n;
        }
    }

    QubitState true_state_;
    NoiseModel noise_;
    Rng rng_;
    std::vector<EventRecord> events_;
    std::int64_t measurements_ = 0;
};

}  // namespace qtomo
