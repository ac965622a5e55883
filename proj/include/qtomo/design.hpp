#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qtomo/likelihood.hpp"
#include "qtomo/measurement.hpp"
#include "qtomo/particle_filter.hpp"
#include "qtomo/qubit.hpp"
#include "qtomo/rng.hpp"

namespace qtomo {

// Block-size schedule: k = max(floor(n / 100), 1) with n measurements seen.
inline std::int64_t block_size(std::int64_t n) {
    return std::max<std::int64_t>(n / 100, 1);
}

inline double shannon_entropy(const std::array<double, 2>& p) {
    double h = 0.0;
    for (double v : p)
        if (v > 0.0) h -= v * std::log(v);
    return h;
}

// Expected information gain of measuring `config` next (mutual information
// between outcome and state): predictive entropy minus posterior-averaged
// per-state outcome entropy, in nats.
inline double info_gain(const Posterior& post, const MeasurementConfig& config,
                        const NoiseModel& noise) {
    const TwoOutcomeNoise k = TwoOutcomeNoise::from(noise);
    const Vec3 axis = config.axis();
    const int s = post.particle_count();
    std::vector<double> pred_terms(s), ent_terms(s);
    for (int i = 0; i < s; ++i) {
        const double born0 = std::min(
            1.0, std::max(0.0, 0.5 * (1.0 + dot(axis, post.particle_stokes(i)))));
        const double p0 = k.prob0(born0);
        const double w = post.weight(i);
        pred_terms[i] = w * p0;
        ent_terms[i] = w * shannon_entropy({p0, 1.0 - p0});
    }
    const double pred0 = std::min(1.0, std::max(0.0, kahan_sum(pred_terms)));
    return shannon_entropy({pred0, 1.0 - pred0}) - kahan_sum(ent_terms);
}

// Candidate pool for the adaptive search: a fixed quasi-uniform axis grid,
// fresh random axes each step, and the axis along the current posterior
// mean. The mean-axis candidate is what lets the alignment precision keep
// improving once the posterior is tighter than the grid spacing.
struct CandidateConfig {
    int n_grid = 30;
    int n_fresh = 10;
    bool include_mean_axis = true;

    void validate() const {
        if (n_grid < 0 || n_fresh < 0 ||
            n_grid + n_fresh + (include_mean_axis ? 1 : 0) < 1)
            throw std::invalid_argument("CandidateConfig: empty candidate set");
    }
};

// Spherical Fibonacci points on the upper hemisphere; quasi-uniform coverage
// of the projective axis space.
inline std::vector<Vec3> fibonacci_hemisphere_axes(int count) {
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> axes;
    axes.reserve(count);
    for (int i = 0; i < count; ++i) {
        const double z = (i + 0.5) / count;  // hemisphere: z in (0, 1)
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = 2.0 * kPi * std::fmod(i / golden, 1.0);
        axes.push_back({r * std::cos(phi), r * std::sin(phi), z});
    }
    return axes;
}

// Argmax with a deterministic tie rule: the lowest index whose gain is
// within `tol` of the maximum. Keeps the selection stable when all gains are
// equal up to floating-point noise (e.g. a delta posterior).
inline std::size_t pick_best_index(const std::vector<double>& gains,
                                   double tol = 1e-12) {
    if (gains.empty()) throw std::invalid_argument("pick_best_index: empty");
    const double best = *std::max_element(gains.begin(), gains.end());
    for (std::size_t i = 0; i < gains.size(); ++i)
        if (gains[i] >= best - tol) return i;
    return gains.size() - 1;
}

enum class MubAlignment { Generic, Best, Worst };

// Rotation taking unit vector `from` to unit vector `to` (Rodrigues).
inline std::array<Vec3, 3> rotation_between(const Vec3& from, const Vec3& to) {
    const Vec3 v = cross(from, to);
    const double c = dot(from, to);
    const double s2 = norm2(v);
    std::array<Vec3, 3> rot{Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
    if (s2 < 1e-24) {
        if (c > 0.0) return rot;  // identity
        // Antipodal: rotate by pi about any axis orthogonal to `from`.
        Vec3 ortho = std::abs(from[0]) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
        const Vec3 u = normalized(cross(from, ortho));
        for (int r = 0; r < 3; ++r)
            for (int col = 0; col < 3; ++col)
                rot[r][col] = 2.0 * u[r] * u[col] - (r == col ? 1.0 : 0.0);
        return rot;
    }
    const double f = (1.0 - c) / s2;
    // R = I + [v]_x + f [v]_x^2
    const Vec3 vx0{0.0, -v[2], v[1]};
    const Vec3 vx1{v[2], 0.0, -v[0]};
    const Vec3 vx2{-v[1], v[0], 0.0};
    const std::array<Vec3, 3> vx{vx0, vx1, vx2};
    for (int r = 0; r < 3; ++r) {
        for (int col = 0; col < 3; ++col) {
            double vx2el = 0.0;
            for (int m = 0; m < 3; ++m) vx2el += vx[r][m] * vx[m][col];
            rot[r][col] += vx[r][col] + f * vx2el;
        }
    }
    return rot;
}

inline Vec3 apply_rotation(const std::array<Vec3, 3>& rot, const Vec3& v) {
    return {dot(rot[0], v), dot(rot[1], v), dot(rot[2], v)};
}

// Measurement-selection strategy. Adaptive maximizes expected information
// gain over the candidate pool; Random draws axes uniformly; MubCycle walks
// the three mutually unbiased axes, optionally rotated into the best or
// worst alignment with a known true state (simulation-only diagnostics).
class Strategy {
  public:
    enum class Kind { Adaptive, Random, MubCycle };

    static Strategy adaptive(const CandidateConfig& candidates = {}) {
        candidates.validate();
        Strategy s;
        s.kind_ = Kind::Adaptive;
        s.candidates_ = candidates;
        s.grid_ = fibonacci_hemisphere_axes(candidates.n_grid);
        return s;
    }

    static Strategy random() {
        Strategy s;
        s.kind_ = Kind::Random;
        return s;
    }

    static Strategy mub(MubAlignment alignment = MubAlignment::Generic) {
        Strategy s;
        s.kind_ = Kind::MubCycle;
        s.alignment_ = alignment;
        const auto base = mub_axes();
        for (int i = 0; i < 3; ++i) s.mub_[i] = base[i].axis();
        return s;
    }

    Kind kind() const { return kind_; }
    MubAlignment alignment() const { return alignment_; }
    const CandidateConfig& candidates() const { return candidates_; }

    bool needs_true_state() const {
        return kind_ == Kind::MubCycle && alignment_ != MubAlignment::Generic;
    }

    // Rotates the MUB triple for the best/worst alignment diagnostics. Best:
    // the third axis coincides with the true-state axis. Worst: the true
    // state sits at equal angle to all three axes (the (1,1,1)/sqrt(3)
    // configuration).
    void align_to_true_state(const QubitState& true_state) {
        if (!needs_true_state()) return;
        const double r = std::sqrt(true_state.bloch_norm2());
        if (r < 1e-9)
            throw std::invalid_argument(
                "Strategy: best/worst MUB alignment needs a non-degenerate "
                "true state");
        const Vec3 target = scaled(true_state.stokes(), 1.0 / r);
        const double inv_sqrt3 = 1.0 / std::sqrt(3.0);
        const Vec3 reference = alignment_ == MubAlignment::Best
                                   ? Vec3{0.0, 0.0, 1.0}
                                   : Vec3{inv_sqrt3, inv_sqrt3, inv_sqrt3};
        const auto rot = rotation_between(reference, target);
        const auto base = mub_axes();
        for (int i = 0; i < 3; ++i)
            mub_[i] = apply_rotation(rot, base[i].axis());
    }

    // `step` is the selection ordinal (number of prior selections), distinct
    // from the measurement count used by the block schedule.
    MeasurementConfig select(const Posterior& post, const NoiseModel& noise,
                             std::int64_t step, Rng& rng) const {
        switch (kind_) {
            case Kind::Random:
                return MeasurementConfig(canonical_axis(rng.unit_vector3()));
            case Kind::MubCycle:
                return MeasurementConfig(mub_[static_cast<std::size_t>(step % 3)]);
            case Kind::Adaptive:
                break;
        }
        std::vector<Vec3> pool = grid_;
        pool.reserve(pool.size() + candidates_.n_fresh + 1);
        for (int i = 0; i < candidates_.n_fresh; ++i)
            pool.push_back(canonical_axis(rng.unit_vector3()));
        if (candidates_.include_mean_axis) {
            const Vec3 m = post.mean_state().stokes();
            const double r = norm(m);
            if (r > 1e-9) pool.push_back(canonical_axis(scaled(m, 1.0 / r)));
        }
        std::vector<double> gains(pool.size());
        for (std::size_t i = 0; i < pool.size(); ++i)
            gains[i] = info_gain(post, MeasurementConfig(pool[i]), noise);
        return MeasurementConfig(pool[pick_best_index(gains)]);
    }

  private:
    Kind kind_ = Kind::Adaptive;
    CandidateConfig candidates_{};
    MubAlignment alignment_ = MubAlignment::Generic;
    std::vector<Vec3> grid_;
    std::array<Vec3, 3> mub_{Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
};

inline MeasurementConfig select_measurement(const Strategy& strategy,
                                            const Posterior& post,
                                            const NoiseModel& noise,
                                            std::int64_t step, Rng& rng) {
    return strategy.select(post, noise, step, rng);
}

}  // namespace qtomo
