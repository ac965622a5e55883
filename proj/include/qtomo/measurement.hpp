#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qtomo/qubit.hpp"

namespace qtomo {

// POVM element in Bloch form, M = (w I + a.sigma) / 2. Positive
// semidefiniteness is |a| <= w; completeness over a POVM is sum(w) = 2 and
// sum(a) = 0, so a projective pair {(1, b), (1, -b)} is complete exactly.
struct PovmElement {
    double weight;
    Vec3 axis;

    double probability(const QubitState& state) const {
        return 0.5 * (weight + dot(axis, state.stokes()));
    }
};

class Povm {
  public:
    explicit Povm(std::vector<PovmElement> elements)
        : elements_(std::move(elements)) {
        if (elements_.size() < 2)
            throw std::invalid_argument("Povm: need at least two elements");
        double wsum = 0.0;
        Vec3 asum{0.0, 0.0, 0.0};
        for (const auto& e : elements_) {
            if (norm(e.axis) > e.weight + 1e-9)
                throw std::invalid_argument("Povm: element not PSD");
            wsum += e.weight;
            asum[0] += e.axis[0];
            asum[1] += e.axis[1];
            asum[2] += e.axis[2];
        }
        if (std::abs(wsum - 2.0) > 1e-9 || norm(asum) > 1e-9)
            throw std::invalid_argument("Povm: elements do not sum to identity");
    }

    static Povm projective(const Vec3& axis) {
        const double n = norm(axis);
        if (std::abs(n - 1.0) > 1e-9)
            throw std::invalid_argument("Povm::projective: axis must be unit");
        return Povm({{1.0, axis}, {1.0, {-axis[0], -axis[1], -axis[2]}}});
    }

    std::size_t outcome_count() const { return elements_.size(); }
    const std::vector<PovmElement>& elements() const { return elements_; }

  private:
    std::vector<PovmElement> elements_;
};

// Born rule P(gamma) = Tr[M_gamma rho], clamped into [0, 1] against rounding.
inline std::vector<double> born_probs(const QubitState& state, const Povm& povm) {
    std::vector<double> probs;
    probs.reserve(povm.outcome_count());
    for (const auto& e : povm.elements()) {
        probs.push_back(std::min(1.0, std::max(0.0, e.probability(state))));
    }
    return probs;
}

struct WaveplateAngles {
    double quarter_deg;
    double half_deg;
};

// Analyzer settings: a measurement direction on the Bloch sphere, plus the
// waveplate angles that realize it when the configuration came from the
// apparatus model.
class MeasurementConfig {
  public:
    explicit MeasurementConfig(const Vec3& axis,
                               std::optional<WaveplateAngles> plates = {})
        : axis_(axis), plates_(plates) {
        if (std::abs(norm(axis) - 1.0) > 1e-9)
            throw std::invalid_argument("MeasurementConfig: axis must be unit");
    }

    const Vec3& axis() const { return axis_; }
    const std::optional<WaveplateAngles>& waveplate_angles() const {
        return plates_;
    }

    Povm povm() const { return Povm::projective(axis_); }

    // History key: axis rounded to 1e-9 so that configurations equal up to
    // numerical noise share one compressed-history slot.
    std::array<std::int64_t, 3> canonical_key() const {
        return {static_cast<std::int64_t>(std::llround(axis_[0] * 1e9)),
                static_cast<std::int64_t>(std::llround(axis_[1] * 1e9)),
                static_cast<std::int64_t>(std::llround(axis_[2] * 1e9))};
    }

  private:
    Vec3 axis_;
    std::optional<WaveplateAngles> plates_;
};

// b and -b define the same projective POVM up to outcome relabeling; keep
// the representative with positive leading coordinate.
inline Vec3 canonical_axis(const Vec3& b) {
    bool flip = false;
    if (b[2] < 0.0) {
        flip = true;
    } else if (b[2] == 0.0) {
        if (b[1] < 0.0) {
            flip = true;
        } else if (b[1] == 0.0 && b[0] < 0.0) {
            flip = true;
        }
    }
    return flip ? Vec3{-b[0], -b[1], -b[2]} : b;
}

// The three mutually unbiased single-qubit bases: sigma_x, sigma_y, sigma_z.
inline std::array<MeasurementConfig, 3> mub_axes() {
    return {MeasurementConfig({1.0, 0.0, 0.0}), MeasurementConfig({0.0, 1.0, 0.0}),
            MeasurementConfig({0.0, 0.0, 1.0})};
}

// ---------------------------------------------------------------------------
// Waveplate analyzer model (quarter-wave plate at theta_q, half-wave plate at
// theta_h, ideal PBS). Outcome 0 is the transmitted horizontal port, i.e. the
// POVM projects onto the detection state unwound through the plates:
//
//   |psi(q, h)> = HWP(h) QWP(q) |H>
//
// In Stokes space, with v the Bloch vector of QWP(q)|H>,
//   v = (sin(4q)/2, -sin(2q), cos^2(2q)),
// the half-wave plate reflects (s3, s1) by angle 4h and negates s2.
// ---------------------------------------------------------------------------

inline Vec3 waveplate_axis(double theta_q_deg, double theta_h_deg) {
    if (!std::isfinite(theta_q_deg) || !std::isfinite(theta_h_deg))
        throw std::invalid_argument("waveplate_axis: non-finite angle");
    const double q = theta_q_deg * kPi / 180.0;
    const double h = theta_h_deg * kPi / 180.0;
    const double v1 = 0.5 * std::sin(4.0 * q);
    const double v2 = -std::sin(2.0 * q);
    const double c2q = std::cos(2.0 * q);
    const double v3 = c2q * c2q;
    const double c4 = std::cos(4.0 * h);
    const double s4 = std::sin(4.0 * h);
    const Vec3 b{s4 * v3 - c4 * v1, -v2, c4 * v3 + s4 * v1};
    return normalized(b);
}

inline Povm waveplate_povm(double theta_q_deg, double theta_h_deg) {
    return Povm::projective(waveplate_axis(theta_q_deg, theta_h_deg));
}

// Inverse of waveplate_axis. The quarter-wave plate angle is taken on the
// principal branch q in [-45, 45] degrees; the half-wave plate angle on
// h in (-45, 45]. For the circular poles (b = +-e2) the half-wave plate is
// redundant and set to zero.
inline WaveplateAngles waveplate_angles_for_axis(const Vec3& axis) {
    const Vec3 b = normalized(axis);
    const double s2q = std::min(1.0, std::max(-1.0, b[1]));
    const double q = 0.5 * std::asin(s2q);
    const double v1 = 0.5 * std::sin(4.0 * q);
    const double c2q = std::cos(2.0 * q);
    const double v3 = c2q * c2q;
    const double r2 = v1 * v1 + v3 * v3;
    double h = 0.0;
    if (r2 > 1e-18) {
        const double c4 = (v3 * b[2] - v1 * b[0]) / r2;
        const double s4 = (v1 * b[2] + v3 * b[0]) / r2;
        h = 0.25 * std::atan2(s4, c4);
    }
    return {q * 180.0 / kPi, h * 180.0 / kPi};
}

inline double quantize_angle_deg(double angle_deg, double step_deg = 0.1) {
    return std::round(angle_deg / step_deg) * step_deg;
}

// Maps an ideal measurement direction onto the nearest realizable analyzer
// setting (0.1 degree motor steps) and returns the configuration the
// quantized plates actually measure.
inline MeasurementConfig waveplate_config_for_axis(const Vec3& axis,
                                                   double step_deg = 0.1) {
    const WaveplateAngles ideal = waveplate_angles_for_axis(axis);
    const WaveplateAngles snapped{quantize_angle_deg(ideal.quarter_deg, step_deg),
                                  quantize_angle_deg(ideal.half_deg, step_deg)};
    const Vec3 realized = waveplate_axis(snapped.quarter_deg, snapped.half_deg);
    return MeasurementConfig(realized, snapped);
}

}  // namespace qtomo
