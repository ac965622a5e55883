#pragma once

#include <complex>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "qtomo/qubit.hpp"
#include "qtomo/rng.hpp"

namespace qtomo {

// Prior measures over qubit density matrices. BuresHaar is the inference
// default: the uniform measure on the radius-1/2 3-sphere pushed through the
// isometry to Stokes space. InducedPure(d) traces a d-dimensional
// environment out of a Haar-random bipartite pure state; it concentrates on
// mixed states and is kept for distribution comparisons, not inference.
struct Prior {
    enum class Kind { BuresHaar, InducedPure };

    Kind kind = Kind::BuresHaar;
    int env_dim = 2;

    static Prior bures_haar() { return {Kind::BuresHaar, 2}; }

    static Prior induced_pure(int env_dim) {
        if (env_dim < 2)
            throw std::invalid_argument("Prior: env_dim must be >= 2");
        return {Kind::InducedPure, env_dim};
    }
};

// Uniform point on the radius-1/2 3-sphere, reflected into x4 >= 0. Both
// hemispheres project to the same Stokes point, so reflecting rather than
// rejecting leaves the projected distribution unchanged.
inline SphereCoord sample_bures_coord(Rng& rng) {
    for (;;) {
        const auto g = rng.normal4();
        const double n2 = g[0] * g[0] + g[1] * g[1] + g[2] * g[2] + g[3] * g[3];
        if (n2 > 1e-24) return SphereCoord::from_direction(g);
    }
}

inline QubitState sample_induced_pure(int env_dim, Rng& rng) {
    // Haar-random unit vector in C^(2 d), then a partial trace over the
    // d-dimensional environment.
    const int d = env_dim;
    std::vector<std::complex<double>> psi(2 * d);
    double n2 = 0.0;
    for (auto& a : psi) {
        a = {rng.normal(), rng.normal()};
        n2 += std::norm(a);
    }
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& a : psi) a *= inv;

    double rho00 = 0.0;
    std::complex<double> rho01{0.0, 0.0};
    for (int k = 0; k < d; ++k) {
        rho00 += std::norm(psi[k]);
        rho01 += psi[k] * std::conj(psi[d + k]);
    }
    const double s3 = 2.0 * rho00 - 1.0;
    const double s1 = 2.0 * rho01.real();
    const double s2 = -2.0 * rho01.imag();
    // Clamp against rounding just outside the ball.
    Vec3 s{s1, s2, s3};
    const double r2 = norm2(s);
    if (r2 > 1.0) s = scaled(s, 1.0 / std::sqrt(r2));
    return QubitState(s);
}

inline QubitState sample_prior_state(const Prior& prior, Rng& rng) {
    if (prior.kind == Prior::Kind::BuresHaar)
        return project(sample_bures_coord(rng));
    return sample_induced_pure(prior.env_dim, rng);
}

inline std::vector<QubitState> sample_prior(const Prior& prior,
                                            std::int64_t count,
                                            std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("sample_prior: count must be >= 1");
    Rng rng(seed);
    std::vector<QubitState> out;
    out.reserve(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i)
        out.push_back(sample_prior_state(prior, rng));
    return out;
}

// Radial histogram of the samples falling in the |s3| < halfwidth slab,
// binned by radius in the s1-s2 plane.
struct SlabHistogram {
    struct Bin {
        double radius_lo;
        double radius_hi;
        std::int64_t count;
    };

    double slab_halfwidth = 0.0;
    std::vector<Bin> bins;
    std::int64_t total = 0;

    bool empty() const { return total == 0; }

    // Count per unit annulus area; the quantity that is flat for a uniform
    // in-plane distribution.
    double density(std::size_t i) const {
        const Bin& b = bins[i];
        const double area = kPi * (b.radius_hi * b.radius_hi - b.radius_lo * b.radius_lo);
        return static_cast<double>(b.count) / area;
    }

    void write_csv(std::ostream& os) const;
};

inline SlabHistogram slab_density_profile(const std::vector<QubitState>& samples,
                                          double slab_halfwidth,
                                          std::size_t bin_count = 20) {
    if (!(slab_halfwidth > 0.0))
        throw std::invalid_argument("slab_density_profile: halfwidth must be > 0");
    if (bin_count == 0)
        throw std::invalid_argument("slab_density_profile: need at least one bin");
    SlabHistogram hist;
    hist.slab_halfwidth = slab_halfwidth;
    hist.bins.resize(bin_count);
    for (std::size_t i = 0; i < bin_count; ++i) {
        hist.bins[i].radius_lo = static_cast<double>(i) / bin_count;
        hist.bins[i].radius_hi = static_cast<double>(i + 1) / bin_count;
        hist.bins[i].count = 0;
    }
    for (const auto& st : samples) {
        if (std::abs(st.s3()) >= slab_halfwidth) continue;
        const double r = std::sqrt(st.s1() * st.s1() + st.s2() * st.s2());
        auto idx = static_cast<std::size_t>(r * bin_count);
        if (idx >= bin_count) idx = bin_count - 1;
        ++hist.bins[idx].count;
        ++hist.total;
    }
    return hist;
}

inline void SlabHistogram::write_csv(std::ostream& os) const {
    os << "radius_bin_low,radius_bin_high,count\n";
    for (const auto& b : bins)
        os << b.radius_lo << ',' << b.radius_hi << ',' << b.count << '\n';
}

}  // namespace qtomo
