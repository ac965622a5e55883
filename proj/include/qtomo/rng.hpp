#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

namespace qtomo {

// All randomness in the library flows through the engine below instead of
// <random>, because the standard distributions are implementation-defined
// and would break byte-identical reproducibility across toolchains.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stable seed derivation for independent streams: run seeds come from
// derive_seed(master_seed, run_index), per-role streams from a further
// derive_seed(run_seed, role).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t s = base ^ (0x517cc1b727220a95ULL * (stream + 1));
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    return a ^ (b << 1);
}

// xoshiro256** by Blackman & Vigna (public domain reference implementation).
class Rng {
  public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0) {
        std::uint64_t sm = seed;
        for (auto& w : state_) w = splitmix64(sm);
    }

    static Rng from_state(const std::array<std::uint64_t, 4>& words) {
        Rng r;
        r.state_ = words;
        return r;
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Standard normal via the Marsaglia polar method. The paired variate is
    // discarded so the draw sequence is a pure function of the engine state.
    double normal() {
        for (;;) {
            const double u = 2.0 * uniform() - 1.0;
            const double v = 2.0 * uniform() - 1.0;
            const double r2 = u * u + v * v;
            if (r2 > 0.0 && r2 < 1.0) {
                return u * std::sqrt(-2.0 * std::log(r2) / r2);
            }
        }
    }

    std::array<double, 3> normal3() { return {normal(), normal(), normal()}; }

    std::array<double, 4> normal4() {
        return {normal(), normal(), normal(), normal()};
    }

    // Uniform direction on the unit 2-sphere.
    std::array<double, 3> unit_vector3() {
        for (;;) {
            const auto g = normal3();
            const double n = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
            if (n > 1e-12) return {g[0] / n, g[1] / n, g[2] / n};
        }
    }

    const std::array<std::uint64_t, 4>& state() const { return state_; }

    std::string state_hex() const {
        std::ostringstream os;
        os << std::hex;
        for (std::size_t i = 0; i < state_.size(); ++i) {
            if (i) os << ':';
            os << state_[i];
        }
        return os.str();
    }

    static Rng from_state_hex(const std::string& hex) {
        std::array<std::uint64_t, 4> words{};
        std::istringstream is(hex);
        std::string part;
        for (auto& w : words) {
            if (!std::getline(is, part, ':'))
                throw std::invalid_argument("rng state: expected 4 words");
            w = std::stoull(part, nullptr, 16);
        }
        return from_state(words);
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
};

}  // namespace qtomo
