#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace qtomo {

using Vec3 = std::array<double, 3>;
using Vec4 = std::array<double, 4>;

inline constexpr double kNormSlack = 1e-12;
inline constexpr double kPi = 3.14159265358979323846;

inline double dot(const Vec3& a, const Vec3& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double norm2(const Vec3& a) { return dot(a, a); }

inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0]};
}

inline Vec3 scaled(const Vec3& a, double c) {
    return {a[0] * c, a[1] * c, a[2] * c};
}

inline Vec3 normalized(const Vec3& a) {
    const double n = norm(a);
    if (n < 1e-300) throw std::invalid_argument("cannot normalize zero vector");
    return scaled(a, 1.0 / n);
}

// Single-qubit density matrix rho = (I + s.sigma)/2 stored by its Stokes
// vector. Convention (fixed project-wide): s3 = +1 is |H>, the transmitted
// port of the polarizing beam splitter; s1 is the diagonal/antidiagonal
// axis and s2 the circular axis.
class QubitState {
  public:
    QubitState() : s_{0.0, 0.0, 0.0} {}

    QubitState(double s1, double s2, double s3) : s_{s1, s2, s3} {
        if (!std::isfinite(s1) || !std::isfinite(s2) || !std::isfinite(s3))
            throw std::invalid_argument("QubitState: non-finite Stokes vector");
        if (norm2(s_) > 1.0 + kNormSlack)
            throw std::invalid_argument(
                "QubitState: Stokes vector outside the Bloch ball");
    }

    explicit QubitState(const Vec3& s) : QubitState(s[0], s[1], s[2]) {}

    double s1() const { return s_[0]; }
    double s2() const { return s_[1]; }
    double s3() const { return s_[2]; }
    const Vec3& stokes() const { return s_; }

    // |s|^2; 1 for pure states, 0 for the maximally mixed state.
    double bloch_norm2() const { return norm2(s_); }

  private:
    Vec3 s_;
};

// Point on the radius-1/2 3-sphere isometric (in the Bures sense) to the
// Bloch ball; the physical hemisphere is x4 >= 0.
class SphereCoord {
  public:
    SphereCoord() : x_{0.0, 0.0, 0.0, 0.5} {}

    explicit SphereCoord(const Vec4& x) : x_(x) {
        const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
        if (std::abs(r2 - 0.25) > kNormSlack)
            throw std::invalid_argument("SphereCoord: not on the radius-1/2 sphere");
        if (x[3] < 0.0)
            throw std::invalid_argument("SphereCoord: x4 must be non-negative");
    }

    // Rescales an arbitrary non-zero 4-vector onto the sphere and reflects it
    // into the x4 >= 0 hemisphere.
    static SphereCoord from_direction(const Vec4& v) {
        const double n =
            std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]);
        if (n < 1e-300)
            throw std::invalid_argument("SphereCoord: zero direction");
        const double c = 0.5 / n;
        SphereCoord out;
        out.x_ = {v[0] * c, v[1] * c, v[2] * c, std::abs(v[3]) * c};
        return out;
    }

    double x1() const { return x_[0]; }
    double x2() const { return x_[1]; }
    double x3() const { return x_[2]; }
    double x4() const { return x_[3]; }
    const Vec4& coords() const { return x_; }

  private:
    Vec4 x_;
};

// x_i = s_i / 2, x4 = sqrt(1 - |s|^2) / 2.
inline SphereCoord embed(const QubitState& state) {
    const Vec3& s = state.stokes();
    const double rem = std::max(0.0, 1.0 - norm2(s));
    SphereCoord out = SphereCoord::from_direction(
        {s[0] * 0.5, s[1] * 0.5, s[2] * 0.5, 0.5 * std::sqrt(rem)});
    return out;
}

inline QubitState project(const SphereCoord& coord) {
    return QubitState(2.0 * coord.x1(), 2.0 * coord.x2(), 2.0 * coord.x3());
}

// Uhlmann fidelity in the closed two-level form
//   F = Tr(rho_a rho_b) + 2 sqrt(det rho_a det rho_b)
//     = (1 + sa.sb + sqrt((1-|sa|^2)(1-|sb|^2))) / 2,
// kept branch-free for the particle-filter hot loop. The general
// matrix-square-root definition is used as an oracle in the tests only.
inline double fidelity(const QubitState& a, const QubitState& b) {
    const double pa = std::max(0.0, 1.0 - a.bloch_norm2());
    const double pb = std::max(0.0, 1.0 - b.bloch_norm2());
    const double f = 0.5 * (1.0 + dot(a.stokes(), b.stokes()) + std::sqrt(pa * pb));
    return std::min(1.0, std::max(0.0, f));
}

inline double infidelity(const QubitState& a, const QubitState& b) {
    return 1.0 - fidelity(a, b);
}

// d_B^2 = 2 - 2 sqrt(F).
inline double bures_distance(const QubitState& a, const QubitState& b) {
    const double f = fidelity(a, b);
    return std::sqrt(std::max(0.0, 2.0 - 2.0 * std::sqrt(f)));
}

// Euclidean distance between Stokes vectors; used for convergence metrics.
inline double bloch_distance(const QubitState& a, const QubitState& b) {
    const Vec3& u = a.stokes();
    const Vec3& v = b.stokes();
    const Vec3 d{u[0] - v[0], u[1] - v[1], u[2] - v[2]};
    return norm(d);
}

}  // namespace qtomo
