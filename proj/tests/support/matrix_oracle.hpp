// Independent dense-matrix oracles for the closed-form qubit operations.
// Everything here goes through explicit 2x2 complex matrices and
// eigendecompositions so it shares no code path with the library.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>

namespace oracle {

using Mat2 = Eigen::Matrix2cd;
using Vec3 = std::array<double, 3>;
inline constexpr std::complex<double> kI{0.0, 1.0};

inline Mat2 pauli_x() {
    Mat2 m;
    m << 0, 1, 1, 0;
    return m;
}

inline Mat2 pauli_y() {
    Mat2 m;
    m << 0, -kI, kI, 0;
    return m;
}

inline Mat2 pauli_z() {
    Mat2 m;
    m << 1, 0, 0, -1;
    return m;
}

inline Mat2 density_matrix(const Vec3& s) {
    return 0.5 * (Mat2::Identity() + s[0] * pauli_x() + s[1] * pauli_y() +
                  s[2] * pauli_z());
}

inline Mat2 projector(const Vec3& axis, int outcome) {
    const double sign = outcome == 0 ? 1.0 : -1.0;
    return 0.5 * (Mat2::Identity() + sign * (axis[0] * pauli_x() +
                                             axis[1] * pauli_y() +
                                             axis[2] * pauli_z()));
}

inline double born_probability(const Vec3& state, const Vec3& axis, int outcome) {
    return (projector(axis, outcome) * density_matrix(state)).trace().real();
}

inline Mat2 hermitian_sqrt(const Mat2& m) {
    Eigen::SelfAdjointEigenSolver<Mat2> es(m);
    Eigen::Vector2d ev = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() *
           es.eigenvectors().adjoint();
}

// General definition F = (Tr sqrt(sqrt(a) b sqrt(a)))^2.
inline double fidelity(const Vec3& sa, const Vec3& sb) {
    const Mat2 a = density_matrix(sa);
    const Mat2 b = density_matrix(sb);
    const Mat2 ra = hermitian_sqrt(a);
    const Mat2 inner = ra * b * ra;
    const double tr = hermitian_sqrt(inner).trace().real();
    return tr * tr;
}

// Jones-calculus analyzer oracle: quarter-wave then half-wave plate (as
// unwound from the detector side), ideal PBS transmitting horizontal.
inline Eigen::Vector2cd analyzed_state(double theta_q_deg, double theta_h_deg) {
    const double q = theta_q_deg * M_PI / 180.0;
    const double h = theta_h_deg * M_PI / 180.0;
    const auto rot = [](double t) {
        Mat2 r;
        r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
        return r;
    };
    Mat2 qwp_retard;
    qwp_retard << 1, 0, 0, kI;
    Mat2 hwp_retard;
    hwp_retard << 1, 0, 0, -1;
    const Mat2 qwp = rot(q) * qwp_retard * rot(-q);
    const Mat2 hwp = rot(h) * hwp_retard * rot(-h);
    Eigen::Vector2cd horizontal;
    horizontal << 1, 0;
    return (hwp * qwp * horizontal).normalized();
}

inline Vec3 bloch_of(const Eigen::Vector2cd& psi) {
    const Mat2 rho = psi * psi.adjoint();
    return {(rho * pauli_x()).trace().real(), (rho * pauli_y()).trace().real(),
            (rho * pauli_z()).trace().real()};
}

}  // namespace oracle
