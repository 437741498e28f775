#pragma once

/**
 * @file oracle.hpp
 * @brief Full 2^N Hilbert-space reference for the LMG statics, built from
 *        Pauli strings on computational basis states.
 *
 * Basis state s has qubit j up (sigma_z = +1) when bit j of s is set.
 */

#include <lmgqpt/dicke.hpp>
#include <lmgqpt/errors.hpp>

#include <Eigen/Dense>
#include <lapacke.h>

#include <cstdint>
#include <string>
#include <vector>

namespace lmgqpt::harness {

struct OracleResult {
    double e0 = 0.0;
    double gap = 0.0;
    double zeta_x = 0.0;
    double zeta_y = 0.0;
    double c_xy = 0.0;
    double c_xxyy = 0.0;
};

inline constexpr int kOracleMaxQubits = 12;

namespace detail {

inline Eigen::VectorXcd collective_x(const Eigen::VectorXcd& v, int n) {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
    for (Eigen::Index s = 0; s < v.size(); ++s)
        for (int j = 0; j < n; ++j) out[s ^ (Eigen::Index{1} << j)] += 0.5 * v[s];
    return out;
}

inline Eigen::VectorXcd collective_y(const Eigen::VectorXcd& v, int n) {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
    const cplx i_unit{0.0, 1.0};
    for (Eigen::Index s = 0; s < v.size(); ++s)
        for (int j = 0; j < n; ++j) {
            const bool up = (s >> j) & 1;
            out[s ^ (Eigen::Index{1} << j)] += (up ? 0.5 * i_unit : -0.5 * i_unit) * v[s];
        }
    return out;
}

}  // namespace detail

/// Dense 2^N Hamiltonian in units of epsilon.
inline Eigen::MatrixXd brute_force_hamiltonian(int n_qubits, double jx, double jy, double bx) {
    if (n_qubits < 1) throw PreconditionError("brute_force_statics: n_qubits must be >= 1");
    if (n_qubits > kOracleMaxQubits)
        throw PreconditionError("brute_force_statics: refusing N=" + std::to_string(n_qubits) + " (cap is " +
                                std::to_string(kOracleMaxQubits) + ")");
    const Eigen::Index dim = Eigen::Index{1} << n_qubits;
    const double n = n_qubits;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index s = 0; s < dim; ++s) {
        for (int j = 0; j < n_qubits; ++j) {
            const bool up = (s >> j) & 1;
            h(s, s) += up ? 0.5 : -0.5;
            h(s ^ (Eigen::Index{1} << j), s) += bx;
        }
        for (int i = 0; i < n_qubits; ++i)
            for (int j = i + 1; j < n_qubits; ++j) {
                const Eigen::Index t = s ^ (Eigen::Index{1} << i) ^ (Eigen::Index{1} << j);
                const bool same = ((s >> i) & 1) == ((s >> j) & 1);
                // sigma_y sigma_y picks up -1 on aligned pairs, +1 on anti-aligned ones
                h(t, s) += -(jx + jy * (same ? -1.0 : 1.0)) / n;
            }
    }
    return h;
}

/**
 * Ground energy, gap and the static observables of the full 2^N model,
 * H = (1/2) sum sigma_z - (1/N) sum_{i<j} (jx sigma_x sigma_x + jy sigma_y sigma_y) + bx sum sigma_x.
 * Refuses N above 12.
 */
inline OracleResult brute_force_statics(int n_qubits, double jx, double jy, double bx) {
    Eigen::MatrixXd h = brute_force_hamiltonian(n_qubits, jx, jy, bx);
    const auto dim = static_cast<lapack_int>(h.rows());
    if (dim < 2) throw PreconditionError("brute_force_statics: need at least two states");

    lapack_int found = 0;
    std::vector<double> w(static_cast<std::size_t>(dim));
    Eigen::MatrixXd z(dim, 2);
    std::vector<lapack_int> isuppz(4);
    const lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'U', dim, h.data(), dim, 0.0, 0.0, 1, 2, 0.0,
                                           &found, w.data(), z.data(), dim, isuppz.data());
    if (info != 0 || found != 2)
        throw NumericError("brute_force_statics: dsyevr failed (info=" + std::to_string(info) + ")");

    const Eigen::VectorXcd psi = z.col(0).cast<cplx>().normalized();
    const Eigen::VectorXcd sx = detail::collective_x(psi, n_qubits);
    const Eigen::VectorXcd sy = detail::collective_y(psi, n_qubits);
    const Eigen::VectorXcd sx2 = detail::collective_x(sx, n_qubits);
    const Eigen::VectorXcd sy2 = detail::collective_y(sy, n_qubits);
    const double n2 = static_cast<double>(n_qubits) * n_qubits;

    OracleResult r;
    r.e0 = w[0];
    r.gap = w[1] - w[0];
    const double ex2 = psi.dot(sx2).real();
    const double ey2 = psi.dot(sy2).real();
    r.zeta_x = ex2 / n2;
    r.zeta_y = ey2 / n2;
    r.c_xy = sx.dot(sy).real() - psi.dot(sx).real() * psi.dot(sy).real();
    r.c_xxyy = sx2.dot(sy2).real() - ex2 * ey2;
    return r;
}

}  // namespace lmgqpt::harness
