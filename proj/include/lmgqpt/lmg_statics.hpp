#pragma once

/**
 * @file lmg_statics.hpp
 * @brief Ground-state statics of the anisotropic LMG amplifier with an in-plane field.
 *
 * All energies, couplings and fields are expressed in units of the qubit
 * splitting epsilon. In the Dicke sector the Hamiltonian reads
 *
 *   H = S_z - (J_x/N)(2 S_x^2 - N/2) - (J_y/N)(2 S_y^2 - N/2) + 2 B_x S_x,
 *
 * which is the all-to-all pair sum rewritten with sum_{i<j} s_i s_j = 2 S^2 - N/2.
 */

#include <lmgqpt/dicke.hpp>
#include <lmgqpt/eigensolvers.hpp>
#include <lmgqpt/errors.hpp>

#include <cmath>
#include <sstream>
#include <string>

namespace lmgqpt {

struct LmgParams {
    double epsilon = 1.0;
    double jx = 0.0;
    double jy = 0.0;
    double bx = 0.0;
    int n_qubits = 1;

    void validate() const {
        detail::require(epsilon > 0.0, "LmgParams: epsilon must be > 0");
        detail::require(jx >= 0.0 && jy >= 0.0, "LmgParams: couplings must be ferromagnetic (>= 0)");
        detail::require(std::isfinite(bx), "LmgParams: bx must be finite");
        detail::require(n_qubits >= 1, "LmgParams: n_qubits must be >= 1");
    }

    [[nodiscard]] LmgParams with_bx(double field) const {
        LmgParams p = *this;
        p.bx = field;
        return p;
    }

    [[nodiscard]] std::string describe() const {
        std::ostringstream os;
        os.precision(17);
        os << "N=" << n_qubits << " jx=" << jx << " jy=" << jy << " bx=" << bx;
        return os.str();
    }

    friend bool operator==(const LmgParams&, const LmgParams&) = default;
};

struct GroundStateResult {
    double e0 = 0.0;
    double e1 = 0.0;
    double gap = 0.0;
    StateVector ground;  ///< real amplitudes, stored complex
    LmgParams params;
};

struct OrderParameters {
    double zeta_x = 0.0;
    double zeta_y = 0.0;
};

struct CorrelationSet {
    double c_xy = 0.0;
    double c_xxyy = 0.0;
    double eta = 0.0;
};

inline BandedHermitianOperator assemble_hamiltonian(const LmgParams& params) {
    params.validate();
    const DickeSpace space(params.n_qubits);
    const double n = params.n_qubits;
    BandedHermitianOperator h = build_collective_operator(space, CollectiveOp::Sz);
    if (params.epsilon != 1.0) h.scale(params.epsilon);
    h.add_scaled(build_collective_operator(space, CollectiveOp::Sx2), -2.0 * params.jx / n);
    h.add_scaled(build_collective_operator(space, CollectiveOp::Sy2), -2.0 * params.jy / n);
    // constant from the pair-sum identity, kept so absolute energies match the qubit picture
    h.shift(0.5 * (params.jx + params.jy));
    if (params.bx != 0.0) h.add_scaled(build_collective_operator(space, CollectiveOp::Sx), 2.0 * params.bx);
    return h;
}

/// Exact level E(m) on the line J_x = J_y = J with B_x = 0, where H is diagonal in |S,m>.
inline double solvable_line_energy(int n_qubits, double j, double m, double epsilon = 1.0) {
    const double s = 0.5 * n_qubits;
    return epsilon * m - (2.0 * j / n_qubits) * (s * (s + 1.0) - m * m) + j;
}

namespace detail {

/// First component above the noise floor is made positive.
inline void fix_global_sign(Eigen::VectorXd& v) {
    const double floor = 1e-8 * v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) >= floor) {
            if (v[i] < 0.0) v = -v;
            return;
        }
    }
}

}  // namespace detail

/**
 * Two lowest eigenpairs of the assembled Hamiltonian.
 *
 * The ground vector is normalized and sign-fixed so repeated solves are
 * bit-identical. Throws NumericError when the eigen-residual exceeds
 * 1e-8 * ||H|| or the returned levels are out of order.
 */
inline GroundStateResult solve_ground(const LmgParams& params, EigenMethod method = EigenMethod::Banded) {
    const BandedHermitianOperator h = assemble_hamiltonian(params);
    LowestEigenpairs pairs;
    try {
        pairs = lowest_eigenpairs(h, 2, method);
    } catch (const NumericError& e) {
        throw NumericError(std::string(e.what()) + " for " + params.describe());
    }
    if (pairs.values.size() < 2)
        throw NumericError("solve_ground: fewer than two eigenvalues for " + params.describe());

    Eigen::VectorXd g = pairs.vectors.col(0);
    g.normalize();
    detail::fix_global_sign(g);

    GroundStateResult out;
    out.e0 = pairs.values[0];
    out.e1 = pairs.values[1];
    out.gap = out.e1 - out.e0;
    out.ground = g.cast<cplx>();
    out.params = params;

    if (out.gap < -1e-10)
        throw NumericError("solve_ground: eigenvalues out of order for " + params.describe());
    const double residual = (h * g - out.e0 * g).norm();
    if (residual > 1e-8 * h.norm_bound())
        throw NumericError("solve_ground: eigen-residual " + std::to_string(residual) + " too large for " +
                           params.describe());
    return out;
}

/// zeta_a = <S_a^2>_0 / N^2.
inline OrderParameters order_parameters(const GroundStateResult& result) {
    const DickeSpace space(result.params.n_qubits);
    const double n2 = static_cast<double>(result.params.n_qubits) * result.params.n_qubits;
    return {expectation(build_collective_operator(space, CollectiveOp::Sx2), result.ground) / n2,
            expectation(build_collective_operator(space, CollectiveOp::Sy2), result.ground) / n2};
}

/// Symmetrized covariances of (S_x, S_y) and (S_x^2, S_y^2), plus eta = (2/N)|C_xxyy|^{1/4}.
inline CorrelationSet correlations(const GroundStateResult& result) {
    const DickeSpace space(result.params.n_qubits);
    const StateVector& psi = result.ground;
    const StateVector sx = build_collective_operator(space, CollectiveOp::Sx) * psi;
    const StateVector sy = build_collective_operator(space, CollectiveOp::Sy) * psi;
    const StateVector sx2 = build_collective_operator(space, CollectiveOp::Sx2) * psi;
    const StateVector sy2 = build_collective_operator(space, CollectiveOp::Sy2) * psi;

    // (1/2)<A B + B A> = Re <A psi | B psi> for Hermitian A, B
    CorrelationSet out;
    out.c_xy = sx.dot(sy).real() - psi.dot(sx).real() * psi.dot(sy).real();
    out.c_xxyy = sx2.dot(sy2).real() - psi.dot(sx2).real() * psi.dot(sy2).real();
    out.eta = (2.0 / result.params.n_qubits) * std::pow(std::abs(out.c_xxyy), 0.25);
    return out;
}

}  // namespace lmgqpt
