#pragma once

/**
 * @file amplifier_dynamics.hpp
 * @brief Unitary evolution of the amplifier under the absorber-induced field,
 *        quantum gain, and spin Q-function snapshots.
 *
 * H(t) = H_Am + 2 B_x P_e(t) S_x, propagated as a pure state. Each step uses
 * the fourth-order commutator-free Magnus scheme with two exponentials; every
 * exponential is applied with a Lanczos (Krylov) projection, so the scheme is
 * unitary to the Krylov tolerance.
 */

#include <lmgqpt/absorber.hpp>
#include <lmgqpt/dicke.hpp>
#include <lmgqpt/errors.hpp>
#include <lmgqpt/lmg_statics.hpp>
#include <lmgqpt/parallel.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace lmgqpt {

/// Piecewise-linear P_e(t) with constant extrapolation, scaled by the coupling bx.
class DriveSchedule {
public:
    DriveSchedule(std::vector<double> times, std::vector<double> pe, double bx)
        : times_(std::move(times)), pe_(std::move(pe)), bx_(bx) {
        detail::require(!times_.empty() && times_.size() == pe_.size(),
                        "DriveSchedule: times and pe must be non-empty and equally long");
        for (std::size_t i = 1; i < times_.size(); ++i)
            detail::require(times_[i] > times_[i - 1], "DriveSchedule: times must be strictly ascending");
        for (double p : pe_)
            detail::require(p >= -1e-8 && p <= 1.0 + 1e-8, "DriveSchedule: pe samples must lie in [0, 1]");
        detail::require(std::isfinite(bx_), "DriveSchedule: bx must be finite");
    }

    static DriveSchedule from_trace(const TransductionTrace& trace, double bx) {
        return {trace.times, trace.pe, bx};
    }

    /// A drive that holds P_e at `value` for all times.
    static DriveSchedule constant(double value, double bx) { return {{0.0}, {value}, bx}; }

    [[nodiscard]] double bx() const noexcept { return bx_; }
    [[nodiscard]] std::span<const double> times() const noexcept { return times_; }
    [[nodiscard]] std::span<const double> pe_samples() const noexcept { return pe_; }

    [[nodiscard]] double pe(double t) const {
        if (t <= times_.front()) return pe_.front();
        if (t >= times_.back()) return pe_.back();
        const auto it = std::upper_bound(times_.begin(), times_.end(), t);
        const std::size_t hi = static_cast<std::size_t>(it - times_.begin());
        const std::size_t lo = hi - 1;
        const double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
        return (1.0 - w) * pe_[lo] + w * pe_[hi];
    }

    /// Effective in-plane field B_x * P_e(t).
    [[nodiscard]] double field(double t) const { return bx_ * pe(t); }

private:
    std::vector<double> times_;
    std::vector<double> pe_;
    double bx_;
};

struct AmplifierTrajectory {
    std::vector<double> times;
    std::vector<StateVector> states;
    std::vector<double> sx2;
    std::vector<double> sy2;
    std::vector<double> pe;  ///< drive value at each sample

    /// Index of the sample closest to t.
    [[nodiscard]] std::size_t nearest_sample(double t) const {
        detail::require(!times.empty(), "AmplifierTrajectory: empty trajectory");
        std::size_t best = 0;
        for (std::size_t i = 1; i < times.size(); ++i)
            if (std::abs(times[i] - t) < std::abs(times[best] - t)) best = i;
        return best;
    }
};

struct GainTrace {
    std::vector<double> times;
    std::vector<double> gain;
    double g_max = 0.0;
    double t_am = 0.0;  ///< first time gain reaches 0.95 g_max, measured from t_arrival
};

struct EvolveOptions {
    double t_start = -5.0;
    double t_end = 20.0;
    double dt = 1e-3;
    std::size_t sample_every = 100;
    double krylov_tolerance = 1e-13;
};

namespace detail {

/**
 * exp(-i tau A) v for Hermitian A given through `apply`, by Lanczos with full
 * reorthogonalization. The Krylov space grows until the a-posteriori error
 * estimate beta_m |e_m^T exp(-i tau T_m) e_1| falls below `tol`.
 */
template <typename Apply>
StateVector krylov_expm(const Apply& apply, const StateVector& v, double tau, double tol,
                        std::size_t max_dim = 40) {
    const Eigen::Index n = v.size();
    const double beta0 = v.norm();
    if (beta0 == 0.0) return v;
    const std::size_t cap = std::min<std::size_t>(max_dim, static_cast<std::size_t>(n));

    std::vector<StateVector> basis;
    basis.reserve(cap);
    basis.push_back(v / beta0);
    std::vector<double> alpha;
    std::vector<double> beta;
    StateVector w(n);
    Eigen::VectorXcd coeffs;

    for (std::size_t j = 0; j < cap; ++j) {
        apply(basis[j], w);
        const double a = basis[j].dot(w).real();
        alpha.push_back(a);
        w -= a * basis[j];
        if (j > 0) w -= beta[j - 1] * basis[j - 1];
        for (std::size_t r = 0; r <= j; ++r) w -= basis[r].dot(w) * basis[r];
        const double b = w.norm();

        const auto m = static_cast<Eigen::Index>(alpha.size());
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
        for (Eigen::Index i = 0; i < m; ++i) {
            t(i, i) = alpha[static_cast<std::size_t>(i)];
            if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
        const Eigen::VectorXcd phases =
            (es.eigenvalues().cast<cplx>() * cplx{0.0, -tau}).array().exp().matrix();
        coeffs = es.eigenvectors().cast<cplx>() *
                 (phases.asDiagonal() * es.eigenvectors().row(0).transpose().cast<cplx>());

        const bool invariant = b <= 1e-14 * std::max(1.0, std::abs(a));
        if (invariant || b * std::abs(coeffs[m - 1]) < tol || j + 1 == cap) break;
        beta.push_back(b);
        basis.push_back(w / b);
    }

    StateVector out = StateVector::Zero(n);
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) out += coeffs[i] * basis[static_cast<std::size_t>(i)];
    return beta0 * out;
}

}  // namespace detail

/**
 * Propagates the zero-field ground state of `params` from t_start to t_end.
 *
 * A sample (state, <S_x^2>, <S_y^2>) is stored at t_start and after every
 * `sample_every` steps. Norm drift above 1e-6 throws IntegrationError; stored
 * states are renormalized.
 */
inline AmplifierTrajectory evolve(const LmgParams& params, const DriveSchedule& drive,
                                  const EvolveOptions& options = {}) {
    params.validate();
    detail::require(params.bx == 0.0, "evolve: the bias parameters must carry bx = 0");
    detail::require(options.t_end > options.t_start, "evolve: t_end must exceed t_start");
    detail::require(options.t_start <= drive.times().front() + 1e-12,
                    "evolve: t_start must not follow the first drive time");
    detail::require(options.dt > 0.0 && options.dt <= 1e-3 * (1.0 + 1e-12), "evolve: dt must lie in (0, 1e-3]");
    detail::require(options.sample_every >= 1, "evolve: sample_every must be >= 1");

    const DickeSpace space(params.n_qubits);
    const BandedHermitianOperator h0 = assemble_hamiltonian(params);
    const BandedHermitianOperator sx = build_collective_operator(space, CollectiveOp::Sx);
    const BandedHermitianOperator sx2 = build_collective_operator(space, CollectiveOp::Sx2);
    const BandedHermitianOperator sy2 = build_collective_operator(space, CollectiveOp::Sy2);

    StateVector psi = solve_ground(params).ground;
    const auto steps = static_cast<std::size_t>(std::llround((options.t_end - options.t_start) / options.dt));
    const double dt = options.dt;

    AmplifierTrajectory traj;
    auto record = [&](double t) {
        const double drift = std::abs(psi.norm() - 1.0);
        if (!(drift <= 1e-6)) {
            std::ostringstream os;
            os << "evolve: norm drift " << drift << " at t=" << t << " with dt=" << dt;
            throw IntegrationError(os.str());
        }
        psi.normalize();
        traj.times.push_back(t);
        traj.states.push_back(psi);
        traj.sx2.push_back(expectation(sx2, psi));
        traj.sy2.push_back(expectation(sy2, psi));
        traj.pe.push_back(drive.pe(t));
    };
    record(options.t_start);

    // fourth-order commutator-free Magnus: two exponentials per step
    const double root3 = std::sqrt(3.0);
    const double c1 = 0.5 - root3 / 6.0;
    const double c2 = 0.5 + root3 / 6.0;
    const double w_major = 0.25 + root3 / 6.0;
    const double w_minor = 0.25 - root3 / 6.0;

    StateVector tmp(psi.size());
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = options.t_start + static_cast<double>(k) * dt;
        const double f1 = 2.0 * drive.field(t + c1 * dt);
        const double f2 = 2.0 * drive.field(t + c2 * dt);
        for (const double field : {w_major * f1 + w_minor * f2, w_minor * f1 + w_major * f2}) {
            auto apply = [&](const StateVector& in, StateVector& out) {
                h0.apply<cplx>(in, out);
                out *= 0.5;
                if (field != 0.0) {
                    sx.apply<cplx>(in, tmp);
                    out += field * tmp;
                }
            };
            psi = detail::krylov_expm(apply, psi, dt, options.krylov_tolerance);
        }
        if ((k + 1) % options.sample_every == 0 || k + 1 == steps)
            record(options.t_start + static_cast<double>(k + 1) * dt);
    }
    return traj;
}

/// G(t) = <S_x^2(t)> / <S_x^2(t0)>, its maximum, and the amplification time.
inline GainTrace quantum_gain(const AmplifierTrajectory& traj, double t0, double t_arrival = 0.0) {
    detail::require(!traj.times.empty(), "quantum_gain: empty trajectory");
    detail::require(std::abs(t0 - traj.times.front()) <= 1e-9 * std::max(1.0, std::abs(t0)),
                    "quantum_gain: t0 must be the first trajectory time");
    const double base = traj.sx2.front();
    if (!(std::abs(base) >= 1e-300))
        throw NumericError("quantum_gain: <S_x^2(t0)> is degenerate (below 1e-300)");
    GainTrace out;
    out.times = traj.times;
    out.gain.reserve(traj.sx2.size());
    for (double v : traj.sx2) out.gain.push_back(v / base);
    out.gain.front() = 1.0;
    out.g_max = *std::max_element(out.gain.begin(), out.gain.end());
    for (std::size_t i = 0; i < out.gain.size(); ++i) {
        if (out.gain[i] >= 0.95 * out.g_max) {
            out.t_am = out.times[i] - t_arrival;
            break;
        }
    }
    return out;
}

struct QFunctionGrid {
    std::vector<double> theta;   ///< 181 points over [0, pi]
    std::vector<double> phi;     ///< 361 points over [0, 2 pi)
    std::vector<double> values;  ///< row-major, theta outermost

    [[nodiscard]] double at(std::size_t i_theta, std::size_t i_phi) const {
        return values.at(i_theta * phi.size() + i_phi);
    }

    /// Quadrature of Q sin(theta) dtheta dphi (trapezoid in theta, periodic rectangle in phi).
    [[nodiscard]] double normalization() const {
        const double dtheta = theta[1] - theta[0];
        const double dphi = 2.0 * std::numbers::pi / static_cast<double>(phi.size());
        double sum = 0.0;
        for (std::size_t i = 0; i < theta.size(); ++i) {
            const double w = (i == 0 || i + 1 == theta.size()) ? 0.5 : 1.0;
            double row = 0.0;
            for (std::size_t j = 0; j < phi.size(); ++j) row += at(i, j);
            sum += w * std::sin(theta[i]) * row;
        }
        return sum * dtheta * dphi;
    }

    /// Fraction of the sphere-weighted mass whose azimuth lies within
    /// `half_width` of any of `centers`.
    [[nodiscard]] double azimuthal_mass(std::span<const double> centers, double half_width) const {
        double inside = 0.0, total = 0.0;
        for (std::size_t i = 0; i < theta.size(); ++i) {
            const double s = std::sin(theta[i]);
            for (std::size_t j = 0; j < phi.size(); ++j) {
                const double w = s * at(i, j);
                total += w;
                for (double c : centers) {
                    double d = std::fmod(std::abs(phi[j] - c), 2.0 * std::numbers::pi);
                    d = std::min(d, 2.0 * std::numbers::pi - d);
                    if (d <= half_width + 1e-12) {
                        inside += w;
                        break;
                    }
                }
            }
        }
        return total > 0.0 ? inside / total : 0.0;
    }
};

/// Q(theta, phi) = ((2S+1)/4pi) |<theta,phi|psi>|^2 on the 181 x 361 grid.
inline QFunctionGrid q_function(const StateVector& state, const DickeSpace& space, std::size_t n_theta = 181,
                                std::size_t n_phi = 361) {
    detail::require(static_cast<std::size_t>(state.size()) == space.dimension(),
                    "q_function: state dimension does not match the space");
    detail::require(std::abs(state.squaredNorm() - 1.0) <= 1e-8, "q_function: state is not normalized");
    detail::require(n_theta >= 2 && n_phi >= 1, "q_function: grid too small");

    QFunctionGrid grid;
    grid.theta.resize(n_theta);
    grid.phi.resize(n_phi);
    for (std::size_t i = 0; i < n_theta; ++i)
        grid.theta[i] = std::numbers::pi * static_cast<double>(i) / static_cast<double>(n_theta - 1);
    for (std::size_t j = 0; j < n_phi; ++j)
        grid.phi[j] = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n_phi);

    const std::size_t dim = space.dimension();
    const int two_s = space.two_spin();
    // e^{+i (S-m) phi_j}, indexed [j][i] with S - m = 2S - i
    std::vector<cplx> phase(n_phi * dim);
    for (std::size_t j = 0; j < n_phi; ++j)
        for (std::size_t i = 0; i < dim; ++i)
            phase[j * dim + i] = std::polar(1.0, static_cast<double>(two_s - static_cast<int>(i)) * grid.phi[j]);

    const double prefactor = (two_s + 1.0) / (4.0 * std::numbers::pi);
    const auto rows = parallel_map(n_theta, [&](std::size_t i) {
        const SpinCoherentState cs = coherent_amplitudes(space, grid.theta[i], 0.0);
        std::vector<cplx> weighted(dim);
        for (std::size_t m = 0; m < dim; ++m)
            weighted[m] = cs.amplitudes[static_cast<Eigen::Index>(m)].real() * state[static_cast<Eigen::Index>(m)];
        std::vector<double> row(n_phi);
        for (std::size_t j = 0; j < n_phi; ++j) {
            cplx overlap{};
            const cplx* ph = &phase[j * dim];
            for (std::size_t m = 0; m < dim; ++m) overlap += ph[m] * weighted[m];
            row[j] = prefactor * std::norm(overlap);
        }
        return row;
    });
    grid.values.reserve(n_theta * n_phi);
    for (const auto& row : rows) grid.values.insert(grid.values.end(), row.begin(), row.end());
    return grid;
}

}  // namespace lmgqpt
