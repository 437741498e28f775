#pragma once

/**
 * @file absorber.hpp
 * @brief Single-photon transduction in a four-level Lambda absorber.
 *
 * Levels are ordered {g, f, h, e}. The photon drives g -> f, a coherent
 * coupling delta_pp mixes f <-> h, and h decays into the metastable e. The
 * single-photon Fock-state master equation is a 2x2 hierarchy of generalized
 * density blocks rho_mn (m, n in {0, 1}); the physical state is rho_11.
 *
 * Everything is written in the frame rotating at the pulse carrier, which is
 * resonant with g -> f and with h; only populations are reported, so the
 * ground-state splitting of e drops out.
 */

#include <lmgqpt/errors.hpp>
#include <lmgqpt/parallel.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace lmgqpt {

enum AbsorberLevel : int { kLevelG = 0, kLevelF = 1, kLevelH = 2, kLevelE = 3 };

struct AbsorberParams {
    double delta_pp = 5.0;   ///< f <-> h coupling
    double gamma_fg = 10.0;  ///< decay f -> g (also the pulse coupling rate)
    double gamma_he = 10.0;  ///< decay h -> e
    double tau_f = 1.0;      ///< pulse length
    double t_arrival = 0.0;  ///< pulse centre
    double eta_scatter = 1.0;
    double phase = 0.0;

    void validate() const {
        detail::require(delta_pp >= 0.0, "AbsorberParams: delta_pp must be >= 0");
        detail::require(gamma_fg > 0.0 && gamma_he > 0.0, "AbsorberParams: decay rates must be > 0");
        detail::require(tau_f > 0.0, "AbsorberParams: tau_f must be > 0");
        detail::require(eta_scatter > 0.0 && eta_scatter <= 1.0, "AbsorberParams: eta must lie in (0, 1]");
        detail::require(std::isfinite(t_arrival) && std::isfinite(phase),
                        "AbsorberParams: t_arrival and phase must be finite");
    }

    friend bool operator==(const AbsorberParams&, const AbsorberParams&) = default;
};

/// Gaussian single-photon wave packet with the carrier removed.
class PulseEnvelope {
public:
    PulseEnvelope(double tau_f, double t_arrival) : tau_f_(tau_f), t_arrival_(t_arrival) {
        detail::require(tau_f > 0.0, "PulseEnvelope: tau_f must be > 0");
    }

    [[nodiscard]] double tau_f() const noexcept { return tau_f_; }
    [[nodiscard]] double t_arrival() const noexcept { return t_arrival_; }

    [[nodiscard]] double operator()(double t) const {
        const double x = t - t_arrival_;
        const double prefactor = std::pow(1.0 / (2.0 * std::numbers::pi * tau_f_ * tau_f_), 0.25);
        return prefactor * std::exp(-x * x / (4.0 * tau_f_ * tau_f_));
    }

    /// Trapezoidal estimate of the photon number on [t_start, t_end] with step dt.
    [[nodiscard]] double norm_on_grid(double t_start, double t_end, double dt) const {
        const auto steps = static_cast<std::size_t>(std::llround((t_end - t_start) / dt));
        double sum = 0.0;
        for (std::size_t k = 0; k <= steps; ++k) {
            const double v = (*this)(t_start + static_cast<double>(k) * dt);
            sum += (k == 0 || k == steps ? 0.5 : 1.0) * v * v;
        }
        return sum * dt;
    }

private:
    double tau_f_;
    double t_arrival_;
};

struct FockHierarchyState {
    std::array<Eigen::Matrix4cd, 4> blocks;  ///< rho_00, rho_01, rho_10, rho_11

    [[nodiscard]] Eigen::Matrix4cd& rho(int m, int n) { return blocks[static_cast<std::size_t>(2 * m + n)]; }
    [[nodiscard]] const Eigen::Matrix4cd& rho(int m, int n) const {
        return blocks[static_cast<std::size_t>(2 * m + n)];
    }

    /// rho_mn(t_start) = delta_mn |g><g|.
    static FockHierarchyState initial() {
        FockHierarchyState s;
        for (auto& b : s.blocks) b.setZero();
        s.rho(0, 0)(kLevelG, kLevelG) = 1.0;
        s.rho(1, 1)(kLevelG, kLevelG) = 1.0;
        return s;
    }
};

struct TransductionTrace {
    std::vector<double> times;
    std::vector<double> pe;
    double pe_steady = 0.0;  ///< max of pe over the trace
};

using HierarchyObserver = std::function<void(double, const FockHierarchyState&)>;
using EnvelopeFunction = std::function<double(double)>;

namespace detail {

struct HierarchyGenerator {
    Eigen::Matrix4cd hamiltonian = Eigen::Matrix4cd::Zero();
    Eigen::Matrix4cd l1 = Eigen::Matrix4cd::Zero();  ///< sqrt(gamma_fg) |g><f|
    Eigen::Matrix4cd l2 = Eigen::Matrix4cd::Zero();  ///< sqrt(gamma_he) |e><h|
    Eigen::Matrix4cd l1_dag, l2_dag, decay_sum;
    std::complex<double> drive_phase;
    double sqrt_eta = 1.0;

    explicit HierarchyGenerator(const AbsorberParams& p) {
        hamiltonian(kLevelF, kLevelH) = p.delta_pp;
        hamiltonian(kLevelH, kLevelF) = p.delta_pp;
        l1(kLevelG, kLevelF) = std::sqrt(p.gamma_fg);
        l2(kLevelE, kLevelH) = std::sqrt(p.gamma_he);
        l1_dag = l1.adjoint();
        l2_dag = l2.adjoint();
        decay_sum = l1_dag * l1 + l2_dag * l2;
        drive_phase = std::polar(1.0, p.phase);
        sqrt_eta = std::sqrt(p.eta_scatter);
    }

    [[nodiscard]] Eigen::Matrix4cd liouvillian(const Eigen::Matrix4cd& r) const {
        const std::complex<double> minus_i{0.0, -1.0};
        return minus_i * (hamiltonian * r - r * hamiltonian) + l1 * r * l1_dag + l2 * r * l2_dag -
               0.5 * (decay_sum * r + r * decay_sum);
    }

    [[nodiscard]] FockHierarchyState rhs(double xi, const FockHierarchyState& s) const {
        FockHierarchyState out;
        const std::complex<double> up = sqrt_eta * xi * drive_phase;
        const std::complex<double> down = std::conj(up);
        for (int m = 0; m < 2; ++m) {
            for (int n = 0; n < 2; ++n) {
                Eigen::Matrix4cd v = liouvillian(s.rho(m, n));
                if (m == 1) {
                    const auto& r = s.rho(0, n);
                    v += up * (r * l1_dag - l1_dag * r);
                }
                if (n == 1) {
                    const auto& r = s.rho(m, 0);
                    v += down * (l1 * r - r * l1);
                }
                out.rho(m, n) = v;
            }
        }
        return out;
    }
};

inline FockHierarchyState axpy(const FockHierarchyState& x, double a, const FockHierarchyState& k) {
    FockHierarchyState out;
    for (std::size_t i = 0; i < 4; ++i) out.blocks[i] = x.blocks[i] + a * k.blocks[i];
    return out;
}

}  // namespace detail

/**
 * Integrates the single-photon hierarchy with fixed-step RK4 and records
 * P_e(t) = Re <e|rho_11|e> after every step.
 *
 * `envelope` overrides the Gaussian pulse (used to switch the drive off).
 * Throws IntegrationError if Tr rho_11 drifts by more than 1e-5.
 */
inline TransductionTrace integrate_hierarchy(const AbsorberParams& params, double t_start, double t_end,
                                             double dt, const HierarchyObserver& observer = {},
                                             EnvelopeFunction envelope = {}) {
    params.validate();
    detail::require(t_start < params.t_arrival - 4.0 * params.tau_f,
                    "integrate_hierarchy: t_start must precede t_arrival - 4 tau_f");
    detail::require(t_end > t_start, "integrate_hierarchy: t_end must exceed t_start");
    detail::require(dt > 0.0 && dt <= params.tau_f / 100.0 * (1.0 + 1e-12),
                    "integrate_hierarchy: dt must lie in (0, tau_f/100]");
    if (!envelope) envelope = PulseEnvelope(params.tau_f, params.t_arrival);

    const detail::HierarchyGenerator gen(params);
    FockHierarchyState state = FockHierarchyState::initial();
    const auto steps = static_cast<std::size_t>(std::llround((t_end - t_start) / dt));

    TransductionTrace trace;
    trace.times.reserve(steps + 1);
    trace.pe.reserve(steps + 1);
    trace.times.push_back(t_start);
    trace.pe.push_back(0.0);
    if (observer) observer(t_start, state);

    for (std::size_t k = 0; k < steps; ++k) {
        const double t = t_start + static_cast<double>(k) * dt;
        const double xi0 = envelope(t);
        const double xi_mid = envelope(t + 0.5 * dt);
        const double xi1 = envelope(t + dt);
        const FockHierarchyState k1 = gen.rhs(xi0, state);
        const FockHierarchyState k2 = gen.rhs(xi_mid, detail::axpy(state, 0.5 * dt, k1));
        const FockHierarchyState k3 = gen.rhs(xi_mid, detail::axpy(state, 0.5 * dt, k2));
        const FockHierarchyState k4 = gen.rhs(xi1, detail::axpy(state, dt, k3));
        for (std::size_t b = 0; b < 4; ++b)
            state.blocks[b] += (dt / 6.0) * (k1.blocks[b] + 2.0 * k2.blocks[b] + 2.0 * k3.blocks[b] + k4.blocks[b]);

        const double t_next = t_start + static_cast<double>(k + 1) * dt;
        const double trace11 = state.rho(1, 1).trace().real();
        if (!(std::abs(trace11 - 1.0) <= 1e-5)) {
            std::ostringstream os;
            os.precision(6);
            os << "integrate_hierarchy: Tr rho_11 drifted to " << trace11 << " at t=" << t_next
               << " with dt=" << dt;
            throw IntegrationError(os.str());
        }
        const double pe = state.rho(1, 1)(kLevelE, kLevelE).real();
        trace.times.push_back(t_next);
        trace.pe.push_back(pe);
        if (observer) observer(t_next, state);
    }
    trace.pe_steady = *std::max_element(trace.pe.begin(), trace.pe.end());
    return trace;
}

struct TransductionMap {
    std::vector<double> delta_pp;
    std::vector<double> gamma;
    std::vector<double> pe_steady;  ///< row-major, delta_pp index outermost

    [[nodiscard]] double at(std::size_t delta_index, std::size_t gamma_index) const {
        return pe_steady.at(delta_index * gamma.size() + gamma_index);
    }
};

struct TransductionWindow {
    double lead = 6.0;   ///< integration starts lead * tau_f before the pulse centre
    double tail = 30.0;  ///< and ends this long (in 1/epsilon) after it
    double dt_fraction = 1e-3;  ///< dt = dt_fraction * tau_f
};

/// pe_steady over a (delta_pp, Gamma) grid with gamma_fg = gamma_he = Gamma.
inline TransductionMap optimize_transduction(std::span<const double> delta_values,
                                             std::span<const double> gamma_values, const PulseEnvelope& pulse,
                                             const TransductionWindow& window = {}) {
    detail::require(!delta_values.empty() && !gamma_values.empty(), "optimize_transduction: empty grid");
    TransductionMap map;
    map.delta_pp.assign(delta_values.begin(), delta_values.end());
    map.gamma.assign(gamma_values.begin(), gamma_values.end());
    const std::size_t cols = gamma_values.size();
    map.pe_steady = parallel_map(delta_values.size() * cols, [&](std::size_t cell) {
        AbsorberParams p;
        p.delta_pp = delta_values[cell / cols];
        p.gamma_fg = gamma_values[cell % cols];
        p.gamma_he = p.gamma_fg;
        p.tau_f = pulse.tau_f();
        p.t_arrival = pulse.t_arrival();
        try {
            return integrate_hierarchy(p, p.t_arrival - window.lead * p.tau_f, p.t_arrival + window.tail,
                                       window.dt_fraction * p.tau_f)
                .pe_steady;
        } catch (const Error& e) {
            std::ostringstream os;
            os.precision(17);
            os << e.what() << " (grid cell delta_pp=" << p.delta_pp << ", gamma=" << p.gamma_fg << ")";
            throw IntegrationError(os.str());
        }
    });
    return map;
}

}  // namespace lmgqpt
