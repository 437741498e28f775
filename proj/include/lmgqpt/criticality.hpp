#pragma once

/**
 * @file criticality.hpp
 * @brief Field and size sweeps across the J_x = J_y transition line, and the
 *        log-log fits used to extract singular exponents.
 */

#include <lmgqpt/errors.hpp>
#include <lmgqpt/lmg_statics.hpp>
#include <lmgqpt/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace lmgqpt {

struct SweepPoint {
    double bx = 0.0;
    double zeta_x = 0.0;
    double zeta_y = 0.0;
    double sqrt_zeta_x = 0.0;
    double chi = 0.0;
    double gap = 0.0;
    double c_xxyy = 0.0;
    double eta = 0.0;
};

struct FitWindow {
    double lo = 0.0;
    double hi = 0.0;
};

struct ScalingFit {
    double exponent = 0.0;
    double log_amplitude = 0.0;
    double r_squared = 0.0;
    FitWindow window;
    std::size_t n_points = 0;
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t n_points = 0;
};

struct SizePoint {
    int n = 0;
    double chi = 0.0;  ///< one-sided susceptibility at the sweep field; NaN when bx == 0
    double gap = 0.0;  ///< at B_x = 0
    double c_xxyy = 0.0;
};

inline std::vector<double> logspace(double lo, double hi, std::size_t points) {
    detail::require(lo > 0.0 && hi > 0.0, "logspace: bounds must be positive");
    detail::require(points >= 1, "logspace: need at least one point");
    std::vector<double> out(points);
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (std::size_t i = 0; i < points; ++i)
        out[i] = points == 1 ? lo : std::pow(10.0, a + (b - a) * static_cast<double>(i) / (points - 1));
    return out;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t points) {
    detail::require(points >= 1, "linspace: need at least one point");
    std::vector<double> out(points);
    for (std::size_t i = 0; i < points; ++i)
        out[i] = points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (points - 1);
    return out;
}

inline double sqrt_zeta_x(const LmgParams& params, double bx) {
    return std::sqrt(order_parameters(solve_ground(params.with_bx(bx))).zeta_x);
}

/// Central difference of sqrt(zeta_x) at bx with step bx * rel_step on each side.
inline double susceptibility_at(const LmgParams& params, double bx, double rel_step = 1e-2) {
    detail::require(bx > 0.0, "susceptibility_at: bx must be > 0");
    detail::require(rel_step > 0.0 && rel_step <= 0.1, "susceptibility_at: rel_step must lie in (0, 0.1]");
    const double up = sqrt_zeta_x(params, bx * (1.0 + rel_step));
    const double down = sqrt_zeta_x(params, bx * (1.0 - rel_step));
    return (up - down) / (2.0 * bx * rel_step);
}

/// [sqrt(zeta_x)(bx) - sqrt(zeta_x)(0)] / bx, the form used for the size scaling.
inline double susceptibility_one_sided(const LmgParams& params, double bx) {
    detail::require(bx > 0.0, "susceptibility_one_sided: bx must be > 0");
    return (sqrt_zeta_x(params, bx) - sqrt_zeta_x(params, 0.0)) / bx;
}

inline SweepPoint sweep_point(const LmgParams& params, double bx, double rel_step = 1e-2) {
    try {
        const GroundStateResult g = solve_ground(params.with_bx(bx));
        const OrderParameters op = order_parameters(g);
        const CorrelationSet c = correlations(g);
        SweepPoint p;
        p.bx = bx;
        p.zeta_x = op.zeta_x;
        p.zeta_y = op.zeta_y;
        p.sqrt_zeta_x = std::sqrt(op.zeta_x);
        p.chi = susceptibility_at(params, bx, rel_step);
        p.gap = std::max(0.0, g.gap);
        p.c_xxyy = c.c_xxyy;
        p.eta = c.eta;
        return p;
    } catch (const NumericError& e) {
        std::ostringstream os;
        os.precision(17);
        os << e.what() << " (field sweep at bx=" << bx << ")";
        throw NumericError(os.str());
    }
}

/// One independent solve per field value; output order follows input order.
inline std::vector<SweepPoint> field_sweep(const LmgParams& params, std::span<const double> bx_values,
                                           double rel_step = 1e-2) {
    params.validate();
    for (double b : bx_values) detail::require(b > 0.0, "field_sweep: every bx must be > 0");
    return parallel_map(bx_values.size(), [&](std::size_t i) { return sweep_point(params, bx_values[i], rel_step); });
}

/// Least-squares line through (log x, log y) for the points with x inside the window.
inline ScalingFit fit_power_law(std::span<const std::pair<double, double>> points, FitWindow window) {
    detail::require(window.lo < window.hi, "fit_power_law: window lo must be < hi");
    const double lo = window.lo * (1.0 - 1e-12);
    const double hi = window.hi * (1.0 + 1e-12);
    std::vector<std::pair<double, double>> used;
    std::ostringstream offenders;
    offenders.precision(17);
    bool bad = false;
    for (const auto& [x, y] : points) {
        if (!(x >= lo && x <= hi)) continue;
        if (!(x > 0.0) || !(y > 0.0)) {
            offenders << (bad ? ", " : "") << "(" << x << ", " << y << ")";
            bad = true;
            continue;
        }
        used.emplace_back(std::log(x), std::log(y));
    }
    if (bad) throw DomainError("fit_power_law: non-positive values in window: " + offenders.str());
    if (used.size() < 3)
        throw InsufficientDataError("fit_power_law: " + std::to_string(used.size()) +
                                    " usable points in window, need >= 3");

    const double n = static_cast<double>(used.size());
    double sx = 0.0, sy = 0.0;
    for (const auto& [lx, ly] : used) {
        sx += lx;
        sy += ly;
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [lx, ly] : used) {
        sxx += (lx - mx) * (lx - mx);
        sxy += (lx - mx) * (ly - my);
        syy += (ly - my) * (ly - my);
    }
    if (sxx <= 0.0) throw InsufficientDataError("fit_power_law: all x values coincide");
    ScalingFit fit;
    fit.exponent = sxy / sxx;
    fit.log_amplitude = my - fit.exponent * mx;
    double ss_res = 0.0;
    for (const auto& [lx, ly] : used) {
        const double r = ly - (fit.log_amplitude + fit.exponent * lx);
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    fit.window = window;
    fit.n_points = used.size();
    return fit;
}

/// Ordinary least squares y = slope * x + intercept.
inline LinearFit fit_line(std::span<const double> xs, std::span<const double> ys) {
    detail::require(xs.size() == ys.size(), "fit_line: x and y lengths differ");
    if (xs.size() < 3) throw InsufficientDataError("fit_line: need >= 3 points");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx <= 0.0) throw InsufficientDataError("fit_line: all x values coincide");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    fit.n_points = xs.size();
    return fit;
}

/**
 * Statics at J_x = J_y = j for each N: one-sided susceptibility and C_xxyy at
 * the field bx, gap at zero field.
 */
inline std::vector<SizePoint> size_sweep(double j, double bx, std::span<const int> n_values) {
    for (int n : n_values) detail::require(n >= 2, "size_sweep: every N must be >= 2");
    detail::require(bx >= 0.0, "size_sweep: bx must be >= 0");
    return parallel_map(n_values.size(), [&](std::size_t i) {
        LmgParams p;
        p.jx = j;
        p.jy = j;
        p.n_qubits = n_values[i];
        try {
            const GroundStateResult zero = solve_ground(p);
            SizePoint s;
            s.n = p.n_qubits;
            s.gap = std::max(0.0, zero.gap);
            if (bx > 0.0) {
                const GroundStateResult biased = solve_ground(p.with_bx(bx));
                s.chi = (std::sqrt(order_parameters(biased).zeta_x) - std::sqrt(order_parameters(zero).zeta_x)) / bx;
                s.c_xxyy = correlations(biased).c_xxyy;
            } else {
                s.chi = std::numeric_limits<double>::quiet_NaN();
                s.c_xxyy = correlations(zero).c_xxyy;
            }
            return s;
        } catch (const NumericError& e) {
            throw NumericError(std::string(e.what()) + " (size sweep at N=" + std::to_string(p.n_qubits) + ")");
        }
    });
}

}  // namespace lmgqpt
