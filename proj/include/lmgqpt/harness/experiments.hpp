#pragma once

/**
 * @file experiments.hpp
 * @brief The experiment registry: each entry turns an ExperimentConfig into
 *        CSV (and optionally SVG) outputs plus a RunManifest.
 */

#include <lmgqpt/absorber.hpp>
#include <lmgqpt/amplifier_dynamics.hpp>
#include <lmgqpt/criticality.hpp>
#include <lmgqpt/errors.hpp>
#include <lmgqpt/harness/config.hpp>
#include <lmgqpt/harness/csv.hpp>
#include <lmgqpt/harness/manifest.hpp>
#include <lmgqpt/harness/svg.hpp>
#include <lmgqpt/lmg_statics.hpp>
#include <lmgqpt/parallel.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace lmgqpt::harness {

/// A failure inside a named experiment stage.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& message)
        : Error("stage '" + stage + "': " + message), stage_(std::move(stage)) {}
    [[nodiscard]] const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

struct RunOptions {
    std::optional<std::string> output_directory;  ///< overrides [output] directory
    bool emit_svg = false;                        ///< ORed with [output] emit_svg
};

/// System sizes for the N-scaling stages of fig4 and fig5.
inline std::vector<int> scaling_sizes() {
    std::vector<int> n;
    for (int v = 200; v <= 2000; v += 200) n.push_back(v);
    return n;
}

/// Snapshot times of the Q-function experiment.
inline const std::vector<double>& qfunction_times() {
    static const std::vector<double> t{-5.0, 5.0, 10.0, 18.0};
    return t;
}

namespace detail {

class RunContext {
public:
    RunContext(const ExperimentConfig& config, const RunOptions& options) : config_(config) {
        dir_ = options.output_directory.value_or(config.output ? config.output->directory : "out");
        svg_ = options.emit_svg || (config.output && config.output->emit_svg);
        manifest_.experiment = config.experiment;
        manifest_.config = serialize_config(config);
        manifest_.output_directory = dir_.string();
    }

    template <typename Fn>
    auto stage(const std::string& name, Fn&& fn) {
        const auto start = std::chrono::steady_clock::now();
        auto finish = [&] {
            manifest_.stages.push_back(
                {name, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()});
        };
        try {
            if constexpr (std::is_void_v<decltype(fn())>) {
                fn();
                finish();
            } else {
                auto result = fn();
                finish();
                return result;
            }
        } catch (const StageError&) {
            throw;
        } catch (const std::exception& e) {
            throw StageError(name, e.what());
        }
    }

    void write_csv(const std::string& file, const CsvTable& table) {
        table.write((dir_ / file).string());
        record_output(manifest_, dir_, file);
    }

    void write_svg(const std::string& file, const std::string& text) {
        if (!svg_) return;
        detail::write_text((dir_ / file).string(), text);
        record_output(manifest_, dir_, file);
    }

    [[nodiscard]] bool svg() const noexcept { return svg_; }
    [[nodiscard]] const ExperimentConfig& config() const noexcept { return config_; }
    [[nodiscard]] const std::filesystem::path& dir() const noexcept { return dir_; }
    RunManifest& manifest() noexcept { return manifest_; }

private:
    ExperimentConfig config_;
    std::filesystem::path dir_;
    bool svg_ = false;
    RunManifest manifest_;
};

inline std::string tag(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::vector<double> sweep_values(const SweepSection& s) {
    const auto points = static_cast<std::size_t>(s.points);
    return s.spacing == Spacing::Log ? logspace(s.lo, s.hi, points) : linspace(s.lo, s.hi, points);
}

inline LmgParams model_params(const ModelSection& m) {
    LmgParams p;
    p.epsilon = m.epsilon;
    p.jx = m.jx;
    p.jy = m.jy;
    p.n_qubits = m.n_qubits;
    return p;
}

inline AbsorberParams absorber_params(const PulseSection& pulse, const AbsorberSection& a) {
    AbsorberParams p;
    p.delta_pp = a.delta_pp;
    p.gamma_fg = a.gamma_fg;
    p.gamma_he = a.gamma_he;
    p.tau_f = pulse.tau_f;
    p.t_arrival = pulse.t_arrival;
    p.eta_scatter = a.eta;
    p.phase = a.phase;
    return p;
}

inline EvolveOptions evolve_options(const IntegrationSection& s) {
    EvolveOptions o;
    o.t_start = s.t_start;
    o.t_end = s.t_end;
    o.dt = s.dt;
    o.sample_every = static_cast<std::size_t>(s.sample_every);
    return o;
}

inline CsvTable sweep_table(const std::vector<SweepPoint>& points) {
    CsvTable t(schema::kSweep);
    for (const auto& p : points) t.add_row({p.bx, p.zeta_x, p.zeta_y, p.sqrt_zeta_x, p.chi, p.gap, p.c_xxyy, p.eta});
    return t;
}

inline CsvTable size_table(const std::vector<SizePoint>& points) {
    CsvTable t(schema::kSize);
    for (const auto& p : points) t.add_row({static_cast<double>(p.n), p.chi, p.gap, p.c_xxyy});
    return t;
}

inline CsvTable fit_table(const ScalingFit& f) {
    CsvTable t({"exponent", "log_amplitude", "r_squared", "window_lo", "window_hi", "n_points"});
    t.add_row({f.exponent, f.log_amplitude, f.r_squared, f.window.lo, f.window.hi, static_cast<double>(f.n_points)});
    return t;
}

inline CsvTable line_table(const LinearFit& f) {
    CsvTable t({"slope", "intercept", "r_squared", "n_points"});
    t.add_row({f.slope, f.intercept, f.r_squared, static_cast<double>(f.n_points)});
    return t;
}

inline CsvTable gain_table(const AmplifierTrajectory& traj, const GainTrace& gain) {
    CsvTable t(schema::kGain);
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        t.add_row({traj.times[i], traj.pe[i], traj.sx2[i], traj.sy2[i], gain.gain[i]});
    return t;
}

inline std::string fit_svg(const std::string& title, const std::string& y_label,
                           const std::vector<std::pair<double, double>>& pts, const ScalingFit& fit) {
    Series data{"data", {}, {}, true};
    Series line{"fit slope " + tag(fit.exponent), {}, {}, false};
    for (const auto& [x, y] : pts) {
        data.x.push_back(x);
        data.y.push_back(y);
        if (x >= fit.window.lo * (1 - 1e-12) && x <= fit.window.hi * (1 + 1e-12)) {
            line.x.push_back(x);
            line.y.push_back(std::exp(fit.log_amplitude + fit.exponent * std::log(x)));
        }
    }
    return render_plot({title, "B_x", y_label, true, true}, {data, line});
}

inline std::vector<std::pair<double, double>> column_pairs(const std::vector<SweepPoint>& pts,
                                                           double (*get)(const SweepPoint&)) {
    std::vector<std::pair<double, double>> out;
    for (const auto& p : pts) out.emplace_back(p.bx, get(p));
    return out;
}

struct DynamicsRun {
    AmplifierTrajectory trajectory;
    GainTrace gain;
};

/// Absorber trace for the configured pulse, integrated over the dynamics window.
inline TransductionTrace absorber_trace(RunContext& ctx) {
    const auto& c = ctx.config();
    return ctx.stage("absorber", [&] {
        return integrate_hierarchy(absorber_params(*c.pulse, *c.absorber), c.integration->t_start,
                                   c.integration->t_end, c.integration->dt);
    });
}

inline std::vector<DynamicsRun> dynamics_runs(RunContext& ctx, const TransductionTrace& trace,
                                              const std::vector<LmgParams>& params, bool keep_states) {
    const auto& c = ctx.config();
    const DriveSchedule drive = DriveSchedule::from_trace(trace, c.coupling->bx);
    return ctx.stage("dynamics", [&] {
        return parallel_map(params.size(), [&](std::size_t i) {
            try {
                DynamicsRun run;
                run.trajectory = evolve(params[i], drive, evolve_options(*c.integration));
                run.gain = quantum_gain(run.trajectory, c.integration->t_start, c.pulse->t_arrival);
                if (!keep_states) run.trajectory.states.clear();
                return run;
            } catch (const Error& e) {
                throw Error(std::string(e.what()) + " (" + params[i].describe() + ")");
            }
        });
    });
}

inline void run_gain_vs_bias(RunContext& ctx) {
    const auto& c = ctx.config();
    const auto trace = absorber_trace(ctx);
    std::vector<LmgParams> params;
    for (double jx : sweep_values(*c.sweep)) {
        LmgParams p = model_params(*c.model);
        p.jx = jx;
        params.push_back(p);
    }
    const auto runs = dynamics_runs(ctx, trace, params, false);
    ctx.stage("write", [&] {
        CsvTable summary({"jx", "g_max", "t_am"});
        std::vector<Series> series;
        nlohmann::json js = nlohmann::json::array();
        for (std::size_t i = 0; i < runs.size(); ++i) {
            ctx.write_csv("gain_jx_" + tag(params[i].jx) + ".csv", gain_table(runs[i].trajectory, runs[i].gain));
            summary.add_row({params[i].jx, runs[i].gain.g_max, runs[i].gain.t_am});
            js.push_back({{"jx", params[i].jx}, {"g_max", runs[i].gain.g_max}, {"t_am", runs[i].gain.t_am}});
            series.push_back({"J_x=" + tag(params[i].jx), runs[i].gain.times, runs[i].gain.gain, false});
        }
        ctx.write_csv("gain_summary.csv", summary);
        ctx.manifest().summary["runs"] = js;
        ctx.write_svg("gain_vs_bias.svg", render_plot({"quantum gain", "t", "G(t)", false, false}, series));
    });
}

inline void run_qfunction(RunContext& ctx) {
    const auto& c = ctx.config();
    const auto trace = absorber_trace(ctx);
    std::vector<LmgParams> params;
    for (double jx : sweep_values(*c.sweep)) {
        LmgParams p = model_params(*c.model);
        p.jx = jx;
        params.push_back(p);
    }
    const auto runs = dynamics_runs(ctx, trace, params, true);
    const double spacing = c.integration->dt * c.integration->sample_every;
    ctx.stage("qfunction", [&] {
        const DickeSpace space(c.model->n_qubits);
        const double pi = std::numbers::pi;
        const std::vector<double> yz{pi / 2, 3 * pi / 2}, xz{0.0, pi};
        CsvTable summary({"jx", "t", "normalization", "mass_yz", "mass_xz"});
        nlohmann::json js = nlohmann::json::array();
        for (std::size_t r = 0; r < runs.size(); ++r) {
            const auto& traj = runs[r].trajectory;
            for (double t : qfunction_times()) {
                const std::size_t k = traj.nearest_sample(t);
                if (std::abs(traj.times[k] - t) > 0.5 * spacing + 1e-9)
                    throw PreconditionError("snapshot time " + tag(t) + " lies outside the sampled trajectory");
                const QFunctionGrid q = q_function(traj.states[k], space);
                CsvTable table(schema::kQFunction);
                for (std::size_t i = 0; i < q.theta.size(); ++i)
                    for (std::size_t j = 0; j < q.phi.size(); ++j) table.add_row({q.theta[i], q.phi[j], q.at(i, j)});
                const std::string stem = "qfunction_jx_" + tag(params[r].jx) + "_t_" + tag(t);
                ctx.write_csv(stem + ".csv", table);
                const double myz = q.azimuthal_mass(yz, pi / 4), mxz = q.azimuthal_mass(xz, pi / 4);
                summary.add_row({params[r].jx, traj.times[k], q.normalization(), myz, mxz});
                js.push_back({{"jx", params[r].jx}, {"t", traj.times[k]}, {"mass_yz", myz}, {"mass_xz", mxz}});
                if (ctx.svg())
                    ctx.write_svg(stem + ".svg", render_heatmap({"Q(theta, phi) J_x=" + tag(params[r].jx) +
                                                                     " t=" + tag(t),
                                                                 "phi", "theta", false, false},
                                                                q.phi, q.theta, q.values));
            }
        }
        ctx.write_csv("qfunction_summary.csv", summary);
        ctx.manifest().summary["snapshots"] = js;
    });
}

inline void run_susceptibility(RunContext& ctx) {
    const auto& c = ctx.config();
    const LmgParams base = model_params(*c.model);
    const auto bx = sweep_values(*c.sweep);
    const auto sweep = ctx.stage("field_sweep", [&] { return field_sweep(base, bx); });
    const auto chi_pts = column_pairs(sweep, [](const SweepPoint& p) { return p.chi; });
    const auto fit = ctx.stage("fit", [&] { return fit_power_law(chi_pts, {c.sweep->lo, c.sweep->hi}); });
    const auto sizes = scaling_sizes();
    const auto size = ctx.stage("size_sweep", [&] { return size_sweep(c.model->jx, c.coupling->bx, sizes); });
    const auto line = ctx.stage("size_fit", [&] {
        std::vector<double> n, chi;
        for (const auto& s : size) n.push_back(s.n), chi.push_back(s.chi);
        return fit_line(n, chi);
    });
    ctx.stage("write", [&] {
        ctx.write_csv("susceptibility_sweep.csv", sweep_table(sweep));
        ctx.write_csv("fit_chi.csv", fit_table(fit));
        ctx.write_csv("size_sweep.csv", size_table(size));
        ctx.write_csv("fit_chi_vs_n.csv", line_table(line));
        ctx.manifest().summary = {{"chi_exponent", fit.exponent}, {"gamma", -fit.exponent},
                                  {"chi_r_squared", fit.r_squared}, {"chi_vs_n_slope", line.slope},
                                  {"chi_vs_n_r_squared", line.r_squared}};
        ctx.write_svg("susceptibility.svg", fit_svg("susceptibility", "chi", chi_pts, fit));
        Series s{"chi(N)", {}, {}, true};
        for (const auto& p : size) s.x.push_back(p.n), s.y.push_back(p.chi);
        ctx.write_svg("susceptibility_vs_n.svg", render_plot({"chi versus N", "N", "chi", false, false}, {s}));
    });
}

inline void run_correlation_gap(RunContext& ctx) {
    const auto& c = ctx.config();
    const LmgParams base = model_params(*c.model);
    const auto bx = sweep_values(*c.sweep);
    const FitWindow window{c.sweep->lo, c.sweep->hi};
    const auto sweep = ctx.stage("field_sweep", [&] { return field_sweep(base, bx); });
    const auto corr_pts = column_pairs(sweep, [](const SweepPoint& p) { return -p.c_xxyy; });
    const auto gap_pts = column_pairs(sweep, [](const SweepPoint& p) { return p.gap; });
    const auto corr_fit = ctx.stage("fit_correlation", [&] { return fit_power_law(corr_pts, window); });
    const auto gap_fit = ctx.stage("fit_gap", [&] { return fit_power_law(gap_pts, window); });
    const auto sizes = scaling_sizes();
    const auto size = ctx.stage("size_sweep", [&] { return size_sweep(c.model->jx, 0.0, sizes); });
    const auto size_fit = ctx.stage("size_fit", [&] {
        std::vector<std::pair<double, double>> pts;
        for (const auto& s : size) pts.emplace_back(s.n, s.gap);
        return fit_power_law(pts, {static_cast<double>(sizes.front()), static_cast<double>(sizes.back())});
    });
    ctx.stage("write", [&] {
        ctx.write_csv("correlation_sweep.csv", sweep_table(sweep));
        ctx.write_csv("fit_correlation.csv", fit_table(corr_fit));
        ctx.write_csv("fit_gap.csv", fit_table(gap_fit));
        ctx.write_csv("size_sweep.csv", size_table(size));
        ctx.write_csv("fit_gap_vs_n.csv", fit_table(size_fit));
        ctx.manifest().summary = {{"correlation_exponent", corr_fit.exponent}, {"nu_tilde", -corr_fit.exponent},
                                  {"gap_exponent", gap_fit.exponent}, {"gap_vs_n_exponent", size_fit.exponent}};
        ctx.write_svg("correlation.svg", fit_svg("-C_xxyy", "-C_xxyy", corr_pts, corr_fit));
        ctx.write_svg("gap.svg", fit_svg("gap", "gap", gap_pts, gap_fit));
    });
}

inline void run_absorption(RunContext& ctx) {
    const auto trace = absorber_trace(ctx);
    ctx.stage("write", [&] {
        CsvTable t({"t", "pe"});
        const auto every = static_cast<std::size_t>(ctx.config().integration->sample_every);
        for (std::size_t i = 0; i < trace.times.size(); i += every) t.add_row({trace.times[i], trace.pe[i]});
        ctx.write_csv("absorption.csv", t);
        ctx.manifest().summary = {{"pe_steady", trace.pe_steady}};
        Series s{"P_e", {}, {}, false};
        for (const auto& row : t.rows()) s.x.push_back(row[0]), s.y.push_back(row[1]);
        ctx.write_svg("absorption.svg", render_plot({"absorber population", "t", "P_e", false, false}, {s}));
    });
}

inline void run_transduction_map(RunContext& ctx) {
    const auto& c = ctx.config();
    const auto values = sweep_values(*c.sweep);
    const PulseEnvelope pulse(c.pulse->tau_f, c.pulse->t_arrival);
    TransductionWindow window;
    window.lead = (c.pulse->t_arrival - c.integration->t_start) / c.pulse->tau_f;
    window.tail = c.integration->t_end - c.pulse->t_arrival;
    window.dt_fraction = c.integration->dt / c.pulse->tau_f;
    const auto map = ctx.stage("transduction_grid", [&] {
        lmgqpt::detail::require(window.tail > 0.0, "t_end must follow the pulse arrival");
        return optimize_transduction(values, values, pulse, window);
    });
    ctx.stage("write", [&] {
        CsvTable t(schema::kTransductionMap);
        for (std::size_t i = 0; i < map.delta_pp.size(); ++i)
            for (std::size_t j = 0; j < map.gamma.size(); ++j) t.add_row({map.delta_pp[i], map.gamma[j], map.at(i, j)});
        ctx.write_csv("transduction_map.csv", t);
        const auto best = std::max_element(map.pe_steady.begin(), map.pe_steady.end());
        const auto idx = static_cast<std::size_t>(best - map.pe_steady.begin());
        ctx.manifest().summary = {{"best_pe_steady", *best},
                                  {"best_delta_pp", map.delta_pp[idx / map.gamma.size()]},
                                  {"best_gamma", map.gamma[idx % map.gamma.size()]}};
        ctx.write_svg("transduction_map.svg",
                      render_heatmap({"pe_steady", "gamma", "delta_pp", false, false}, map.gamma, map.delta_pp,
                                     map.pe_steady));
    });
}

inline void run_gain_scaling(RunContext& ctx) {
    const auto& c = ctx.config();
    const auto trace = absorber_trace(ctx);
    std::vector<LmgParams> params;
    for (double n : sweep_values(*c.sweep)) {
        LmgParams p = model_params(*c.model);
        p.n_qubits = static_cast<int>(std::lround(n));
        params.push_back(p);
    }
    const auto runs = dynamics_runs(ctx, trace, params, false);
    ctx.stage("write", [&] {
        CsvTable summary({"n", "g_max", "t_am"});
        std::vector<double> ns, gs;
        for (std::size_t i = 0; i < runs.size(); ++i) {
            ctx.write_csv("gain_n_" + std::to_string(params[i].n_qubits) + ".csv",
                          gain_table(runs[i].trajectory, runs[i].gain));
            summary.add_row({static_cast<double>(params[i].n_qubits), runs[i].gain.g_max, runs[i].gain.t_am});
            ns.push_back(params[i].n_qubits);
            gs.push_back(runs[i].gain.g_max);
        }
        ctx.write_csv("gain_scaling.csv", summary);
        nlohmann::json js = nlohmann::json::array();
        for (const auto& row : summary.rows()) js.push_back({{"n", row[0]}, {"g_max", row[1]}, {"t_am", row[2]}});
        ctx.manifest().summary["runs"] = js;
        if (ns.size() >= 3) {
            const LinearFit f = fit_line(ns, gs);
            ctx.write_csv("fit_gain_vs_n.csv", line_table(f));
            ctx.manifest().summary["g_max_vs_n_r_squared"] = f.r_squared;
        }
        ctx.write_svg("gain_scaling.svg",
                      render_plot({"maximum gain versus N", "N", "g_max", false, false}, {{"g_max", ns, gs, true}}));
    });
}

inline void run_eta(RunContext& ctx) {
    const auto& c = ctx.config();
    const auto bx = sweep_values(*c.sweep);
    const int n = c.model->n_qubits;
    std::vector<int> sizes{std::max(1, n / 4), std::max(1, n / 2), n};
    std::vector<Series> series;
    for (int size : sizes) {
        LmgParams p = model_params(*c.model);
        p.n_qubits = size;
        const auto sweep = ctx.stage("field_sweep N=" + std::to_string(size), [&] { return field_sweep(p, bx); });
        ctx.stage("write N=" + std::to_string(size),
                  [&] { ctx.write_csv("eta_n_" + std::to_string(size) + ".csv", sweep_table(sweep)); });
        Series s{"N=" + std::to_string(size), {}, {}, true};
        for (const auto& pt : sweep) s.x.push_back(pt.bx), s.y.push_back(pt.eta);
        series.push_back(std::move(s));
    }
    ctx.write_svg("eta.svg", render_plot({"rescaled correlation", "B_x", "eta", true, false}, series));
}

}  // namespace detail

/**
 * Runs one registry entry, writes its outputs and manifest.json into the
 * output directory, and returns the manifest. Failures surface as StageError.
 */
inline RunManifest run_experiment(const ExperimentConfig& config, const RunOptions& options = {}) {
    const ExperimentSpec& spec = find_experiment(config.experiment);
    validate_config(config);
    for (const auto& name : spec.sections) {
        const bool present = (name == "model" && config.model) || (name == "coupling" && config.coupling) ||
                             (name == "pulse" && config.pulse) || (name == "absorber" && config.absorber) ||
                             (name == "sweep" && config.sweep) || (name == "integration" && config.integration) ||
                             (name == "output" && config.output);
        if (!present) throw ConfigError("experiment " + config.experiment + " needs section [" + name + "]");
    }

    detail::RunContext ctx(config, options);
    ctx.stage("setup", [&] { std::filesystem::create_directories(ctx.dir()); });
    const std::string& e = config.experiment;
    if (e == "fig2_gain_vs_bias") detail::run_gain_vs_bias(ctx);
    else if (e == "fig3_qfunction") detail::run_qfunction(ctx);
    else if (e == "fig4_susceptibility") detail::run_susceptibility(ctx);
    else if (e == "fig5_correlation_gap") detail::run_correlation_gap(ctx);
    else if (e == "figS1_absorption") detail::run_absorption(ctx);
    else if (e == "figS2_transduction_map") detail::run_transduction_map(ctx);
    else if (e == "figS3_gain_scaling") detail::run_gain_scaling(ctx);
    else if (e == "figS8_eta") detail::run_eta(ctx);
    else throw ConfigError("unknown experiment '" + e + "'");

    ctx.stage("manifest", [&] {
        const auto bad = verify_outputs(ctx.manifest(), ctx.dir());
        if (!bad.empty()) throw Error("digest mismatch after write: " + bad.front());
        write_manifest(ctx.manifest(), ctx.dir() / "manifest.json");
    });
    return ctx.manifest();
}

}  // namespace lmgqpt::harness
