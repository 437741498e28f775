#pragma once

/**
 * @file config.hpp
 * @brief Experiment configuration: a flat, sectioned key = value text format.
 *
 *   experiment = fig4_susceptibility
 *   [model]
 *   n_qubits = 1000
 *   jx = 0.7
 *
 * Lines starting with '#' or ';' are comments. A section may only appear if
 * the chosen experiment uses it; unknown sections and keys are errors.
 * Keys left out of a used section keep the experiment's defaults.
 */

#include <lmgqpt/errors.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace lmgqpt::harness {

struct ModelSection {
    int n_qubits = 400;
    double epsilon = 1.0;
    double jx = 0.675;
    double jy = 0.7;
    friend bool operator==(const ModelSection&, const ModelSection&) = default;
};

struct CouplingSection {
    double bx = 0.01;
    friend bool operator==(const CouplingSection&, const CouplingSection&) = default;
};

struct PulseSection {
    double tau_f = 1.0;
    double t_arrival = 0.0;
    friend bool operator==(const PulseSection&, const PulseSection&) = default;
};

struct AbsorberSection {
    double delta_pp = 5.0;
    double gamma_fg = 10.0;
    double gamma_he = 10.0;
    double eta = 1.0;
    double phase = 0.0;
    friend bool operator==(const AbsorberSection&, const AbsorberSection&) = default;
};

enum class Spacing { Linear, Log };

struct SweepSection {
    std::string variable = "bx";
    double lo = 1e-6;
    double hi = 1e-4;
    int points = 21;
    Spacing spacing = Spacing::Log;
    friend bool operator==(const SweepSection&, const SweepSection&) = default;
};

struct IntegrationSection {
    double dt = 1e-3;
    double t_start = -5.0;
    double t_end = 20.0;
    int sample_every = 100;
    friend bool operator==(const IntegrationSection&, const IntegrationSection&) = default;
};

struct OutputSection {
    std::string directory = "out";
    bool emit_svg = false;
    friend bool operator==(const OutputSection&, const OutputSection&) = default;
};

struct ExperimentConfig {
    std::string experiment;
    std::optional<ModelSection> model;
    std::optional<CouplingSection> coupling;
    std::optional<PulseSection> pulse;
    std::optional<AbsorberSection> absorber;
    std::optional<SweepSection> sweep;
    std::optional<IntegrationSection> integration;
    std::optional<OutputSection> output;
    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Registry entry: which sections an experiment reads and its default values.
struct ExperimentSpec {
    std::string name;
    std::string description;
    std::set<std::string> sections;
    std::set<std::string> sweep_variables;
    ExperimentConfig defaults;
};

inline const std::vector<ExperimentSpec>& experiment_registry() {
    static const std::vector<ExperimentSpec> registry = [] {
        std::vector<ExperimentSpec> r;
        const OutputSection out{};
        {
            ExperimentSpec s{"fig2_gain_vs_bias", "quantum gain G(t) over a grid of J_x biases (N=400)",
                             {"model", "coupling", "pulse", "absorber", "sweep", "integration", "output"},
                             {"jx"}, {}};
            s.defaults = {s.name, ModelSection{}, CouplingSection{}, PulseSection{}, AbsorberSection{},
                          SweepSection{"jx", 0.5, 0.7, 9, Spacing::Linear}, IntegrationSection{}, out};
            r.push_back(s);
        }
        {
            ExperimentSpec s{"fig3_qfunction", "spin Q-function snapshots for critical and non-critical bias",
                             {"model", "coupling", "pulse", "absorber", "sweep", "integration", "output"},
                             {"jx"}, {}};
            s.defaults = {s.name, ModelSection{}, CouplingSection{}, PulseSection{}, AbsorberSection{},
                          SweepSection{"jx", 0.5, 0.675, 2, Spacing::Linear}, IntegrationSection{}, out};
            r.push_back(s);
        }
        {
            ExperimentSpec s{"fig4_susceptibility", "susceptibility field sweep, gamma fit, and chi(N) scaling",
                             {"model", "coupling", "sweep", "output"}, {"bx"}, {}};
            s.defaults = {s.name, ModelSection{1000, 1.0, 0.7, 0.7}, CouplingSection{1e-5}, std::nullopt,
                          std::nullopt, SweepSection{"bx", 1e-6, 1e-4, 21, Spacing::Log}, std::nullopt, out};
            r.push_back(s);
        }
        {
            ExperimentSpec s{"fig5_correlation_gap", "C_xxyy and gap field sweeps with exponent fits, gap(N)",
                             {"model", "sweep", "output"}, {"bx"}, {}};
            s.defaults = {s.name, ModelSection{1000, 1.0, 0.7, 0.7}, std::nullopt, std::nullopt, std::nullopt,
                          SweepSection{"bx", 1e-6, 1e-4, 21, Spacing::Log}, std::nullopt, out};
            r.push_back(s);
        }
        {
            ExperimentSpec s{"figS1_absorption", "absorber population P_e(t) for a single-photon pulse",
                             {"pulse", "absorber", "integration", "output"}, {}, {}};
            s.defaults = {s.name, std::nullopt, std::nullopt, PulseSection{}, AbsorberSection{}, std::nullopt,
                          IntegrationSection{1e-3, -5.0, 20.0, 10}, out};
            r.push_back(s);
        }
        {
            ExperimentSpec s{"figS2_transduction_map", "steady transduction probability over (delta_pp, Gamma)",
                             {"pulse", "sweep", "integration", "output"}, {"delta_pp"}, {}};
            s.defaults = {s.name, std::nullopt, std::nullopt, PulseSection{}, std::nullopt,
                          SweepSection{"delta_pp", 2.0, 40.0, 20, Spacing::Linear},
                          IntegrationSection{1e-3, -5.0, 15.0, 1}, out};
            r.push_back(s);
        }
        {
            ExperimentSpec s{"figS3_gain_scaling", "maximum gain and amplification time versus N",
                             {"model", "coupling", "pulse", "absorber", "sweep", "integration", "output"},
                             {"n_qubits"}, {}};
            s.defaults = {s.name, ModelSection{}, CouplingSection{}, PulseSection{}, AbsorberSection{},
                          SweepSection{"n_qubits", 100, 400, 3, Spacing::Log}, IntegrationSection{}, out};
            r.push_back(s);
        }
        {
            ExperimentSpec s{"figS8_eta", "rescaled correlation eta versus B_x for N/4, N/2 and N",
                             {"model", "sweep", "output"}, {"bx"}, {}};
            s.defaults = {s.name, ModelSection{1000, 1.0, 0.7, 0.7}, std::nullopt, std::nullopt, std::nullopt,
                          SweepSection{"bx", 1e-6, 1e-2, 17, Spacing::Log}, std::nullopt, out};
            r.push_back(s);
        }
        for (auto& s : r) s.defaults.output->directory = "out/" + s.name;
        return r;
    }();
    return registry;
}

inline const ExperimentSpec& find_experiment(std::string_view name) {
    for (const auto& s : experiment_registry())
        if (s.name == name) return s;
    throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

namespace detail {

inline std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& text, const std::string& where) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) throw ConfigError(where + ": '" + text + "' is not a number");
    return v;
}

inline int parse_int(const std::string& text, const std::string& where) {
    int v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) throw ConfigError(where + ": '" + text + "' is not an integer");
    return v;
}

inline bool parse_bool(const std::string& text, const std::string& where) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError(where + ": '" + text + "' is not a boolean");
}

using RawSections = std::map<std::string, std::map<std::string, std::pair<std::string, int>>>;

template <typename Section>
void assign_keys(Section& sec, const std::map<std::string, std::pair<std::string, int>>& keys,
                 const std::string& section_name);

inline void assign_keys(ModelSection& s, const std::map<std::string, std::pair<std::string, int>>& keys,
                        const std::string& name) {
    for (const auto& [k, vl] : keys) {
        const std::string where = "line " + std::to_string(vl.second) + " [" + name + "] " + k;
        if (k == "n_qubits") s.n_qubits = parse_int(vl.first, where);
        else if (k == "epsilon") s.epsilon = parse_double(vl.first, where);
        else if (k == "jx") s.jx = parse_double(vl.first, where);
        else if (k == "jy") s.jy = parse_double(vl.first, where);
        else throw ConfigError(where + ": unknown key");
    }
}

inline void assign_keys(CouplingSection& s, const std::map<std::string, std::pair<std::string, int>>& keys,
                        const std::string& name) {
    for (const auto& [k, vl] : keys) {
        const std::string where = "line " + std::to_string(vl.second) + " [" + name + "] " + k;
        if (k == "bx") s.bx = parse_double(vl.first, where);
        else throw ConfigError(where + ": unknown key");
    }
}

inline void assign_keys(PulseSection& s, const std::map<std::string, std::pair<std::string, int>>& keys,
                        const std::string& name) {
    for (const auto& [k, vl] : keys) {
        const std::string where = "line " + std::to_string(vl.second) + " [" + name + "] " + k;
        if (k == "tau_f") s.tau_f = parse_double(vl.first, where);
        else if (k == "t_arrival") s.t_arrival = parse_double(vl.first, where);
        else throw ConfigError(where + ": unknown key");
    }
}

inline void assign_keys(AbsorberSection& s, const std::map<std::string, std::pair<std::string, int>>& keys,
                        const std::string& name) {
    for (const auto& [k, vl] : keys) {
        const std::string where = "line " + std::to_string(vl.second) + " [" + name + "] " + k;
        if (k == "delta_pp") s.delta_pp = parse_double(vl.first, where);
        else if (k == "gamma_fg") s.gamma_fg = parse_double(vl.first, where);
        else if (k == "gamma_he") s.gamma_he = parse_double(vl.first, where);
        else if (k == "eta") s.eta = parse_double(vl.first, where);
        else if (k == "phase") s.phase = parse_double(vl.first, where);
        else throw ConfigError(where + ": unknown key");
    }
}

inline void assign_keys(SweepSection& s, const std::map<std::string, std::pair<std::string, int>>& keys,
                        const std::string& name) {
    for (const auto& [k, vl] : keys) {
        const std::string where = "line " + std::to_string(vl.second) + " [" + name + "] " + k;
        if (k == "variable") s.variable = vl.first;
        else if (k == "lo") s.lo = parse_double(vl.first, where);
        else if (k == "hi") s.hi = parse_double(vl.first, where);
        else if (k == "points") s.points = parse_int(vl.first, where);
        else if (k == "spacing") {
            if (vl.first == "linear") s.spacing = Spacing::Linear;
            else if (vl.first == "log") s.spacing = Spacing::Log;
            else throw ConfigError(where + ": spacing must be 'linear' or 'log'");
        } else throw ConfigError(where + ": unknown key");
    }
}

inline void assign_keys(IntegrationSection& s, const std::map<std::string, std::pair<std::string, int>>& keys,
                        const std::string& name) {
    for (const auto& [k, vl] : keys) {
        const std::string where = "line " + std::to_string(vl.second) + " [" + name + "] " + k;
        if (k == "dt") s.dt = parse_double(vl.first, where);
        else if (k == "t_start") s.t_start = parse_double(vl.first, where);
        else if (k == "t_end") s.t_end = parse_double(vl.first, where);
        else if (k == "sample_every") s.sample_every = parse_int(vl.first, where);
        else throw ConfigError(where + ": unknown key");
    }
}

inline void assign_keys(OutputSection& s, const std::map<std::string, std::pair<std::string, int>>& keys,
                        const std::string& name) {
    for (const auto& [k, vl] : keys) {
        const std::string where = "line " + std::to_string(vl.second) + " [" + name + "] " + k;
        if (k == "directory") s.directory = vl.first;
        else if (k == "emit_svg") s.emit_svg = parse_bool(vl.first, where);
        else throw ConfigError(where + ": unknown key");
    }
}

template <typename Section>
void merge_section(std::optional<Section>& target, const std::optional<Section>& defaults, const RawSections& raw,
                   const std::string& name) {
    const auto it = raw.find(name);
    if (it == raw.end()) {
        target = defaults;
        return;
    }
    Section s = defaults.value_or(Section{});
    assign_keys(s, it->second, name);
    target = s;
}

}  // namespace detail

/// Checks value ranges that the experiments rely on.
inline void validate_config(const ExperimentConfig& c) {
    const ExperimentSpec& spec = find_experiment(c.experiment);
    auto check = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError(msg);
    };
    if (c.model) {
        check(c.model->n_qubits >= 1, "[model] n_qubits must be >= 1");
        check(c.model->epsilon > 0.0, "[model] epsilon must be > 0");
        check(c.model->jx >= 0.0 && c.model->jy >= 0.0, "[model] couplings must be >= 0");
    }
    if (c.pulse) check(c.pulse->tau_f > 0.0, "[pulse] tau_f must be > 0");
    if (c.absorber) {
        check(c.absorber->delta_pp >= 0.0, "[absorber] delta_pp must be >= 0");
        check(c.absorber->gamma_fg > 0.0 && c.absorber->gamma_he > 0.0, "[absorber] rates must be > 0");
        check(c.absorber->eta > 0.0 && c.absorber->eta <= 1.0, "[absorber] eta must lie in (0, 1]");
    }
    if (c.sweep) {
        check(spec.sweep_variables.count(c.sweep->variable) == 1,
              "[sweep] variable '" + c.sweep->variable + "' is not swept by " + c.experiment);
        check(c.sweep->points >= 1, "[sweep] points must be >= 1");
        check(c.sweep->lo <= c.sweep->hi, "[sweep] lo must not exceed hi");
        if (c.sweep->spacing == Spacing::Log) check(c.sweep->lo > 0.0, "[sweep] log spacing needs lo > 0");
    }
    if (c.integration) {
        check(c.integration->dt > 0.0, "[integration] dt must be > 0");
        check(c.integration->t_end > c.integration->t_start, "[integration] t_end must exceed t_start");
        check(c.integration->sample_every >= 1, "[integration] sample_every must be >= 1");
    }
    if (c.output) check(!c.output->directory.empty(), "[output] directory must not be empty");
}

/**
 * Parses configuration text. `experiment_hint` names the experiment when the
 * text has no `experiment` key; when both are present they must agree.
 */
inline ExperimentConfig parse_config(std::string_view text, std::string_view experiment_hint = {}) {
    std::string experiment;
    detail::RawSections raw;
    std::string current;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    static const std::set<std::string> known_sections{"model",  "coupling",    "pulse", "absorber",
                                                      "sweep",  "integration", "output"};
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        const std::string where = "line " + std::to_string(line_no);
        if (t.front() == '[') {
            if (t.back() != ']') throw ConfigError(where + ": malformed section header");
            current = detail::trim(std::string_view(t).substr(1, t.size() - 2));
            if (!known_sections.count(current)) throw ConfigError(where + ": unknown section [" + current + "]");
            if (raw.count(current)) throw ConfigError(where + ": duplicate section [" + current + "]");
            raw[current];
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        const std::string key = detail::trim(std::string_view(t).substr(0, eq));
        const std::string value = detail::trim(std::string_view(t).substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": empty key");
        if (current.empty()) {
            if (key != "experiment") throw ConfigError(where + ": unknown top-level key '" + key + "'");
            if (!experiment.empty()) throw ConfigError(where + ": duplicate key 'experiment'");
            experiment = value;
            continue;
        }
        auto& section = raw[current];
        if (section.count(key)) throw ConfigError(where + ": duplicate key '" + key + "' in [" + current + "]");
        section[key] = {value, line_no};
    }

    if (experiment.empty()) experiment = std::string(experiment_hint);
    if (experiment.empty()) throw ConfigError("configuration names no experiment");
    if (!experiment_hint.empty() && experiment != experiment_hint)
        throw ConfigError("configuration is for '" + experiment + "' but '" + std::string(experiment_hint) +
                          "' was requested");
    const ExperimentSpec& spec = find_experiment(experiment);
    for (const auto& [name, keys] : raw)
        if (!spec.sections.count(name))
            throw ConfigError("section [" + name + "] is not used by experiment " + experiment);

    ExperimentConfig c;
    c.experiment = experiment;
    detail::merge_section(c.model, spec.defaults.model, raw, "model");
    detail::merge_section(c.coupling, spec.defaults.coupling, raw, "coupling");
    detail::merge_section(c.pulse, spec.defaults.pulse, raw, "pulse");
    detail::merge_section(c.absorber, spec.defaults.absorber, raw, "absorber");
    detail::merge_section(c.sweep, spec.defaults.sweep, raw, "sweep");
    detail::merge_section(c.integration, spec.defaults.integration, raw, "integration");
    detail::merge_section(c.output, spec.defaults.output, raw, "output");
    validate_config(c);
    return c;
}

inline ExperimentConfig load_config(const std::string& path, std::string_view experiment_hint = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), experiment_hint);
}

/// Writes every present section with all of its keys; floats carry 17 significant digits.
inline std::string serialize_config(const ExperimentConfig& c) {
    using detail::format_double;
    std::ostringstream os;
    os << "experiment = " << c.experiment << "\n";
    if (c.model)
        os << "\n[model]\nn_qubits = " << c.model->n_qubits << "\nepsilon = " << format_double(c.model->epsilon)
           << "\njx = " << format_double(c.model->jx) << "\njy = " << format_double(c.model->jy) << "\n";
    if (c.coupling) os << "\n[coupling]\nbx = " << format_double(c.coupling->bx) << "\n";
    if (c.pulse)
        os << "\n[pulse]\ntau_f = " << format_double(c.pulse->tau_f)
           << "\nt_arrival = " << format_double(c.pulse->t_arrival) << "\n";
    if (c.absorber)
        os << "\n[absorber]\ndelta_pp = " << format_double(c.absorber->delta_pp)
           << "\ngamma_fg = " << format_double(c.absorber->gamma_fg)
           << "\ngamma_he = " << format_double(c.absorber->gamma_he) << "\neta = " << format_double(c.absorber->eta)
           << "\nphase = " << format_double(c.absorber->phase) << "\n";
    if (c.sweep)
        os << "\n[sweep]\nvariable = " << c.sweep->variable << "\nlo = " << format_double(c.sweep->lo)
           << "\nhi = " << format_double(c.sweep->hi) << "\npoints = " << c.sweep->points
           << "\nspacing = " << (c.sweep->spacing == Spacing::Log ? "log" : "linear") << "\n";
    if (c.integration)
        os << "\n[integration]\ndt = " << format_double(c.integration->dt)
           << "\nt_start = " << format_double(c.integration->t_start)
           << "\nt_end = " << format_double(c.integration->t_end)
           << "\nsample_every = " << c.integration->sample_every << "\n";
    if (c.output)
        os << "\n[output]\ndirectory = " << c.output->directory
           << "\nemit_svg = " << (c.output->emit_svg ? "true" : "false") << "\n";
    return os.str();
}

inline ExperimentConfig default_config(std::string_view experiment) { return find_experiment(experiment).defaults; }

}  // namespace lmgqpt::harness
