#include <lmgqpt/harness/config.hpp>
#include <lmgqpt/harness/csv.hpp>
#include <lmgqpt/harness/experiments.hpp>
#include <lmgqpt/harness/manifest.hpp>
#include <lmgqpt/harness/oracle.hpp>
#include <lmgqpt/lmg_statics.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

using namespace lmgqpt;
using namespace lmgqpt::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("lmgqpt_test_" + name);
    fs::remove_all(p);
    return p;
}

void expect_config_error(const std::string& text, const std::string& needle) {
    try {
        parse_config(text);
        ADD_FAILURE() << "accepted: " << text;
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
}

}  // namespace

TEST(Config, DefaultsRoundTrip) {
    for (const auto& spec : experiment_registry()) {
        const ExperimentConfig c = default_config(spec.name);
        const ExperimentConfig again = parse_config(serialize_config(c));
        EXPECT_EQ(c, again) << spec.name;
        EXPECT_EQ(serialize_config(again), serialize_config(c));
    }
}

TEST(Config, RandomizedRoundTrip) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        ExperimentConfig c = default_config("fig2_gain_vs_bias");
        c.model->jx = u(rng);
        c.model->jy = u(rng) * 3.0;
        c.model->n_qubits = 1 + static_cast<int>(u(rng) * 1000);
        c.coupling->bx = u(rng) * 1e-2 - 5e-3;
        c.pulse->tau_f = 0.1 + u(rng);
        c.pulse->t_arrival = u(rng) * 7.0 - 3.0;
        c.absorber->delta_pp = u(rng) * 40.0;
        c.absorber->eta = 0.01 + 0.99 * u(rng);
        c.absorber->phase = u(rng) * 6.3;
        c.sweep->lo = u(rng) * 1e-3;
        c.sweep->hi = c.sweep->lo + u(rng);
        c.sweep->spacing = u(rng) < 0.5 ? Spacing::Linear : Spacing::Log;
        c.integration->dt = 1e-4 + 1e-3 * u(rng);
        c.output->emit_svg = u(rng) < 0.5;
        EXPECT_EQ(parse_config(serialize_config(c)), c);
    }
}

TEST(Config, PartialSectionsKeepDefaults) {
    const auto c = parse_config("experiment = fig4_susceptibility\n# comment\n[model]\nn_qubits = 300\n");
    EXPECT_EQ(c.model->n_qubits, 300);
    EXPECT_EQ(c.model->jx, 0.7);
    EXPECT_EQ(c.sweep, default_config("fig4_susceptibility").sweep);
    EXPECT_FALSE(c.pulse.has_value());
}

TEST(Config, Rejections) {
    expect_config_error("experiment = fig4_susceptibility\n[model]\nnqubits = 3\n", "unknown key");
    expect_config_error("experiment = fig4_susceptibility\n[modle]\n", "unknown section");
    expect_config_error("experiment = fig4_susceptibility\n[pulse]\ntau_f = 1\n", "not used by");
    expect_config_error("experiment = nope\n", "unknown experiment");
    expect_config_error("[model]\njx = 1\n", "names no experiment");
    expect_config_error("experiment = fig4_susceptibility\n[model]\njx = abc\n", "not a number");
    expect_config_error("experiment = fig4_susceptibility\n[model]\njx = 1\njx = 2\n", "duplicate key");
    expect_config_error("experiment = fig4_susceptibility\n[sweep]\nvariable = jx\n", "not swept");
    expect_config_error("experiment = fig4_susceptibility\n[sweep]\nspacing = cubic\n", "spacing");
    expect_config_error("experiment = fig4_susceptibility\n[sweep]\nlo = 0\nspacing = log\n", "lo > 0");
    expect_config_error("experiment = fig4_susceptibility\n[model]\nepsilon = 0\n", "epsilon");
    expect_config_error("experiment = fig4_susceptibility\nfoo = 1\n", "top-level");
    EXPECT_THROW(parse_config("experiment = fig4_susceptibility\n", "fig5_correlation_gap"), ConfigError);
    EXPECT_NO_THROW(parse_config("[model]\nn_qubits = 12\n", "fig5_correlation_gap"));
    EXPECT_THROW(load_config("/nonexistent/config.conf"), ConfigError);
}

TEST(Csv, FormatAndSchemaChecks) {
    CsvTable t(schema::kSize);
    t.add_row({200.0, 0.1, 1.0 / 3.0, std::numeric_limits<double>::quiet_NaN()});
    EXPECT_THROW(t.add_row({1.0, 2.0}), PreconditionError);
    EXPECT_EQ(t.str(), "n,chi,gap,c_xxyy\n200,0.10000000000000001,0.33333333333333331,nan\n");
    const fs::path dir = scratch("csv");
    fs::create_directories(dir);
    t.write((dir / "t.csv").string());
    const auto back = read_csv((dir / "t.csv").string());
    EXPECT_EQ(back.header(), schema::kSize);
    EXPECT_EQ(back.rows()[0][2], 1.0 / 3.0);
    std::ofstream(dir / "bad.csv") << "a,b\n1,2\n3\n";
    EXPECT_THROW(read_csv((dir / "bad.csv").string()), Error);
}

TEST(Manifest, DigestsDetectCorruption) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    const fs::path dir = scratch("manifest");
    fs::create_directories(dir);
    std::ofstream(dir / "a.csv") << "x\n1\n";
    RunManifest m;
    m.experiment = "figS1_absorption";
    m.config = "experiment = figS1_absorption\n";
    record_output(m, dir, "a.csv");
    m.stages.push_back({"absorber", 0.5});
    EXPECT_TRUE(verify_outputs(m, dir).empty());
    write_manifest(m, dir / "manifest.json");
    const RunManifest back = load_manifest(dir / "manifest.json");
    EXPECT_EQ(back.outputs.size(), 1u);
    EXPECT_EQ(back.outputs[0].sha256, m.outputs[0].sha256);
    EXPECT_EQ(back.version, kArtifactVersion);
    std::ofstream(dir / "a.csv") << "x\n2\n";
    EXPECT_EQ(verify_outputs(back, dir), std::vector<std::string>{"a.csv"});
    fs::remove(dir / "a.csv");
    EXPECT_EQ(verify_outputs(back, dir).size(), 1u);
}

TEST(Oracle, TrivialAndRefusal) {
    const auto r = brute_force_statics(2, 0.0, 0.0, 0.0);
    EXPECT_NEAR(r.e0, -1.0, 1e-12);
    EXPECT_NEAR(r.gap, 1.0, 1e-12);
    EXPECT_THROW(brute_force_statics(13, 0.7, 0.7, 0.0), PreconditionError);
    EXPECT_THROW(brute_force_statics(0, 0.7, 0.7, 0.0), PreconditionError);
}

TEST(Oracle, SolvableLineMinimum) {
    const int n = 8;
    const auto r = brute_force_statics(n, 0.7, 0.7, 0.0);
    double best = 1e300;
    for (int two_m = -n; two_m <= n; two_m += 2) best = std::min(best, solvable_line_energy(n, 0.7, two_m / 2.0));
    EXPECT_NEAR(r.e0, best, 1e-10);
}

TEST(Oracle, AgreesWithCollectiveSolver) {
    for (int n : {2, 4, 6, 8, 10}) {
        LmgParams p;
        p.n_qubits = n;
        p.jx = 0.675;
        p.jy = 0.7;
        p.bx = n == 6 ? 0.02 : 0.0;
        const auto g = solve_ground(p);
        const auto op = order_parameters(g);
        const auto c = correlations(g);
        const auto r = brute_force_statics(n, p.jx, p.jy, p.bx);
        EXPECT_NEAR(g.e0, r.e0, 1e-8);
        EXPECT_NEAR(g.gap, r.gap, 1e-8);
        EXPECT_NEAR(op.zeta_x, r.zeta_x, 1e-8);
        EXPECT_NEAR(op.zeta_y, r.zeta_y, 1e-8);
        EXPECT_NEAR(c.c_xy, r.c_xy, 1e-8);
        EXPECT_NEAR(c.c_xxyy, r.c_xxyy, 1e-8);
    }
}

TEST(RunExperiment, AbsorptionIsDeterministicAndVerified) {
    auto c = default_config("figS1_absorption");
    c.integration->t_end = 8.0;
    const fs::path a = scratch("run_a"), b = scratch("run_b");
    RunOptions oa{a.string(), true}, ob{b.string(), false};
    const auto ma = run_experiment(c, oa);
    const auto mb = run_experiment(c, ob);
    EXPECT_EQ(read_file_bytes(a / "absorption.csv"), read_file_bytes(b / "absorption.csv"));
    EXPECT_TRUE(fs::exists(a / "absorption.svg"));
    EXPECT_FALSE(fs::exists(b / "absorption.svg"));
    EXPECT_TRUE(verify_outputs(load_manifest(a / "manifest.json"), a).empty());
    EXPECT_EQ(ma.config, serialize_config(c));
    EXPECT_EQ(parse_config(ma.config), c);
    const auto names = [](const RunManifest& m) {
        std::vector<std::string> out;
        for (const auto& s : m.stages) out.push_back(s.name);
        return out;
    };
    EXPECT_EQ(names(mb), (std::vector<std::string>{"setup", "absorber", "write", "manifest"}));
}

TEST(RunExperiment, StatisticsSchemas) {
    auto c = default_config("fig5_correlation_gap");
    c.model->n_qubits = 60;
    c.sweep->points = 5;
    const fs::path dir = scratch("fig5");
    run_experiment(c, {dir.string(), false});
    EXPECT_EQ(read_csv((dir / "correlation_sweep.csv").string()).header(), schema::kSweep);
    EXPECT_EQ(read_csv((dir / "correlation_sweep.csv").string()).rows().size(), 5u);
    EXPECT_EQ(read_csv((dir / "size_sweep.csv").string()).header(), schema::kSize);

    auto s2 = default_config("figS2_transduction_map");
    s2.sweep->lo = 5;
    s2.sweep->hi = 20;
    s2.sweep->points = 2;
    s2.integration->t_end = 5;
    const fs::path dir2 = scratch("figS2");
    run_experiment(s2, {dir2.string(), true});
    const auto map = read_csv((dir2 / "transduction_map.csv").string());
    EXPECT_EQ(map.header(), schema::kTransductionMap);
    EXPECT_EQ(map.rows().size(), 4u);
}

TEST(RunExperiment, DegenerateBiasRuns) {
    auto c = default_config("fig2_gain_vs_bias");
    c.model->n_qubits = 20;
    c.sweep->lo = c.sweep->hi = c.model->jy;
    c.sweep->points = 1;
    c.integration->t_end = 2.0;
    const fs::path dir = scratch("fig2_degenerate");
    const auto m = run_experiment(c, {dir.string(), false});
    const auto trace = read_csv((dir / "gain_jx_0.7.csv").string());
    EXPECT_EQ(trace.header(), schema::kGain);
    EXPECT_EQ(trace.rows().front()[4], 1.0);
    EXPECT_EQ(m.summary["runs"].size(), 1u);
}

TEST(RunExperiment, FailuresNameTheStage) {
    auto c = default_config("figS1_absorption");
    c.integration->t_start = -2.0;
    try {
        run_experiment(c, {scratch("fail").string(), false});
        FAIL() << "expected StageError";
    } catch (const StageError& e) {
        EXPECT_EQ(e.stage(), "absorber");
        EXPECT_NE(std::string(e.what()).find("stage 'absorber'"), std::string::npos);
    }
    ExperimentConfig missing = default_config("fig4_susceptibility");
    missing.sweep.reset();
    EXPECT_THROW(run_experiment(missing), ConfigError);
}
