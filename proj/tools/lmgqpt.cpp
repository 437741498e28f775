#include <lmgqpt/harness/config.hpp>
#include <lmgqpt/harness/experiments.hpp>
#include <lmgqpt/harness/oracle.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>

namespace {

int list_experiments() {
    for (const auto& spec : lmgqpt::harness::experiment_registry())
        std::cout << spec.name << "  " << spec.description << "\n";
    return 0;
}

int run(const std::string& experiment, const std::string& config_path, const std::string& out, bool svg) {
    lmgqpt::harness::ExperimentConfig config;
    try {
        config = lmgqpt::harness::load_config(config_path, experiment);
    } catch (const std::exception& e) {
        std::cerr << "error: stage 'config': " << e.what() << "\n";
        return 2;
    }
    lmgqpt::harness::RunOptions options;
    if (!out.empty()) options.output_directory = out;
    options.emit_svg = svg;
    try {
        const auto manifest = lmgqpt::harness::run_experiment(config, options);
        for (const auto& s : manifest.stages) std::printf("%-24s %9.3f s\n", s.name.c_str(), s.seconds);
        for (const auto& o : manifest.outputs) std::printf("wrote %s\n", o.file.c_str());
        if (!manifest.summary.empty()) std::cout << manifest.summary.dump(2) << "\n";
        std::cout << "manifest: " << manifest.output_directory << "/manifest.json\n";
        return 0;
    } catch (const lmgqpt::harness::StageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: stage 'run': " << e.what() << "\n";
        return 3;
    }
}

int oracle(int n, double jx, double jy, double bx) {
    try {
        const auto r = lmgqpt::harness::brute_force_statics(n, jx, jy, bx);
        std::printf("e0,gap,zeta_x,zeta_y,c_xy,c_xxyy\n%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.e0, r.gap, r.zeta_x,
                    r.zeta_y, r.c_xy, r.c_xxyy);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: stage 'oracle': " << e.what() << "\n";
        return 4;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LMG amplifier and single-photon absorber simulations"};
    app.require_subcommand(1);

    std::string experiment, config_path, out;
    bool svg = false;
    auto* run_cmd = app.add_subcommand("run", "run one experiment from the registry");
    run_cmd->add_option("experiment", experiment, "experiment name (see `list`)")->required();
    run_cmd->add_option("--config", config_path, "configuration file")->required();
    run_cmd->add_option("--out", out, "output directory (overrides [output] directory)");
    run_cmd->add_flag("--svg", svg, "also write SVG figures");

    int n = 0;
    double jx = 0.0, jy = 0.0, bx = 0.0;
    auto* oracle_cmd = app.add_subcommand("oracle", "full 2^N brute-force statics");
    oracle_cmd->add_option("--n", n, "number of qubits (<= 12)")->required();
    oracle_cmd->add_option("--jx", jx, "J_x in units of epsilon")->required();
    oracle_cmd->add_option("--jy", jy, "J_y in units of epsilon")->required();
    oracle_cmd->add_option("--bx", bx, "B_x in units of epsilon")->required();

    app.add_subcommand("list", "print the experiment registry");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() != 0) std::cerr << "error: stage 'cli': ";
        return app.exit(e);
    }

    if (*run_cmd) return run(experiment, config_path, out, svg);
    if (*oracle_cmd) return oracle(n, jx, jy, bx);
    return list_experiments();
}
