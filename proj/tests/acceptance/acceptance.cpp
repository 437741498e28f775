// Acceptance checks. Each criterion prints exactly one PASS/FAIL line;
// `--criterion k` runs a single one. Exit status is nonzero if any check fails.

#include <lmgqpt/absorber.hpp>
#include <lmgqpt/amplifier_dynamics.hpp>
#include <lmgqpt/criticality.hpp>
#include <lmgqpt/harness/csv.hpp>
#include <lmgqpt/harness/experiments.hpp>
#include <lmgqpt/harness/oracle.hpp>
#include <lmgqpt/lmg_statics.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace lmgqpt;
namespace fs = std::filesystem;

namespace {

// Pinned targets and tolerances.
constexpr double kGammaTarget = 1.525, kGammaTol = 0.05, kGammaR2 = 0.99;
constexpr double kNuTarget = 0.919, kNuTol = 0.05, kUniversalitySpread = 0.05;
constexpr double kGapExponent = 0.5, kGapExponentTol = 0.02, kSolvableGapTol = 1e-10;
constexpr double kChiLinearR2 = 0.99;
constexpr double kGapSizeSlope = -1.0, kGapSizeTol = 0.2;
constexpr double kRidgeMin = 0.95;
constexpr double kContrastMin = 100.0, kTamTarget = 15.0, kTamTol = 3.0;
constexpr double kGainLinearR2 = 0.95, kTamSpread = 0.2;
constexpr double kAzimuthalMass = 0.8;
constexpr double kOracleTol = 1e-8;

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string title;
    double budget_seconds;
    std::function<Outcome()> run;
};

std::string fmt(double v, int digits = 4) {
    std::ostringstream os;
    os.precision(digits);
    os << v;
    return os.str();
}

LmgParams lmg(int n, double jx, double jy, double bx = 0.0) {
    LmgParams p;
    p.n_qubits = n;
    p.jx = jx;
    p.jy = jy;
    p.bx = bx;
    return p;
}

std::vector<std::pair<double, double>> pairs(const std::vector<SweepPoint>& pts, double (*get)(const SweepPoint&)) {
    std::vector<std::pair<double, double>> out;
    for (const auto& p : pts) out.emplace_back(p.bx, get(p));
    return out;
}

fs::path workdir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("lmgqpt_acceptance_" + name);
    fs::remove_all(p);
    return p;
}

double first_row(const fs::path& csv, std::size_t column) {
    return harness::read_csv(csv.string()).rows().at(0).at(column);
}

double solvable_gap(int n, double j) {
    std::vector<double> e;
    for (int two_m = -n; two_m <= n; two_m += 2) e.push_back(solvable_line_energy(n, j, two_m / 2.0));
    std::sort(e.begin(), e.end());
    return e[1] - e[0];
}

harness::ExperimentConfig dynamics_config(const std::string& experiment) {
    auto c = harness::default_config(experiment);
    c.model->n_qubits = 400;
    c.model->jy = 0.7;
    c.coupling->bx = 0.01;
    return c;
}

Outcome susceptibility_exponent() {
    const fs::path dir = workdir("c1");
    harness::run_experiment(harness::default_config("fig4_susceptibility"), {dir.string(), false});
    const double gamma = -first_row(dir / "fit_chi.csv", 0);
    const double r2 = first_row(dir / "fit_chi.csv", 2);
    const bool pass = std::abs(gamma - kGammaTarget) <= kGammaTol && r2 >= kGammaR2;
    return {pass, "gamma=" + fmt(gamma) + " (target " + fmt(kGammaTarget) + " +/- " + fmt(kGammaTol) +
                      "), r2=" + fmt(r2) + " (min " + fmt(kGammaR2) + ")"};
}

Outcome correlator_exponent() {
    const fs::path dir = workdir("c2");
    harness::run_experiment(harness::default_config("fig5_correlation_gap"), {dir.string(), false});
    const double nu = -first_row(dir / "fit_correlation.csv", 0);
    std::vector<double> exps;
    std::string listing;
    bool fit_failed = false;
    for (double j : {0.5, 0.7, 0.9})
        for (int n : {500, 1000}) {
            const auto pts = field_sweep(lmg(n, j, j), logspace(1e-6, 1e-4, 21));
            try {
                const double e = -fit_power_law(pairs(pts, [](const SweepPoint& p) { return -p.c_xxyy; }),
                                                {1e-6, 1e-4})
                                      .exponent;
                exps.push_back(e);
                listing += " J=" + fmt(j, 2) + ",N=" + std::to_string(n) + ":" + fmt(e);
            } catch (const Error& e) {
                fit_failed = true;
                listing += " J=" + fmt(j, 2) + ",N=" + std::to_string(n) + ":fit failed";
            }
        }
    const double spread = exps.empty() ? 0.0 : *std::max_element(exps.begin(), exps.end()) -
                                                   *std::min_element(exps.begin(), exps.end());
    const bool pass = std::abs(nu - kNuTarget) <= kNuTol && !fit_failed && spread < kUniversalitySpread;
    return {pass, "nu=" + fmt(nu) + " (target " + fmt(kNuTarget) + " +/- " + fmt(kNuTol) + "), spread=" +
                      fmt(spread) + " (max " + fmt(kUniversalitySpread) + ");" + listing};
}

Outcome gap_exponent() {
    const auto pts = field_sweep(lmg(1000, 0.7, 0.7), logspace(1e-6, 1e-4, 21));
    const double exponent = fit_power_law(pairs(pts, [](const SweepPoint& p) { return p.gap; }), {1e-6, 1e-4}).exponent;
    double worst = 0.0;
    std::vector<int> sizes{2, 3, 4, 7, 10, 51};
    for (int n : harness::scaling_sizes()) sizes.push_back(n);
    for (int n : sizes) worst = std::max(worst, std::abs(solve_ground(lmg(n, 0.7, 0.7)).gap - solvable_gap(n, 0.7)));
    const bool pass = std::abs(exponent - kGapExponent) <= kGapExponentTol && worst <= kSolvableGapTol;
    return {pass, "exponent=" + fmt(exponent) + " (target " + fmt(kGapExponent) + " +/- " + fmt(kGapExponentTol) +
                      "), max |gap - analytic| at B_x=0 over " + std::to_string(sizes.size()) +
                      " sizes=" + fmt(worst, 3) + " (max " + fmt(kSolvableGapTol) + ")"};
}

Outcome chi_linearity() {
    const auto sizes = harness::scaling_sizes();
    const auto pts = size_sweep(0.7, 1e-5, sizes);
    std::vector<double> n, chi;
    for (const auto& p : pts) n.push_back(p.n), chi.push_back(p.chi);
    const auto fit = fit_line(n, chi);
    const bool pass = fit.r_squared >= kChiLinearR2 && fit.slope > 0.0;
    return {pass, "r2=" + fmt(fit.r_squared) + " (min " + fmt(kChiLinearR2) + "), slope=" + fmt(fit.slope) +
                      " (must be > 0)"};
}

Outcome gap_size_scaling() {
    const auto sizes = harness::scaling_sizes();
    const auto pts = size_sweep(0.7, 0.0, sizes);
    std::vector<std::pair<double, double>> xy;
    for (const auto& p : pts) xy.emplace_back(p.n, p.gap);
    const auto fit = fit_power_law(xy, {200.0, 2000.0});
    const bool pass = std::abs(fit.exponent - kGapSizeSlope) <= kGapSizeTol;
    return {pass, "slope=" + fmt(fit.exponent) + " (target " + fmt(kGapSizeSlope) + " +/- " + fmt(kGapSizeTol) +
                      "), r2=" + fmt(fit.r_squared)};
}

Outcome transduction_ridge() {
    auto pe = [](double delta, double gamma) {
        AbsorberParams p;
        p.delta_pp = delta;
        p.gamma_fg = p.gamma_he = gamma;
        return integrate_hierarchy(p, -5.0, 25.0, 1e-3).pe_steady;
    };
    const double ridge = pe(10.0, 20.0), wide = pe(10.0, 80.0), narrow = pe(10.0, 5.0);
    const bool pass = ridge >= kRidgeMin && ridge > wide && ridge > narrow;
    return {pass, "pe(G=2D)=" + fmt(ridge, 6) + " (min " + fmt(kRidgeMin) + "), pe(G=8D)=" + fmt(wide, 6) +
                      ", pe(G=D/2)=" + fmt(narrow, 6) + " at D=10"};
}

Outcome giant_response() {
    auto c = dynamics_config("fig2_gain_vs_bias");
    c.sweep->lo = 0.5;
    c.sweep->hi = 0.675;
    c.sweep->points = 2;
    const fs::path dir = workdir("c7");
    harness::run_experiment(c, {dir.string(), false});
    const auto summary = harness::read_csv((dir / "gain_summary.csv").string()).rows();
    const double g_low = summary.at(0).at(1), g_crit = summary.at(1).at(1), t_am = summary.at(1).at(2);
    const double contrast = g_crit / g_low;
    const bool pass = contrast >= kContrastMin && std::abs(t_am - kTamTarget) <= kTamTol;
    return {pass, "contrast=" + fmt(contrast) + " (min " + fmt(kContrastMin) + "; g_max " + fmt(g_crit) + " vs " +
                      fmt(g_low) + "), T_Am=" + fmt(t_am) + " (target " + fmt(kTamTarget) + " +/- " +
                      fmt(kTamTol) + ")"};
}

Outcome gain_scaling() {
    auto c = dynamics_config("figS3_gain_scaling");
    c.model->jx = 0.675;
    const fs::path dir = workdir("c8");
    harness::run_experiment(c, {dir.string(), false});
    const auto rows = harness::read_csv((dir / "gain_scaling.csv").string()).rows();
    std::vector<double> n, g, t;
    for (const auto& r : rows) n.push_back(r[0]), g.push_back(r[1]), t.push_back(r[2]);
    const auto fit = fit_line(n, g);
    const double lo = *std::min_element(t.begin(), t.end()), hi = *std::max_element(t.begin(), t.end());
    const double spread = hi / lo - 1.0;
    const bool pass = fit.r_squared >= kGainLinearR2 && spread < kTamSpread;
    return {pass, "r2=" + fmt(fit.r_squared) + " (min " + fmt(kGainLinearR2) + "), T_Am spread=" + fmt(spread) +
                      " (max " + fmt(kTamSpread) + "; T_Am " + fmt(t.front()) + ".." + fmt(t.back()) + ")"};
}

Outcome qfunction_rotation() {
    auto c = dynamics_config("fig3_qfunction");
    c.sweep->lo = c.sweep->hi = 0.675;
    c.sweep->points = 1;
    const fs::path dir = workdir("c9");
    harness::run_experiment(c, {dir.string(), false});
    double yz_start = -1.0, xz_end = -1.0, worst_norm = 0.0;
    const auto table = harness::read_csv((dir / "qfunction_summary.csv").string());
    for (const auto& r : table.rows()) {
        worst_norm = std::max(worst_norm, std::abs(r[2] - 1.0));
        if (std::abs(r[1] + 5.0) < 1e-9) yz_start = r[3];
        if (std::abs(r[1] - 18.0) < 1e-9) xz_end = r[4];
    }
    const bool pass = yz_start >= kAzimuthalMass && xz_end >= kAzimuthalMass && worst_norm <= 1e-3;
    return {pass, "yz mass at t=-5: " + fmt(yz_start) + ", xz mass at t=18: " + fmt(xz_end) + " (min " +
                      fmt(kAzimuthalMass) + "), max |norm-1|=" + fmt(worst_norm, 3)};
}

Outcome oracle_equivalence() {
    double worst = 0.0;
    int cases = 0;
    for (int n : {2, 4, 6, 8, 10})
        for (const auto& [jx, jy, bx] : {std::tuple{0.675, 0.7, 0.0}, std::tuple{0.7, 0.7, 1e-3},
                                          std::tuple{0.9, 0.3, 0.05}, std::tuple{0.2, 1.1, 0.0}}) {
            const auto g = solve_ground(lmg(n, jx, jy, bx));
            const auto op = order_parameters(g);
            const auto c = correlations(g);
            const auto r = harness::brute_force_statics(n, jx, jy, bx);
            for (double d : {g.e0 - r.e0, g.gap - r.gap, op.zeta_x - r.zeta_x, op.zeta_y - r.zeta_y, c.c_xy - r.c_xy,
                             c.c_xxyy - r.c_xxyy})
                worst = std::max(worst, std::abs(d));
            ++cases;
        }
    return {worst <= kOracleTol, "max deviation over " + std::to_string(cases) + " cases x 6 outputs=" +
                                     fmt(worst, 3) + " (max " + fmt(kOracleTol) + ")"};
}

Outcome property_suites() {
    std::vector<std::string> failed;
    auto check = [&](bool ok, const std::string& name) {
        if (!ok) failed.push_back(name);
    };

    // unitarity and step halving of the amplifier
    const auto trace = integrate_hierarchy(AbsorberParams{}, -5.0, 10.0, 5e-4);
    const auto drive = DriveSchedule::from_trace(trace, 0.01);
    EvolveOptions coarse_opt, fine_opt;
    coarse_opt.t_end = fine_opt.t_end = 10.0;
    coarse_opt.sample_every = 1000;
    fine_opt.dt = 5e-4;
    fine_opt.sample_every = 2000;
    try {
        const auto coarse = evolve(lmg(200, 0.675, 0.7), drive, coarse_opt);
        const auto fine = evolve(lmg(200, 0.675, 0.7), drive, fine_opt);
        check(std::abs(coarse.sx2.back() - fine.sx2.back()) / fine.sx2.back() < 1e-6, "amplifier step halving");
    } catch (const IntegrationError&) {
        check(false, "unitarity drift");
    }

    // trace, Hermiticity and PSD of the hierarchy; absorber step halving
    double herm = 0.0, tr = 0.0, eig = 0.0;
    AbsorberParams ap;
    const auto a1 = integrate_hierarchy(ap, -5.0, 15.0, 1e-3, [&](double, const FockHierarchyState& s) {
        herm = std::max({herm, (s.rho(0, 0) - s.rho(0, 0).adjoint()).cwiseAbs().maxCoeff(),
                         (s.rho(1, 1) - s.rho(1, 1).adjoint()).cwiseAbs().maxCoeff(),
                         (s.rho(1, 0) - s.rho(0, 1).adjoint()).cwiseAbs().maxCoeff()});
        tr = std::max(tr, std::abs(s.rho(1, 1).trace().real() - 1.0));
        const Eigen::Matrix4cd h = 0.5 * (s.rho(1, 1) + s.rho(1, 1).adjoint());
        eig = std::min(eig, Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd>(h, Eigen::EigenvaluesOnly).eigenvalues()[0]);
    });
    const auto a2 = integrate_hierarchy(ap, -5.0, 15.0, 5e-4);
    check(tr <= 1e-6, "trace conservation");
    check(herm <= 1e-10, "hierarchy Hermiticity");
    check(eig >= -1e-8, "hierarchy PSD");
    check(std::abs(a1.pe.back() - a2.pe.back()) < 1e-6, "absorber step halving");

    // statics symmetries
    double sign = 0.0, swap = 0.0;
    for (int n : {8, 200, 1000}) {
        for (double bx : {1e-6, 1e-4, 1e-2})
            sign = std::max(sign, std::abs(order_parameters(solve_ground(lmg(n, 0.7, 0.7, bx))).zeta_x -
                                           order_parameters(solve_ground(lmg(n, 0.7, 0.7, -bx))).zeta_x));
        const auto a = solve_ground(lmg(n, 0.675, 0.7)), b = solve_ground(lmg(n, 0.7, 0.675));
        swap = std::max({swap, std::abs(order_parameters(a).zeta_x - order_parameters(b).zeta_y),
                         std::abs(order_parameters(a).zeta_y - order_parameters(b).zeta_x)});
        check(std::abs(a.gap - b.gap) <= 1e-10 && std::abs(a.e0 - b.e0) <= 1e-10 * std::abs(a.e0), "x-y swap energies");
    }
    check(sign <= 1e-12, "field-sign symmetry");
    check(swap <= 1e-12, "x-y swap symmetry");

    // C_xy boundedness and eta monotonicity along the field sweep
    double cxy = 0.0;
    bool monotone = true;
    for (int n : {250, 1000}) {
        const auto bxs = logspace(1e-6, 1e-2, 9);
        const auto pts = field_sweep(lmg(n, 0.7, 0.7), bxs);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            cxy = std::max(cxy, std::abs(correlations(solve_ground(lmg(n, 0.7, 0.7, bxs[i]))).c_xy));
            if (i > 0 && !(pts[i].eta < pts[i - 1].eta)) monotone = false;
        }
    }
    check(cxy < 1.0, "C_xy boundedness");
    check(monotone, "eta monotonicity");

    std::string detail = "11 property families checked";
    if (!failed.empty()) {
        detail = "failed:";
        for (const auto& f : failed) detail += " [" + f + "]";
    }
    return {failed.empty(), detail};
}

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> list{
        {1, "susceptibility exponent", 120, susceptibility_exponent},
        {2, "higher-order correlator exponent", 300, correlator_exponent},
        {3, "gap exponent", 60, gap_exponent},
        {4, "chi-N linearity", 300, chi_linearity},
        {5, "gap-N scaling", 60, gap_size_scaling},
        {6, "transduction ridge", 60, transduction_ridge},
        {7, "giant-response contrast", 120, giant_response},
        {8, "gain-N scaling", 300, gain_scaling},
        {9, "Q-function rotation", 120, qfunction_rotation},
        {10, "oracle equivalence", 30, oracle_equivalence},
        {11, "property suites", 120, property_suites},
    };
    return list;
}

bool run_one(const Criterion& c) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = c.run();
    } catch (const std::exception& e) {
        out = {false, std::string("error: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds < c.budget_seconds;
    const bool pass = out.pass && in_time;
    std::printf("[%s] criterion %d %s: %s; runtime %.1f s (budget %.0f s)%s\n", pass ? "PASS" : "FAIL", c.id,
                c.title.c_str(), out.detail.c_str(), seconds, c.budget_seconds, in_time ? "" : " OVER BUDGET");
    std::fflush(stdout);
    return pass;
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: acceptance [--criterion k]\n");
            return 2;
        }
    }
    bool all = true, found = false;
    for (const auto& c : criteria()) {
        if (only != 0 && c.id != only) continue;
        found = true;
        all = run_one(c) && all;
    }
    if (!found) {
        std::fprintf(stderr, "no criterion %d\n", only);
        return 2;
    }
    return all ? 0 : 1;
}
