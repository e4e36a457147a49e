// Command-line front end: binds experiment configuration files to the
// dispersion / phase-matching / heralding / counting modules and emits
// human-readable reports plus CSV/JSON artifacts.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ppsource/config.hpp"
#include "ppsource/counting.hpp"
#include "ppsource/dispersion.hpp"
#include "ppsource/heralding.hpp"
#include "ppsource/io.hpp"
#include "ppsource/phasematching.hpp"
#include "ppsource/units.hpp"

#ifndef PPSOURCE_DEFAULT_CONFIG
#define PPSOURCE_DEFAULT_CONFIG "data/paper-default.json"
#endif

namespace {

using namespace ppsource;

struct Options {
    std::string config_path = PPSOURCE_DEFAULT_CONFIG;
    std::string output_path;
};

std::ostream& machine_out(const Options& opt, std::ofstream& file) {
    if (opt.output_path.empty()) return std::cout;
    file.open(opt.output_path);
    if (!file) throw IoError("cannot open output file '" + opt.output_path + "'");
    return file;
}

void print_kv(std::ostream& os, const char* key, double value) {
    os << key << ": " << format_sig(value) << "\n";
}

std::vector<double> parse_grid_um(const std::string& s, const char* flag) {
    double lo = 0, hi = 0;
    int n = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(s);
    if (!(in >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1 || !(lo > 0) ||
        hi < lo)
        throw IoError(std::string(flag) + " expects MIN_UM:MAX_UM:N with N >= 1, got '" + s + "'");
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i)
        grid[i] = um_to_m(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (n - 1));
    return grid;
}

// central solve + dispersion terms + both bandwidths, shared by several commands
struct Pipeline {
    PhaseMatchSolution sol;
    DispersionTerms disp;
    double delta1_nm = 0.0;
    double delta2_nm = 0.0;
    BeamGeometry geom;
};

Pipeline run_pipeline(const ExperimentConfig& cfg) {
    Pipeline p;
    p.geom = cfg.geometry();
    p.sol = solve_central(cfg.crystal, cfg.pump, cfg.heralding_mode.external_angle);
    const double omega_p = omega_from_lambda(cfg.pump.wavelength);
    p.disp = dispersion_terms(cfg.crystal, omega_p, p.sol.omega_s, p.sol.omega_i,
                              p.sol.theta_s_int, p.sol.theta_i_int);
    p.geom.heralding_mode.central_wavelength = p.sol.lambda_s;
    p.geom.heralded_mode.central_wavelength = p.sol.lambda_i;
    p.delta1_nm = cfg.heralding_mode.bandwidth_fwhm_nm.value_or(
        extract_bandwidth(cfg.crystal, cfg.pump, p.sol, p.geom.heralding_mode, Arm::heralding));
    p.delta2_nm = cfg.heralded_mode.bandwidth_fwhm_nm.value_or(
        extract_bandwidth(cfg.crystal, cfg.pump, p.sol, p.geom.heralded_mode, Arm::heralded));
    p.geom.heralding_mode.bandwidth_fwhm_nm = p.delta1_nm;
    p.geom.heralded_mode.bandwidth_fwhm_nm = p.delta2_nm;
    return p;
}

void print_solution(std::ostream& os, const PhaseMatchSolution& sol, double crystal_length) {
    print_kv(os, "lambda_s_nm", m_to_nm(sol.lambda_s));
    print_kv(os, "lambda_i_nm", m_to_nm(sol.lambda_i));
    print_kv(os, "theta_s_ext_deg", rad_to_deg(sol.theta_s_ext));
    print_kv(os, "theta_i_ext_deg", rad_to_deg(sol.theta_i_ext));
    print_kv(os, "theta_s_int_deg", rad_to_deg(sol.theta_s_int));
    print_kv(os, "theta_i_int_deg", rad_to_deg(sol.theta_i_int));
    print_kv(os, "residual_dkz_L", std::abs(sol.residual_dkz) * crystal_length);
}

int cmd_index(const Options& opt, double lambda_nm) {
    const ExperimentConfig cfg = load_config(opt.config_path);
    const auto& set = cfg.crystal.sellmeier;
    std::cout << "sellmeier_set: " << set.name << "\n";
    print_kv(std::cout, "temperature_C", cfg.crystal.temperature);
    print_kv(std::cout, "lambda_nm", lambda_nm);
    print_kv(std::cout, "n", refractive_index(lambda_nm, cfg.crystal.temperature, set));
    const double D = group_term(lambda_nm, cfg.crystal.temperature, set);
    print_kv(std::cout, "group_term_s_per_m", D);
    print_kv(std::cout, "group_index", D * speed_of_light);
    return 0;
}

int cmd_phasematch(const Options& opt, std::optional<double> theta_deg,
                   const std::vector<double>& scan) {
    const ExperimentConfig cfg = load_config(opt.config_path);
    const double theta_ext =
        theta_deg ? deg_to_rad(*theta_deg) : cfg.heralding_mode.external_angle;
    if (scan.empty()) {
        const auto sol = solve_central(cfg.crystal, cfg.pump, theta_ext);
        print_solution(std::cout, sol, cfg.crystal.effective_length());
        return 0;
    }
    const double t_min = scan[0], t_max = scan[1], t_step = scan[2];
    if (!(t_step > 0.0) || t_max < t_min)
        throw IoError("--scan-temperature expects MIN MAX STEP with STEP > 0");
    std::ofstream file;
    std::ostream& os = machine_out(opt, file);
    os << "temperature_C,lambda_s_nm,lambda_i_nm,theta_i_ext_deg,residual_dkz_L\n";
    for (double T = t_min; T <= t_max + 1e-12; T += t_step) {
        CrystalSpec crystal = cfg.crystal;
        crystal.temperature = T;
        os << format_sig(T) << ',';
        try {
            const auto sol = solve_central(crystal, cfg.pump, theta_ext);
            os << format_sig(m_to_nm(sol.lambda_s)) << ',' << format_sig(m_to_nm(sol.lambda_i))
               << ',' << format_sig(rad_to_deg(sol.theta_i_ext)) << ','
               << format_sig(std::abs(sol.residual_dkz) * crystal.effective_length()) << '\n';
        } catch (const Error&) {
            os << "nan,nan,nan,nan\n";
        }
    }
    return 0;
}

int cmd_bandwidth(const Options& opt) {
    const ExperimentConfig cfg = load_config(opt.config_path);
    const Pipeline p = run_pipeline(cfg);
    print_kv(std::cout, "lambda_s_nm", m_to_nm(p.sol.lambda_s));
    print_kv(std::cout, "lambda_i_nm", m_to_nm(p.sol.lambda_i));
    print_kv(std::cout, "delta_theta_1_rad", angular_fwhm(p.geom.heralding_mode));
    print_kv(std::cout, "delta_theta_2_rad", angular_fwhm(p.geom.heralded_mode));
    print_kv(std::cout, "delta1_nm", p.delta1_nm);
    print_kv(std::cout, "delta2_nm", p.delta2_nm);
    return 0;
}

int cmd_chi_p(const Options& opt) {
    const ExperimentConfig cfg = load_config(opt.config_path);
    const Pipeline p = run_pipeline(cfg);
    const auto b =
        chi_p_breakdown(p.geom, cfg.crystal, p.disp, p.delta1_nm, p.delta2_nm, p.sol.theta_i_int);
    print_solution(std::cout, p.sol, cfg.crystal.effective_length());
    print_kv(std::cout, "delta1_nm", p.delta1_nm);
    print_kv(std::cout, "delta2_nm", p.delta2_nm);
    print_kv(std::cout, "D_s_s_per_m", p.disp.D_s);
    print_kv(std::cout, "D_i_s_per_m", p.disp.D_i);
    print_kv(std::cout, "D_p_s_per_m", p.disp.D_p);
    print_kv(std::cout, "D_is_s_per_m", p.disp.D_is);
    print_kv(std::cout, "D_pi_s_per_m", p.disp.D_pi);
    print_kv(std::cout, "alpha_s", p.disp.alpha_s);
    print_kv(std::cout, "c1", b.coeffs.c1);
    print_kv(std::cout, "c2", b.coeffs.c2);
    print_kv(std::cout, "s1", b.coeffs.s1);
    print_kv(std::cout, "s2", b.coeffs.s2);
    print_kv(std::cout, "spatial_prefactor", b.spatial);
    print_kv(std::cout, "spectral_factor", b.spectral);
    print_kv(std::cout, "f_coinc", b.f_coinc);
    print_kv(std::cout, "f_singles", b.f_singles);
    print_kv(std::cout, "f_ratio", b.f_coinc / b.f_singles);
    print_kv(std::cout, "chi_p", b.chi_p);
    return 0;
}

int cmd_sweep(const Options& opt, const std::string& w1_spec, const std::string& w2_spec,
              std::optional<double> delta1_nm) {
    const ExperimentConfig cfg = load_config(opt.config_path);
    const auto w1 = parse_grid_um(w1_spec, "--w1");
    const auto w2 = parse_grid_um(w2_spec, "--w2");
    const SweepResult res = sweep_chi_p(cfg.geometry(), cfg.crystal, w1, w2, delta1_nm);
    std::ofstream file;
    write_sweep_csv(machine_out(opt, file), res);
    return 0;
}

int cmd_simulate(const Options& opt, std::uint64_t heralds, std::uint64_t seed,
                 std::uint64_t runs) {
    const ExperimentConfig cfg = load_config(opt.config_path);
    if (!cfg.gate)
        throw ConsistencyError("config has no gate section; simulation needs one");
    std::vector<CountRecord> records;
    records.reserve(runs);
    for (std::uint64_t r = 0; r < runs; ++r)
        records.push_back(simulate_run(*cfg.gate, heralds, derive_stream_seed(seed, 0x10000 + r)));
    std::ofstream file;
    write_count_records_csv(machine_out(opt, file), records);
    return 0;
}

int cmd_estimate(const Options& opt, const std::string& counts_path, bool invert) {
    const ExperimentConfig cfg = load_config(opt.config_path);
    std::ifstream in(counts_path);
    if (!in) throw IoError("cannot open counts file '" + counts_path + "'");
    const auto records = read_count_records_csv(in);
    nlohmann::json out;
    out["estimates"] = nlohmann::json::array();
    for (const auto& rec : records) {
        const auto est = estimate_chi_d(rec);
        nlohmann::json je = estimate_to_json(est, rec);
        if (invert) {
            EfficiencyBudget b = cfg.budget;
            if (!b.eta_det)
                throw ConsistencyError("budget inversion needs eta_det in the config");
            b.chi_p.reset();
            b.chi_d = est.chi_d;
            const auto solved = budget_solve(b);
            je["chi_p_inverted"] = *solved.chi_p;
            je["eta_det"] = *solved.eta_det;
            je["tau_opt"] = solved.tau_opt;
            je["tau_smf_lens"] = solved.tau_smf_lens;
        }
        out["estimates"].push_back(je);
    }
    std::ofstream file;
    machine_out(opt, file) << out.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    Options opt;
    CLI::App app{"design calculations for heralded single-photon sources "
                 "based on periodically poled crystals"};
    app.require_subcommand(1);
    app.add_option("--config", opt.config_path, "experiment configuration JSON")
        ->capture_default_str();
    app.add_option("--output", opt.output_path, "write the machine-readable artifact here");

    double lambda_nm = 0.0;
    auto* index = app.add_subcommand("index", "refractive index and group term");
    index->add_option("--lambda-nm", lambda_nm, "wavelength in nm")->required();

    std::optional<double> theta_deg;
    std::vector<double> scan;
    auto* pm = app.add_subcommand("phasematch", "central quasi-phase-matched solution");
    pm->add_option("--theta-s-ext-deg", theta_deg, "external heralding angle (default: config)");
    pm->add_option("--scan-temperature", scan, "MIN MAX STEP in C; emits CSV")->expected(3);

    app.add_subcommand("bandwidth", "geometrically selected collection bandwidths");
    app.add_subcommand("chi-p", "single-mode heralding efficiency with intermediates");

    std::string w1_spec, w2_spec;
    std::optional<double> delta1_override;
    auto* sweep = app.add_subcommand("sweep", "chi_P over a waist grid (CSV)");
    sweep->add_option("--w1", w1_spec, "heralding waist grid MIN_UM:MAX_UM:N")->required();
    sweep->add_option("--w2", w2_spec, "heralded waist grid MIN_UM:MAX_UM:N")->required();
    sweep->add_option("--delta1-nm", delta1_override, "fixed heralding-filter bandwidth");

    std::uint64_t heralds = 150000, seed = 1, runs = 1;
    auto* sim = app.add_subcommand("simulate", "simulate calibration runs (CSV)");
    sim->add_option("--heralds", heralds, "heralds per run")->capture_default_str();
    sim->add_option("--seed", seed, "RNG seed")->capture_default_str();
    sim->add_option("--runs", runs, "number of runs")->capture_default_str();

    std::string counts_path;
    bool invert = false;
    auto* est = app.add_subcommand("estimate", "ML efficiency estimates from a counts CSV");
    est->add_option("counts", counts_path, "count-record CSV path")->required();
    est->add_flag("--invert", invert, "also solve the efficiency budget for chi_P");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "error: usage: " << e.what() << "\n";
        return 2;
    }

    try {
        if (index->parsed()) return cmd_index(opt, lambda_nm);
        if (pm->parsed()) return cmd_phasematch(opt, theta_deg, scan);
        if (app.get_subcommand("bandwidth")->parsed()) return cmd_bandwidth(opt);
        if (app.get_subcommand("chi-p")->parsed()) return cmd_chi_p(opt);
        if (sweep->parsed()) return cmd_sweep(opt, w1_spec, w2_spec, delta1_override);
        if (sim->parsed()) return cmd_simulate(opt, heralds, seed, runs);
        if (est->parsed()) return cmd_estimate(opt, counts_path, invert);
    } catch (const ppsource::Error& e) {
        std::cerr << "error: " << e.code() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
