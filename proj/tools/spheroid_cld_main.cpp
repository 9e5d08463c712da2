#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spheroid/cli.hpp"

namespace {

spheroid::ExperimentConfig load_or_default(const std::string& config_path,
                                           const std::string& output_dir) {
    spheroid::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = spheroid::load_config(config_path);
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spheroid-cld: chord length distributions of spheroid suspensions,\n"
                 "single-shape Tikhonov inversion and multi-shape BFN estimation"};
    app.require_subcommand(1);

    std::string config_path, output_dir;
    app.add_option("--config", config_path, "JSON configuration file")->expected(1);
    app.add_option("--output-dir", output_dir, "override the configured output directory");

    auto* fwd = app.add_subcommand("forward", "PSD -> CLD curves");
    spheroid::cli::ForwardOptions fopt;
    fwd->add_option("--dirac", fopt.dirac_r, "replace the PSD by a Dirac at this radius (m)");
    fwd->add_option("--eta", fopt.etas, "shape ratios to evaluate (overrides config shapes)")
        ->delimiter(',');

    auto* inv = app.add_subcommand("invert", "Tikhonov CLD -> PSD reconstruction per delta");
    spheroid::cli::InvertOptions iopt;
    inv->add_option("--data", iopt.data_csv, "measured cumulative CLD CSV (x,value)");

    auto* sim = app.add_subcommand("simulate", "population-balance transport run");
    spheroid::cli::SimulateOptions sopt;
    sim->add_flag_callback("--no-cld-series", [&] { sopt.write_cld_series = false; },
                           "skip the cumulative-CLD time series output");

    auto* bfn = app.add_subcommand("bfn", "back-and-forth nudging PSD estimation");
    spheroid::cli::BfnOptions bopt;
    bfn->add_option("--data", bopt.data_csv, "CLD time series CSV (t,ell,Qbar)");
    bfn->add_option("--truth", bopt.truth_csv, "optional truth trajectory CSV (t,r,shape,psi)");
    bfn->add_option("--iters", bopt.iterations, "total half-sweeps (overrides config)");

    auto* orc = app.add_subcommand("oracle", "Monte-Carlo vs quadrature kernel cross-check");
    spheroid::cli::OracleOptions oopt;
    orc->add_option("--eta", oopt.etas, "shape ratios")->delimiter(',');
    orc->add_option("--r", oopt.r, "spheroid radius (m)");
    orc->add_option("--samples", oopt.samples, "Monte-Carlo sample count");
    orc->add_option("--probes", oopt.probes, "number of probe chord lengths");
    orc->add_option("--seed", oopt.seed, "sampler seed");

    CLI11_PARSE(app, argc, argv);

    try {
        const spheroid::ExperimentConfig cfg = load_or_default(config_path, output_dir);
        if (fwd->parsed()) return spheroid::cli::run_forward(cfg, fopt);
        if (inv->parsed()) return spheroid::cli::run_invert(cfg, iopt);
        if (sim->parsed()) return spheroid::cli::run_simulate(cfg, sopt);
        if (bfn->parsed()) return spheroid::cli::run_bfn(cfg, bopt);
        if (orc->parsed()) return spheroid::cli::run_oracle(cfg, oopt);
    } catch (const spheroid::cli::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return spheroid::cli::kExitValidation;
    } catch (const spheroid::cli::NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return spheroid::cli::kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return spheroid::cli::kExitValidation;
    }
    return spheroid::cli::kExitOk;
}
