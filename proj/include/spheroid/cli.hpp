#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "spheroid/config.hpp"

namespace spheroid::cli {

// exit codes per the CLI contract
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ForwardOptions {
    double dirac_r = 0.0;            // > 0: replace the PSD by a Dirac at this radius
    std::vector<double> etas;        // when set, overrides config shapes (one curve each)
};

struct InvertOptions {
    std::string data_csv;            // measured cumulative CLD; empty = synthesize + noise
};

struct SimulateOptions {
    bool write_cld_series = true;    // also emit the operator's cumulative CLD over time
};

struct BfnOptions {
    std::string data_csv;            // CSV t,ell,Qbar (required)
    std::string truth_csv;           // optional trajectory CSV t,r,shape,psi
    int iterations = 0;              // > 0 overrides config
};

struct OracleOptions {
    std::vector<double> etas{2.0};
    double r = 1e-3;
    long samples = 1000000;
    int probes = 20;
    std::uint64_t seed = 1;
};

// Each command validates its inputs (throwing ValidationError with one
// aggregated report), runs, writes its files under cfg.output_dir and returns
// an exit code (kExitNumerical on solver failures).
int run_forward(const ExperimentConfig& cfg, const ForwardOptions& opt);
int run_invert(const ExperimentConfig& cfg, const InvertOptions& opt);
int run_simulate(const ExperimentConfig& cfg, const SimulateOptions& opt);
int run_bfn(const ExperimentConfig& cfg, const BfnOptions& opt);
int run_oracle(const ExperimentConfig& cfg, const OracleOptions& opt);

}  // namespace spheroid::cli
