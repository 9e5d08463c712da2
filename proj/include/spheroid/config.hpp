#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "spheroid/quadrature.hpp"

namespace spheroid {

struct ShapeConfig {
    double eta = 1.0;
    double kappa = 1.0;  // chords counted per particle, experimental input
};

struct GridConfig {
    double lo = 0.0;
    double hi = 0.0;
    int points = 200;
};

struct NoiseConfig {
    double level = 0.0;
    std::uint64_t seed = 1;
};

// Growth-rate / nucleation profile source: a constant, a CSV of (t, value)
// samples, or a named Gaussian pulse a*exp(-((t-center)/sigma)^2).
struct ProfileConfig {
    std::string type = "constant";  // constant | csv | gaussian
    double value = 0.0;             // constant
    std::string path;               // csv
    double amplitude = 0.0, center = 0.0, sigma = 1.0;  // gaussian
};

struct ProcessConfig {
    double t_max = 0.0;  // seconds
    int steps = 100;
    std::vector<ProfileConfig> growth;      // per shape, m/s
    std::vector<ProfileConfig> nucleation;  // per shape, 1/m/m^3
    std::vector<double> spacings;           // per shape radial spacing, m
};

struct TikhonovSettings {
    double tol = 1e-8;
    int max_iters = 50000;
    bool nonneg = false;
};

struct BfnSettings {
    double mu = 0.0;  // 0 = auto
    double gain = 0.8;
    int iterations = 100;
    int fit_start = 30;
};

struct ExperimentConfig {
    GridConfig radial;
    GridConfig chord;  // hi = 0 means cover 2*r_max*max(eta,1)
    std::vector<ShapeConfig> shapes;
    AngularQuadratureSpec quadrature;
    NoiseConfig noise;
    std::vector<double> deltas{1e-5, 1e-3, 1e-1};
    TikhonovSettings tikhonov;
    BfnSettings bfn;
    std::optional<ProcessConfig> process;
    std::string psd_input;               // CSV path for an input PSD
    std::string psd_profile = "bimodal"; // used when psd_input is empty
    std::filesystem::path output_dir = "out";

    double chord_hi() const;  // resolved chord upper bound
};

// Quantity parsing; plain numbers are SI (seconds, m/s).
double parse_time(const std::string& s);        // "3600", "1h", "30min", "2.5s"
double parse_rate(const std::string& s);        // "1e-4m/h", "2e-8 m/s"

ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const nlohmann::json& j);

// All validation problems at once; empty means valid.
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

}  // namespace spheroid
