#include "spheroid/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

namespace spheroid {

namespace {

using nlohmann::json;

double suffix_value(const std::string& s, const std::string& what) {
    // number with optional unit suffix, e.g. "1.5e-4", "1h", "30 min"
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse " + what + " '" + s + "'");
    }
    std::string unit = s.substr(pos);
    unit.erase(std::remove_if(unit.begin(), unit.end(), [](char c) { return std::isspace(c); }),
               unit.end());
    if (unit.empty() || unit == "s") return v;
    if (unit == "h") return v * 3600.0;
    if (unit == "min") return v * 60.0;
    if (unit == "ms") return v * 1e-3;
    if (unit == "m/s") return v;       // rates
    if (unit == "m/h") return v / 3600.0;
    if (unit == "m/min") return v / 60.0;
    throw std::invalid_argument("unknown unit '" + unit + "' in " + what + " '" + s + "'");
}

double number_or_quantity(const json& j, const std::string& what) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return suffix_value(j.get<std::string>(), what);
    throw std::invalid_argument(what + " must be a number or a unit string");
}

ProfileConfig parse_profile(const json& j, const std::string& what) {
    ProfileConfig p;
    if (j.is_number() || j.is_string()) {  // shorthand for a constant
        p.type = "constant";
        p.value = number_or_quantity(j, what);
        return p;
    }
    p.type = j.value("type", "constant");
    if (p.type == "constant") {
        p.value = number_or_quantity(j.at("value"), what + ".value");
    } else if (p.type == "csv") {
        p.path = j.at("path").get<std::string>();
    } else if (p.type == "gaussian") {
        p.amplitude = number_or_quantity(j.at("amplitude"), what + ".amplitude");
        p.center = number_or_quantity(j.at("center"), what + ".center");
        p.sigma = number_or_quantity(j.at("sigma"), what + ".sigma");
    } else {
        throw std::invalid_argument(what + ": unknown profile type '" + p.type + "'");
    }
    return p;
}

GridConfig parse_grid(const json& j) {
    GridConfig g;
    g.lo = j.value("lo", 0.0);
    g.hi = j.value("hi", 0.0);
    g.points = j.value("points", 200);
    return g;
}

}  // namespace

double parse_time(const std::string& s) { return suffix_value(s, "time"); }
double parse_rate(const std::string& s) { return suffix_value(s, "rate"); }

double ExperimentConfig::chord_hi() const {
    if (chord.hi > 0.0) return chord.hi;
    double eta_max = 1.0;
    for (const auto& s : shapes) eta_max = std::max(eta_max, s.eta);
    return 2.0 * radial.hi * eta_max;
}

ExperimentConfig parse_config(const nlohmann::json& j) {
    ExperimentConfig cfg;
    if (j.contains("radial_grid")) cfg.radial = parse_grid(j.at("radial_grid"));
    if (j.contains("chord_grid")) cfg.chord = parse_grid(j.at("chord_grid"));
    if (j.contains("shapes")) {
        cfg.shapes.clear();
        for (const auto& s : j.at("shapes")) {
            ShapeConfig sc;
            if (s.is_number()) {
                sc.eta = s.get<double>();
            } else {
                sc.eta = s.value("eta", 1.0);
                sc.kappa = s.value("kappa", 1.0);
            }
            cfg.shapes.push_back(sc);
        }
    }
    if (j.contains("quadrature")) {
        cfg.quadrature.n_phi = j.at("quadrature").value("points_phi", 64);
        cfg.quadrature.n_theta = j.at("quadrature").value("points_theta", 64);
    }
    if (j.contains("noise")) {
        cfg.noise.level = j.at("noise").value("level", 0.0);
        cfg.noise.seed = j.at("noise").value("seed", std::uint64_t{1});
    }
    if (j.contains("deltas")) cfg.deltas = j.at("deltas").get<std::vector<double>>();
    if (j.contains("tikhonov")) {
        const auto& t = j.at("tikhonov");
        cfg.tikhonov.tol = t.value("tol", 1e-8);
        cfg.tikhonov.max_iters = t.value("max_iters", 50000);
        cfg.tikhonov.nonneg = t.value("nonneg", false);
    }
    if (j.contains("bfn")) {
        const auto& b = j.at("bfn");
        cfg.bfn.mu = b.value("mu", 0.0);
        cfg.bfn.gain = b.value("gain", 0.8);
        cfg.bfn.iterations = b.value("iterations", 100);
        cfg.bfn.fit_start = b.value("fit_start", 30);
    }
    if (j.contains("process")) {
        const auto& p = j.at("process");
        ProcessConfig pc;
        pc.t_max = number_or_quantity(p.at("t_max"), "process.t_max");
        pc.steps = p.value("steps", 100);
        for (const auto& g : p.at("growth")) pc.growth.push_back(parse_profile(g, "process.growth"));
        if (p.contains("nucleation"))
            for (const auto& u : p.at("nucleation"))
                pc.nucleation.push_back(parse_profile(u, "process.nucleation"));
        if (p.contains("spacings")) pc.spacings = p.at("spacings").get<std::vector<double>>();
        cfg.process = pc;
    }
    cfg.psd_input = j.value("psd_input", std::string{});
    cfg.psd_profile = j.value("psd_profile", std::string{"bimodal"});
    if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("config parse error in " + path.string() + ": " + e.what());
    }
    return parse_config(j);
}

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
    std::vector<std::string> errs;
    auto check = [&](bool ok, const std::string& msg) {
        if (!ok) errs.push_back(msg);
    };
    check(cfg.radial.lo > 1e-12, "radial_grid.lo must be positive (formulas divide by r)");
    check(cfg.radial.hi > cfg.radial.lo, "radial_grid.hi must exceed radial_grid.lo");
    check(cfg.radial.points >= 2, "radial_grid.points must be >= 2");
    check(cfg.chord.lo == 0.0, "chord_grid.lo must be 0");
    check(cfg.chord.points >= 2, "chord_grid.points must be >= 2");
    check(!cfg.shapes.empty(), "at least one shape is required");
    double eta_max = 1.0;
    for (std::size_t i = 0; i < cfg.shapes.size(); ++i) {
        check(cfg.shapes[i].eta > 0.0, "shapes[" + std::to_string(i) + "].eta must be positive");
        check(cfg.shapes[i].kappa > 0.0, "shapes[" + std::to_string(i) + "].kappa must be positive");
        eta_max = std::max(eta_max, cfg.shapes[i].eta);
    }
    if (cfg.chord.hi > 0.0)
        check(cfg.chord.hi >= 2.0 * cfg.radial.hi * eta_max * (1.0 - 1e-12),
              "chord_grid.hi does not cover ell_max = 2*r_max*max(eta,1)");
    check(cfg.quadrature.n_phi >= 1 && cfg.quadrature.n_theta >= 1,
          "quadrature node counts must be positive");
    check(cfg.noise.level >= 0.0, "noise.level must be >= 0");
    for (std::size_t i = 0; i < cfg.deltas.size(); ++i) {
        check(cfg.deltas[i] > 0.0, "deltas[" + std::to_string(i) + "] must be positive");
        if (i > 0)
            check(cfg.deltas[i] >= cfg.deltas[i - 1], "deltas must be sorted ascending");
    }
    check(cfg.tikhonov.tol > 0.0, "tikhonov.tol must be positive");
    check(cfg.tikhonov.max_iters >= 1, "tikhonov.max_iters must be >= 1");
    check(cfg.bfn.iterations >= 2 && cfg.bfn.iterations % 2 == 0,
          "bfn.iterations must be a positive even number of half-sweeps");
    check(cfg.bfn.gain > 0.0 || cfg.bfn.mu > 0.0, "bfn needs a positive gain or explicit mu");
    if (cfg.process) {
        const auto& p = *cfg.process;
        check(p.t_max > 0.0, "process.t_max must be positive");
        check(p.steps >= 1, "process.steps must be >= 1");
        check(p.growth.size() == cfg.shapes.size(),
              "process.growth must list one profile per shape");
        check(p.nucleation.empty() || p.nucleation.size() == cfg.shapes.size(),
              "process.nucleation must list one profile per shape");
        check(p.spacings.size() == cfg.shapes.size(),
              "process.spacings must list one spacing per shape");
        const double span = cfg.radial.hi - cfg.radial.lo;
        for (std::size_t i = 0; i < p.spacings.size(); ++i) {
            if (!(p.spacings[i] > 0.0)) {
                errs.push_back("process.spacings[" + std::to_string(i) + "] must be positive");
                continue;
            }
            const double cells = span / p.spacings[i];
            check(std::abs(cells - std::lround(cells)) < 1e-9 * cells,
                  "process.spacings[" + std::to_string(i) + "] must divide the radial span evenly");
        }
    }
    check(!cfg.output_dir.empty(), "output_dir must not be empty");
    return errs;
}

}  // namespace spheroid
