#include "spheroid/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "spheroid/bfn.hpp"
#include "spheroid/forward.hpp"
#include "spheroid/profiles.hpp"
#include "spheroid/tikhonov.hpp"

namespace spheroid::cli {

namespace {

using nlohmann::json;

void require_valid(const ExperimentConfig& cfg, std::vector<std::string> extra = {}) {
    std::vector<std::string> errs = validate_config(cfg);
    errs.insert(errs.end(), extra.begin(), extra.end());
    if (!errs.empty()) {
        std::string report = "configuration invalid:";
        for (const auto& e : errs) report += "\n  - " + e;
        throw ValidationError(report);
    }
}

Grid1D radial_grid(const ExperimentConfig& cfg) {
    return Grid1D(cfg.radial.lo, cfg.radial.hi, cfg.radial.points);
}

Grid1D chord_grid(const ExperimentConfig& cfg) {
    return Grid1D(0.0, cfg.chord_hi(), cfg.chord.points);
}

std::vector<ShapeParam> shape_params(const ExperimentConfig& cfg) {
    std::vector<ShapeParam> out;
    out.reserve(cfg.shapes.size());
    for (const auto& s : cfg.shapes) out.emplace_back(s.eta);
    return out;
}

// build with a binary cache under the output directory; load() verifies the
// (grids, shapes, quadrature) key and falls through to a rebuild on mismatch
KernelOperator cached_operator(const ExperimentConfig& cfg, const Grid1D& radial,
                               const Grid1D& chord, const std::vector<ShapeParam>& shapes) {
    std::filesystem::create_directories(cfg.output_dir);
    if (auto cached = KernelOperator::load(cfg.output_dir / "operator.bin", radial, chord, shapes,
                                           cfg.quadrature))
        return std::move(*cached);
    KernelOperator op = KernelOperator::build(radial, chord, shapes, cfg.quadrature);
    op.save(cfg.output_dir / "operator.bin");
    return op;
}

DensityField input_psd(const ExperimentConfig& cfg, const Grid1D& radial) {
    if (!cfg.psd_input.empty()) {
        DensityField f = read_csv(cfg.psd_input, FieldKind::Psd);
        if (f.grid != radial)
            throw ValidationError("psd_input grid does not match radial_grid (" + cfg.psd_input + ")");
        return f;
    }
    if (cfg.psd_profile == "bimodal") return bimodal_psd(radial);
    if (cfg.psd_profile == "zero") return DensityField(radial, FieldKind::Psd);
    throw ValidationError("unknown psd_profile '" + cfg.psd_profile + "'");
}

std::string eta_tag(double eta) {
    std::string s = format_double(eta);
    for (char& c : s)
        if (c == '.') c = 'p';
    return s;
}

TimeProfile make_profile(const ProfileConfig& p) {
    if (p.type == "constant") return TimeProfile::constant(p.value);
    if (p.type == "gaussian") {
        const double a = p.amplitude, c = p.center, s = p.sigma;
        return TimeProfile::from_function([a, c, s](double t) {
            const double u = (t - c) / s;
            return a * std::exp(-u * u);
        });
    }
    if (p.type == "csv") {
        std::ifstream in(p.path);
        if (!in) throw ValidationError("cannot open profile CSV " + p.path);
        std::string line;
        std::getline(in, line);  // header t,value
        std::vector<double> ts, vs;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream ss(line);
            double t, v;
            char comma;
            if (!(ss >> t >> comma >> v))
                throw ValidationError("malformed profile row '" + line + "' in " + p.path);
            ts.push_back(t);
            vs.push_back(v);
        }
        return TimeProfile::sampled(std::move(ts), std::move(vs));
    }
    throw ValidationError("unknown profile type '" + p.type + "'");
}

GrowthSchedule make_schedule(const ExperimentConfig& cfg) {
    std::vector<TimeProfile> gs;
    for (const auto& g : cfg.process->growth) gs.push_back(make_profile(g));
    return GrowthSchedule(std::move(gs), cfg.process->t_max);
}

NucleationInput make_nucleation(const ExperimentConfig& cfg) {
    NucleationInput u;
    if (cfg.process->nucleation.empty()) {
        u.u.assign(cfg.shapes.size(), TimeProfile::constant(0.0));
    } else {
        for (const auto& p : cfg.process->nucleation) u.u.push_back(make_profile(p));
    }
    return u;
}

void write_series_csv(const CldTimeSeries& series, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << "t,ell,Qbar\n";
    for (std::size_t k = 0; k < series.times().size(); ++k)
        for (int j = 0; j < series.chord_grid().n_points(); ++j)
            out << format_double(series.times()[k]) << ',' << format_double(series.chord_grid().node(j))
                << ',' << format_double(series.values()(static_cast<Eigen::Index>(k), j)) << '\n';
}

CldTimeSeries read_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open CLD series " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,ell,Qbar", 0) != 0)
        throw ValidationError(path.string() + ": expected header 't,ell,Qbar'");
    std::map<double, std::vector<std::pair<double, double>>> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        double t, ell, q;
        char c1, c2;
        if (!(ss >> t >> c1 >> ell >> c2 >> q) || c1 != ',' || c2 != ',')
            throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": malformed row");
        rows[t].push_back({ell, q});
    }
    if (rows.size() < 2) throw ValidationError(path.string() + ": need at least two time nodes");
    const auto& first = rows.begin()->second;
    const int nl = static_cast<int>(first.size());
    std::vector<double> times;
    Eigen::MatrixXd values(rows.size(), nl);
    Eigen::Index k = 0;
    for (auto& [t, row] : rows) {
        if (static_cast<int>(row.size()) != nl)
            throw ValidationError(path.string() + ": inconsistent chord sampling across times");
        std::sort(row.begin(), row.end());
        for (int j = 0; j < nl; ++j) values(k, j) = row[j].second;
        times.push_back(t);
        ++k;
    }
    Grid1D chord(first.front().first, first.back().first, nl);
    return CldTimeSeries(chord, std::move(times), std::move(values));
}

void write_trajectory_csv(std::span<const ExtendedState> traj, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << "t,r,shape,psi\n";
    for (const auto& st : traj) {
        for (std::size_t i = 0; i < st.values.size(); ++i) {
            const int begin = st.physical_begin(i);
            for (int j = begin; j < st.grids[i].n_points(); ++j)
                out << format_double(st.time) << ',' << format_double(st.grids[i].node(j)) << ','
                    << i << ',' << format_double(st.values[i][j]) << '\n';
        }
    }
}

// per-shape fields at the latest time in a trajectory CSV
std::vector<DensityField> read_truth_tmax(const std::filesystem::path& path, std::size_t n_shapes) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open truth trajectory " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,r,shape,psi", 0) != 0)
        throw ValidationError(path.string() + ": expected header 't,r,shape,psi'");
    double t_last = -std::numeric_limits<double>::infinity();
    std::vector<std::vector<std::pair<double, double>>> rows(n_shapes);
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        double t, r, psi;
        long shape;
        char c1, c2, c3;
        if (!(ss >> t >> c1 >> r >> c2 >> shape >> c3 >> psi))
            throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": malformed row");
        if (shape < 0 || shape >= static_cast<long>(n_shapes))
            throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": shape out of range");
        if (t > t_last + 1e-15) {
            t_last = t;
            for (auto& v : rows) v.clear();
        }
        if (std::abs(t - t_last) <= 1e-15 + 1e-12 * std::abs(t_last))
            rows[static_cast<std::size_t>(shape)].push_back({r, psi});
    }
    std::vector<DensityField> out;
    for (std::size_t i = 0; i < n_shapes; ++i) {
        auto& v = rows[i];
        if (v.size() < 2)
            throw ValidationError(path.string() + ": missing terminal snapshot for shape " +
                                  std::to_string(i));
        std::sort(v.begin(), v.end());
        Grid1D g(v.front().first, v.back().first, static_cast<int>(v.size()));
        Eigen::VectorXd vals(v.size());
        for (std::size_t j = 0; j < v.size(); ++j) vals[static_cast<Eigen::Index>(j)] = v[j].second;
        out.emplace_back(g, FieldKind::Psd, std::move(vals));
    }
    return out;
}

}  // namespace

int run_forward(const ExperimentConfig& cfg, const ForwardOptions& opt) {
    ExperimentConfig c = cfg;
    if (!opt.etas.empty()) {
        c.shapes.clear();
        for (double e : opt.etas) c.shapes.push_back({e, 1.0});
    }
    std::vector<std::string> extra;
    if (opt.dirac_r > 0.0 && (opt.dirac_r <= c.radial.lo || opt.dirac_r >= c.radial.hi))
        extra.push_back("--dirac radius must lie strictly inside the radial grid");
    require_valid(c, extra);

    const Grid1D radial = radial_grid(c);
    const Grid1D chord = chord_grid(c);
    std::filesystem::create_directories(c.output_dir);

    DensityField psd(radial, FieldKind::Psd);
    if (opt.dirac_r > 0.0) {
        int node = static_cast<int>(std::lround((opt.dirac_r - radial.lo()) / radial.spacing()));
        node = std::clamp(node, 1, radial.n_points() - 2);
        psd.values[node] = 1.0 / radial.spacing();
    } else {
        psd = input_psd(c, radial);
    }
    const double m = mass(psd);
    DensityField psd_bar = psd;
    if (m != 0.0) psd_bar.values /= m;

    const KernelOperator op = cached_operator(c, radial, chord, shape_params(c));
    DensityField total(chord, FieldKind::CumulativeCld);
    for (std::size_t i = 0; i < c.shapes.size(); ++i) {
        Eigen::VectorXd Qbar = op.matrix(i) * psd_bar.values;
        DensityField Qf(chord, FieldKind::CumulativeCld, Qbar);
        const std::string tag = eta_tag(c.shapes[i].eta);
        write_csv(Qf, c.output_dir / ("cld_cumulative_eta_" + tag + ".csv"));
        write_csv(differentiate(Qf), c.output_dir / ("cld_eta_" + tag + ".csv"));
        total.values += c.shapes[i].kappa * m * Qbar;
    }
    write_csv(total, c.output_dir / "cld_cumulative_total.csv");
    return kExitOk;
}

int run_invert(const ExperimentConfig& cfg, const InvertOptions& opt) {
    std::vector<std::string> extra;
    if (cfg.shapes.size() != 1) extra.push_back("invert requires exactly one shape");
    if (cfg.deltas.empty()) extra.push_back("invert requires a non-empty deltas list");
    require_valid(cfg, extra);

    const Grid1D radial = radial_grid(cfg);
    const Grid1D chord = chord_grid(cfg);
    std::filesystem::create_directories(cfg.output_dir);
    const KernelOperator op = cached_operator(cfg, radial, chord, shape_params(cfg));

    DensityField data(chord, FieldKind::CumulativeCld);
    json meta;
    if (!opt.data_csv.empty()) {
        data = read_csv(opt.data_csv, FieldKind::CumulativeCld);
        if (data.grid != chord)
            throw ValidationError("data grid in " + opt.data_csv + " does not match chord_grid");
        meta["data"] = opt.data_csv;
    } else {
        const DensityField psd_bar = normalized(input_psd(cfg, radial));
        DensityField Q = op.apply(psd_bar);
        DensityField q = differentiate(Q);
        q = add_noise(q, cfg.noise.level, cfg.noise.seed);
        data = normalized(cumulative(q));
        meta["noise_level"] = cfg.noise.level;
        meta["noise_seed"] = cfg.noise.seed;
        write_csv(data, cfg.output_dir / "data_cumulative.csv");
    }

    TikhonovProblem prob{&op, data, 0.0, cfg.tikhonov.nonneg, cfg.tikhonov.tol,
                         cfg.tikhonov.max_iters};
    json results = json::array();
    bool all_converged = true;
    for (double delta : cfg.deltas) {
        prob.delta = delta;
        TikhonovSolution sol = solve(prob);
        const std::string name = "reconstruction_delta_" + format_double(delta) + ".csv";
        write_csv(sol.psd, cfg.output_dir / name);
        json r;
        r["delta"] = delta;
        r["residual_norm"] = sol.residual_norm;
        r["solution_norm"] = sol.solution_norm;
        r["iterations"] = sol.iterations;
        r["converged"] = sol.converged;
        r["output"] = name;
        json modes = json::array();
        for (int idx : find_modes(sol.psd.values)) modes.push_back(sol.psd.grid.node(idx));
        r["mode_locations"] = modes;
        results.push_back(r);
        all_converged = all_converged && sol.converged;
    }
    meta["nonneg"] = cfg.tikhonov.nonneg;
    meta["results"] = results;
    std::ofstream out(cfg.output_dir / "summary.json");
    out << meta.dump(2) << '\n';
    return all_converged ? kExitOk : kExitNumerical;
}

int run_simulate(const ExperimentConfig& cfg, const SimulateOptions& opt) {
    std::vector<std::string> extra;
    if (!cfg.process) extra.push_back("simulate requires a process section");
    require_valid(cfg, extra);

    const Grid1D radial = radial_grid(cfg);
    std::filesystem::create_directories(cfg.output_dir);
    const GrowthSchedule schedule = make_schedule(cfg);
    const NucleationInput u = make_nucleation(cfg);

    std::vector<DensityField> seeds;
    for (std::size_t i = 0; i < cfg.shapes.size(); ++i)
        seeds.emplace_back(radial, FieldKind::Psd);  // zero seeds; nucleation drives the run
    ExtendedState st0 = extend_initial_state(seeds, u, schedule, cfg.process->spacings);
    auto traj = simulate(std::move(st0), schedule, cfg.process->t_max, cfg.process->steps);
    write_trajectory_csv(traj, cfg.output_dir / "trajectory.csv");
    for (std::size_t i = 0; i < cfg.shapes.size(); ++i)
        write_csv(restrict_to_physical(traj.back(), i),
                  cfg.output_dir / ("psd_tmax_shape" + std::to_string(i) + ".csv"));

    if (opt.write_cld_series) {
        const Grid1D chord = chord_grid(cfg);
        const KernelOperator op = cached_operator(cfg, radial, chord, shape_params(cfg));
        write_series_csv(synthesize_cld_series(op, traj), cfg.output_dir / "cld_series.csv");
    }
    return kExitOk;
}

int run_bfn(const ExperimentConfig& cfg, const BfnOptions& opt) {
    std::vector<std::string> extra;
    if (!cfg.process) extra.push_back("bfn requires a process section");
    if (opt.data_csv.empty()) extra.push_back("bfn requires --data (CSV t,ell,Qbar)");
    require_valid(cfg, extra);

    const Grid1D radial = radial_grid(cfg);
    const Grid1D chord = chord_grid(cfg);
    std::filesystem::create_directories(cfg.output_dir);
    const KernelOperator op = cached_operator(cfg, radial, chord, shape_params(cfg));
    const GrowthSchedule schedule = make_schedule(cfg);

    CldTimeSeries data = read_series_csv(opt.data_csv);
    if (data.chord_grid() != chord)
        throw ValidationError("data chord grid does not match chord_grid");

    BfnConfig bc;
    bc.mu = cfg.bfn.mu;
    bc.gain = cfg.bfn.gain;
    bc.n_iterations = opt.iterations > 0 ? opt.iterations : cfg.bfn.iterations;
    bc.fit_start = cfg.bfn.fit_start;
    bc.n_steps = cfg.process->steps;
    bc.t_max = cfg.process->t_max;

    // zero initial guess on the same extended domain as the process
    std::vector<DensityField> zeros;
    for (std::size_t i = 0; i < cfg.shapes.size(); ++i) zeros.emplace_back(radial, FieldKind::Psd);
    NucleationInput no_u;
    no_u.u.assign(cfg.shapes.size(), TimeProfile::constant(0.0));
    ExtendedState guess = extend_initial_state(zeros, no_u, schedule, cfg.process->spacings);

    std::vector<DensityField> truth;
    if (!opt.truth_csv.empty()) truth = read_truth_tmax(opt.truth_csv, cfg.shapes.size());

    BfnObserver observer(op, schedule, bc);
    BfnResult res = observer.run(guess, data, truth);

    for (std::size_t i = 0; i < cfg.shapes.size(); ++i) {
        write_csv(restrict_to_physical(res.estimate_tmax, i),
                  cfg.output_dir / ("estimate_tmax_shape" + std::to_string(i) + ".csv"));
        write_csv(restrict_to_physical(res.estimate_t0, i),
                  cfg.output_dir / ("estimate_t0_shape" + std::to_string(i) + ".csv"));
    }

    json rep;
    rep["mu"] = res.report.mu_used;
    rep["iterations"] = bc.n_iterations;
    rep["diverged"] = res.report.diverged;
    rep["rate_valid"] = res.report.rate_valid;
    if (res.report.rate_valid) {
        rep["fitted_rate"] = res.report.fitted_rate;
        rep["fitted_prefactor"] = res.report.fitted_prefactor;
    }
    json hist = json::array();
    for (const auto& h : res.report.history) {
        json e;
        e["iteration"] = h.iteration;
        e["misfit"] = h.misfit;
        if (std::isfinite(h.error_tmax)) e["error_tmax"] = h.error_tmax;
        hist.push_back(e);
    }
    rep["history"] = hist;
    std::ofstream out(cfg.output_dir / "report.json");
    out << rep.dump(2) << '\n';
    return res.report.diverged ? kExitNumerical : kExitOk;
}

int run_oracle(const ExperimentConfig& cfg, const OracleOptions& opt) {
    std::vector<std::string> extra;
    if (opt.r < kRadiusFloor) extra.push_back("oracle radius must exceed the radius floor");
    if (opt.samples < 1000) extra.push_back("oracle needs at least 1000 samples");
    if (opt.probes < 1) extra.push_back("oracle needs at least one probe point");
    for (double e : opt.etas)
        if (!(e > 0.0)) extra.push_back("oracle eta values must be positive");
    if (!extra.empty()) {
        std::string report = "configuration invalid:";
        for (const auto& e : extra) report += "\n  - " + e;
        throw ValidationError(report);
    }

    std::filesystem::create_directories(cfg.output_dir);
    const AngularQuadrature quad(cfg.quadrature);
    bool all_ok = true;
    for (std::size_t idx = 0; idx < opt.etas.size(); ++idx) {
        const ShapeParam shape(opt.etas[idx]);
        ChordSampler sampler(opt.r, shape, opt.seed + idx);
        std::vector<double> samples(static_cast<std::size_t>(opt.samples));
        for (auto& s : samples) s = sampler.sample();
        std::sort(samples.begin(), samples.end());

        const double lmax = 2.0 * opt.r * std::max(shape.eta, 1.0);
        std::ofstream out(cfg.output_dir / ("oracle_eta_" + eta_tag(shape.eta) + ".csv"));
        out << "ell,empirical,analytic,deviation,band\n";
        for (int j = 1; j <= opt.probes; ++j) {
            const double ell = lmax * j / opt.probes;
            const auto it = std::lower_bound(samples.begin(), samples.end(), ell);
            const double emp = static_cast<double>(it - samples.begin()) / samples.size();
            const double ana = kernel_value(ell, opt.r, shape, quad);
            const double dev = std::abs(emp - ana);
            const double band =
                4.0 * std::sqrt(std::max(ana * (1.0 - ana), 0.0) / samples.size()) + 1e-5;
            all_ok = all_ok && dev <= band;
            out << format_double(ell) << ',' << format_double(emp) << ',' << format_double(ana)
                << ',' << format_double(dev) << ',' << format_double(band) << '\n';
        }
    }
    return all_ok ? kExitOk : kExitNumerical;
}

}  // namespace spheroid::cli
