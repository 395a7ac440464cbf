#include "pxplab/experiments.hpp"

#include "pxplab/csv.hpp"
#include "pxplab/dynamics.hpp"
#include "pxplab/rng.hpp"
#include "pxplab/task_pool.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace pxplab {

namespace {

constexpr double kPi = std::numbers::pi;

std::ofstream open_artifact(const ExperimentConfig& cfg, RunManifest& manifest,
                            const std::string& name) {
    const std::string path = cfg.output_dir + "/" + name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    manifest.outputs.push_back(name);
    return out;
}

SpinChain read_chain_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("init file: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("init file: empty file '" + path + "'");
    std::vector<std::pair<long long, Vec3>> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 4)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 4 columns");
        try {
            rows.emplace_back(std::stoll(cells[0]),
                              Vec3(std::stod(cells[1]), std::stod(cells[2]), std::stod(cells[3])));
        } catch (const std::exception&) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": malformed row");
        }
    }
    if (rows.empty()) throw ConfigError("init file: no sites in '" + path + "'");
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    SpinChain chain;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].first != static_cast<long long>(i))
            throw ConfigError("init file: site indices must be 0..N-1 without gaps");
        chain.s.push_back(rows[i].second);
    }
    validate(chain, 1e-6);
    normalize(chain);
    return chain;
}

std::string fmt_bool(bool b) { return csv::boolean(b); }

}  // namespace

IntegratorSettings integrator_settings_from(const ExperimentConfig& cfg) {
    IntegratorSettings s;
    s.rtol = cfg.rtol;
    s.atol = cfg.atol;
    return s;
}

OrbitSettings orbit_settings_from(const ExperimentConfig& cfg) {
    OrbitSettings s;
    s.integrator = integrator_settings_from(cfg);
    s.horizon = cfg.horizon;
    s.crossing_tol = cfg.crossing_tol;
    return s;
}

int resolve_workers(const ExperimentConfig& cfg) {
    return cfg.workers > 0 ? cfg.workers : default_workers();
}

SpinChain make_init_chain(const InitSpec& spec, int n_sites) {
    try {
        switch (spec.kind) {
            case InitSpec::Kind::zn:
                return zn_chain(spec.n, n_sites);
            case InitSpec::Kind::sigma: {
                const UnitCell cell = sigma_point({spec.theta_e, spec.phi_e});
                if (n_sites < 4 || n_sites % 2 != 0)
                    throw std::invalid_argument("sigma init needs even n_sites >= 4");
                SpinChain chain;
                chain.s.resize(static_cast<std::size_t>(n_sites));
                for (int i = 0; i < n_sites; ++i) chain.s[static_cast<std::size_t>(i)] = cell[i % 2];
                return chain;
            }
            case InitSpec::Kind::file:
                return read_chain_csv(spec.path);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid init: ") + e.what());
    }
    throw ConfigError("invalid init");
}

OrbitResult make_init_orbit(const InitSpec& spec, const OrbitSettings& settings) {
    SigmaCoords coords;
    if (spec.kind == InitSpec::Kind::zn && spec.n == 2) {
        coords = {z2_sigma_theta(), kPi / 2};
    } else if (spec.kind == InitSpec::Kind::sigma) {
        coords = {spec.theta_e, spec.phi_e};
    } else {
        throw ConfigError("this experiment needs an orbit init: z2 or sigma:<theta_e>,<phi_e>");
    }
    return find_orbit_from_sigma(coords, settings);
}

// ---------------------------------------------------------------------------
// Runners
// ---------------------------------------------------------------------------

namespace {

void write_chain_trajectory(std::ofstream& out, const Trajectory& traj) {
    csv::Writer w(out);
    w.header({"t", "site", "sx", "sy", "sz"});
    for (std::size_t j = 0; j < traj.t.size(); ++j)
        for (int i = 0; i < traj.sites; ++i)
            w.row({csv::real(traj.t[j]), csv::integer(i), csv::real(traj.y[j][3 * i]),
                   csv::real(traj.y[j][3 * i + 1]), csv::real(traj.y[j][3 * i + 2])});
}

int run_orbit(const ExperimentConfig& cfg, RunManifest& manifest) {
    const auto settings = orbit_settings_from(cfg);
    const auto res = make_init_orbit(parse_init(cfg.init), settings);
    manifest.tasks.n_tasks = 1;
    manifest.results["status"] = to_string(res.status);
    if (!res.ok()) {
        manifest.tasks.failures[to_string(res.status)] = 1;
        manifest.results["message"] = res.message;
        return 2;
    }
    manifest.tasks.n_ok = 1;
    const PeriodicOrbit& orbit = res.orbit;
    {
        auto out = open_artifact(cfg, manifest, "orbit_trajectory.csv");
        write_chain_trajectory(out, orbit.samples);
    }
    IntegratorSettings tight = settings.integrator;
    tight.rtol = std::min(tight.rtol, 1e-12);
    tight.atol = std::min(tight.atol, 1e-14);
    manifest.results["theta_e"] = csv::real(orbit.coords.theta_e);
    manifest.results["phi_e"] = csv::real(orbit.coords.phi_e);
    manifest.results["period"] = csv::real(orbit.period);
    manifest.results["t_star"] = csv::real(orbit.t_star);
    manifest.results["sigma_residual"] = csv::real(orbit.sigma_residual);
    manifest.results["closure_residual"] = csv::real(orbit.closure_residual);
    manifest.results["closure_residual_tight"] = csv::real(closure_residual(orbit, tight));
    manifest.results["echo_residual"] =
        csv::real(echo_check(orbit.cell0, orbit.period, settings.integrator));
    manifest.results["energy_drift"] = csv::real(orbit.samples.energy_drift);
    return 0;
}

int run_trace_mk(const ExperimentConfig& cfg, RunManifest& manifest) {
    const auto settings = orbit_settings_from(cfg);
    const auto res = make_init_orbit(parse_init(cfg.init), settings);
    manifest.tasks.n_tasks = 1;
    manifest.results["status"] = to_string(res.status);
    if (!res.ok()) {
        manifest.tasks.failures[to_string(res.status)] = 1;
        manifest.results["message"] = res.message;
        return 2;
    }
    manifest.tasks.n_ok = 1;
    const auto basis = special_basis(res.orbit, settings.integrator);
    const auto verdict = classify_orbit(res.orbit, basis, settings.integrator, cfg.k_grid);
    {
        auto out = open_artifact(cfg, manifest, "trace_mk.csv");
        csv::Writer w(out);
        w.header({"k", "quarter_trace", "max_abs_eig"});
        for (const auto& tp : verdict.curve)
            w.row({csv::real(tp.k), csv::real(tp.quarter_trace), csv::real(tp.max_abs_eig)});
    }
    manifest.results["period"] = csv::real(res.orbit.period);
    manifest.results["stable"] = fmt_bool(verdict.stable);
    manifest.results["marginal"] = fmt_bool(verdict.marginal);
    manifest.results["max_abs_quarter_trace"] = csv::real(verdict.max_abs_quarter_trace);
    manifest.results["max_abs_eig"] = csv::real(verdict.max_abs_eig);
    manifest.results["k_star"] = csv::real(verdict.k_star);
    manifest.results["boundary_type"] = to_string(verdict.boundary_type);
    manifest.results["f0"] = csv::real(basis.f0);
    const auto disp = dispersion_params(res.orbit, basis, settings.integrator);
    manifest.results["dispersion_defined"] = fmt_bool(disp.defined);
    if (disp.defined) {
        manifest.results["gpp0"] = csv::real(disp.gpp0);
        manifest.results["gpp0_sensitivity"] = csv::real(disp.gpp0_sensitivity);
        manifest.results["mu"] = csv::real(disp.mu);
        manifest.results["phi_disp"] = csv::real(disp.phi_disp);
        manifest.results["c_lin"] = csv::real(disp.c_lin);
    }
    return 0;
}

int run_scan_stability(const ExperimentConfig& cfg, RunManifest& manifest) {
    const auto settings = orbit_settings_from(cfg);
    ScanGrid grid;
    grid.n_theta = cfg.n_theta;
    grid.n_phi = cfg.n_phi;
    const int n_k = cfg.scan_k_grid;
    RowClassifier classify = [&settings, n_k](const PeriodicOrbit& orbit) {
        const auto basis = special_basis(orbit, settings.integrator);
        return row_stability(classify_orbit(orbit, basis, settings.integrator, n_k));
    };
    const auto table = orbit_family_scan(grid, settings, classify, resolve_workers(cfg));
    {
        auto out = open_artifact(cfg, manifest, "orbit_family.csv");
        csv::Writer w(out);
        w.header({"theta_e", "phi_e", "period", "stable", "max_abs_quarter_trace",
                  "boundary_type", "status"});
        for (const auto& r : table.rows)
            w.row({csv::real(r.theta_e), csv::real(r.phi_e), csv::real(r.period),
                   fmt_bool(r.stable), csv::real(r.max_abs_quarter_trace),
                   to_string(r.boundary_type), to_string(r.status)});
    }
    manifest.tasks.n_tasks = static_cast<long long>(table.rows.size());
    long long n_stable = 0, n_no_return = 0;
    double period_min = 1e300;
    double at_theta = 0, at_phi = 0;
    for (const auto& r : table.rows) {
        // no_return is a classified outcome, not a task failure.
        if (r.status == OrbitStatus::integration_failure) {
            ++manifest.tasks.failures[to_string(r.status)];
            continue;
        }
        ++manifest.tasks.n_ok;
        if (r.status != OrbitStatus::ok) {
            if (r.status == OrbitStatus::no_return) ++n_no_return;
            continue;
        }
        if (r.stable) ++n_stable;
        if (r.period < period_min) {
            period_min = r.period;
            at_theta = r.theta_e;
            at_phi = r.phi_e;
        }
    }
    manifest.results["n_stable"] = csv::integer(n_stable);
    manifest.results["n_no_return"] = csv::integer(n_no_return);
    manifest.results["period_min"] = csv::real(period_min);
    manifest.results["period_min_theta_e"] = csv::real(at_theta);
    manifest.results["period_min_phi_e"] = csv::real(at_phi);
    return manifest.tasks.failures.count("integration_failure") ? 2 : 0;
}

std::vector<GrowthSeries> compute_growth_series(const ExperimentConfig& cfg,
                                                const PeriodicOrbit& orbit) {
    std::vector<GrowthSeries> all;
    for (std::size_t i = 0; i < cfg.epsilon.size(); ++i) {
        GrowthSettings gs;
        gs.n_sites = cfg.n_sites;
        gs.epsilon = cfg.epsilon[i];
        gs.n_realizations = cfg.n_realizations;
        gs.horizon_periods = cfg.horizon_periods;
        gs.samples_per_period = cfg.samples_per_period;
        gs.seed = task_seed(cfg.seed, 0xe5000000ULL + i);
        gs.integrator = integrator_settings_from(cfg);
        all.push_back(growth_series(orbit, gs, resolve_workers(cfg)));
    }
    return all;
}

void write_growth_csv(const ExperimentConfig& cfg, RunManifest& manifest,
                      const std::vector<GrowthSeries>& series) {
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& gs = series[i];
        auto out = open_artifact(cfg, manifest, "growth_" + std::to_string(i) + ".csv");
        csv::Writer w(out);
        w.header({"t", "t_over_T", "mean_ratio", "stderr", "n_real", "epsilon"});
        for (std::size_t j = 0; j < gs.t.size(); ++j)
            w.row({csv::real(gs.t[j]), csv::real(gs.t[j] / gs.period), csv::real(gs.mean_ratio[j]),
                   csv::real(gs.stderr_[j]), csv::integer(gs.n_realizations),
                   csv::real(gs.epsilon)});
        const std::string p = "eps" + std::to_string(i) + "_";
        manifest.results[p + "epsilon"] = csv::real(gs.epsilon);
        manifest.results[p + "n_failed"] = csv::integer(gs.n_failed);
        manifest.results[p + "max_energy_drift"] = csv::real(gs.max_energy_drift);
        manifest.results[p + "final_ratio"] = csv::real(gs.mean_ratio.back());
        const auto coh = coherence_time(gs, cfg.threshold);
        manifest.results[p + "coherence_time"] =
            coh.reached ? csv::real(coh.t_coh) : std::string("not_reached");
        manifest.tasks.n_tasks += cfg.n_realizations;
        manifest.tasks.n_ok += gs.n_realizations;
        if (gs.n_failed > 0)
            manifest.tasks.failures["integration_failure"] += gs.n_failed;
    }
}

int run_growth(const ExperimentConfig& cfg, RunManifest& manifest) {
    const auto settings = orbit_settings_from(cfg);
    const auto res = make_init_orbit(parse_init(cfg.init), settings);
    if (!res.ok())
        throw std::runtime_error(std::string("orbit search failed: ") + to_string(res.status));
    manifest.results["period"] = csv::real(res.orbit.period);
    const auto series = compute_growth_series(cfg, res.orbit);
    write_growth_csv(cfg, manifest, series);
    return manifest.tasks.n_failed() > 0 ? 2 : 0;
}

int run_collapse(const ExperimentConfig& cfg, RunManifest& manifest) {
    std::vector<double> distinct = cfg.epsilon;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3)
        throw ConfigError("collapse needs at least 3 distinct epsilon values");
    const auto settings = orbit_settings_from(cfg);
    const auto res = make_init_orbit(parse_init(cfg.init), settings);
    if (!res.ok())
        throw std::runtime_error(std::string("orbit search failed: ") + to_string(res.status));
    manifest.results["period"] = csv::real(res.orbit.period);
    const auto series = compute_growth_series(cfg, res.orbit);
    write_growth_csv(cfg, manifest, series);
    auto collapse = scaling_collapse(series, cfg.collapse_x_lo, cfg.collapse_x_hi);
    {
        auto out = open_artifact(cfg, manifest, "collapse.csv");
        csv::Writer w(out);
        w.header({"x", "phi", "epsilon"});
        for (const auto& c : collapse.curves)
            for (std::size_t j = 0; j < c.x.size(); ++j)
                w.row({csv::real(c.x[j]), csv::real(c.phi[j]), csv::real(c.epsilon)});
    }
    manifest.results["collapse_x_min"] = csv::real(collapse.x_min);
    manifest.results["collapse_x_max"] = csv::real(collapse.x_max);
    manifest.results["collapse_max_gap"] = csv::real(collapse.max_gap);
    manifest.results["collapse_dynamic_range"] = csv::real(collapse.dynamic_range);
    manifest.results["collapse_residual"] = csv::real(collapse.residual);
    bool fit_failed = false;
    try {
        const auto fit = fit_exponential(collapse, cfg.x_min, cfg.threshold);
        manifest.results["kappa"] = csv::real(fit.rate);
        manifest.results["phi0"] = csv::real(fit.amplitude);
        manifest.results["fit_r2"] = csv::real(fit.r2);
        manifest.results["fit_n_points"] = csv::integer(fit.n_points);
        manifest.results["fit_x_lo"] = csv::real(fit.x_lo);
        manifest.results["fit_x_hi"] = csv::real(fit.x_hi);
    } catch (const std::invalid_argument& e) {
        fit_failed = true;
        manifest.results["fit_error"] = e.what();
        ++manifest.tasks.failures["fit_window"];
    }
    return (fit_failed || manifest.tasks.n_failed() > 0) ? 2 : 0;
}

int run_lyapunov(const ExperimentConfig& cfg, RunManifest& manifest) {
    const auto chain = make_init_chain(parse_init(cfg.init), cfg.n_sites);
    const auto res = lyapunov_max(chain, cfg.horizon, cfg.renorm_dt,
                                  integrator_settings_from(cfg), cfg.seed);
    manifest.tasks.n_tasks = 1;
    manifest.tasks.n_ok = 1;
    {
        auto out = open_artifact(cfg, manifest, "lyapunov.csv");
        csv::Writer w(out);
        w.header({"window", "stretch_log"});
        for (std::size_t i = 0; i < res.stretch_log.size(); ++i)
            w.row({csv::integer(static_cast<long long>(i)), csv::real(res.stretch_log[i])});
    }
    manifest.results["lambda"] = csv::real(res.lambda);
    manifest.results["stderr"] = csv::real(res.stderr_);
    manifest.results["n_renorms"] = csv::integer(res.n_renorms);
    manifest.results["significance"] =
        csv::real(res.stderr_ > 0 ? res.lambda / res.stderr_ : 0.0);
    return 0;
}

int run_near_z2(const ExperimentConfig& cfg, RunManifest& manifest) {
    NearZ2Settings settings;
    settings.orbit = orbit_settings_from(cfg);
    const auto table = near_z2_landscape(settings, resolve_workers(cfg));
    {
        auto out = open_artifact(cfg, manifest, "near_z2.csv");
        csv::Writer w(out);
        w.header({"dtheta", "dphi", "norm", "r", "s", "fit_residual", "max_abs_eig_dev",
                  "status"});
        for (const auto& p : table.points)
            w.row({csv::real(p.dtheta), csv::real(p.dphi), csv::real(p.norm), csv::real(p.r),
                   csv::real(p.s), csv::real(p.fit_residual), csv::real(p.max_abs_eig_dev),
                   to_string(p.status)});
    }
    manifest.tasks.n_tasks = static_cast<long long>(table.points.size());
    for (const auto& p : table.points) {
        if (p.status == OrbitStatus::ok)
            ++manifest.tasks.n_ok;
        else
            ++manifest.tasks.failures[to_string(p.status)];
    }
    const auto an = near_z2_analysis(table);
    manifest.results["theta_star"] = csv::real(table.theta_star);
    manifest.results["phi_star"] = csv::real(table.phi_star);
    manifest.results["evenness_rel_inner"] = csv::real(an.evenness_rel_inner);
    manifest.results["evenness_rel_outer"] = csv::real(an.evenness_rel_outer);
    manifest.results["r_exponent"] = csv::real(an.r_exponent);
    manifest.results["lambda_exponent"] = csv::real(an.lambda_exponent);
    manifest.results["q11"] = csv::real(an.quad_form(0, 0));
    manifest.results["q12"] = csv::real(an.quad_form(0, 1));
    manifest.results["q22"] = csv::real(an.quad_form(1, 1));
    manifest.results["q_eig_min"] = csv::real(an.q_eig_min);
    manifest.results["q_eig_max"] = csv::real(an.q_eig_max);
    manifest.results["signature_indefinite"] = fmt_bool(an.signature_indefinite);
    manifest.results["sign_alternations"] = csv::integer(an.sign_alternations);
    return manifest.tasks.n_failed() > 0 ? 2 : 0;
}

int run_export_trajectory(const ExperimentConfig& cfg, RunManifest& manifest) {
    const auto chain = make_init_chain(parse_init(cfg.init), cfg.n_sites);
    const auto settings = integrator_settings_from(cfg);
    manifest.tasks.n_tasks = 1;
    if (cfg.reduced) {
        std::vector<double> theta0(chain.s.size());
        for (std::size_t i = 0; i < chain.s.size(); ++i) {
            if (std::abs(chain.s[i].x()) > 1e-9)
                throw ConfigError("reduced export needs an x = 0 initial state");
            double th = std::atan2(chain.s[i].y(), chain.s[i].z());
            if (th < 0) th += 2 * kPi;
            theta0[i] = th;
        }
        const auto traj = integrate_theta(theta0, cfg.t_end, settings, cfg.n_samples);
        auto out = open_artifact(cfg, manifest, "trajectory.csv");
        csv::Writer w(out);
        std::vector<std::string> head{"t"};
        for (std::size_t i = 1; i <= theta0.size(); ++i) head.push_back("theta_" + std::to_string(i));
        w.header(head);
        for (std::size_t j = 0; j < traj.t.size(); ++j) {
            std::vector<std::string> row{csv::real(traj.t[j])};
            for (int i = 0; i < traj.sites; ++i) row.push_back(csv::real(traj.y[j][i]));
            w.row(row);
        }
    } else {
        const auto traj = integrate(chain, cfg.t_end, settings, cfg.n_samples);
        auto out = open_artifact(cfg, manifest, "trajectory.csv");
        write_chain_trajectory(out, traj);
        manifest.results["energy_drift"] = csv::real(traj.energy_drift);
    }
    manifest.tasks.n_ok = 1;
    return 0;
}

int run_check_cmd(const ExperimentConfig& cfg, RunManifest& manifest) {
    const auto results = run_invariant_checks(cfg);
    {
        auto out = open_artifact(cfg, manifest, "check_report.csv");
        csv::Writer w(out);
        w.header({"name", "passed", "residual", "tolerance"});
        for (const auto& r : results)
            w.row({r.name, fmt_bool(r.passed), csv::real(r.residual), csv::real(r.tolerance)});
    }
    int n_failed = 0;
    for (const auto& r : results) {
        std::cout << (r.passed ? "PASS" : "FAIL") << "  " << r.name
                  << "  residual=" << csv::real(r.residual) << "  tol=" << csv::real(r.tolerance);
        if (!r.detail.empty()) std::cout << "  (" << r.detail << ")";
        std::cout << "\n";
        if (!r.passed) ++n_failed;
    }
    manifest.tasks.n_tasks = static_cast<long long>(results.size());
    manifest.tasks.n_ok = static_cast<long long>(results.size()) - n_failed;
    if (n_failed) manifest.tasks.failures["check_failed"] = n_failed;
    manifest.results["n_checks"] = csv::integer(static_cast<long long>(results.size()));
    manifest.results["n_failed"] = csv::integer(n_failed);
    return n_failed ? 3 : 0;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg, RunManifest& manifest) {
    manifest.command = cfg.experiment;
    manifest.config = cfg.echo();
    if (cfg.experiment == "orbit") return run_orbit(cfg, manifest);
    if (cfg.experiment == "trace-mk") return run_trace_mk(cfg, manifest);
    if (cfg.experiment == "scan-stability") return run_scan_stability(cfg, manifest);
    if (cfg.experiment == "growth") return run_growth(cfg, manifest);
    if (cfg.experiment == "collapse") return run_collapse(cfg, manifest);
    if (cfg.experiment == "lyapunov") return run_lyapunov(cfg, manifest);
    if (cfg.experiment == "near-z2") return run_near_z2(cfg, manifest);
    if (cfg.experiment == "export-trajectory") return run_export_trajectory(cfg, manifest);
    if (cfg.experiment == "check") return run_check_cmd(cfg, manifest);
    throw ConfigError("unknown experiment '" + cfg.experiment + "'");
}

}  // namespace pxplab
