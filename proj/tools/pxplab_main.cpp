// Command-line driver.  Precedence for every setting: built-in default,
// then config file, then PXPLAB_OUTPUT_DIR (output directory only), then
// command-line flags.
#include "pxplab/experiments.hpp"
#include "pxplab/version.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

namespace {

using pxplab::ExperimentConfig;

struct SubOptions {
    CLI::App* sub = nullptr;

    std::string config_path;
    std::string init;
    int n_sites = 0;
    std::vector<double> eps;
    int n_realizations = 0;
    double horizon_periods = 0.0;
    int samples_per_period = 0;
    double horizon = 0.0;
    double t_end = 0.0;
    int n_samples = 0;
    bool reduced = false;
    int k_grid = 0;
    int scan_k_grid = 0;
    int n_theta = 0;
    int n_phi = 0;
    double rtol = 0.0;
    double atol = 0.0;
    double crossing_tol = 0.0;
    double renorm_dt = 0.0;
    double threshold = 0.0;
    double x_min = 0.0;
    double collapse_x_lo = 0.0;
    double collapse_x_hi = 0.0;
    std::uint64_t seed = 0;
    int workers = 0;
    std::string out;

    CLI::Option* o_config = nullptr;
    CLI::Option* o_init = nullptr;
    CLI::Option* o_n_sites = nullptr;
    CLI::Option* o_eps = nullptr;
    CLI::Option* o_n_realizations = nullptr;
    CLI::Option* o_horizon_periods = nullptr;
    CLI::Option* o_samples_per_period = nullptr;
    CLI::Option* o_horizon = nullptr;
    CLI::Option* o_t_end = nullptr;
    CLI::Option* o_n_samples = nullptr;
    CLI::Option* o_reduced = nullptr;
    CLI::Option* o_k_grid = nullptr;
    CLI::Option* o_scan_k_grid = nullptr;
    CLI::Option* o_n_theta = nullptr;
    CLI::Option* o_n_phi = nullptr;
    CLI::Option* o_rtol = nullptr;
    CLI::Option* o_atol = nullptr;
    CLI::Option* o_crossing_tol = nullptr;
    CLI::Option* o_renorm_dt = nullptr;
    CLI::Option* o_threshold = nullptr;
    CLI::Option* o_x_min = nullptr;
    CLI::Option* o_collapse_x_lo = nullptr;
    CLI::Option* o_collapse_x_hi = nullptr;
    CLI::Option* o_seed = nullptr;
    CLI::Option* o_workers = nullptr;
    CLI::Option* o_out = nullptr;
};

std::unique_ptr<SubOptions> attach_subcommand(CLI::App& app, const std::string& name,
                                              const std::string& desc) {
    auto o = std::make_unique<SubOptions>();
    CLI::App* s = app.add_subcommand(name, desc);
    o->sub = s;
    o->o_config = s->add_option("--config", o->config_path, "Key = value config file");
    o->o_init = s->add_option("--init,--orbit", o->init,
                              "Initial state: z<n> | sigma:<theta_e>,<phi_e> | file:<path>");
    o->o_n_sites = s->add_option("--N,--n-sites", o->n_sites, "Chain length");
    o->o_eps = s->add_option("--eps", o->eps, "Perturbation strengths")->delimiter(',');
    o->o_n_realizations = s->add_option("--n-real", o->n_realizations, "Realizations per epsilon");
    o->o_horizon_periods =
        s->add_option("--horizon-periods", o->horizon_periods, "Growth horizon in orbit periods");
    o->o_samples_per_period =
        s->add_option("--samples-per-period", o->samples_per_period, "Growth samples per period");
    o->o_horizon = s->add_option("--horizon", o->horizon, "Sigma-return / Lyapunov horizon");
    o->o_t_end = s->add_option("--t-end", o->t_end, "Trajectory end time");
    o->o_n_samples = s->add_option("--n-samples", o->n_samples, "Trajectory sample count");
    o->o_reduced = s->add_flag("--reduced", o->reduced, "Export theta angles (x = 0 sector)");
    o->o_k_grid = s->add_option("--k-grid", o->k_grid, "k samples for one-orbit classification");
    o->o_scan_k_grid = s->add_option("--scan-k-grid", o->scan_k_grid, "k samples per scan row");
    o->o_n_theta = s->add_option("--n-theta", o->n_theta, "Scan grid rows (theta_e)");
    o->o_n_phi = s->add_option("--n-phi", o->n_phi, "Scan grid columns (phi_e)");
    o->o_rtol = s->add_option("--rtol", o->rtol, "Integrator relative tolerance");
    o->o_atol = s->add_option("--atol", o->atol, "Integrator absolute tolerance");
    o->o_crossing_tol = s->add_option("--crossing-tol", o->crossing_tol, "Sigma crossing tolerance");
    o->o_renorm_dt = s->add_option("--renorm-dt", o->renorm_dt, "Lyapunov renormalization interval");
    o->o_threshold = s->add_option("--threshold", o->threshold, "Coherence threshold on <dS^2>/N");
    o->o_x_min = s->add_option("--x-min", o->x_min, "Collapse fit window start");
    o->o_collapse_x_lo = s->add_option("--collapse-x-lo", o->collapse_x_lo, "Collapse window start");
    o->o_collapse_x_hi = s->add_option("--collapse-x-hi", o->collapse_x_hi, "Collapse window end");
    o->o_seed = s->add_option("--seed", o->seed, "Master seed");
    o->o_workers = s->add_option("--workers", o->workers, "Worker threads, 0 = hardware");
    o->o_out = s->add_option("--out,-o", o->out, "Output directory");
    return o;
}

void apply_flags(const SubOptions& o, ExperimentConfig& cfg) {
    if (o.o_init->count()) cfg.init = o.init;
    if (o.o_n_sites->count()) cfg.n_sites = o.n_sites;
    if (o.o_eps->count()) cfg.epsilon = o.eps;
    if (o.o_n_realizations->count()) cfg.n_realizations = o.n_realizations;
    if (o.o_horizon_periods->count()) cfg.horizon_periods = o.horizon_periods;
    if (o.o_samples_per_period->count()) cfg.samples_per_period = o.samples_per_period;
    if (o.o_horizon->count()) cfg.horizon = o.horizon;
    if (o.o_t_end->count()) cfg.t_end = o.t_end;
    if (o.o_n_samples->count()) cfg.n_samples = o.n_samples;
    if (o.o_reduced->count()) cfg.reduced = o.reduced;
    if (o.o_k_grid->count()) cfg.k_grid = o.k_grid;
    if (o.o_scan_k_grid->count()) cfg.scan_k_grid = o.scan_k_grid;
    if (o.o_n_theta->count()) cfg.n_theta = o.n_theta;
    if (o.o_n_phi->count()) cfg.n_phi = o.n_phi;
    if (o.o_rtol->count()) cfg.rtol = o.rtol;
    if (o.o_atol->count()) cfg.atol = o.atol;
    if (o.o_crossing_tol->count()) cfg.crossing_tol = o.crossing_tol;
    if (o.o_renorm_dt->count()) cfg.renorm_dt = o.renorm_dt;
    if (o.o_threshold->count()) cfg.threshold = o.threshold;
    if (o.o_x_min->count()) cfg.x_min = o.x_min;
    if (o.o_collapse_x_lo->count()) cfg.collapse_x_lo = o.collapse_x_lo;
    if (o.o_collapse_x_hi->count()) cfg.collapse_x_hi = o.collapse_x_hi;
    if (o.o_seed->count()) cfg.seed = o.seed;
    if (o.o_workers->count()) cfg.workers = o.workers;
    if (o.o_out->count()) cfg.output_dir = o.out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Classical dynamics of the constrained large-spin chain"};
    app.set_version_flag("--version",
                         std::string(pxplab::kToolName) + " " + pxplab::kVersion);
    app.require_subcommand(1);

    std::vector<std::unique_ptr<SubOptions>> subs;
    subs.push_back(attach_subcommand(
        app, "orbit", "Find a periodic orbit from a Sigma point and export one period"));
    subs.push_back(attach_subcommand(
        app, "trace-mk", "Quarter trace and Bloch spectrum versus wavevector for one orbit"));
    subs.push_back(attach_subcommand(
        app, "scan-stability", "Classify periodic orbits over a grid of Sigma coordinates"));
    subs.push_back(attach_subcommand(
        app, "growth", "Perturbation growth curves around a periodic orbit"));
    subs.push_back(attach_subcommand(
        app, "collapse", "Scaling collapse and exponential fit of growth curves"));
    subs.push_back(attach_subcommand(
        app, "lyapunov", "Largest Lyapunov exponent of a chain trajectory"));
    subs.push_back(attach_subcommand(
        app, "near-z2", "Quarter-trace landscape around the Z2 orbit"));
    subs.push_back(attach_subcommand(
        app, "export-trajectory", "Integrate an initial chain and export samples"));
    subs.push_back(attach_subcommand(
        app, "check", "Run the invariant-check registry and report residuals"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    const SubOptions* chosen = nullptr;
    for (const auto& o : subs)
        if (o->sub->parsed()) chosen = o.get();
    if (chosen == nullptr) {
        std::cerr << "config error: no subcommand selected\n";
        return 1;
    }

    ExperimentConfig cfg;
    cfg.experiment = chosen->sub->get_name();
    try {
        if (chosen->o_config->count())
            cfg.apply(pxplab::parse_key_value_file(chosen->config_path));
        if (const char* env = std::getenv("PXPLAB_OUTPUT_DIR"); env != nullptr && *env != '\0')
            cfg.output_dir = env;
        apply_flags(*chosen, cfg);
        cfg.validate();
        pxplab::parse_init(cfg.init);
    } catch (const pxplab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }

    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec) {
        std::cerr << "config error: cannot create output directory '" << cfg.output_dir
                  << "': " << ec.message() << "\n";
        return 1;
    }

    pxplab::RunManifest manifest;
    manifest.command = cfg.experiment;
    manifest.config = cfg.echo();

    const auto start = std::chrono::steady_clock::now();
    int code = 0;
    try {
        code = pxplab::run_experiment(cfg, manifest);
        if (code == 0) {
            manifest.status = "success";
        } else if (code == 2) {
            manifest.status = "partial_failure";
        } else {
            manifest.status = "error";
            if (code == 3) manifest.error = "invariant checks failed";
        }
    } catch (const pxplab::ConfigError& e) {
        manifest.status = "error";
        manifest.error = e.what();
        std::cerr << "config error: " << e.what() << "\n";
        code = 1;
    } catch (const std::exception& e) {
        manifest.status = "error";
        manifest.error = e.what();
        std::cerr << "error: " << e.what() << "\n";
        code = 2;
    }
    manifest.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    try {
        manifest.write(cfg.output_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: cannot write manifest: " << e.what() << "\n";
        if (code == 0) code = 2;
    }
    return code;
}
