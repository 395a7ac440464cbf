// Experiment runners behind the CLI subcommands, plus the invariant-check
// registry.  Each runner computes its artifact set, writes CSV files into the
// configured output directory, fills the manifest, and returns a process exit
// code (0 success, 2 partial task failure, 3 invariant-check failure).
#pragma once

#include "pxplab/config.hpp"
#include "pxplab/fluctuations.hpp"
#include "pxplab/manifest.hpp"
#include "pxplab/orbits.hpp"
#include "pxplab/spin_core.hpp"
#include "pxplab/stability.hpp"

#include <string>
#include <vector>

namespace pxplab {

IntegratorSettings integrator_settings_from(const ExperimentConfig& cfg);
OrbitSettings orbit_settings_from(const ExperimentConfig& cfg);
int resolve_workers(const ExperimentConfig& cfg);

// Initial chain for chain-based commands.  zn tiles the Z_n pattern to
// n_sites; sigma tiles the Sigma cell; file reads CSV site_index,sx,sy,sz.
SpinChain make_init_chain(const InitSpec& spec, int n_sites);

// Orbit for orbit-based commands: z2 anchors at the Z2 Sigma crossing,
// sigma:<theta>,<phi> anchors there.  Other init kinds are rejected.
OrbitResult make_init_orbit(const InitSpec& spec, const OrbitSettings& settings);

// Dispatch on cfg.experiment.  The output directory must already exist.
int run_experiment(const ExperimentConfig& cfg, RunManifest& manifest);

// ---------------------------------------------------------------------------
// Invariant-check registry (the `check` subcommand)
// ---------------------------------------------------------------------------

struct CheckResult {
    std::string name;       // module.invariant, unique across the registry
    bool passed = false;
    double residual = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

std::vector<CheckResult> run_invariant_checks(const ExperimentConfig& cfg);

}  // namespace pxplab
