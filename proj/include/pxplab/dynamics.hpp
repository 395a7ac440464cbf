// Time evolution of spin chains and unit cells, the reduced x = 0 angle
// dynamics, linearized (tangent) flows including Bloch-resolved cell
// perturbations, Sigma-crossing detection, the echo property, and the
// Benettin maximal-Lyapunov estimator.
#pragma once

#include "pxplab/integrator.hpp"
#include "pxplab/spin_core.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

namespace pxplab {

// Default grid spacing for scalar scans along trajectories (a bit under
// T_Z2 / 200, the sampling rate that resolves every Sigma approach).
inline constexpr double kSigmaScanDt = 0.0125;

struct Trajectory {
    std::vector<double> t;
    std::vector<Eigen::VectorXd> y;  // flattened snapshots, one per sample time
    int sites = 0;
    bool reduced = false;  // true: y holds angles theta_i instead of spins
    double energy_drift = 0.0;

    SpinChain chain_at(std::size_t i) const { return SpinChain{unflatten(y[i])}; }
    UnitCell cell_at(std::size_t i) const { return UnitCell{unflatten(y[i])}; }
};

// ---------------------------------------------------------------------------
// ODE system factories (flattened states, shared by all drivers)
// ---------------------------------------------------------------------------

// Full precession dynamics for n sites with mod-n periodic indexing.  The
// post-step hook renormalizes every spin.
OdeSystem make_spin_system(int n);

// Reduced x = 0 sector: dtheta_i/dt = (1 - cos theta_{i-1})(1 - cos theta_{i+1}).
OdeSystem make_theta_system(int n);

// Base cell plus m complex Bloch tangent vectors at wavevector k.  State
// layout: [3n base | m blocks of 3n complex = 6n doubles].  Perturbations of
// the infinite chain are delta S_{n j + l} = u_l exp(i k n j).  The post-step
// hook renormalizes the base and projects each tangent vector back onto the
// tangent planes.
OdeSystem make_bloch_tangent_system(int n, int m, double k);

// Base chain plus one real tangent vector on the same lattice (mod n), used by
// the Lyapunov estimator and finite-difference cross-checks.
// Layout: [3n base | 3n tangent].
OdeSystem make_real_tangent_system(int n);

// ---------------------------------------------------------------------------
// Integration
// ---------------------------------------------------------------------------

Trajectory integrate(const SpinChain& s0, double t_end, const IntegratorSettings& settings,
                     int n_samples = 256);
Trajectory integrate(const UnitCell& c0, double t_end, const IntegratorSettings& settings,
                     int n_samples = 256);
Trajectory integrate_theta(const std::vector<double>& theta0, double t_end,
                           const IntegratorSettings& settings, int n_samples = 256);

// Complex tangent vector on a unit cell: one 3-vector per site.
using CellTangent = std::vector<Eigen::Vector3cd>;

// Propagates tangent vectors along the flow started from cell0 over [0, T] at
// Bloch wavevector k.  Returns the propagated vectors; tangency to the
// transported base is preserved by construction.
std::vector<CellTangent> integrate_tangent(const UnitCell& cell0, double T, double k,
                                           const std::vector<CellTangent>& initial,
                                           const IntegratorSettings& settings);

// ---------------------------------------------------------------------------
// Sigma crossings and the echo property
// ---------------------------------------------------------------------------

struct CrossingResult {
    bool found = false;
    double t_star = 0.0;
    UnitCell cell;       // state at the crossing
    double distance = 0.0;  // sigma_distance at t_star
};

// First time t in (t_min, horizon] where the trajectory from cell0 meets
// Sigma: sigma_distance is scanned on a grid of spacing scan_dt, local minima
// are refined by root-finding the distance derivative, and a minimum counts as
// a crossing only once the distance has first risen above rise_level and the
// refined minimum lies below accept_tol.
CrossingResult detect_sigma_crossing(const UnitCell& cell0, double horizon,
                                     const IntegratorSettings& settings, double t_min = 0.0,
                                     double accept_tol = 1e-10, double rise_level = 1e-6,
                                     double scan_dt = kSigmaScanDt);

// Max over sampled t in [0, T] (and over sites) of
// | S(t) - C S(-t) |  with C the echo conjugation.  Zero (to integrator
// accuracy) when cell0 lies on Sigma.
double echo_check(const UnitCell& cell0, double T, const IntegratorSettings& settings,
                  int n_samples = 64);

// ---------------------------------------------------------------------------
// Lyapunov exponent (Benettin, single tangent vector)
// ---------------------------------------------------------------------------

struct LyapunovResult {
    double lambda = 0.0;
    double stderr_ = 0.0;
    int n_renorms = 0;
    std::vector<double> stretch_log;  // log growth per renormalization window
};

LyapunovResult lyapunov_max(const SpinChain& s0, double horizon, double renorm_dt,
                            const IntegratorSettings& settings, std::uint64_t seed,
                            double discard_fraction = 0.2);
LyapunovResult lyapunov_max(const UnitCell& c0, double horizon, double renorm_dt,
                            const IntegratorSettings& settings, std::uint64_t seed,
                            double discard_fraction = 0.2);

}  // namespace pxplab
