// Periodic orbits anchored on the echo manifold Sigma.
//
// Every non-degenerate point of Sigma lies on a closed orbit of the n = 2
// cell dynamics: the flow returns to Sigma after a time t*, and the echo
// property closes the orbit at T = 2 t*.  This module finds such orbits,
// provides the independent quadrature value of the Z2 period, the reduced
// sector's conserved quantities, and grid scans of the two-parameter family.
#pragma once

#include "pxplab/dynamics.hpp"
#include "pxplab/spin_core.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace pxplab {

struct OrbitSettings {
    IntegratorSettings integrator;
    double horizon = 50.0;          // max time to wait for the Sigma return
    double crossing_tol = 1e-10;    // accepted sigma_distance at the crossing
    double degenerate_tol = 1e-10;  // |sin(theta_e)| below this is degenerate
    int n_samples = 256;            // stored samples over one period
};

enum class OrbitStatus { ok, degenerate_input, no_return, integration_failure };

const char* to_string(OrbitStatus s);

struct PeriodicOrbit {
    UnitCell cell0;  // the Sigma crossing used as the orbit's base point
    SigmaCoords coords;
    double period = 0.0;
    double t_star = 0.0;            // first Sigma return time
    double sigma_residual = 0.0;    // sigma_distance at the detected return
    double closure_residual = 0.0;  // max-norm gap after one period
    Trajectory samples;             // one period, n_samples + 1 snapshots
};

struct OrbitResult {
    OrbitStatus status = OrbitStatus::integration_failure;
    std::string message;
    PeriodicOrbit orbit;  // valid only when status == ok

    bool ok() const { return status == OrbitStatus::ok; }
};

OrbitResult find_orbit_from_sigma(const SigmaCoords& coords, const OrbitSettings& settings);

// Fresh-integration closure residual ||S(T) - S(0)||_inf at a tolerance
// tighter than the one used to find the orbit.
double closure_residual(const PeriodicOrbit& orbit, const IntegratorSettings& settings);

// ---------------------------------------------------------------------------
// Z2 analytics (independent of the ODE integrator)
// ---------------------------------------------------------------------------

// G(theta) = (3/2) theta - 2 sin theta + (1/4) sin 2 theta, the antiderivative
// of (1 - cos theta)^2.  G(theta_e) - G(theta_o) is conserved by the n = 2
// reduced dynamics.
double z2_first_integral(double theta);

// Polar angle of the even spin at the Z2 orbit's Sigma crossing: the root of
// 2 G(theta) = 3 pi / 2 in (0, pi).
double z2_sigma_theta();

// Z2 orbit period by adaptive quadrature over a quarter period,
//   T = 4 * int_0^{theta*} d theta_e / (1 - cos theta_o(theta_e))^2,
// with theta_o determined by the conserved G and theta* = z2_sigma_theta().
double z2_period_quadrature();

// ---------------------------------------------------------------------------
// Reduced-sector conserved quantities
// ---------------------------------------------------------------------------

// Per-site values h_i = theta_i - sin theta_i.  For n = 3 cells every
// difference h_i - h_j is a constant of motion.
std::vector<double> theta_invariants(const std::vector<double>& theta);

// Max drift over a reduced trajectory of the differences h_i - h_0 relative
// to their initial values.
double theta_invariant_drift(const Trajectory& reduced);

// ---------------------------------------------------------------------------
// Family scan
// ---------------------------------------------------------------------------

enum class BoundaryType { none, plus_one, minus_one };

const char* to_string(BoundaryType b);

// Stability summary attached to scan rows by a classifier callback (the
// stability module provides one; the scan itself is classifier-agnostic).
struct RowStability {
    bool stable = false;
    double max_abs_quarter_trace = 0.0;
    BoundaryType boundary_type = BoundaryType::none;
};

struct OrbitFamilyRow {
    double theta_e = 0.0;
    double phi_e = 0.0;
    double period = 0.0;  // NaN unless status == ok
    bool stable = false;
    double max_abs_quarter_trace = 0.0;  // NaN unless classified
    BoundaryType boundary_type = BoundaryType::none;
    OrbitStatus status = OrbitStatus::integration_failure;
};

struct OrbitFamilyTable {
    int n_theta = 0, n_phi = 0;
    std::vector<OrbitFamilyRow> rows;  // row-major, theta outer, phi inner
};

struct ScanGrid {
    int n_theta = 200;
    int n_phi = 200;
    double theta_min = 0.0;  // grid uses cell centers, so 0 and pi are excluded
    double theta_max = 0.0;  // 0 means "use pi"
    double phi_min = 0.0;
    double phi_max = 0.0;  // 0 means "use 2 pi"
};

using RowClassifier = std::function<RowStability(const PeriodicOrbit&)>;

// Scans the Sigma chart.  theta grid points are cell centers of (0, pi) so the
// degenerate poles are never sampled exactly; phi includes phi_min and
// excludes phi_max.  classify may be empty (stability columns left NaN/false).
// Rows are computed in parallel over `workers` threads with deterministic
// placement; the result is independent of the worker count.
OrbitFamilyTable orbit_family_scan(const ScanGrid& grid, const OrbitSettings& settings,
                                   const RowClassifier& classify, int workers);

}  // namespace pxplab
