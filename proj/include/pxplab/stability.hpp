// Linear stability of Sigma-anchored n = 2 orbits via Bloch-resolved
// stroboscopic tangent maps.
//
// Perturbations delta S_{2j+l} = u_l exp(2 i k j) of an n = 2 orbit decouple
// by wavevector k in (-pi/2, pi/2].  Propagating the 4-dimensional tangent
// space over one period yields M_k, expressed here in the special basis
// (v1, v2, v3, v4): v1 the normalized velocity, v3 the equal-period direction
// inside Sigma, v2 = J v3 and v4 = J v1 with (J u)_i = S_i x u_i.  In that
// basis M_k takes the two-parameter-block form
//
//     M_k = [ A  b sz ]        A = [ a f ]      sz = diag(1, -1)
//           [ c sz  A ]            [ g a ]
//
// with f g = a^2 - 1 - b c, and the quarter trace a(k) decides stability:
// the orbit is stable iff |a(k)| <= 1 across the zone.
#pragma once

#include "pxplab/dynamics.hpp"
#include "pxplab/orbits.hpp"
#include "pxplab/spin_core.hpp"

#include <array>
#include <complex>
#include <vector>

namespace pxplab {

// Orthonormal tangent pair (e1_i, e2_i) per site with e2 = S x e1.
struct TangentFrame {
    std::vector<Vec3> e1, e2;
};

TangentFrame tangent_frame(const std::vector<Vec3>& sites);

struct SpecialBasis {
    Vec3 w;  // unit velocity direction at site 0
    Vec3 z;  // unit equal-period direction at site 0 (C-even sector)
    TangentFrame frame;
    Eigen::Matrix4d m0_frame;  // k = 0 monodromy in the generic frame
    double f0 = 0.0;           // phase-slip entry of M_{k=0} in the special basis
    double sv_split = 0.0;     // singular-value gap separating v3 (0 for Z2)
    bool marginal = false;     // M_0 = identity within tolerance (Z2)
};

// Builds the special basis at the orbit's base point.  v3 is identified as the
// unit-eigenvalue eigenvector of M_{k=0} restricted to the C-even subspace;
// for a marginal orbit (M_0 = 1, Z2) the even direction is chosen
// deterministically from the frame.
SpecialBasis special_basis(const PeriodicOrbit& orbit, const IntegratorSettings& settings);

struct BlochMap {
    double k = 0.0;
    Eigen::Matrix4d m;           // special-basis map, realified
    double imag_residual = 0.0;  // max |Im| dropped by the realification
};

// Monodromy at wavevector k in the special basis.  bloch_map_batch shares one
// basis construction across all k values.
BlochMap bloch_map(const PeriodicOrbit& orbit, const SpecialBasis& basis, double k,
                   const IntegratorSettings& settings);
std::vector<BlochMap> bloch_map_batch(const PeriodicOrbit& orbit, const SpecialBasis& basis,
                                      const std::vector<double>& ks,
                                      const IntegratorSettings& settings);

// Raw complex monodromy in the generic frame (no special basis involved);
// used by cross-checks against finite differences.
Eigen::Matrix4cd bloch_map_frame(const PeriodicOrbit& orbit, const TangentFrame& frame, double k,
                                 const IntegratorSettings& settings);

// ---------------------------------------------------------------------------
// Spectrum
// ---------------------------------------------------------------------------

struct PairedSpectrum {
    std::array<std::complex<double>, 4> lambda;  // sorted by (Re, Im)
    double conj_closure = 0.0;     // distance of spectrum to its conjugate
    double inverse_closure = 0.0;  // distance of spectrum to its reciprocals
    double pair_split = 0.0;       // distance between the two members of each degenerate pair
    bool ok = false;               // both closures within tolerance
};

// Eigenvalues of a Bloch map, verified to be closed under conjugation and
// inversion and grouped into the two doubly degenerate pairs.
PairedSpectrum eigenvalues_paired(const Eigen::Matrix4d& m, double tol = 1e-6);

// ---------------------------------------------------------------------------
// Structure extraction
// ---------------------------------------------------------------------------

struct StructureParams {
    double a = 0.0, b = 0.0, c = 0.0, f = 0.0, g = 0.0;
    double form_residual = 0.0;        // max |M - M(a,b,c,f,g)|
    double constraint_residual = 0.0;  // |f g - (a^2 - 1 - b c)|
};

StructureParams extract_structure(const BlochMap& map);

// Symplectic form in the special basis: J v1 = v4, J v3 = v2, J^2 = -1.
Eigen::Matrix4d symplectic_j();

// || M^T J M - J ||_max, the symplectic residual of a (real) Bloch map.
double symplectic_residual(const Eigen::Matrix4d& m);

// || M^{-1} - C^{-1} M C ||_max with C the echo conjugation in the special
// basis, diag(-1, 1, 1, -1) up to a k-dependent phase that cancels.
double conjugation_residual(const Eigen::Matrix4d& m);

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

struct TracePoint {
    double k = 0.0;
    double quarter_trace = 0.0;
    double max_abs_eig = 0.0;
};

struct StabilityVerdict {
    bool stable = false;
    bool marginal = false;  // |a(k) - 1| tiny across the zone (Z2)
    double max_abs_quarter_trace = 0.0;
    double max_abs_eig = 0.0;
    double k_star = 0.0;  // argmax |a(k)|
    BoundaryType boundary_type = BoundaryType::none;
    std::vector<TracePoint> curve;
};

inline constexpr double kStabilityTol = 1e-8;
inline constexpr double kMarginalTol = 1e-6;

// Samples a(k) on n_k points of [0, pi/2] (evenness in k makes the half zone
// sufficient) and applies the quarter-trace criterion.
StabilityVerdict classify_orbit(const PeriodicOrbit& orbit, const SpecialBasis& basis,
                                const IntegratorSettings& settings, int n_k = 256);

RowStability row_stability(const StabilityVerdict& v);

// ---------------------------------------------------------------------------
// Dispersion parameters and linear growth
// ---------------------------------------------------------------------------

struct DispersionParams {
    double f0 = 0.0;
    double gpp0 = 0.0;             // g''(0) by Richardson-extrapolated differences
    double gpp0_sensitivity = 0.0;  // relative change when the stencil is halved
    double mu = 0.0;               // sqrt(-g''(0) / (2 f0))
    double phi_disp = 0.0;         // sqrt(-f0 g''(0) / 2)
    double c_lin = 0.0;            // f0^2 / sqrt(-2 f0 g''(0)), growth per period
    bool defined = false;          // false when f0 ~ 0 (marginal) or f0 g'' >= 0
};

DispersionParams dispersion_params(const PeriodicOrbit& orbit, const SpecialBasis& basis,
                                   const IntegratorSettings& settings, double dk = 1e-2);

// Predicted slope of <|delta S|^2(nT)> / <|delta S|^2(0)> versus n for a
// stable orbit with quadratic dispersion.
double linear_growth_coefficient(const PeriodicOrbit& orbit, const SpecialBasis& basis,
                                 const IntegratorSettings& settings);

// ---------------------------------------------------------------------------
// Finite-difference cross-check
// ---------------------------------------------------------------------------

// Brute-force Jacobian of the nonlinear stroboscopic map on a two-cell chain
// (cell-periodic perturbations = k = 0 sector), central differences with
// displacement eta, expressed in the same generic frame as bloch_map_frame.
Eigen::Matrix4d monodromy_fd(const PeriodicOrbit& orbit, const TangentFrame& frame,
                             const IntegratorSettings& settings, double eta = 1e-6);

// ---------------------------------------------------------------------------
// Near-Z2 landscape
// ---------------------------------------------------------------------------

struct NearZ2Point {
    double dtheta = 0.0, dphi = 0.0;  // Sigma-chart displacement from the Z2 point
    double norm = 0.0;
    double r = 0.0, s = 0.0;     // a(k) = 1 + r k^2 - s k^4 fit on small k
    double fit_residual = 0.0;   // max |a(k) - fit| over the fit window
    double max_abs_eig_dev = 0.0;  // max over the zone of max_lambda |lambda - 1|
    OrbitStatus status = OrbitStatus::integration_failure;
};

struct NearZ2Table {
    double theta_star = 0.0, phi_star = 0.0;  // expansion point (Z2 crossing)
    std::vector<NearZ2Point> points;
};

struct NearZ2Settings {
    std::vector<double> magnitudes{0.025, 0.05, 0.1, 0.2};
    int n_directions = 16;
    double k_fit_max = 0.5;
    int n_k_fit = 10;
    int n_k_zone = 32;  // coarse grid for the eigenvalue deviation column
    OrbitSettings orbit;
};

NearZ2Table near_z2_landscape(const NearZ2Settings& settings, int workers);

struct NearZ2Analysis {
    // Antipode asymmetry |r(d) - r(-d)| / max_shell |r|, per magnitude shell.
    // Odd contributions are cubic in |d|, so the inner shell isolates the
    // leading even form while the outer shell carries the correction size.
    double evenness_rel_inner = 0.0;
    double evenness_rel_outer = 0.0;
    // Log-log slopes of max_dir |r| and max |lambda - 1| vs |d|, fit on every
    // shell but the outermost (quartic terms bias the largest shell).
    double r_exponent = 0.0;
    double lambda_exponent = 0.0;
    Eigen::Matrix2d quad_form;      // r(d) ~ d^T Q d
    double q_eig_min = 0.0, q_eig_max = 0.0;
    bool signature_indefinite = false;  // one positive, one negative eigenvalue
    int sign_alternations = 0;          // of r around the direction circle (expect 4)
};

NearZ2Analysis near_z2_analysis(const NearZ2Table& table);

}  // namespace pxplab
