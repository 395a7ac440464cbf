// Spin configurations and lattice geometry for the classical PXP chain.
//
// Code units throughout: unit spins |S_i| = 1, time tau = 2 J S^2 t,
// energies in units of 2 J S^3.  The classical energy functional is
//
//     E = sum_i (1 - S^z_{i-1}) S^x_i (1 - S^z_{i+1})
//
// on a periodic lattice, and the precession field is h_i = -dE/dS_i.
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace pxplab {

using Vec3 = Eigen::Vector3d;

// Rotation by pi about z: (x, y, z) -> (-x, -y, z).  Conjugating the dynamics
// with this rotation flips the sign of the energy.
inline Vec3 rz_pi(const Vec3& s) { return Vec3(-s.x(), -s.y(), s.z()); }

// A finite periodic chain of N >= 3 classical unit spins.
struct SpinChain {
    std::vector<Vec3> s;

    int size() const { return static_cast<int>(s.size()); }
    Vec3& operator[](int i) { return s[static_cast<std::size_t>(i)]; }
    const Vec3& operator[](int i) const { return s[static_cast<std::size_t>(i)]; }
};

// One unit cell of an infinite n-periodic chain (n >= 1).  Site indices wrap
// mod n, which reproduces the infinite chain restricted to n-periodic
// configurations.
struct UnitCell {
    std::vector<Vec3> s;

    int size() const { return static_cast<int>(s.size()); }
    Vec3& operator[](int i) { return s[static_cast<std::size_t>(i)]; }
    const Vec3& operator[](int i) const { return s[static_cast<std::size_t>(i)]; }
};

// Chart coordinates on the echo manifold Sigma (n = 2 cells invariant under
// translation-by-one combined with rz_pi).  The even-site spin is
// S_e = (sin(theta_e) cos(phi_e), sin(theta_e) sin(phi_e), cos(theta_e)) and
// the odd-site spin is rz_pi(S_e).
struct SigmaCoords {
    double theta_e = 0.0;
    double phi_e = 0.0;
};

// ---------------------------------------------------------------------------
// Construction and validation
// ---------------------------------------------------------------------------

// Throws std::invalid_argument unless every |S_i| is within tol of 1 and the
// site count is admissible (N >= 3 for chains, n >= 1 for cells).
void validate(const SpinChain& chain, double tol = 1e-9);
void validate(const UnitCell& cell, double tol = 1e-9);

// Rescales every spin to unit length.
void normalize(SpinChain& chain);
void normalize(UnitCell& cell);

// |Z_n> pattern: site i carries (0,0,+1) when i % n == 0, else (0,0,-1).
UnitCell zn_cell(int n);
SpinChain zn_chain(int n, int N);

// Point on Sigma.  Inputs outside theta in [0, pi] are folded by the usual
// spherical-coordinate conventions.
UnitCell sigma_point(const SigmaCoords& c);

// Squared deviation from Sigma: || S_o - rz_pi(S_e) ||^2 for an n = 2 cell.
double sigma_distance(const UnitCell& cell);

// ---------------------------------------------------------------------------
// Energy, field, equation of motion
// ---------------------------------------------------------------------------

// Total energy of a finite chain, or energy per unit cell for a cell.
double energy(const SpinChain& chain);
double energy(const UnitCell& cell);

// Precession field h_i = -dE/dS_i at every site:
//   h^x_i = -(1 - S^z_{i-1})(1 - S^z_{i+1}),  h^y_i = 0,
//   h^z_i =  S^x_{i-1}(1 - S^z_{i-2}) + S^x_{i+1}(1 - S^z_{i+2}).
std::vector<Vec3> local_field(const SpinChain& chain);
std::vector<Vec3> local_field(const UnitCell& cell);

// Right-hand side of dS_i/dtau = h_i x S_i.
std::vector<Vec3> eom_rhs(const SpinChain& chain);
std::vector<Vec3> eom_rhs(const UnitCell& cell);

// ---------------------------------------------------------------------------
// Symmetry operations
// ---------------------------------------------------------------------------

// Applies rz_pi to every site.  Negates the energy.
SpinChain apply_rz_pi(const SpinChain& chain);
UnitCell apply_rz_pi(const UnitCell& cell);

// Translation: result[i] = s[(i + m) mod N].
SpinChain translate(const SpinChain& chain, int m);
UnitCell translate(const UnitCell& cell, int m);

// Echo conjugation C = translate(1) followed by rz_pi.  Sigma cells are fixed
// points of C; conjugating the flow with C reverses time.
SpinChain echo_conjugate(const SpinChain& chain);
UnitCell echo_conjugate(const UnitCell& cell);

// ---------------------------------------------------------------------------
// Flat-array kernels (shared by the chain/cell wrappers and the integrators)
// ---------------------------------------------------------------------------
namespace kernel {

// s and out are arrays of 3*n doubles, site i at offset 3*i; indices wrap mod n.
double energy(const double* s, int n);
void local_field(const double* s, double* h, int n);
void eom_rhs(const double* s, double* ds, int n);
void normalize_sites(double* s, int n);

}  // namespace kernel

// Flattening helpers.
Eigen::VectorXd flatten(const std::vector<Vec3>& sites);
std::vector<Vec3> unflatten(const Eigen::VectorXd& y);

}  // namespace pxplab
