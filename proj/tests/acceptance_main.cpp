// Acceptance suite: ten end-to-end checks of the headline results, printed as
// one PASS/FAIL line each.  Production-scale parameters; the full run takes
// roughly ten minutes on one core.  Exits 0 iff every criterion passes.

#include "pxplab/config.hpp"
#include "pxplab/dynamics.hpp"
#include "pxplab/experiments.hpp"
#include "pxplab/fluctuations.hpp"
#include "pxplab/orbits.hpp"
#include "pxplab/spin_core.hpp"
#include "pxplab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

using namespace pxplab;

namespace {

struct Criterion {
    int id;
    std::string label;
    bool passed = true;
    std::vector<std::string> notes;

    void check(bool ok, const std::string& what) {
        passed = passed && ok;
        notes.push_back(std::string(ok ? "  ok   " : "  BAD  ") + what);
    }
    void note(const std::string& what) { notes.push_back("       " + what); }
    bool report() const {
        std::printf("%s  %2d  %s\n", passed ? "PASS" : "FAIL", id, label.c_str());
        for (const auto& n : notes) std::printf("%s\n", n.c_str());
        std::fflush(stdout);
        return passed;
    }
};

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

constexpr double kPi = 3.14159265358979323846;

double mod2pi_dist(double a) {
    double d = std::fmod(a, 2.0 * kPi);
    if (d < 0) d += 2.0 * kPi;
    return std::min(d, 2.0 * kPi - d);
}

double theta_dist(const Eigen::VectorXd& y, const std::vector<double>& th0) {
    double d = 0;
    for (std::size_t j = 0; j < th0.size(); ++j) d = std::max(d, mod2pi_dist(y[j] - th0[j]));
    return d;
}

// The orbit through the Z2 product state itself: one cell of (+z, -z).  It
// returns to itself after twice the sublattice-exchange period (after T the
// chain reaches its one-site translate).
PeriodicOrbit z2_state_orbit() {
    PeriodicOrbit po;
    po.cell0 = zn_cell(2);
    po.period = 2.0 * z2_period_quadrature();
    return po;
}

// --------------------------------------------------------------------------
// 1. Sublattice oscillation frequency, two independent routes
// --------------------------------------------------------------------------

bool criterion_1() {
    Criterion c{1, "Z2 oscillation frequency 2.44 from quadrature and from the orbit"};
    const double omega_quad = 2.0 * kPi / z2_period_quadrature();
    c.check(std::abs(omega_quad - 2.44) / 2.44 < 0.02,
            fmt("quadrature route: Omega = %.6f (|dev| = %.3f%%)", omega_quad,
                100 * std::abs(omega_quad - 2.44) / 2.44));

    OrbitSettings os;
    const auto res = find_orbit_from_sigma({z2_sigma_theta(), kPi / 2}, os);
    c.check(res.ok(), "Z2 orbit found from its Sigma crossing");
    if (res.ok()) {
        const double omega_orb = 2.0 * kPi / res.orbit.period;
        c.check(std::abs(omega_orb - 2.44) / 2.44 < 0.02,
                fmt("orbit route: Omega = %.6f (T = %.9f)", omega_orb, res.orbit.period));
        c.check(std::abs(res.orbit.period - z2_period_quadrature()) < 1e-8,
                fmt("routes agree: |T_orbit - T_quad| = %.2e",
                    std::abs(res.orbit.period - z2_period_quadrature())));
    }
    return c.report();
}

// --------------------------------------------------------------------------
// 2. Z2 marginality across the whole Bloch zone
// --------------------------------------------------------------------------

bool criterion_2() {
    Criterion c{2, "Z2 Bloch maps: quarter trace 1 and M_k^2 = 1 at 256 wavevectors"};
    OrbitSettings os;
    const auto res = find_orbit_from_sigma({z2_sigma_theta(), kPi / 2}, os);
    c.check(res.ok(), "Z2 orbit found");
    if (!res.ok()) return c.report();

    const auto basis = special_basis(res.orbit, os.integrator);
    std::vector<double> ks(256);
    for (int i = 0; i < 256; ++i) ks[static_cast<std::size_t>(i)] = (kPi / 2) * i / 255.0;
    const auto maps = bloch_map_batch(res.orbit, basis, ks, os.integrator);

    double worst_trace = 0, worst_sq = 0;
    for (const auto& m : maps) {
        worst_trace = std::max(worst_trace, std::abs(m.m.trace() / 4.0 - 1.0));
        worst_sq = std::max(worst_sq,
                            (m.m * m.m - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff());
    }
    c.check(worst_trace < 1e-6, fmt("max |Tr(M_k)/4 - 1| = %.3e over 256 k", worst_trace));
    c.check(worst_sq < 1e-6, fmt("max ||M_k^2 - 1||_inf = %.3e over 256 k", worst_sq));
    return c.report();
}

// --------------------------------------------------------------------------
// 3. Trimer closure and tetramer chaos
// --------------------------------------------------------------------------

bool criterion_3() {
    Criterion c{3, "tilted trimer orbit closes; tetramer never recurs and has positive Lyapunov"};
    IntegratorSettings tight;
    tight.rtol = 1e-12;
    tight.atol = 1e-14;

    // Trimer: period-3 angle pattern (0, pi - d, pi + d).  The exact trimer
    // state d = 0 sits on a separatrix, so the closed orbit is probed at a
    // finite tilt.
    const double delta = 0.2;
    const std::vector<double> th0 = {0.0, kPi - delta, kPi + delta};
    const auto coarse = integrate_theta(th0, 60.0, tight, 12000);
    double best_t = -1, best_d = 1e9;
    for (std::size_t i = 1; i < coarse.t.size(); ++i) {
        if (coarse.t[i] < 0.5) continue;
        const double d = theta_dist(coarse.y[i], th0);
        if (d < best_d) {
            best_d = d;
            best_t = coarse.t[i];
        }
        if (d < 0.05) break;
    }
    c.check(best_d < 0.5, fmt("coarse return found at t = %.3f (distance %.3f)", best_t, best_d));
    if (best_d < 0.5) {
        double lo = best_t - 0.02, hi = best_t + 0.02;
        const auto dist_at = [&](double T) {
            return theta_dist(integrate_theta(th0, T, tight, 1).y.back(), th0);
        };
        for (int it = 0; it < 80; ++it) {
            const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
            if (dist_at(m1) < dist_at(m2))
                hi = m2;
            else
                lo = m1;
        }
        const double T = 0.5 * (lo + hi);

        UnitCell c0;
        c0.s.resize(3);
        for (int i = 0; i < 3; ++i)
            c0.s[static_cast<std::size_t>(i)] = Vec3(0, std::sin(th0[static_cast<std::size_t>(i)]),
                                                     std::cos(th0[static_cast<std::size_t>(i)]));
        const auto cT = integrate(c0, T, tight, 1).cell_at(1);
        double closure = 0;
        for (int i = 0; i < 3; ++i) closure = std::max(closure, (cT[i] - c0[i]).norm());
        c.check(closure < 1e-8, fmt("full-space closure after T = %.9f: %.3e", T, closure));

        const auto tr5 = integrate_theta(th0, 5 * T, tight, 2000);
        const double drift = theta_invariant_drift(tr5);
        c.check(drift < 1e-8, fmt("pairwise invariant drift over 5 T: %.3e", drift));
    }

    // Tetramer: no recurrence and a resolved positive Lyapunov exponent.
    IntegratorSettings ist;
    const auto chain = zn_chain(4, 12);
    const auto traj = integrate(chain, 50.0, ist, 2000);
    double min_rms = 1e300;
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        if (traj.t[i] < 1.0) continue;
        const auto ct = traj.chain_at(i);
        double acc = 0;
        for (int s = 0; s < 12; ++s) acc += (ct[s] - chain[s]).squaredNorm();
        min_rms = std::min(min_rms, std::sqrt(acc / 12.0));
    }
    c.check(min_rms > 0.5, fmt("tetramer per-site RMS recurrence over t in [1, 50]: min %.4f", min_rms));

    const auto lr = lyapunov_max(chain, 50.0, 0.25, ist, 12345);
    c.check(lr.lambda > 0 && lr.lambda > 3.0 * lr.stderr_,
            fmt("tetramer lambda_max = %.4f +- %.4f (%.1f sigma)", lr.lambda, lr.stderr_,
                lr.lambda / lr.stderr_));
    return c.report();
}

// --------------------------------------------------------------------------
// 4. Orbit-family landscape on a 100 x 100 grid
// --------------------------------------------------------------------------

bool criterion_4() {
    Criterion c{4, "100 x 100 family scan: period minimum at the Z2 point, one stable band, both boundary types"};
    OrbitSettings os;
    os.horizon = 25.0;
    ScanGrid grid;
    grid.n_theta = 100;
    grid.n_phi = 100;
    const int n_k = 48;
    RowClassifier classify = [&os, n_k](const PeriodicOrbit& orbit) {
        const auto basis = special_basis(orbit, os.integrator);
        return row_stability(classify_orbit(orbit, basis, os.integrator, n_k));
    };
    const auto table = orbit_family_scan(grid, os, classify, 0);

    const double theta_star = z2_sigma_theta();
    const double dtheta = kPi / grid.n_theta, dphi = 2 * kPi / grid.n_phi;

    // Period minimum within one grid cell of a Z2 Sigma crossing (phi = pi/2
    // or its reflection 3 pi/2).
    const OrbitFamilyRow* best = nullptr;
    for (const auto& r : table.rows)
        if (r.status == OrbitStatus::ok && (!best || r.period < best->period)) best = &r;
    c.check(best != nullptr, "scan produced closed orbits");
    if (best) {
        const double dth = std::abs(best->theta_e - theta_star);
        const double dph = std::min(std::abs(best->phi_e - kPi / 2), std::abs(best->phi_e - 3 * kPi / 2));
        c.check(dth <= dtheta && dph <= dphi,
                fmt("period argmin (%.4f, %.4f), T = %.6f: %.2f / %.2f cells from the Z2 point",
                    best->theta_e, best->phi_e, best->period, dth / dtheta, dph / dphi));
    }

    // Exactly one connected stable run along the phi = pi/2 column.
    int j_mid = 0;
    double bestph = 1e300;
    for (int j = 0; j < grid.n_phi; ++j) {
        const double ph = table.rows[static_cast<std::size_t>(j)].phi_e;
        if (std::abs(ph - kPi / 2) < bestph) {
            bestph = std::abs(ph - kPi / 2);
            j_mid = j;
        }
    }
    int runs = 0, run_len = 0, cur = 0;
    double run_lo = 0, run_hi = 0;
    for (int i = 0; i < grid.n_theta; ++i) {
        const auto& r = table.rows[static_cast<std::size_t>(i * grid.n_phi + j_mid)];
        if (r.status == OrbitStatus::ok && r.stable) {
            if (cur == 0) {
                ++runs;
                run_lo = r.theta_e;
            }
            ++cur;
            run_hi = r.theta_e;
            run_len = std::max(run_len, cur);
        } else {
            cur = 0;
        }
    }
    c.check(runs == 1 && run_len >= 2,
            fmt("stable cells on the phi = pi/2 column form %d run(s), longest %d: theta in [%.3f, %.3f]",
                runs, run_len, run_lo, run_hi));

    int n_plus = 0, n_minus = 0;
    for (const auto& r : table.rows) {
        n_plus += r.boundary_type == BoundaryType::plus_one;
        n_minus += r.boundary_type == BoundaryType::minus_one;
    }
    c.check(n_plus > 0 && n_minus > 0,
            fmt("boundary types: %d cells lose stability through +1, %d through -1", n_plus, n_minus));
    return c.report();
}

// --------------------------------------------------------------------------
// 5. Bloch-map structure on twenty random stable orbits
// --------------------------------------------------------------------------

bool criterion_5() {
    Criterion c{5, "random stable orbits: Bloch maps have the five-parameter structure"};
    OrbitSettings os;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> uth(1.8, 2.95), uph(-0.03, 0.03);
    std::vector<double> ks;
    for (int i = 0; i <= 16; ++i) ks.push_back(kPi / 2 * i / 16.0);

    int accepted = 0, tried = 0;
    double worst_struct = 0, worst_bc0 = 0, worst_symp = 0, worst_conj = 0, worst_spec = 0;
    while (accepted < 20 && tried < 200) {
        ++tried;
        const SigmaCoords sc{uth(rng), kPi / 2 + uph(rng)};
        const auto found = find_orbit_from_sigma(sc, os);
        if (!found.ok()) continue;
        const auto basis = special_basis(found.orbit, os.integrator);
        if (!row_stability(classify_orbit(found.orbit, basis, os.integrator, 64)).stable) continue;
        ++accepted;
        const auto maps = bloch_map_batch(found.orbit, basis, ks, os.integrator);
        for (const auto& m : maps) {
            worst_struct = std::max(worst_struct, extract_structure(m).constraint_residual);
            worst_symp = std::max(worst_symp, symplectic_residual(m.m));
            worst_conj = std::max(worst_conj, conjugation_residual(m.m));
            const auto sp = eigenvalues_paired(m.m);
            worst_spec = std::max({worst_spec, sp.conj_closure, sp.inverse_closure});
        }
        const auto st0 = extract_structure(maps.front());
        worst_bc0 = std::max({worst_bc0, std::abs(st0.b), std::abs(st0.c), std::abs(st0.g)});
    }
    c.check(accepted == 20, fmt("accepted %d stable orbits out of %d samples", accepted, tried));
    c.check(worst_struct < 1e-6, fmt("max |f g - (a^2 - 1 - b c)| = %.3e", worst_struct));
    c.check(worst_bc0 < 1e-8, fmt("max |b|, |c|, |g| at k = 0: %.3e", worst_bc0));
    c.check(worst_symp < 1e-6, fmt("max symplectic residual %.3e", worst_symp));
    c.check(worst_conj < 1e-6, fmt("max conjugation residual %.3e", worst_conj));
    c.check(worst_spec < 1e-6, fmt("max spectrum closure %.3e", worst_spec));
    return c.report();
}

// --------------------------------------------------------------------------
// 6. Linear fluctuation growth vs the dispersion prediction
// --------------------------------------------------------------------------

bool criterion_6() {
    Criterion c{6, "linear growth coefficient matches the dispersion prediction; Z2 slope vanishes"};
    OrbitSettings os;
    double c_min = 1e300;
    for (double th : {1.9, 2.0, 2.1}) {
        const auto orb = find_orbit_from_sigma({th, kPi / 2}, os);
        c.check(orb.ok(), fmt("orbit at theta_e = %.1f found", th));
        if (!orb.ok()) continue;
        const auto basis = special_basis(orb.orbit, os.integrator);
        const double clin = linear_growth_coefficient(orb.orbit, basis, os.integrator);
        c_min = std::min(c_min, clin);

        GrowthSettings gs;
        gs.n_sites = 100;
        gs.epsilon = 1e-3;
        gs.n_realizations = 100;
        gs.horizon_periods = 12.0;
        gs.samples_per_period = 1;
        gs.seed = 555 + static_cast<std::uint64_t>(th * 10);
        const auto s = growth_series(orb.orbit, gs, 0);
        std::vector<double> n(s.t.size());
        for (std::size_t j = 0; j < s.t.size(); ++j) n[j] = s.t[j] / s.period;
        const auto fit = fit_line(n, s.mean_ratio);
        c.check(std::abs(fit.slope / clin - 1.0) <= 0.10,
                fmt("theta_e = %.1f: slope %.4f vs prediction %.4f (ratio %.4f)", th, fit.slope,
                    clin, fit.slope / clin));
    }

    const auto z2 = find_orbit_from_sigma({z2_sigma_theta(), kPi / 2}, os);
    c.check(z2.ok(), "Z2 orbit found");
    if (z2.ok()) {
        GrowthSettings gs;
        gs.n_sites = 100;
        gs.epsilon = 1e-3;
        gs.n_realizations = 100;
        gs.horizon_periods = 12.0;
        gs.samples_per_period = 1;
        gs.seed = 999;
        const auto s = growth_series(z2.orbit, gs, 0);
        std::vector<double> n(s.t.size());
        for (std::size_t j = 0; j < s.t.size(); ++j) n[j] = s.t[j] / s.period;
        const auto fit = fit_line(n, s.mean_ratio);
        c.check(std::abs(fit.slope) < 0.1 * c_min,
                fmt("Z2 slope %.5f, consistent with zero against 0.1 c_min = %.4f", fit.slope,
                    0.1 * c_min));
    }
    return c.report();
}

// --------------------------------------------------------------------------
// 7. Exponential growth around the Z2 state: rates, collapse, kappa, Phi_0
// --------------------------------------------------------------------------

bool criterion_7() {
    Criterion c{7, "deviations from the Z2 state: rate scaling, collapse, Phi_0 exp(kappa x)"};
    const double Tz2 = z2_period_quadrature();
    const auto po = z2_state_orbit();
    IntegratorSettings tight;
    tight.rtol = 1e-12;
    tight.atol = 1e-14;
    c.check(closure_residual(po, tight) < 1e-8, "Z2 product-state orbit closes (period 2 T)");

    const double eps0 = 0.01;
    const std::vector<double> eps = {eps0, eps0 / std::sqrt(2.0), eps0 / 2.0};
    const std::vector<double> horizons = {43, 61, 85};
    std::vector<GrowthSeries> series;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        GrowthSettings gs;
        gs.n_sites = 100;
        gs.epsilon = eps[i];
        gs.n_realizations = 100;
        gs.horizon_periods = horizons[i];
        // Stroboscopic sampling at the sublattice-exchange time keeps the
        // intra-period breathing of the deviation norm out of the collapse.
        gs.samples_per_period = 2;
        gs.seed = 4242 + i;
        auto s = growth_series(po, gs, 0);
        c.check(s.n_failed == 0, fmt("eps = %.5f: all %d realizations integrated", eps[i],
                                     s.n_realizations));
        // Collapse clock: one-site translation time (half the orbit period).
        s.period = Tz2;
        series.push_back(std::move(s));
    }

    auto col = scaling_collapse(series, 0.1, 0.8, 200);
    c.check(col.residual < 0.10,
            fmt("collapse residual %.4f over x in [%.2f, %.2f]", col.residual, col.x_min, col.x_max));

    std::vector<double> rate(3);
    for (std::size_t i = 0; i < 3; ++i)
        rate[i] = fit_exponential_window(col.x, col.curves[i].phi, 0.1, 0.8).rate * eps[i];
    const double expect[3] = {1.0, 1.0 / std::sqrt(2.0), 0.5};
    for (std::size_t i = 1; i < 3; ++i) {
        const double r = rate[i] / rate[0];
        c.check(std::abs(r / expect[i] - 1.0) <= 0.15,
                fmt("growth-rate ratio %.4f vs %.4f (dev %.1f%%)", r, expect[i],
                    100 * std::abs(r / expect[i] - 1.0)));
    }

    const auto pooled = fit_exponential(col, 0.1);
    c.check(std::abs(pooled.rate - 4.07) / 4.07 <= 0.10,
            fmt("kappa = %.4f (target 4.07 +- 10%%)", pooled.rate));
    c.check(std::abs(pooled.amplitude - 0.763) / 0.763 <= 0.10,
            fmt("Phi_0 = %.4f (target 0.763 +- 10%%)", pooled.amplitude));
    return c.report();
}

// --------------------------------------------------------------------------
// 8. Coherence-time scaling: 1/eps at the Z2 state, log(1/eps) on a chaotic orbit
// --------------------------------------------------------------------------

bool criterion_8() {
    Criterion c{8, "coherence time: halves with eps at the Z2 state, logarithmic on an unstable orbit"};
    const auto po = z2_state_orbit();
    double tc[2] = {0, 0};
    const double eps_pair[2] = {0.00125, 0.000625};
    const double horizon[2] = {1400, 3200};
    for (int i = 0; i < 2; ++i) {
        GrowthSettings gs;
        gs.n_sites = 100;
        gs.epsilon = eps_pair[i];
        gs.n_realizations = 20;
        gs.horizon_periods = horizon[i];
        gs.samples_per_period = 2;
        gs.seed = 424242;
        const auto s = growth_series(po, gs, 0);
        const auto ct = coherence_time(s);
        c.check(ct.reached, fmt("eps = %.6f reaches the threshold (t_coh = %.1f)", eps_pair[i], ct.t_coh));
        tc[i] = ct.t_coh;
    }
    if (tc[1] > 0) {
        const double ratio = tc[0] / tc[1];
        c.check(ratio >= 0.425 && ratio <= 0.575,
                fmt("T_coh(eps) / T_coh(eps/2) = %.4f (target 0.5 +- 15%%)", ratio));
    }

    OrbitSettings os;
    const auto found = find_orbit_from_sigma({2.2, 2.2}, os);
    c.check(found.ok(), "unstable orbit at (2.2, 2.2) found");
    if (found.ok()) {
        std::vector<double> lx, ty;
        bool all_reached = true;
        for (double eps : {1e-2, 1e-3, 1e-4}) {
            GrowthSettings gs;
            gs.n_sites = 48;
            gs.epsilon = eps;
            gs.n_realizations = 32;
            gs.horizon_periods = 10;
            gs.samples_per_period = 8;
            gs.seed = 777;
            const auto s = growth_series(found.orbit, gs, 0);
            const auto ct = coherence_time(s);
            all_reached = all_reached && ct.reached;
            lx.push_back(std::log(1.0 / eps));
            ty.push_back(ct.t_coh);
        }
        const auto fit = fit_line(lx, ty);
        c.check(all_reached && fit.r2 > 0.95,
                fmt("T_coh vs log(1/eps) over two decades: R^2 = %.4f (T_coh = %.1f, %.1f, %.1f)",
                    fit.r2, ty[0], ty[1], ty[2]));
    }
    return c.report();
}

// --------------------------------------------------------------------------
// 9. Quadratic saddle landscape around the Z2 orbit
// --------------------------------------------------------------------------

bool criterion_9() {
    Criterion c{9, "near-Z2 landscape: even quadratic indefinite form, |lambda - 1| linear in the displacement"};
    NearZ2Settings ns;
    ns.magnitudes = {0.02, 0.04};
    ns.n_directions = 8;
    const auto table = near_z2_landscape(ns, 0);
    int n_ok = 0;
    for (const auto& p : table.points) n_ok += p.status == OrbitStatus::ok;
    c.check(n_ok == static_cast<int>(table.points.size()),
            fmt("%d / %zu displaced orbits closed", n_ok, table.points.size()));

    const auto an = near_z2_analysis(table);
    c.check(an.evenness_rel_inner < 0.15 && an.evenness_rel_inner < an.evenness_rel_outer,
            fmt("antipode asymmetry %.4f on the inner shell (outer %.4f)", an.evenness_rel_inner,
                an.evenness_rel_outer));
    c.check(std::abs(an.r_exponent - 2.0) <= 0.1,
            fmt("curvature magnitude exponent %.4f (target 2.0 +- 0.1)", an.r_exponent));
    c.check(std::abs(an.lambda_exponent - 1.0) <= 0.1,
            fmt("|lambda - 1| exponent %.4f (target 1.0 +- 0.1)", an.lambda_exponent));
    c.check(an.signature_indefinite,
            fmt("quadratic form eigenvalues %.3f, %.3f: indefinite", an.q_eig_min, an.q_eig_max));
    c.check(an.sign_alternations == 4,
            fmt("%d sign alternations of r around the direction circle", an.sign_alternations));
    return c.report();
}

// --------------------------------------------------------------------------
// 10. Variational monodromy vs brute force; invariant property suite
// --------------------------------------------------------------------------

bool criterion_10() {
    Criterion c{10, "variational k = 0 monodromy matches finite differences; invariant suite green"};
    IntegratorSettings tight;
    tight.rtol = 1e-12;
    tight.atol = 1e-14;
    OrbitSettings os;
    const SigmaCoords points[5] = {{z2_sigma_theta(), kPi / 2},
                                   {2.0, kPi / 2},
                                   {2.2, kPi / 2 + 0.05},
                                   {2.0, 0.8},
                                   {2.8, kPi / 2}};
    double worst = 0;
    int n_found = 0;
    for (const auto& sc : points) {
        const auto res = find_orbit_from_sigma(sc, os);
        if (!res.ok()) continue;
        ++n_found;
        const auto fr = tangent_frame(res.orbit.cell0.s);
        const Eigen::Matrix4cd mv = bloch_map_frame(res.orbit, fr, 0.0, tight);
        const Eigen::Matrix4d mf = monodromy_fd(res.orbit, fr, tight, 1e-6);
        worst = std::max(worst, (mv.real() - mf).cwiseAbs().maxCoeff());
        worst = std::max(worst, mv.imag().cwiseAbs().maxCoeff());
    }
    c.check(n_found == 5, fmt("%d / 5 cross-check orbits found", n_found));
    c.check(worst < 1e-5, fmt("max entrywise |variational - finite difference| = %.3e", worst));

    ExperimentConfig cfg;
    cfg.experiment = "check";
    const auto checks = run_invariant_checks(cfg);
    int n_failed = 0;
    for (const auto& r : checks) n_failed += !r.passed;
    c.check(!checks.empty() && n_failed == 0,
            fmt("invariant suite: %zu checks, %d failed", checks.size(), n_failed));
    for (const auto& r : checks)
        if (!r.passed) c.note(fmt("failed: %s (residual %.3e, tol %.3e)", r.name.c_str(), r.residual,
                                  r.tolerance));
    return c.report();
}

}  // namespace

int main(int argc, char** argv) {
    bool (*criteria[10])() = {criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                              criterion_6, criterion_7, criterion_8, criterion_9, criterion_10};
    bool run[10];
    std::fill(run, run + 10, argc <= 1);
    for (int a = 1; a < argc; ++a) {
        const int id = std::atoi(argv[a]);
        if (id >= 1 && id <= 10) run[id - 1] = true;
    }
    std::printf("pxplab acceptance suite\n");
    bool all = true;
    for (int i = 0; i < 10; ++i)
        if (run[i]) all &= criteria[i]();
    std::printf("%s\n", all ? "ALL CRITERIA PASSED" : "CRITERIA FAILED");
    return all ? 0 : 1;
}
