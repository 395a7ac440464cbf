#include "pxplab/stability.hpp"

#include "pxplab/task_pool.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace pxplab {

namespace {

constexpr double kPi = std::numbers::pi;
using cd = std::complex<double>;

void require_n2(const PeriodicOrbit& orbit, const char* who) {
    if (orbit.cell0.size() != 2)
        throw std::invalid_argument(std::string(who) + ": needs an n = 2 orbit");
    if (!(orbit.period > 0))
        throw std::invalid_argument(std::string(who) + ": orbit has no period");
}

// Initial tangent vectors for the frame propagation: e_a at site l, zero at
// the other site.  The same (real) vectors serve every wavevector.
std::vector<CellTangent> frame_initials(const TangentFrame& frame) {
    std::vector<CellTangent> vs;
    for (int l = 0; l < 2; ++l)
        for (int a = 0; a < 2; ++a) {
            CellTangent u(2, Eigen::Vector3cd::Zero());
            const Vec3& e = a == 0 ? frame.e1[static_cast<std::size_t>(l)]
                                   : frame.e2[static_cast<std::size_t>(l)];
            u[static_cast<std::size_t>(l)] = e.cast<cd>();
            vs.push_back(std::move(u));
        }
    return vs;
}

// Coordinates of a cell tangent vector in the frame (Hermitian projection).
Eigen::Vector4cd frame_coords(const TangentFrame& frame, const CellTangent& u) {
    Eigen::Vector4cd c;
    for (int l = 0; l < 2; ++l) {
        c[2 * l] = frame.e1[static_cast<std::size_t>(l)].cast<cd>().dot(u[static_cast<std::size_t>(l)]);
        c[2 * l + 1] = frame.e2[static_cast<std::size_t>(l)].cast<cd>().dot(u[static_cast<std::size_t>(l)]);
    }
    return c;
}

Eigen::Matrix4cd propagate_frame(const PeriodicOrbit& orbit, const TangentFrame& frame, double k,
                                 const IntegratorSettings& settings) {
    const auto out = integrate_tangent(orbit.cell0, orbit.period, k, frame_initials(frame), settings);
    Eigen::Matrix4cd m;
    for (int col = 0; col < 4; ++col) m.col(col) = frame_coords(frame, out[static_cast<std::size_t>(col)]);
    return m;
}

// Special-basis vectors at wavevector k, as frame coordinates (columns of the
// unitary change-of-basis matrix P).  Basis order: v1, v2, v3, v4.
Eigen::Matrix4cd change_of_basis(const UnitCell& cell0, const TangentFrame& frame, const Vec3& w,
                                 const Vec3& z, double k) {
    const cd ek = std::polar(1.0, k);
    const Vec3 s0 = cell0[0], s1 = cell0[1];
    auto fill = [&](const Eigen::Vector3cd& at0, const Eigen::Vector3cd& at1) {
        CellTangent u(2);
        u[0] = at0 / std::sqrt(2.0);
        u[1] = at1 / std::sqrt(2.0);
        return frame_coords(frame, u);
    };
    const Eigen::Vector3cd wc = w.cast<cd>(), zc = z.cast<cd>();
    const Eigen::Vector3cd rw = rz_pi(w).cast<cd>(), rz = rz_pi(z).cast<cd>();
    Eigen::Matrix4cd p;
    // v1: velocity pattern (C-odd);  v3: equal-period pattern (C-even).
    p.col(0) = fill(wc, -ek * rw);
    p.col(2) = fill(zc, ek * rz);
    // v2 = J v3 and v4 = J v1 with (J u)_i = S_i x u_i.
    p.col(1) = fill(s0.cast<cd>().cross(zc), ek * s1.cast<cd>().cross(rz));
    p.col(3) = fill(s0.cast<cd>().cross(wc), -ek * s1.cast<cd>().cross(rw));
    return p;
}

}  // namespace

TangentFrame tangent_frame(const std::vector<Vec3>& sites) {
    TangentFrame f;
    f.e1.reserve(sites.size());
    f.e2.reserve(sites.size());
    const Vec3 zhat(0, 0, 1), xhat(1, 0, 0);
    for (const Vec3& s : sites) {
        Vec3 a = zhat.cross(s);
        if (a.norm() < 1e-6) a = xhat.cross(s);
        a.normalize();
        f.e1.push_back(a);
        f.e2.push_back(s.cross(a));
    }
    return f;
}

SpecialBasis special_basis(const PeriodicOrbit& orbit, const IntegratorSettings& settings) {
    require_n2(orbit, "special_basis");
    SpecialBasis b;
    b.frame = tangent_frame(orbit.cell0.s);

    const Eigen::Matrix4cd m0c = propagate_frame(orbit, b.frame, 0.0, settings);
    b.m0_frame = m0c.real();

    const auto vel = eom_rhs(orbit.cell0);
    const double speed = vel[0].norm();
    if (speed < 1e-12) throw std::invalid_argument("special_basis: flow vanishes at base point");
    b.w = vel[0] / speed;

    // C-even subspace at k = 0: cell vectors with u_1 = rz_pi(u_0), spanned by
    // the two frame directions at site 0.  v3 is the member annihilated by
    // M_0 - 1, found from the smallest right singular vector of (M_0 - 1) B.
    Eigen::Matrix<double, 4, 2> even;
    for (int a = 0; a < 2; ++a) {
        CellTangent u(2);
        const Vec3& e = a == 0 ? b.frame.e1[0] : b.frame.e2[0];
        u[0] = e.cast<cd>() / std::sqrt(2.0);
        u[1] = rz_pi(e).cast<cd>() / std::sqrt(2.0);
        even.col(a) = frame_coords(b.frame, u).real();
    }
    const Eigen::Matrix<double, 4, 2> lhs = (b.m0_frame - Eigen::Matrix4d::Identity()) * even;
    Eigen::JacobiSVD<Eigen::Matrix<double, 4, 2>> svd(lhs, Eigen::ComputeFullV);
    b.sv_split = svd.singularValues()(0) - svd.singularValues()(1);
    b.marginal = (b.m0_frame - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() < kMarginalTol;
    Eigen::Vector2d c = svd.matrixV().col(1);
    if (b.marginal) c = Eigen::Vector2d(1.0, 0.0);  // any even direction works at Z2
    if (std::abs(c[0]) >= std::abs(c[1]) ? c[0] < 0 : c[1] < 0) c = -c;  // deterministic sign
    b.z = (c[0] * b.frame.e1[0] + c[1] * b.frame.e2[0]).normalized();

    const Eigen::Matrix4cd p0 = change_of_basis(orbit.cell0, b.frame, b.w, b.z, 0.0);
    const Eigen::Matrix4d m0s = (p0.adjoint() * m0c * p0).real();
    b.f0 = m0s(0, 1);
    return b;
}

std::vector<BlochMap> bloch_map_batch(const PeriodicOrbit& orbit, const SpecialBasis& basis,
                                      const std::vector<double>& ks,
                                      const IntegratorSettings& settings) {
    require_n2(orbit, "bloch_map");
    std::vector<BlochMap> out(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i) {
        const double k = ks[i];
        const Eigen::Matrix4cd mf = propagate_frame(orbit, basis.frame, k, settings);
        const Eigen::Matrix4cd p = change_of_basis(orbit.cell0, basis.frame, basis.w, basis.z, k);
        const Eigen::Matrix4cd ms = p.adjoint() * mf * p;
        out[i].k = k;
        out[i].m = ms.real();
        out[i].imag_residual = ms.imag().cwiseAbs().maxCoeff();
    }
    return out;
}

BlochMap bloch_map(const PeriodicOrbit& orbit, const SpecialBasis& basis, double k,
                   const IntegratorSettings& settings) {
    return bloch_map_batch(orbit, basis, {k}, settings).front();
}

Eigen::Matrix4cd bloch_map_frame(const PeriodicOrbit& orbit, const TangentFrame& frame, double k,
                                 const IntegratorSettings& settings) {
    require_n2(orbit, "bloch_map_frame");
    return propagate_frame(orbit, frame, k, settings);
}

// ---------------------------------------------------------------------------
// Spectrum
// ---------------------------------------------------------------------------

PairedSpectrum eigenvalues_paired(const Eigen::Matrix4d& m, double tol) {
    Eigen::EigenSolver<Eigen::Matrix4d> es(m);
    std::array<cd, 4> ev;
    for (int i = 0; i < 4; ++i) ev[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
    std::sort(ev.begin(), ev.end(), [](cd a, cd b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    PairedSpectrum ps;
    ps.lambda = ev;
    for (const cd& l : ev) {
        double dc = 1e300, di = 1e300;
        for (const cd& m2 : ev) {
            dc = std::min(dc, std::abs(std::conj(l) - m2));
            di = std::min(di, std::abs(1.0 / l - m2));
        }
        ps.conj_closure = std::max(ps.conj_closure, dc);
        ps.inverse_closure = std::max(ps.inverse_closure, di);
    }
    ps.pair_split = std::max(std::abs(ev[0] - ev[1]), std::abs(ev[2] - ev[3]));
    ps.ok = ps.conj_closure < tol && ps.inverse_closure < tol;
    return ps;
}

// ---------------------------------------------------------------------------
// Structure extraction
// ---------------------------------------------------------------------------

StructureParams extract_structure(const BlochMap& map) {
    const Eigen::Matrix4d& m = map.m;
    StructureParams p;
    p.a = m.trace() / 4.0;
    p.f = 0.5 * (m(0, 1) + m(2, 3));
    p.g = 0.5 * (m(1, 0) + m(3, 2));
    p.b = 0.5 * (m(0, 2) - m(1, 3));
    p.c = 0.5 * (m(2, 0) - m(3, 1));
    Eigen::Matrix4d form;
    form << p.a, p.f, p.b, 0, p.g, p.a, 0, -p.b, p.c, 0, p.a, p.f, 0, -p.c, p.g, p.a;
    p.form_residual = (m - form).cwiseAbs().maxCoeff();
    p.constraint_residual = std::abs(p.f * p.g - (p.a * p.a - 1.0 - p.b * p.c));
    return p;
}

Eigen::Matrix4d symplectic_j() {
    // omega(u, v) = sum_i S_i . (conj(u_i) x v_i) evaluated on the special
    // basis: omega(v1, v4) = omega(v3, v2) = 1, antisymmetric, zero elsewhere.
    Eigen::Matrix4d j = Eigen::Matrix4d::Zero();
    j(0, 3) = 1.0;
    j(3, 0) = -1.0;
    j(2, 1) = 1.0;
    j(1, 2) = -1.0;
    return j;
}

double symplectic_residual(const Eigen::Matrix4d& m) {
    const Eigen::Matrix4d j = symplectic_j();
    return (m.transpose() * j * m - j).cwiseAbs().maxCoeff();
}

double conjugation_residual(const Eigen::Matrix4d& m) {
    // Echo conjugation in the special basis: C = diag(-1, 1, 1, -1) up to a
    // global phase that cancels in C^{-1} M C.
    const Eigen::Vector4d cdiag(-1.0, 1.0, 1.0, -1.0);
    const Eigen::Matrix4d c = cdiag.asDiagonal();
    return (m.inverse() - c.inverse() * m * c).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

StabilityVerdict classify_orbit(const PeriodicOrbit& orbit, const SpecialBasis& basis,
                                const IntegratorSettings& settings, int n_k) {
    if (n_k < 2) throw std::invalid_argument("classify_orbit: n_k must be >= 2");
    std::vector<double> ks(static_cast<std::size_t>(n_k));
    for (int i = 0; i < n_k; ++i) ks[static_cast<std::size_t>(i)] = (kPi / 2) * (i + 1.0) / n_k;
    const auto maps = bloch_map_batch(orbit, basis, ks, settings);

    StabilityVerdict v;
    v.curve.reserve(maps.size() + 1);
    v.curve.push_back({0.0, 1.0, 1.0});  // k = 0 is marginal by construction
    double max_dev_from_one = 0.0;
    for (const auto& bm : maps) {
        TracePoint tp;
        tp.k = bm.k;
        tp.quarter_trace = bm.m.trace() / 4.0;
        const auto ps = eigenvalues_paired(bm.m);
        for (const auto& l : ps.lambda) tp.max_abs_eig = std::max(tp.max_abs_eig, std::abs(l));
        v.curve.push_back(tp);
        const double aa = std::abs(tp.quarter_trace);
        if (aa > v.max_abs_quarter_trace) {
            v.max_abs_quarter_trace = aa;
            v.k_star = tp.k;
        }
        v.max_abs_eig = std::max(v.max_abs_eig, tp.max_abs_eig);
        max_dev_from_one = std::max(max_dev_from_one, std::abs(tp.quarter_trace - 1.0));
    }
    v.stable = v.max_abs_quarter_trace <= 1.0 + kStabilityTol;
    v.marginal = max_dev_from_one <= kMarginalTol;
    if (!v.stable) {
        // Boundary type: which edge of [-1, 1] the quarter trace left through.
        double a_at_star = 0.0;
        for (const auto& tp : v.curve)
            if (tp.k == v.k_star) a_at_star = tp.quarter_trace;
        v.boundary_type = a_at_star > 0 ? BoundaryType::plus_one : BoundaryType::minus_one;
    }
    return v;
}

RowStability row_stability(const StabilityVerdict& v) {
    return RowStability{v.stable, v.max_abs_quarter_trace, v.boundary_type};
}

// ---------------------------------------------------------------------------
// Dispersion parameters
// ---------------------------------------------------------------------------

DispersionParams dispersion_params(const PeriodicOrbit& orbit, const SpecialBasis& basis,
                                   const IntegratorSettings& settings, double dk) {
    auto g_at = [&](double k) {
        return extract_structure(bloch_map(orbit, basis, k, settings)).g;
    };
    auto second_derivative = [&](double d) {
        const double g0 = extract_structure(bloch_map(orbit, basis, 0.0, settings)).g;
        const double g1 = 0.5 * (g_at(d) + g_at(-d));
        const double g2 = 0.5 * (g_at(2 * d) + g_at(-2 * d));
        return (-30.0 * g0 + 32.0 * g1 - 2.0 * g2) / (12.0 * d * d);
    };
    DispersionParams p;
    p.f0 = basis.f0;
    p.gpp0 = second_derivative(dk);
    const double gpp_half = second_derivative(dk / 2);
    p.gpp0_sensitivity = std::abs(gpp_half - p.gpp0) / std::max(std::abs(p.gpp0), 1e-300);
    const double q = -p.f0 * p.gpp0;
    if (std::abs(p.f0) > 1e-6 && q > 0) {
        p.defined = true;
        p.mu = std::sqrt(-p.gpp0 / (2.0 * p.f0));
        p.phi_disp = std::sqrt(q / 2.0);
        p.c_lin = p.f0 * p.f0 / std::sqrt(2.0 * q);
    }
    return p;
}

double linear_growth_coefficient(const PeriodicOrbit& orbit, const SpecialBasis& basis,
                                 const IntegratorSettings& settings) {
    const auto p = dispersion_params(orbit, basis, settings);
    if (!p.defined)
        throw std::invalid_argument("linear_growth_coefficient: dispersion undefined (marginal or unstable orbit)");
    return p.c_lin;
}

// ---------------------------------------------------------------------------
// Finite-difference cross-check
// ---------------------------------------------------------------------------

Eigen::Matrix4d monodromy_fd(const PeriodicOrbit& orbit, const TangentFrame& frame,
                             const IntegratorSettings& settings, double eta) {
    require_n2(orbit, "monodromy_fd");
    // Two-cell chain (four sites), perturbed cell-periodically: the k = 0
    // sector of the infinite chain, integrated with the full chain dynamics.
    const auto sys = make_spin_system(4);
    auto strobe = [&](const Eigen::VectorXd& y0) {
        auto sol = integrate_ode(sys, y0, 0.0, orbit.period, settings);
        if (!sol.ok()) throw std::runtime_error("monodromy_fd: " + sol.message);
        return sol.y_end;
    };
    Eigen::VectorXd base(12);
    for (int rep = 0; rep < 2; ++rep)
        for (int l = 0; l < 2; ++l) base.segment<3>(3 * (2 * rep + l)) = orbit.cell0[l];

    Eigen::Matrix4d m;
    for (int col = 0; col < 4; ++col) {
        const int l = col / 2, axis = col % 2;
        const Vec3& e = axis == 0 ? frame.e1[static_cast<std::size_t>(l)]
                                  : frame.e2[static_cast<std::size_t>(l)];
        Eigen::VectorXd yp = base, ym = base;
        for (int rep = 0; rep < 2; ++rep) {
            yp.segment<3>(3 * (2 * rep + l)) += eta * e;
            ym.segment<3>(3 * (2 * rep + l)) -= eta * e;
        }
        kernel::normalize_sites(yp.data(), 4);
        kernel::normalize_sites(ym.data(), 4);
        const Eigen::VectorXd diff = (strobe(yp) - strobe(ym)) / (2.0 * eta);
        for (int l2 = 0; l2 < 2; ++l2) {
            const Vec3 d = diff.segment<3>(3 * l2);
            m(2 * l2, col) = frame.e1[static_cast<std::size_t>(l2)].dot(d);
            m(2 * l2 + 1, col) = frame.e2[static_cast<std::size_t>(l2)].dot(d);
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// Near-Z2 landscape
// ---------------------------------------------------------------------------

NearZ2Table near_z2_landscape(const NearZ2Settings& settings, int workers) {
    NearZ2Table table;
    table.theta_star = z2_sigma_theta();
    table.phi_star = kPi / 2;
    const int nd = settings.n_directions;
    const auto& mags = settings.magnitudes;
    table.points.resize(mags.size() * static_cast<std::size_t>(nd));

    parallel_for(table.points.size(), workers, [&](std::size_t idx) {
        const std::size_t im = idx / static_cast<std::size_t>(nd);
        const int id = static_cast<int>(idx % static_cast<std::size_t>(nd));
        const double alpha = 2.0 * kPi * id / nd;
        NearZ2Point pt;
        pt.norm = mags[im];
        pt.dtheta = pt.norm * std::cos(alpha);
        pt.dphi = pt.norm * std::sin(alpha);
        auto orb = find_orbit_from_sigma({table.theta_star + pt.dtheta, table.phi_star + pt.dphi},
                                         settings.orbit);
        pt.status = orb.status;
        if (orb.ok()) {
            const auto basis = special_basis(orb.orbit, settings.orbit.integrator);
            // Small-k fit of a(k) - 1 = r k^2 - s k^4.
            std::vector<double> ks(static_cast<std::size_t>(settings.n_k_fit));
            for (int i = 0; i < settings.n_k_fit; ++i)
                ks[static_cast<std::size_t>(i)] = settings.k_fit_max * (i + 1.0) / settings.n_k_fit;
            const auto maps = bloch_map_batch(orb.orbit, basis, ks, settings.orbit.integrator);
            Eigen::MatrixXd X(settings.n_k_fit, 2);
            Eigen::VectorXd y(settings.n_k_fit);
            for (int i = 0; i < settings.n_k_fit; ++i) {
                const double k = ks[static_cast<std::size_t>(i)];
                X(i, 0) = k * k;
                X(i, 1) = -k * k * k * k;
                y[i] = maps[static_cast<std::size_t>(i)].m.trace() / 4.0 - 1.0;
            }
            const Eigen::Vector2d beta = (X.transpose() * X).ldlt().solve(X.transpose() * y);
            pt.r = beta[0];
            pt.s = beta[1];
            pt.fit_residual = (y - X * beta).cwiseAbs().maxCoeff();
            // Eigenvalue deviation over the zone.
            std::vector<double> kz(static_cast<std::size_t>(settings.n_k_zone));
            for (int i = 0; i < settings.n_k_zone; ++i)
                kz[static_cast<std::size_t>(i)] = (kPi / 2) * (i + 1.0) / settings.n_k_zone;
            const auto zone = bloch_map_batch(orb.orbit, basis, kz, settings.orbit.integrator);
            for (const auto& bm : zone) {
                const auto ps = eigenvalues_paired(bm.m);
                for (const auto& l : ps.lambda)
                    pt.max_abs_eig_dev = std::max(pt.max_abs_eig_dev, std::abs(l - 1.0));
            }
        }
        table.points[idx] = pt;
    });
    return table;
}

NearZ2Analysis near_z2_analysis(const NearZ2Table& table) {
    NearZ2Analysis an;
    std::vector<const NearZ2Point*> ok;
    double rmax = 0.0;
    for (const auto& p : table.points)
        if (p.status == OrbitStatus::ok) {
            ok.push_back(&p);
            rmax = std::max(rmax, std::abs(p.r));
        }
    if (ok.size() < 8) throw std::invalid_argument("near_z2_analysis: too few valid points");
    (void)rmax;

    // Per-shell maxima and antipode asymmetries.
    std::map<double, std::pair<double, double>> shell;  // norm -> (max|r|, max|l-1|)
    std::map<double, double> shell_asym;                // norm -> max |r(d) - r(-d)|
    for (const auto* p : ok) {
        auto& sh = shell[p->norm];
        sh.first = std::max(sh.first, std::abs(p->r));
        sh.second = std::max(sh.second, p->max_abs_eig_dev);
        for (const auto* q : ok)
            if (std::abs(p->dtheta + q->dtheta) < 1e-12 && std::abs(p->dphi + q->dphi) < 1e-12)
                shell_asym[p->norm] = std::max(shell_asym[p->norm], std::abs(p->r - q->r));
    }
    an.evenness_rel_inner =
        shell_asym.begin()->second / std::max(shell.begin()->second.first, 1e-300);
    an.evenness_rel_outer =
        shell_asym.rbegin()->second / std::max(shell.rbegin()->second.first, 1e-300);
    auto fit_slope = [](const std::vector<double>& lx, const std::vector<double>& ly) {
        const double n = static_cast<double>(lx.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sx += lx[i];
            sy += ly[i];
            sxx += lx[i] * lx[i];
            sxy += lx[i] * ly[i];
        }
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    std::vector<double> lm, lr, ll;
    for (const auto& [mag, v] : shell) {
        lm.push_back(std::log(mag));
        lr.push_back(std::log(v.first));
        ll.push_back(std::log(v.second));
    }
    if (lm.size() > 3) {
        lm.pop_back();
        lr.pop_back();
        ll.pop_back();
    }
    an.r_exponent = fit_slope(lm, lr);
    an.lambda_exponent = fit_slope(lm, ll);

    // Quadratic form r(d) = q11 dth^2 + 2 q12 dth dph + q22 dph^2.
    Eigen::MatrixXd X(static_cast<Eigen::Index>(ok.size()), 3);
    Eigen::VectorXd y(static_cast<Eigen::Index>(ok.size()));
    for (std::size_t i = 0; i < ok.size(); ++i) {
        const auto* p = ok[i];
        X(static_cast<Eigen::Index>(i), 0) = p->dtheta * p->dtheta;
        X(static_cast<Eigen::Index>(i), 1) = 2.0 * p->dtheta * p->dphi;
        X(static_cast<Eigen::Index>(i), 2) = p->dphi * p->dphi;
        y[static_cast<Eigen::Index>(i)] = p->r;
    }
    const Eigen::Vector3d q = (X.transpose() * X).ldlt().solve(X.transpose() * y);
    an.quad_form << q[0], q[1], q[1], q[2];
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> qs(an.quad_form);
    an.q_eig_min = qs.eigenvalues()[0];
    an.q_eig_max = qs.eigenvalues()[1];
    an.signature_indefinite = an.q_eig_min < 0 && an.q_eig_max > 0;

    // Sign alternations of r around the outermost complete shell.
    const double outer = std::max_element(shell.begin(), shell.end())->first;
    std::vector<std::pair<double, double>> ring;  // (angle, r)
    for (const auto* p : ok)
        if (std::abs(p->norm - outer) < 1e-12) ring.emplace_back(std::atan2(p->dphi, p->dtheta), p->r);
    std::sort(ring.begin(), ring.end());
    for (std::size_t i = 0; i < ring.size(); ++i) {
        const double a = ring[i].second, b = ring[(i + 1) % ring.size()].second;
        if (a != 0 && b != 0 && (a > 0) != (b > 0)) ++an.sign_alternations;
    }
    return an;
}

}  // namespace pxplab
