#include "pxplab/orbits.hpp"

#include "pxplab/task_pool.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace pxplab {

namespace {
constexpr double kPi = std::numbers::pi;
const double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

const char* to_string(OrbitStatus s) {
    switch (s) {
        case OrbitStatus::ok: return "ok";
        case OrbitStatus::degenerate_input: return "degenerate";
        case OrbitStatus::no_return: return "no_return";
        case OrbitStatus::integration_failure: return "failed";
    }
    return "unknown";
}

const char* to_string(BoundaryType b) {
    switch (b) {
        case BoundaryType::none: return "none";
        case BoundaryType::plus_one: return "plus_one";
        case BoundaryType::minus_one: return "minus_one";
    }
    return "unknown";
}

OrbitResult find_orbit_from_sigma(const SigmaCoords& coords, const OrbitSettings& settings) {
    OrbitResult res;
    if (std::abs(std::sin(coords.theta_e)) < settings.degenerate_tol) {
        res.status = OrbitStatus::degenerate_input;
        res.message = "z-polarized Sigma point: the flow never recloses through Sigma";
        return res;
    }
    const UnitCell cell0 = sigma_point(coords);
    try {
        auto crossing = detect_sigma_crossing(cell0, settings.horizon, settings.integrator, 0.0,
                                              settings.crossing_tol);
        if (!crossing.found) {
            res.status = OrbitStatus::no_return;
            res.message = "no Sigma return within the horizon";
            return res;
        }
        PeriodicOrbit orbit;
        orbit.cell0 = cell0;
        orbit.coords = coords;
        orbit.t_star = crossing.t_star;
        orbit.period = 2.0 * crossing.t_star;
        orbit.sigma_residual = crossing.distance;
        orbit.samples = integrate(cell0, orbit.period, settings.integrator, settings.n_samples);
        const Eigen::VectorXd gap = orbit.samples.y.back() - orbit.samples.y.front();
        orbit.closure_residual = gap.cwiseAbs().maxCoeff();
        res.status = OrbitStatus::ok;
        res.orbit = std::move(orbit);
        return res;
    } catch (const std::runtime_error& e) {
        res.status = OrbitStatus::integration_failure;
        res.message = e.what();
        return res;
    }
}

double closure_residual(const PeriodicOrbit& orbit, const IntegratorSettings& settings) {
    auto traj = integrate(orbit.cell0, orbit.period, settings, 2);
    return (traj.y.back() - traj.y.front()).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Z2 analytics
// ---------------------------------------------------------------------------

double z2_first_integral(double theta) {
    return 1.5 * theta - 2.0 * std::sin(theta) + 0.25 * std::sin(2.0 * theta);
}

namespace {

// dG/dtheta.
inline double z2_first_integral_rate(double theta) {
    const double c = 1.0 - std::cos(theta);
    return c * c;
}

// Solves G(theta) = target for theta in [lo, hi] (G is monotone increasing).
double invert_first_integral(double target, double lo, double hi) {
    double flo = z2_first_integral(lo) - target;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = z2_first_integral(mid) - target;
        if ((flo <= 0.0) == (fmid <= 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-16 * std::max(1.0, std::abs(hi))) break;
    }
    // Newton polish (safe: derivative bounded away from zero off the poles).
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 4; ++it) {
        const double d = z2_first_integral_rate(x);
        if (d < 1e-8) break;
        x -= (z2_first_integral(x) - target) / d;
    }
    return x;
}

}  // namespace

double z2_sigma_theta() {
    return invert_first_integral(0.75 * kPi, 1e-3, kPi - 1e-12);
}

double z2_period_quadrature() {
    const double theta_star = z2_sigma_theta();
    // On the Z2 orbit G(theta_o) = G(theta_e) + 3 pi / 2 with theta_o in
    // [pi, 2 pi - theta*]; the quarter-period integrand is smooth there.
    auto integrand = [](double theta_e) {
        const double theta_o =
            invert_first_integral(z2_first_integral(theta_e) + 1.5 * kPi, kPi - 1e-9, 2.0 * kPi);
        const double c = 1.0 - std::cos(theta_o);
        return 1.0 / (c * c);
    };
    double error = 0.0;
    const double quarter = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        integrand, 0.0, theta_star, 15, 1e-13, &error);
    return 4.0 * quarter;
}

// ---------------------------------------------------------------------------
// Reduced-sector conserved quantities
// ---------------------------------------------------------------------------

std::vector<double> theta_invariants(const std::vector<double>& theta) {
    std::vector<double> h(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) h[i] = theta[i] - std::sin(theta[i]);
    return h;
}

double theta_invariant_drift(const Trajectory& reduced) {
    if (!reduced.reduced || reduced.y.empty())
        throw std::invalid_argument("theta_invariant_drift: needs a reduced trajectory");
    const int n = reduced.sites;
    auto diffs = [n](const Eigen::VectorXd& th) {
        Eigen::VectorXd d(n);
        auto h = [](double x) { return x - std::sin(x); };
        for (int i = 0; i < n; ++i) d[i] = h(th[i]) - h(th[0]);
        return d;
    };
    const Eigen::VectorXd d0 = diffs(reduced.y.front());
    double drift = 0.0;
    for (const auto& th : reduced.y)
        drift = std::max(drift, (diffs(th) - d0).cwiseAbs().maxCoeff());
    return drift;
}

// ---------------------------------------------------------------------------
// Family scan
// ---------------------------------------------------------------------------

OrbitFamilyTable orbit_family_scan(const ScanGrid& grid, const OrbitSettings& settings,
                                   const RowClassifier& classify, int workers) {
    if (grid.n_theta < 1 || grid.n_phi < 1)
        throw std::invalid_argument("orbit_family_scan: empty grid");
    const double theta_lo = grid.theta_min;
    const double theta_hi = grid.theta_max > 0.0 ? grid.theta_max : kPi;
    const double phi_lo = grid.phi_min;
    const double phi_hi = grid.phi_max > 0.0 ? grid.phi_max : 2.0 * kPi;

    OrbitFamilyTable table;
    table.n_theta = grid.n_theta;
    table.n_phi = grid.n_phi;
    table.rows.resize(static_cast<std::size_t>(grid.n_theta) * grid.n_phi);

    parallel_for(table.rows.size(), workers, [&](std::size_t idx) {
        const int jt = static_cast<int>(idx) / grid.n_phi;
        const int jp = static_cast<int>(idx) % grid.n_phi;
        OrbitFamilyRow row;
        row.theta_e = theta_lo + (jt + 0.5) * (theta_hi - theta_lo) / grid.n_theta;
        row.phi_e = phi_lo + jp * (phi_hi - phi_lo) / grid.n_phi;
        row.period = kNaN;
        row.max_abs_quarter_trace = kNaN;
        auto r = find_orbit_from_sigma({row.theta_e, row.phi_e}, settings);
        row.status = r.status;
        if (r.ok()) {
            row.period = r.orbit.period;
            if (classify) {
                const RowStability st = classify(r.orbit);
                row.stable = st.stable;
                row.max_abs_quarter_trace = st.max_abs_quarter_trace;
                row.boundary_type = st.boundary_type;
            }
        }
        table.rows[idx] = row;
    });
    return table;
}

}  // namespace pxplab
