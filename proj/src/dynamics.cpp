#include "pxplab/dynamics.hpp"

#include "pxplab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pxplab {

namespace {

inline int wrap(int i, int n) {
    int r = i % n;
    return r < 0 ? r + n : r;
}

std::vector<double> uniform_times(double t_end, int n_samples) {
    if (n_samples < 1) throw std::invalid_argument("integrate: n_samples must be >= 1");
    std::vector<double> ts(static_cast<std::size_t>(n_samples) + 1);
    for (int i = 0; i <= n_samples; ++i) ts[static_cast<std::size_t>(i)] = t_end * i / n_samples;
    return ts;
}

Trajectory run_sampled(const OdeSystem& sys, const Eigen::VectorXd& y0, double t_end,
                       const IntegratorSettings& st, int n_samples, int sites, bool reduced) {
    Trajectory traj;
    traj.sites = sites;
    traj.reduced = reduced;
    const auto ts = uniform_times(t_end, n_samples);
    traj.t.reserve(ts.size());
    traj.y.reserve(ts.size());
    auto sol = integrate_sampled(sys, y0, 0.0, ts, st,
                                 [&](std::size_t, double t, const Eigen::VectorXd& y) {
                                     traj.t.push_back(t);
                                     traj.y.push_back(y);
                                 });
    if (!sol.ok()) throw std::runtime_error("integrate: " + sol.message);
    if (!reduced) {
        const double e0 = kernel::energy(traj.y.front().data(), sites);
        for (const auto& y : traj.y)
            traj.energy_drift =
                std::max(traj.energy_drift, std::abs(kernel::energy(y.data(), sites) - e0));
    }
    return traj;
}

}  // namespace

// ---------------------------------------------------------------------------
// System factories
// ---------------------------------------------------------------------------

OdeSystem make_spin_system(int n) {
    OdeSystem sys;
    sys.dim = 3 * n;
    sys.rhs = [n](double, const double* y, double* dy) { kernel::eom_rhs(y, dy, n); };
    sys.post_step = [n](double* y) { kernel::normalize_sites(y, n); };
    return sys;
}

OdeSystem make_theta_system(int n) {
    OdeSystem sys;
    sys.dim = n;
    sys.rhs = [n](double, const double* th, double* dth) {
        for (int i = 0; i < n; ++i) {
            const double l = 1.0 - std::cos(th[wrap(i - 1, n)]);
            const double r = 1.0 - std::cos(th[wrap(i + 1, n)]);
            dth[i] = l * r;
        }
    };
    return sys;
}

namespace {

// Linearized precession at Bloch wavevector k on an n-site cell.
// u holds m complex tangent blocks of 3n entries each.
void bloch_tangent_rhs(const double* s, const std::complex<double>* u, std::complex<double>* du,
                       int n, int m, std::complex<double> ep) {
    using cd = std::complex<double>;
    const cd em = std::conj(ep);
    // Neighbor amplitude with Bloch phase for site index i + d.
    auto amp = [&](const cd* blk, int i, int d, int comp) -> cd {
        const int j = i + d;
        const int l = wrap(j, n);
        cd v = blk[3 * l + comp];
        if (j < 0) v *= em;
        else if (j >= n) v *= ep;
        return v;
    };
    for (int b = 0; b < m; ++b) {
        const cd* ub = u + 3 * n * b;
        cd* dub = du + 3 * n * b;
        for (int i = 0; i < n; ++i) {
            const int im = wrap(i - 1, n), ip = wrap(i + 1, n);
            const int im2 = wrap(i - 2, n), ip2 = wrap(i + 2, n);
            const double zm = s[3 * im + 2], zp = s[3 * ip + 2];
            const double hx = -(1.0 - zm) * (1.0 - zp);
            const double hz =
                s[3 * im] * (1.0 - s[3 * im2 + 2]) + s[3 * ip] * (1.0 - s[3 * ip2 + 2]);
            const cd dzm = amp(ub, i, -1, 2), dzp = amp(ub, i, +1, 2);
            const cd dxm = amp(ub, i, -1, 0), dxp = amp(ub, i, +1, 0);
            const cd dzm2 = amp(ub, i, -2, 2), dzp2 = amp(ub, i, +2, 2);
            const cd dhx = dzm * (1.0 - zp) + (1.0 - zm) * dzp;
            const cd dhz = dxm * (1.0 - s[3 * im2 + 2]) - s[3 * im] * dzm2 +
                           dxp * (1.0 - s[3 * ip2 + 2]) - s[3 * ip] * dzp2;
            const double sx = s[3 * i], sy = s[3 * i + 1], sz = s[3 * i + 2];
            const cd ux = ub[3 * i], uy = ub[3 * i + 1], uz = ub[3 * i + 2];
            // d(h x S) = dh x S + h x dS with dh = (dhx, 0, dhz), h = (hx, 0, hz).
            dub[3 * i + 0] = -dhz * sy - hz * uy;
            dub[3 * i + 1] = dhz * sx - dhx * sz + hz * ux - hx * uz;
            dub[3 * i + 2] = dhx * sy + hx * uy;
        }
    }
}

void project_tangent_blocks(double* y, int n, int m) {
    kernel::normalize_sites(y, n);
    auto* u = reinterpret_cast<std::complex<double>*>(y + 3 * n);
    for (int b = 0; b < m; ++b) {
        std::complex<double>* ub = u + 3 * n * b;
        for (int i = 0; i < n; ++i) {
            const double sx = y[3 * i], sy = y[3 * i + 1], sz = y[3 * i + 2];
            const std::complex<double> rad = sx * ub[3 * i] + sy * ub[3 * i + 1] + sz * ub[3 * i + 2];
            ub[3 * i] -= rad * sx;
            ub[3 * i + 1] -= rad * sy;
            ub[3 * i + 2] -= rad * sz;
        }
    }
}

}  // namespace

OdeSystem make_bloch_tangent_system(int n, int m, double k) {
    OdeSystem sys;
    sys.dim = 3 * n + 6 * n * m;
    const std::complex<double> ep = std::polar(1.0, k * n);
    sys.rhs = [n, m, ep](double, const double* y, double* dy) {
        kernel::eom_rhs(y, dy, n);
        bloch_tangent_rhs(y, reinterpret_cast<const std::complex<double>*>(y + 3 * n),
                          reinterpret_cast<std::complex<double>*>(dy + 3 * n), n, m, ep);
    };
    sys.post_step = [n, m](double* y) { project_tangent_blocks(y, n, m); };
    return sys;
}

OdeSystem make_real_tangent_system(int n) {
    OdeSystem sys;
    sys.dim = 6 * n;
    sys.rhs = [n](double, const double* y, double* dy) {
        kernel::eom_rhs(y, dy, n);
        const double* s = y;
        const double* u = y + 3 * n;
        double* du = dy + 3 * n;
        for (int i = 0; i < n; ++i) {
            const int im = wrap(i - 1, n), ip = wrap(i + 1, n);
            const int im2 = wrap(i - 2, n), ip2 = wrap(i + 2, n);
            const double zm = s[3 * im + 2], zp = s[3 * ip + 2];
            const double hx = -(1.0 - zm) * (1.0 - zp);
            const double hz =
                s[3 * im] * (1.0 - s[3 * im2 + 2]) + s[3 * ip] * (1.0 - s[3 * ip2 + 2]);
            const double dhx = u[3 * im + 2] * (1.0 - zp) + (1.0 - zm) * u[3 * ip + 2];
            const double dhz = u[3 * im] * (1.0 - s[3 * im2 + 2]) - s[3 * im] * u[3 * im2 + 2] +
                               u[3 * ip] * (1.0 - s[3 * ip2 + 2]) - s[3 * ip] * u[3 * ip2 + 2];
            const double sx = s[3 * i], sy = s[3 * i + 1], sz = s[3 * i + 2];
            du[3 * i + 0] = -dhz * sy - hz * u[3 * i + 1];
            du[3 * i + 1] = dhz * sx - dhx * sz + hz * u[3 * i] - hx * u[3 * i + 2];
            du[3 * i + 2] = dhx * sy + hx * u[3 * i + 1];
        }
    };
    sys.post_step = [n](double* y) {
        kernel::normalize_sites(y, n);
        for (int i = 0; i < n; ++i) {
            const double sx = y[3 * i], sy = y[3 * i + 1], sz = y[3 * i + 2];
            double* u = y + 3 * n + 3 * i;
            const double rad = sx * u[0] + sy * u[1] + sz * u[2];
            u[0] -= rad * sx;
            u[1] -= rad * sy;
            u[2] -= rad * sz;
        }
    };
    return sys;
}

// ---------------------------------------------------------------------------
// Integration wrappers
// ---------------------------------------------------------------------------

Trajectory integrate(const SpinChain& s0, double t_end, const IntegratorSettings& settings,
                     int n_samples) {
    validate(s0);
    return run_sampled(make_spin_system(s0.size()), flatten(s0.s), t_end, settings, n_samples,
                       s0.size(), false);
}

Trajectory integrate(const UnitCell& c0, double t_end, const IntegratorSettings& settings,
                     int n_samples) {
    validate(c0);
    return run_sampled(make_spin_system(c0.size()), flatten(c0.s), t_end, settings, n_samples,
                       c0.size(), false);
}

Trajectory integrate_theta(const std::vector<double>& theta0, double t_end,
                           const IntegratorSettings& settings, int n_samples) {
    if (theta0.empty()) throw std::invalid_argument("integrate_theta: empty state");
    const int n = static_cast<int>(theta0.size());
    Eigen::VectorXd y0 = Eigen::Map<const Eigen::VectorXd>(theta0.data(), n);
    return run_sampled(make_theta_system(n), y0, t_end, settings, n_samples, n, true);
}

std::vector<CellTangent> integrate_tangent(const UnitCell& cell0, double T, double k,
                                           const std::vector<CellTangent>& initial,
                                           const IntegratorSettings& settings) {
    validate(cell0);
    if (initial.empty()) throw std::invalid_argument("integrate_tangent: no tangent vectors");
    const int n = cell0.size();
    const int m = static_cast<int>(initial.size());
    Eigen::VectorXd y0(3 * n + 6 * n * m);
    y0.head(3 * n) = flatten(cell0.s);
    for (int b = 0; b < m; ++b) {
        if (static_cast<int>(initial[static_cast<std::size_t>(b)].size()) != n)
            throw std::invalid_argument("integrate_tangent: tangent vector size mismatch");
        for (int i = 0; i < n; ++i) {
            const auto& v = initial[static_cast<std::size_t>(b)][static_cast<std::size_t>(i)];
            for (int c = 0; c < 3; ++c) {
                y0[3 * n + 6 * n * b + 6 * i + 2 * c] = v[c].real();
                y0[3 * n + 6 * n * b + 6 * i + 2 * c + 1] = v[c].imag();
            }
        }
    }
    auto sol = integrate_ode(make_bloch_tangent_system(n, m, k), y0, 0.0, T, settings);
    if (!sol.ok()) throw std::runtime_error("integrate_tangent: " + sol.message);
    std::vector<CellTangent> out(static_cast<std::size_t>(m), CellTangent(static_cast<std::size_t>(n)));
    for (int b = 0; b < m; ++b)
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < 3; ++c)
                out[static_cast<std::size_t>(b)][static_cast<std::size_t>(i)][c] =
                    std::complex<double>(sol.y_end[3 * n + 6 * n * b + 6 * i + 2 * c],
                                         sol.y_end[3 * n + 6 * n * b + 6 * i + 2 * c + 1]);
    return out;
}

// ---------------------------------------------------------------------------
// Sigma crossing detection
// ---------------------------------------------------------------------------

namespace {

double sigma_dist_flat(const Eigen::VectorXd& y) {
    const Vec3 se = y.segment<3>(0), so = y.segment<3>(3);
    return (so - rz_pi(se)).squaredNorm();
}

// d/dt sigma_distance along the flow.
double sigma_dist_rate(const Eigen::VectorXd& y) {
    Eigen::VectorXd dy(6);
    kernel::eom_rhs(y.data(), dy.data(), 2);
    const Vec3 se = y.segment<3>(0), so = y.segment<3>(3);
    const Vec3 dse = dy.segment<3>(0), dso = dy.segment<3>(3);
    return 2.0 * (so - rz_pi(se)).dot(dso - rz_pi(dse));
}

}  // namespace

CrossingResult detect_sigma_crossing(const UnitCell& cell0, double horizon,
                                     const IntegratorSettings& settings, double t_min,
                                     double accept_tol, double rise_level, double scan_dt) {
    validate(cell0);
    if (cell0.size() != 2)
        throw std::invalid_argument("detect_sigma_crossing: needs an n = 2 cell");
    if (!(horizon > 0)) throw std::invalid_argument("detect_sigma_crossing: horizon must be > 0");

    auto sol = integrate_ode(make_spin_system(2), flatten(cell0.s), 0.0, horizon, settings, true);
    if (!sol.ok()) throw std::runtime_error("detect_sigma_crossing: " + sol.message);

    CrossingResult res;
    bool risen = sigma_dist_flat(flatten(cell0.s)) > rise_level;
    double t_prev = 0.0;
    double rate_prev = sigma_dist_rate(sol.eval(0.0));
    const auto n_grid = static_cast<std::size_t>(horizon / scan_dt) + 1;
    for (std::size_t g = 1; g <= n_grid; ++g) {
        const double t = std::min(g * scan_dt, horizon);
        const Eigen::VectorXd y = sol.eval(t);
        const double d = sigma_dist_flat(y);
        if (d > rise_level) risen = true;
        const double rate = sigma_dist_rate(y);
        if (risen && rate_prev < 0.0 && rate >= 0.0 && t > t_min) {
            // Bisect the derivative sign change to locate the minimum.
            double lo = t_prev, hi = t;
            for (int it = 0; it < 80 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
                const double mid = 0.5 * (lo + hi);
                (sigma_dist_rate(sol.eval(mid)) < 0.0 ? lo : hi) = mid;
            }
            const double ts = 0.5 * (lo + hi);
            if (ts > t_min && sigma_dist_flat(sol.eval(ts)) < accept_tol) {
                // Re-integrate to the crossing for a clean state.
                auto fin = integrate_ode(make_spin_system(2), flatten(cell0.s), 0.0, ts, settings);
                if (!fin.ok()) throw std::runtime_error("detect_sigma_crossing: " + fin.message);
                res.found = true;
                res.t_star = ts;
                res.cell = UnitCell{unflatten(fin.y_end)};
                res.distance = sigma_distance(res.cell);
                return res;
            }
        }
        t_prev = t;
        rate_prev = rate;
        if (t >= horizon) break;
    }
    return res;
}

double echo_check(const UnitCell& cell0, double T, const IntegratorSettings& settings,
                  int n_samples) {
    validate(cell0);
    const int n = cell0.size();
    std::vector<double> ts = uniform_times(T, n_samples);
    std::vector<Eigen::VectorXd> fw(ts.size());
    auto sys = make_spin_system(n);
    const Eigen::VectorXd y0 = flatten(cell0.s);
    auto s1 = integrate_sampled(sys, y0, 0.0, ts, settings,
                                [&](std::size_t i, double, const Eigen::VectorXd& y) { fw[i] = y; });
    if (!s1.ok()) throw std::runtime_error("echo_check: " + s1.message);
    std::vector<double> tsb(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) tsb[i] = -ts[i];
    double dev = 0.0;
    auto s2 = integrate_sampled(sys, y0, 0.0, tsb, settings,
                                [&](std::size_t i, double, const Eigen::VectorXd& y) {
                                    const UnitCell conj = echo_conjugate(UnitCell{unflatten(y)});
                                    const Eigen::VectorXd diff = fw[i] - flatten(conj.s);
                                    for (int site = 0; site < n; ++site)
                                        dev = std::max(dev, diff.segment<3>(3 * site).norm());
                                });
    if (!s2.ok()) throw std::runtime_error("echo_check: " + s2.message);
    return dev;
}

// ---------------------------------------------------------------------------
// Benettin Lyapunov estimator
// ---------------------------------------------------------------------------

namespace {

LyapunovResult lyapunov_impl(const std::vector<Vec3>& sites, double horizon, double renorm_dt,
                             const IntegratorSettings& settings, std::uint64_t seed,
                             double discard_fraction) {
    const int n = static_cast<int>(sites.size());
    if (!(horizon > 0) || !(renorm_dt > 0) || renorm_dt >= horizon)
        throw std::invalid_argument("lyapunov_max: need 0 < renorm_dt < horizon");

    auto sys = make_real_tangent_system(n);
    Eigen::VectorXd y(6 * n);
    y.head(3 * n) = flatten(sites);

    // Random unit tangent vector in the product of tangent planes.
    Rng rng(seed);
    for (int i = 0; i < n; ++i) {
        const Vec3 s = y.segment<3>(3 * i);
        Vec3 g(rng.gaussian(), rng.gaussian(), rng.gaussian());
        g -= g.dot(s) * s;
        y.segment<3>(3 * n + 3 * i) = g;
    }
    y.tail(3 * n).normalize();

    LyapunovResult res;
    const int n_windows = static_cast<int>(std::floor(horizon / renorm_dt));
    res.stretch_log.reserve(static_cast<std::size_t>(n_windows));
    double t = 0.0;
    for (int w = 0; w < n_windows; ++w) {
        auto sol = integrate_ode(sys, y, t, t + renorm_dt, settings);
        if (!sol.ok()) throw std::runtime_error("lyapunov_max: " + sol.message);
        t = sol.t_end;
        y = sol.y_end;
        const double r = y.tail(3 * n).norm();
        res.stretch_log.push_back(std::log(r));
        y.tail(3 * n) /= r;
    }
    res.n_renorms = n_windows;

    const auto discard = static_cast<std::size_t>(discard_fraction * n_windows);
    const auto kept = static_cast<std::size_t>(n_windows) - discard;
    if (kept < 10) throw std::invalid_argument("lyapunov_max: horizon too short");
    double mean = 0.0;
    for (std::size_t i = discard; i < res.stretch_log.size(); ++i) mean += res.stretch_log[i];
    mean /= static_cast<double>(kept);
    res.lambda = mean / renorm_dt;

    // Block averaging for the standard error (10 blocks).
    const std::size_t n_blocks = 10;
    const std::size_t block = kept / n_blocks;
    std::vector<double> bm;
    for (std::size_t b = 0; b + 1 <= n_blocks && block > 0; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < block; ++i) s += res.stretch_log[discard + b * block + i];
        bm.push_back(s / static_cast<double>(block) / renorm_dt);
    }
    if (bm.size() >= 2) {
        double bmean = 0.0;
        for (double v : bm) bmean += v;
        bmean /= static_cast<double>(bm.size());
        double var = 0.0;
        for (double v : bm) var += (v - bmean) * (v - bmean);
        var /= static_cast<double>(bm.size() - 1);
        res.stderr_ = std::sqrt(var / static_cast<double>(bm.size()));
    }
    return res;
}

}  // namespace

LyapunovResult lyapunov_max(const SpinChain& s0, double horizon, double renorm_dt,
                            const IntegratorSettings& settings, std::uint64_t seed,
                            double discard_fraction) {
    validate(s0);
    return lyapunov_impl(s0.s, horizon, renorm_dt, settings, seed, discard_fraction);
}

LyapunovResult lyapunov_max(const UnitCell& c0, double horizon, double renorm_dt,
                            const IntegratorSettings& settings, std::uint64_t seed,
                            double discard_fraction) {
    validate(c0);
    return lyapunov_impl(c0.s, horizon, renorm_dt, settings, seed, discard_fraction);
}

}  // namespace pxplab
