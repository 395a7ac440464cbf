#include "pxplab/fluctuations.hpp"

#include "pxplab/dynamics.hpp"
#include "pxplab/stability.hpp"
#include "pxplab/task_pool.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace pxplab {

namespace {

double safe_log(double v) {
    if (!(v > 0)) throw std::invalid_argument("fit_exponential: non-positive sample");
    return std::log(v);
}

LineFit line_through(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2) throw std::invalid_argument("fit_line: needs at least two points");
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / static_cast<double>(n), my = sy / static_cast<double>(n);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0) throw std::invalid_argument("fit_line: degenerate abscissa");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    f.n_points = static_cast<int>(n);
    return f;
}

}  // namespace

SpinChain sample_perturbation(const SpinChain& reference, double epsilon, Rng& rng) {
    if (!(epsilon >= 0) || epsilon >= 0.3)
        throw std::invalid_argument("sample_perturbation: epsilon outside [0, 0.3)");
    SpinChain out = reference;
    if (epsilon == 0) return out;
    const auto frame = tangent_frame(reference.s);
    const double sigma = epsilon / std::sqrt(2.0);
    for (std::size_t i = 0; i < out.s.size(); ++i) {
        const double a = sigma * rng.gaussian();
        const double b = sigma * rng.gaussian();
        out.s[i] = (out.s[i] + a * frame.e1[i] + b * frame.e2[i]).normalized();
    }
    return out;
}

SpinChain sample_perturbation(const SpinChain& reference, const PerturbationSpec& spec) {
    Rng rng(spec.seed);
    return sample_perturbation(reference, spec.epsilon, rng);
}

GrowthSeries growth_series(const PeriodicOrbit& orbit, const GrowthSettings& settings,
                           int workers) {
    const int n = orbit.cell0.size();
    const int N = settings.n_sites;
    if (N < 2 * n || N % n != 0)
        throw std::invalid_argument("growth_series: n_sites must be a multiple of the cell size, at least two cells");
    if (settings.n_realizations < 20)
        throw std::invalid_argument("growth_series: needs at least 20 realizations");
    if (!(settings.horizon_periods > 0) || settings.samples_per_period < 1)
        throw std::invalid_argument("growth_series: invalid sampling request");

    const double T = orbit.period;
    const std::size_t n_samples =
        static_cast<std::size_t>(std::llround(settings.horizon_periods * settings.samples_per_period));
    std::vector<double> times(n_samples + 1);
    for (std::size_t j = 0; j <= n_samples; ++j)
        times[j] = T * static_cast<double>(j) / settings.samples_per_period;

    // Reference: the orbit's own cell evolved over one period with dense
    // output, evaluated mod T and tiled.  Precomputed at the sample times.
    const auto cell_sys = make_spin_system(n);
    auto ref_sol = integrate_ode(cell_sys, flatten(orbit.cell0.s), 0.0, T, settings.integrator, true);
    if (!ref_sol.ok()) throw std::runtime_error("growth_series: reference integration failed: " + ref_sol.message);
    std::vector<Eigen::VectorXd> ref(times.size());
    for (std::size_t j = 0; j < times.size(); ++j) {
        double tm = std::fmod(times[j], T);
        Eigen::VectorXd cell = ref_sol.eval(tm);
        kernel::normalize_sites(cell.data(), n);
        ref[j] = cell;
    }

    const auto chain_sys = make_spin_system(N);
    SpinChain base;
    base.s.resize(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) base.s[static_cast<std::size_t>(i)] = orbit.cell0[i % n];

    struct Slot {
        std::vector<double> sq;
        double energy_drift = 0.0;
        bool ok = false;
    };
    std::vector<Slot> slots(static_cast<std::size_t>(settings.n_realizations));

    parallel_for(slots.size(), workers, [&](std::size_t r) {
        Rng rng(task_seed(settings.seed, static_cast<std::uint64_t>(r)));
        const SpinChain s0 = sample_perturbation(base, settings.epsilon, rng);
        Slot& slot = slots[r];
        slot.sq.assign(times.size(), 0.0);
        const Eigen::VectorXd y0 = flatten(s0.s);
        const double e0 = kernel::energy(y0.data(), N);
        double drift = 0.0;
        auto sol = integrate_sampled(
            chain_sys, y0, 0.0, times, settings.integrator,
            [&](std::size_t j, double, const Eigen::VectorXd& y) {
                double sq = 0.0;
                for (int i = 0; i < N; ++i) {
                    const double dx = y[3 * i] - ref[j][3 * (i % n)];
                    const double dy = y[3 * i + 1] - ref[j][3 * (i % n) + 1];
                    const double dz = y[3 * i + 2] - ref[j][3 * (i % n) + 2];
                    sq += dx * dx + dy * dy + dz * dz;
                }
                slot.sq[j] = sq;
                drift = std::max(drift, std::abs(kernel::energy(y.data(), N) - e0));
            });
        slot.energy_drift = drift;
        slot.ok = sol.ok();
    });

    GrowthSeries gs;
    gs.epsilon = settings.epsilon;
    gs.n_sites = N;
    gs.period = T;
    gs.t = times;
    {
        char buf[160];
        std::snprintf(buf, sizeof buf, "tiled-orbit n=%d theta_e=%.6f phi_e=%.6f T=%.6f", n,
                      orbit.coords.theta_e, orbit.coords.phi_e, T);
        gs.reference = buf;
    }
    for (const auto& slot : slots)
        if (!slot.ok) ++gs.n_failed;
    gs.n_realizations = settings.n_realizations - gs.n_failed;
    if (gs.n_realizations < 20)
        throw std::runtime_error("growth_series: too many failed realizations (" +
                                 std::to_string(gs.n_failed) + ")");

    const std::size_t m = times.size();
    gs.mean_sq.assign(m, 0.0);
    for (const auto& slot : slots) {
        if (!slot.ok) continue;
        gs.max_energy_drift = std::max(gs.max_energy_drift, slot.energy_drift);
        for (std::size_t j = 0; j < m; ++j) gs.mean_sq[j] += slot.sq[j];
    }
    for (std::size_t j = 0; j < m; ++j) gs.mean_sq[j] /= gs.n_realizations;

    gs.mean_ratio.resize(m);
    gs.stderr_.assign(m, 0.0);
    const double sq0 = gs.mean_sq[0];
    if (!(sq0 > 0)) throw std::runtime_error("growth_series: vanishing initial deviation");
    for (std::size_t j = 0; j < m; ++j) {
        gs.mean_ratio[j] = gs.mean_sq[j] / sq0;
        double var = 0.0;
        for (const auto& slot : slots)
            if (slot.ok) {
                const double d = slot.sq[j] / sq0 - gs.mean_ratio[j];
                var += d * d;
            }
        if (gs.n_realizations > 1)
            gs.stderr_[j] = std::sqrt(var / (gs.n_realizations - 1.0) / gs.n_realizations);
    }
    gs.mean_ratio[0] = 1.0;
    return gs;
}

// ---------------------------------------------------------------------------
// Scaling collapse
// ---------------------------------------------------------------------------

CollapseResult scaling_collapse(const std::vector<GrowthSeries>& series, double x_lo, double x_hi,
                                int n_grid) {
    if (series.empty()) throw std::invalid_argument("scaling_collapse: no series");
    if (n_grid < 2) throw std::invalid_argument("scaling_collapse: n_grid must be >= 2");

    CollapseResult cr;
    double lo = 0.0, hi = 1e300;
    std::vector<std::vector<double>> xs(series.size());
    for (std::size_t s = 0; s < series.size(); ++s) {
        const auto& gs = series[s];
        if (gs.t.size() < 2) throw std::invalid_argument("scaling_collapse: series too short");
        auto& x = xs[s];
        x.resize(gs.t.size());
        for (std::size_t j = 0; j < gs.t.size(); ++j) x[j] = gs.epsilon * gs.t[j] / gs.period;
        lo = std::max(lo, x[1]);  // skip x = 0 so the log interpolation stays clean
        hi = std::min(hi, x.back());
    }
    if (x_lo > 0) lo = x_lo;
    if (x_hi > 0) hi = x_hi;
    for (std::size_t s = 0; s < series.size(); ++s)
        if (lo < xs[s][1] - 1e-12 || hi > xs[s].back() + 1e-12)
            throw std::invalid_argument("scaling_collapse: requested window not covered by all series");
    if (!(hi > lo)) throw std::invalid_argument("scaling_collapse: empty common window");

    cr.x_min = lo;
    cr.x_max = hi;
    cr.x.resize(static_cast<std::size_t>(n_grid));
    for (int i = 0; i < n_grid; ++i)
        cr.x[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n_grid - 1.0);

    std::vector<double> distinct;
    for (const auto& gs : series) distinct.push_back(gs.epsilon);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    cr.degenerate = distinct.size() < 2;

    for (std::size_t s = 0; s < series.size(); ++s) {
        const auto& gs = series[s];
        CollapseCurve c;
        c.epsilon = gs.epsilon;
        c.x = cr.x;
        c.phi.resize(cr.x.size());
        std::size_t j = 1;
        for (std::size_t i = 0; i < cr.x.size(); ++i) {
            const double x = cr.x[i];
            while (j + 1 < xs[s].size() && xs[s][j + 1] < x) ++j;
            const std::size_t j0 = j, j1 = std::min(j + 1, xs[s].size() - 1);
            double ln;
            if (j1 == j0) {
                ln = safe_log(gs.mean_ratio[j0]);
            } else {
                const double w = (x - xs[s][j0]) / (xs[s][j1] - xs[s][j0]);
                ln = (1 - w) * safe_log(gs.mean_ratio[j0]) + w * safe_log(gs.mean_ratio[j1]);
            }
            c.phi[i] = std::exp(ln);
        }
        cr.curves.push_back(std::move(c));
    }

    double ln_min = 1e300, ln_max = -1e300;
    for (const auto& c : cr.curves)
        for (double p : c.phi) {
            ln_min = std::min(ln_min, std::log(p));
            ln_max = std::max(ln_max, std::log(p));
        }
    cr.dynamic_range = ln_max - ln_min;
    for (std::size_t a = 0; a < cr.curves.size(); ++a)
        for (std::size_t b = a + 1; b < cr.curves.size(); ++b)
            for (std::size_t i = 0; i < cr.x.size(); ++i)
                cr.max_gap = std::max(
                    cr.max_gap, std::abs(std::log(cr.curves[a].phi[i]) - std::log(cr.curves[b].phi[i])));
    cr.residual = cr.degenerate ? std::numeric_limits<double>::quiet_NaN()
                                : cr.max_gap / std::max(cr.dynamic_range, 1e-300);
    return cr;
}

ExponentialFit fit_exponential_window(const std::vector<double>& x, const std::vector<double>& y,
                                      double x_lo, double x_hi) {
    std::vector<double> fx, fy;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] >= x_lo && x[i] <= x_hi) {
            fx.push_back(x[i]);
            fy.push_back(safe_log(y[i]));
        }
    if (fx.size() < 2) throw std::invalid_argument("fit_exponential: window holds fewer than two samples");
    const LineFit lf = line_through(fx, fy);
    ExponentialFit f;
    f.rate = lf.slope;
    f.amplitude = std::exp(lf.intercept);
    f.r2 = lf.r2;
    f.n_points = lf.n_points;
    f.x_lo = fx.front();
    f.x_hi = fx.back();
    return f;
}

ExponentialFit fit_exponential(CollapseResult& collapse, double x_min, double saturation_level) {
    std::vector<double> fx, fy;
    for (const auto& c : collapse.curves) {
        const double phi_cap = saturation_level / (c.epsilon * c.epsilon);
        for (std::size_t i = 0; i < c.x.size(); ++i)
            if (c.x[i] >= x_min && c.phi[i] <= phi_cap) {
                fx.push_back(c.x[i]);
                fy.push_back(safe_log(c.phi[i]));
            }
    }
    if (fx.size() < 4) throw std::invalid_argument("fit_exponential: collapse window too short");
    const LineFit lf = line_through(fx, fy);
    ExponentialFit f;
    f.rate = lf.slope;
    f.amplitude = std::exp(lf.intercept);
    f.r2 = lf.r2;
    f.n_points = lf.n_points;
    f.x_lo = *std::min_element(fx.begin(), fx.end());
    f.x_hi = *std::max_element(fx.begin(), fx.end());
    collapse.fit = f;
    return f;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
    return line_through(x, y);
}

CoherenceResult coherence_time(const GrowthSeries& series, double threshold) {
    CoherenceResult res;
    if (threshold <= 0) {
        res.reached = true;
        res.t_coh = 0.0;
        return res;
    }
    const double level = threshold * series.n_sites;
    for (std::size_t j = 0; j < series.mean_sq.size(); ++j) {
        if (series.mean_sq[j] >= level) {
            if (j == 0) {
                res.t_coh = 0.0;
            } else {
                const double f = (level - series.mean_sq[j - 1]) /
                                 (series.mean_sq[j] - series.mean_sq[j - 1]);
                res.t_coh = series.t[j - 1] + f * (series.t[j] - series.t[j - 1]);
            }
            res.reached = true;
            return res;
        }
    }
    return res;
}

}  // namespace pxplab
