// Gaussian tangent-plane ensembles around periodic reference trajectories:
// deviation growth curves, the scaling collapse Phi(eps t / T), exponential
// and linear fits, and coherence times.
#pragma once

#include "pxplab/orbits.hpp"
#include "pxplab/rng.hpp"
#include "pxplab/spin_core.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pxplab {

struct PerturbationSpec {
    double epsilon = 0.01;  // per-site RMS displacement, sqrt(<|delta S_i|^2>)
    std::uint64_t seed = 0;
};

// Displaces every site by an independent Gaussian in its tangent plane (two
// components of variance epsilon^2 / 2 each) and renormalizes.  epsilon = 0
// returns the reference exactly.
SpinChain sample_perturbation(const SpinChain& reference, const PerturbationSpec& spec);
SpinChain sample_perturbation(const SpinChain& reference, double epsilon, Rng& rng);

struct GrowthSettings {
    int n_sites = 100;           // multiple of the cell size, >= 2 cells
    double epsilon = 0.01;
    int n_realizations = 100;    // >= 20
    double horizon_periods = 20.0;
    int samples_per_period = 20;
    std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
    IntegratorSettings integrator;
};

struct GrowthSeries {
    double epsilon = 0.0;
    int n_sites = 0;
    int n_realizations = 0;  // realizations that integrated successfully
    int n_failed = 0;
    double period = 0.0;  // reference period T
    std::string reference;
    std::vector<double> t;           // sample times, t[0] = 0
    std::vector<double> mean_sq;     // <delta S^2(t)> over realizations
    std::vector<double> mean_ratio;  // mean_sq / mean_sq[0]; [0] = 1 exactly
    std::vector<double> stderr_;     // standard error of mean_ratio
    double max_energy_drift = 0.0;   // worst realization, worst sample
};

// Evolves n_realizations perturbed copies of the orbit tiled to n_sites and
// measures delta S^2(t) = sum_i |S_i(t) - S_ref_i(t)|^2 against the
// synchronously evolved unperturbed reference (the orbit itself, evaluated
// periodically).  Realizations run in parallel with per-realization seeds
// derived from (seed, index); the reduction is in fixed index order, so the
// result is independent of the worker count.
GrowthSeries growth_series(const PeriodicOrbit& orbit, const GrowthSettings& settings,
                           int workers);

// ---------------------------------------------------------------------------
// Scaling collapse
// ---------------------------------------------------------------------------

struct CollapseCurve {
    double epsilon = 0.0;
    std::vector<double> x;    // eps * t / T
    std::vector<double> phi;  // mean_ratio
};

struct ExponentialFit {
    double rate = 0.0;       // kappa
    double amplitude = 0.0;  // Phi_0 = exp(intercept)
    double r2 = 0.0;
    int n_points = 0;
    double x_lo = 0.0, x_hi = 0.0;  // window actually used
};

struct CollapseResult {
    std::vector<CollapseCurve> curves;  // resampled onto the common grid
    std::vector<double> x;              // common grid
    double x_min = 0.0, x_max = 0.0;
    double max_gap = 0.0;        // max pairwise |ln phi| gap over the grid
    double dynamic_range = 0.0;  // spread of ln phi over grid and curves
    double residual = 0.0;       // max_gap / dynamic_range (NaN if degenerate)
    bool degenerate = false;     // fewer than 2 distinct epsilons
    ExponentialFit fit;          // filled by fit_exponential
};

// Resamples every series onto a common x = eps t / T grid (log-linear
// interpolation) and measures how far the curves are from coinciding.  The
// window defaults to the intersection of the series' x ranges; pass x_lo/x_hi
// to restrict it.  Throws if the requested window is not covered by all
// series.
CollapseResult scaling_collapse(const std::vector<GrowthSeries>& series, double x_lo = 0.0,
                                double x_hi = 0.0, int n_grid = 200);

// Pooled least squares of ln phi versus x on [x_min, saturation], where
// saturation cuts each curve at phi * eps^2 = saturation_level (deviation
// density 0.1 per site by default).  Fills collapse.fit and returns it.
ExponentialFit fit_exponential(CollapseResult& collapse, double x_min = 0.3,
                               double saturation_level = 0.1);

// Plain exponential fit of samples (x, y): ln y = ln amplitude + rate * x
// over x in [x_lo, x_hi].  Used by the collapse fitter and directly by rate
// measurements on single curves.
ExponentialFit fit_exponential_window(const std::vector<double>& x, const std::vector<double>& y,
                                      double x_lo, double x_hi);

// Least-squares line a + b x; returns (a, b, r2).
struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double r2 = 0.0;
    int n_points = 0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// ---------------------------------------------------------------------------
// Coherence time
// ---------------------------------------------------------------------------

struct CoherenceResult {
    bool reached = false;
    double t_coh = 0.0;  // first t with mean_sq / n_sites >= threshold
};

CoherenceResult coherence_time(const GrowthSeries& series, double threshold = 0.1);

}  // namespace pxplab
