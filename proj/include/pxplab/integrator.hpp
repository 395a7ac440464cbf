// Adaptive embedded Runge-Kutta 5(4) (Dormand-Prince) with dense output.
//
// Shared by every flow in the project: full chains, unit cells, reduced-angle
// systems, and the combined base-plus-tangent systems used for stability
// analysis.  A post-step hook lets spin systems renormalize site norms after
// accepted steps without the integrator knowing about spin layouts.
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace pxplab {

struct IntegratorSettings {
    double rtol = 1e-10;
    double atol = 1e-12;
    // Accepted steps between applications of the post-step hook; 0 disables.
    int renormalize_every = 1;
    double max_step = 0.0;    // 0 = unlimited
    double first_step = 0.0;  // 0 = automatic
    std::uint64_t max_steps = 50'000'000;
};

enum class IntegrationStatus { ok, step_underflow, max_steps_exceeded };

// RHS writes dy/dt into dydt (both length dim).  post_step may be empty.
struct OdeSystem {
    int dim = 0;
    std::function<void(double t, const double* y, double* dydt)> rhs;
    std::function<void(double* y)> post_step;
};

// Quartic Hermite-type interpolant for one accepted step, valid on [t0, t0+h]
// (h may be negative).  Coefficients follow the classic DOPRI5 dense output.
struct DenseSegment {
    double t0 = 0.0;
    double h = 0.0;
    Eigen::VectorXd r1, r2, r3, r4, r5;

    Eigen::VectorXd eval(double t) const {
        const double s = (t - t0) / h;
        const double s1 = 1.0 - s;
        return r1 + s * (r2 + s1 * (r3 + s * (r4 + s1 * r5)));
    }
};

struct OdeSolution {
    IntegrationStatus status = IntegrationStatus::ok;
    std::string message;
    double t_end = 0.0;  // time actually reached
    Eigen::VectorXd y_end;
    std::uint64_t n_accepted = 0;
    std::uint64_t n_rejected = 0;
    // Dense segments in step order (populated only when requested).
    std::vector<DenseSegment> dense;

    bool ok() const { return status == IntegrationStatus::ok; }
    // Evaluate the dense interpolant; valid between t_start and t_end.
    Eigen::VectorXd eval(double t) const;
};

// Integrates from (t0, y0) to t1 (t1 < t0 integrates backwards).
OdeSolution integrate_ode(const OdeSystem& sys, const Eigen::VectorXd& y0, double t0, double t1,
                          const IntegratorSettings& settings, bool store_dense = false);

// Integrates once, invoking on_sample(index, t, y) at every requested time.
// Sample times must be monotone in the direction of integration, and steps
// land exactly on them.  Returns the solution at the final sample time.
OdeSolution integrate_sampled(const OdeSystem& sys, const Eigen::VectorXd& y0, double t0,
                              const std::vector<double>& sample_times,
                              const IntegratorSettings& settings,
                              const std::function<void(std::size_t, double, const Eigen::VectorXd&)>& on_sample);

}  // namespace pxplab
