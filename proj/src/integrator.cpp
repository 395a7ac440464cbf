#include "pxplab/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pxplab {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
// Error coefficients: y5 - y4.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense-output coefficients.
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

struct Stepper {
    const OdeSystem& sys;
    const IntegratorSettings& st;
    Eigen::VectorXd k1, k2, k3, k4, k5, k6, k7, ytmp, yerr;

    explicit Stepper(const OdeSystem& s, const IntegratorSettings& settings)
        : sys(s), st(settings) {
        const int d = s.dim;
        for (auto* v : {&k1, &k2, &k3, &k4, &k5, &k6, &k7, &ytmp, &yerr}) v->resize(d);
    }

    // One trial step from (t, y) with k1 already holding f(t, y).
    // Writes the candidate solution into ynew and returns the scaled error norm.
    double trial(double t, const Eigen::VectorXd& y, double h, Eigen::VectorXd& ynew) {
        ytmp = y + h * (a21 * k1);
        sys.rhs(t + c2 * h, ytmp.data(), k2.data());
        ytmp = y + h * (a31 * k1 + a32 * k2);
        sys.rhs(t + c3 * h, ytmp.data(), k3.data());
        ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        sys.rhs(t + c4 * h, ytmp.data(), k4.data());
        ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        sys.rhs(t + c5 * h, ytmp.data(), k5.data());
        ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        sys.rhs(t + h, ytmp.data(), k6.data());
        ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        sys.rhs(t + h, ynew.data(), k7.data());  // FSAL
        yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double sum = 0.0;
        for (int i = 0; i < sys.dim; ++i) {
            const double sc = st.atol + st.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            const double q = yerr[i] / sc;
            sum += q * q;
        }
        return std::sqrt(sum / sys.dim);
    }

    DenseSegment dense(double t, double h, const Eigen::VectorXd& y, const Eigen::VectorXd& ynew) {
        DenseSegment seg;
        seg.t0 = t;
        seg.h = h;
        seg.r1 = y;
        seg.r2 = ynew - y;
        seg.r3 = h * k1 - seg.r2;
        seg.r4 = seg.r2 - h * k7 - seg.r3;
        seg.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        return seg;
    }
};

double initial_step(const OdeSystem& sys, const Eigen::VectorXd& y0, double t0, double dir,
                    const IntegratorSettings& st, const Eigen::VectorXd& f0) {
    // Hairer-style heuristic based on |y|, |f|, and one explicit Euler probe.
    const int d = sys.dim;
    double d0 = 0, dd1 = 0;
    for (int i = 0; i < d; ++i) {
        const double sc = st.atol + st.rtol * std::abs(y0[i]);
        d0 += (y0[i] / sc) * (y0[i] / sc);
        dd1 += (f0[i] / sc) * (f0[i] / sc);
    }
    d0 = std::sqrt(d0 / d);
    dd1 = std::sqrt(dd1 / d);
    double h0 = (d0 < 1e-5 || dd1 < 1e-5) ? 1e-6 : 0.01 * d0 / dd1;
    Eigen::VectorXd y1 = y0 + dir * h0 * f0;
    Eigen::VectorXd f1(d);
    sys.rhs(t0 + dir * h0, y1.data(), f1.data());
    double d2 = 0;
    for (int i = 0; i < d; ++i) {
        const double sc = st.atol + st.rtol * std::abs(y0[i]);
        const double q = (f1[i] - f0[i]) / sc;
        d2 += q * q;
    }
    d2 = std::sqrt(d2 / d) / h0;
    const double dmax = std::max(dd1, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
    return std::min(100.0 * h0, h1);
}

// Shared driver.  If on_sample is non-null, steps land exactly on the sorted
// sample times; otherwise integrates straight to t1.
OdeSolution drive(const OdeSystem& sys, const Eigen::VectorXd& y0, double t0, double t1,
                  const IntegratorSettings& st, bool store_dense,
                  const std::vector<double>* sample_times,
                  const std::function<void(std::size_t, double, const Eigen::VectorXd&)>* on_sample) {
    if (sys.dim <= 0 || y0.size() != sys.dim)
        throw std::invalid_argument("integrate_ode: state dimension mismatch");
    if (!(st.rtol > 0) || !(st.atol > 0))
        throw std::invalid_argument("integrate_ode: tolerances must be positive");

    OdeSolution sol;
    sol.y_end = y0;
    sol.t_end = t0;
    if (t1 == t0 && !sample_times) return sol;

    const double dir = (t1 >= t0) ? 1.0 : -1.0;
    if (sample_times) {
        for (std::size_t i = 0; i < sample_times->size(); ++i) {
            const double ts = (*sample_times)[i];
            if (dir * (ts - t0) < -1e-14)
                throw std::invalid_argument("integrate_sampled: sample times must lie ahead of t0");
            if (i > 0 && dir * (ts - (*sample_times)[i - 1]) < 0)
                throw std::invalid_argument("integrate_sampled: sample times must be monotone");
        }
        if (sample_times->empty()) return sol;
        t1 = sample_times->back();
    }

    Stepper step(sys, st);
    Eigen::VectorXd y = y0, ynew(sys.dim);
    double t = t0;
    sys.rhs(t, y.data(), step.k1.data());

    double h = st.first_step > 0 ? st.first_step : initial_step(sys, y, t, dir, st, step.k1);
    if (st.max_step > 0) h = std::min(h, st.max_step);
    h = std::min(h, std::abs(t1 - t0));
    h *= dir;

    std::size_t next_sample = 0;
    // Emit any samples that coincide with t0.
    if (sample_times && on_sample) {
        while (next_sample < sample_times->size() &&
               dir * ((*sample_times)[next_sample] - t) <= 1e-14) {
            (*on_sample)(next_sample, t, y);
            ++next_sample;
        }
        if (next_sample >= sample_times->size()) {
            sol.t_end = t;
            sol.y_end = y;
            return sol;
        }
    }

    int steps_since_renorm = 0;
    const double hmin_floor = 1e-14 * std::max({std::abs(t0), std::abs(t1), 1.0});

    while (dir * (t1 - t) > 1e-14 * std::max(1.0, std::abs(t))) {
        if (sol.n_accepted + sol.n_rejected >= st.max_steps) {
            sol.status = IntegrationStatus::max_steps_exceeded;
            sol.message = "step budget exhausted at t = " + std::to_string(t);
            break;
        }
        double target = t1;
        if (sample_times) target = (*sample_times)[next_sample];
        if (dir * (t + h - target) > 0) h = target - t;

        const double err = step.trial(t, y, h, ynew);
        if (err <= 1.0) {
            // Accept.
            if (store_dense) sol.dense.push_back(step.dense(t, h, y, ynew));
            t += h;
            y.swap(ynew);
            step.k1.swap(step.k7);  // FSAL
            ++sol.n_accepted;

            bool renormalized = false;
            if (sys.post_step && st.renormalize_every > 0 &&
                ++steps_since_renorm >= st.renormalize_every) {
                sys.post_step(y.data());
                steps_since_renorm = 0;
                renormalized = true;
            }

            const bool at_target = std::abs(t - target) <= 1e-14 * std::max(1.0, std::abs(t));
            if (sample_times && at_target) {
                while (next_sample < sample_times->size() &&
                       dir * ((*sample_times)[next_sample] - t) <= 1e-14) {
                    (*on_sample)(next_sample, t, y);
                    ++next_sample;
                }
                if (next_sample >= sample_times->size()) break;
            }
            if (renormalized) sys.rhs(t, y.data(), step.k1.data());  // refresh FSAL derivative

            double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
            fac = std::clamp(fac, 0.2, 10.0);
            double hnew = std::abs(h) * fac;
            if (st.max_step > 0) hnew = std::min(hnew, st.max_step);
            h = dir * hnew;
        } else {
            ++sol.n_rejected;
            const double fac = std::max(0.9 * std::pow(err, -0.2), 0.1);
            h *= fac;
            if (std::abs(h) < hmin_floor) {
                sol.status = IntegrationStatus::step_underflow;
                sol.message = "step size underflow at t = " + std::to_string(t);
                break;
            }
        }
    }

    sol.t_end = t;
    sol.y_end = y;
    return sol;
}

}  // namespace

Eigen::VectorXd OdeSolution::eval(double t) const {
    if (dense.empty()) throw std::logic_error("OdeSolution::eval: no dense output stored");
    // Binary search for the segment containing t (segments are time-ordered).
    const double dir = dense.front().h >= 0 ? 1.0 : -1.0;
    std::size_t lo = 0, hi = dense.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (dir * (t - (dense[mid].t0 + dense[mid].h)) > 0)
            lo = mid + 1;
        else
            hi = mid;
    }
    return dense[lo].eval(t);
}

OdeSolution integrate_ode(const OdeSystem& sys, const Eigen::VectorXd& y0, double t0, double t1,
                          const IntegratorSettings& settings, bool store_dense) {
    return drive(sys, y0, t0, t1, settings, store_dense, nullptr, nullptr);
}

OdeSolution integrate_sampled(const OdeSystem& sys, const Eigen::VectorXd& y0, double t0,
                              const std::vector<double>& sample_times,
                              const IntegratorSettings& settings,
                              const std::function<void(std::size_t, double, const Eigen::VectorXd&)>& on_sample) {
    return drive(sys, y0, t0, sample_times.empty() ? t0 : sample_times.back(), settings, false,
                 &sample_times, &on_sample);
}

}  // namespace pxplab
