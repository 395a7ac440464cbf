#include "pxplab/orbits.hpp"
#include "pxplab/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>

using namespace pxplab;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kThetaStar = 2.5131573711557325;
constexpr double kTZ2 = 2.571476243915939;
constexpr double kOmegaZ2 = 2.443415653574664;

}  // namespace

TEST_SUITE("orbits") {

TEST_CASE("z2 analytics against frozen values") {
    CHECK(z2_sigma_theta() == doctest::Approx(kThetaStar).epsilon(1e-13));
    CHECK(z2_period_quadrature() == doctest::Approx(kTZ2).epsilon(1e-12));
    CHECK(2 * kPi / z2_period_quadrature() == doctest::Approx(kOmegaZ2).epsilon(1e-12));
    // The crossing angle solves 2 G(theta) = 3 pi / 2.
    CHECK(2 * z2_first_integral(z2_sigma_theta()) == doctest::Approx(1.5 * kPi).epsilon(1e-13));
}

TEST_CASE("first integral formula") {
    for (double th : {0.3, 1.1, 2.0, 2.9}) {
        const double expect = 1.5 * th - 2 * std::sin(th) + 0.25 * std::sin(2 * th);
        CHECK(z2_first_integral(th) == doctest::Approx(expect).epsilon(1e-15));
    }
    CHECK(z2_first_integral(0.0) == 0.0);
    // Derivative check: (G(th + e) - G(th - e)) / 2e = (1 - cos th)^2.
    const double th = 1.7, e = 1e-6;
    const double fd = (z2_first_integral(th + e) - z2_first_integral(th - e)) / (2 * e);
    CHECK(fd == doctest::Approx(std::pow(1 - std::cos(th), 2)).epsilon(1e-8));
}

TEST_CASE("z2 orbit from its Sigma point") {
    OrbitSettings st;
    const auto res = find_orbit_from_sigma({kThetaStar, kPi / 2}, st);
    REQUIRE(res.ok());
    const auto& o = res.orbit;
    CHECK(o.period == doctest::Approx(kTZ2).epsilon(1e-9));
    CHECK(o.t_star == doctest::Approx(kTZ2 / 2).epsilon(1e-9));
    CHECK(o.sigma_residual < 1e-10);
    CHECK(o.closure_residual < 1e-8);
    CHECK(o.coords.theta_e == doctest::Approx(kThetaStar).epsilon(1e-12));
    CHECK(o.coords.phi_e == doctest::Approx(kPi / 2).epsilon(1e-12));
    REQUIRE(o.samples.t.size() == static_cast<std::size_t>(st.n_samples) + 1);
    CHECK(o.samples.t.front() == 0.0);
    CHECK(o.samples.t.back() == doctest::Approx(o.period).epsilon(1e-12));
}

TEST_CASE("generic orbit closes through the echo") {
    OrbitSettings st;
    const auto res = find_orbit_from_sigma({2.2, 2.2}, st);
    REQUIRE(res.ok());
    const auto& o = res.orbit;
    CHECK(o.period == doctest::Approx(2 * o.t_star).epsilon(1e-12));
    CHECK(o.closure_residual < 1e-8);
    // Energy vanishes along the whole orbit (it starts on Sigma).
    double emax = 0.0;
    for (const auto& y : o.samples.y) emax = std::max(emax, std::abs(kernel::energy(y.data(), 2)));
    CHECK(emax < 1e-10);
    // Tighter integration keeps the closure small.
    IntegratorSettings tight;
    tight.rtol = 1e-12;
    tight.atol = 1e-14;
    CHECK(closure_residual(o, tight) < 1e-8);
}

TEST_CASE("period is continuous in the Sigma coordinates") {
    OrbitSettings st;
    const auto a = find_orbit_from_sigma({2.2, 2.2}, st);
    const auto b = find_orbit_from_sigma({2.2 + 1e-4, 2.2}, st);
    const auto c = find_orbit_from_sigma({2.2, 2.2 + 1e-4}, st);
    REQUIRE(a.ok());
    REQUIRE(b.ok());
    REQUIRE(c.ok());
    CHECK(std::abs(b.orbit.period - a.orbit.period) < 5e-4);
    CHECK(std::abs(c.orbit.period - a.orbit.period) < 5e-4);
}

TEST_CASE("z2 is a local period minimum on Sigma") {
    OrbitSettings st;
    const auto t0 = find_orbit_from_sigma({kThetaStar, kPi / 2}, st);
    REQUIRE(t0.ok());
    for (const auto& d : {SigmaCoords{0.05, 0.0}, SigmaCoords{-0.05, 0.0},
                          SigmaCoords{0.0, 0.05}, SigmaCoords{0.0, -0.05}}) {
        const auto r = find_orbit_from_sigma({kThetaStar + d.theta_e, kPi / 2 + d.phi_e}, st);
        REQUIRE(r.ok());
        CHECK(r.orbit.period > t0.orbit.period);
    }
}

TEST_CASE("degenerate and non-returning inputs") {
    OrbitSettings st;
    CHECK(find_orbit_from_sigma({0.0, 0.0}, st).status == OrbitStatus::degenerate_input);
    CHECK(find_orbit_from_sigma({kPi, 1.0}, st).status == OrbitStatus::degenerate_input);
    st.horizon = 25.0;
    CHECK(find_orbit_from_sigma({3.0, 0.0}, st).status == OrbitStatus::no_return);
    // The same tilt returns once phi leaves the decaying meridian.
    CHECK(find_orbit_from_sigma({3.0, 0.3}, st).status == OrbitStatus::ok);
}

TEST_CASE("theta invariants: h differences conserved only for n = 3") {
    Rng rng(51);
    std::vector<double> th0 = {rng.uniform() * 2 * kPi, rng.uniform() * 2 * kPi,
                               rng.uniform() * 2 * kPi};
    const auto inv = theta_invariants(th0);
    REQUIRE(inv.size() == 3);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(inv[i] == doctest::Approx(th0[i] - std::sin(th0[i])).epsilon(1e-15));
    IntegratorSettings ist;
    const auto traj = integrate_theta(th0, 20.0, ist, 64);
    CHECK(theta_invariant_drift(traj) < 1e-8);
}

TEST_CASE("family scan grid layout and statuses") {
    ScanGrid grid;
    grid.n_theta = 10;
    grid.n_phi = 8;
    OrbitSettings st;
    st.horizon = 25.0;
    st.n_samples = 16;
    RowClassifier trivial = [](const PeriodicOrbit&) { return RowStability{}; };
    const auto table = orbit_family_scan(grid, st, trivial, 1);
    REQUIRE(table.rows.size() == 80);
    CHECK(table.n_theta == 10);
    CHECK(table.n_phi == 8);
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 8; ++j) {
            const auto& r = table.rows[static_cast<std::size_t>(i * 8 + j)];
            CHECK(r.theta_e == doctest::Approx((i + 0.5) * kPi / 10).epsilon(1e-14));
            CHECK(r.phi_e == doctest::Approx(j * 2 * kPi / 8).epsilon(1e-14));
            if (r.status == OrbitStatus::ok) CHECK(r.period > 0.0);
        }
    // Orbits exist near the equator band; the polar caps decay to the vacuum.
    int n_ok = 0, n_no_return = 0;
    for (const auto& r : table.rows) {
        n_ok += r.status == OrbitStatus::ok;
        n_no_return += r.status == OrbitStatus::no_return;
    }
    CHECK(n_ok > 20);
    CHECK(n_no_return > 5);
}

TEST_CASE("family scan is deterministic across worker counts") {
    ScanGrid grid;
    grid.n_theta = 6;
    grid.n_phi = 6;
    OrbitSettings st;
    st.horizon = 25.0;
    st.n_samples = 8;
    RowClassifier trivial = [](const PeriodicOrbit& o) {
        RowStability s;
        s.max_abs_quarter_trace = o.period;  // any orbit-dependent value
        return s;
    };
    const auto t1 = orbit_family_scan(grid, st, trivial, 1);
    const auto t3 = orbit_family_scan(grid, st, trivial, 3);
    REQUIRE(t1.rows.size() == t3.rows.size());
    const auto same = [](double a, double b) {
        return std::memcmp(&a, &b, sizeof(double)) == 0;  // NaN-safe bit equality
    };
    for (std::size_t i = 0; i < t1.rows.size(); ++i) {
        CHECK(t1.rows[i].status == t3.rows[i].status);
        CHECK(same(t1.rows[i].period, t3.rows[i].period));
        CHECK(same(t1.rows[i].max_abs_quarter_trace, t3.rows[i].max_abs_quarter_trace));
    }
}

}
