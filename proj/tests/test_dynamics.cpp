#include "pxplab/dynamics.hpp"
#include "pxplab/orbits.hpp"
#include "pxplab/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace pxplab;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kThetaStar = 2.5131573711557325;
constexpr double kTZ2 = 2.571476243915939;

SpinChain random_chain(int n, Rng& rng) {
    SpinChain c;
    c.s.resize(static_cast<std::size_t>(n));
    for (auto& s : c.s) {
        do
            s = Vec3(rng.gaussian(), rng.gaussian(), rng.gaussian());
        while (s.norm() < 1e-3);
        s.normalize();
    }
    return c;
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("uniform sector quadrature oracle") {
    // All sites equal: theta' = (1 - cos theta)^2 = 4 sin^4(theta/2), so
    // -cot(theta/2) - cot^3(theta/2)/3 = 2t + C exactly.
    const double th0 = kPi / 2;
    const auto invariant = [](double th) {
        const double c = 1.0 / std::tan(th / 2);
        return -c - c * c * c / 3.0;
    };
    IntegratorSettings st;
    const auto traj = integrate_theta({th0, th0, th0}, 1.0, st, 10);
    for (std::size_t j = 0; j < traj.t.size(); ++j) {
        const double th = traj.y[j][0];
        CHECK(traj.y[j][1] == doctest::Approx(th).epsilon(1e-12));
        CHECK(invariant(th) - 2.0 * traj.t[j] ==
              doctest::Approx(invariant(th0)).epsilon(1e-9));
    }
    // Closed form at t = 1: cot(theta/2) is the real root of c^3 + 3c + 2 = 0.
    const double s2 = std::sqrt(2.0);
    const double root = std::cbrt(-1.0 + s2) - std::cbrt(1.0 + s2);
    const double th_exact = 2.0 * std::atan2(1.0, root);
    CHECK(traj.y.back()[0] == doctest::Approx(th_exact).epsilon(1e-9));
}

TEST_CASE("all-up cell is a fixed point") {
    UnitCell up;
    up.s = {Vec3(0, 0, 1), Vec3(0, 0, 1)};
    IntegratorSettings st;
    const auto traj = integrate(up, 10.0, st, 4);
    for (const auto& y : traj.y) CHECK((y - flatten(up.s)).norm() == 0.0);
}

TEST_CASE("energy and norm conservation on a random chain") {
    Rng rng(41);
    const SpinChain c0 = random_chain(50, rng);
    IntegratorSettings st;
    const auto traj = integrate(c0, 50.0, st, 64);
    CHECK(traj.energy_drift < 1e-8);
    double norm_dev = 0.0;
    for (const auto& y : traj.y)
        for (int i = 0; i < 50; ++i)
            norm_dev = std::max(norm_dev, std::abs(y.segment<3>(3 * i).norm() - 1.0));
    CHECK(norm_dev < 1e-12);
    CHECK(traj.t.front() == 0.0);
    CHECK(traj.t.back() == 50.0);
    CHECK(traj.sites == 50);
}

TEST_CASE("x = 0 sector is invariant") {
    Rng rng(42);
    SpinChain c;
    c.s.resize(12);
    for (auto& s : c.s) {
        const double th = rng.uniform() * 2 * kPi;
        s = Vec3(0.0, std::sin(th), std::cos(th));
    }
    IntegratorSettings st;
    const auto traj = integrate(c, 20.0, st, 64);
    double max_x = 0.0;
    for (const auto& y : traj.y)
        for (int i = 0; i < 12; ++i) max_x = std::max(max_x, std::abs(y[3 * i]));
    CHECK(max_x < 1e-9);
}

TEST_CASE("reduced angles match the full flow") {
    Rng rng(43);
    std::vector<double> th0(3);
    for (auto& t : th0) t = rng.uniform() * 2 * kPi;
    IntegratorSettings st;
    const auto red = integrate_theta(th0, 5.0, st, 32);
    UnitCell cell;
    cell.s.resize(3);
    for (int i = 0; i < 3; ++i)
        cell.s[static_cast<std::size_t>(i)] =
            Vec3(0.0, std::sin(th0[static_cast<std::size_t>(i)]),
                 std::cos(th0[static_cast<std::size_t>(i)]));
    const auto full = integrate(cell, 5.0, st, 32);
    REQUIRE(red.t.size() == full.t.size());
    for (std::size_t j = 0; j < red.t.size(); ++j)
        for (int i = 0; i < 3; ++i) {
            const Vec3 v(0.0, std::sin(red.y[j][i]), std::cos(red.y[j][i]));
            CHECK((full.y[j].segment<3>(3 * i) - v).norm() < 1e-8);
        }
}

TEST_CASE("n = 3 reduced invariants") {
    Rng rng(44);
    std::vector<double> th0 = {rng.uniform() * 2 * kPi, rng.uniform() * 2 * kPi,
                               rng.uniform() * 2 * kPi};
    IntegratorSettings st;
    const auto traj = integrate_theta(th0, 20.0, st, 64);
    CHECK(theta_invariant_drift(traj) < 1e-8);
}

TEST_CASE("echo property on and off Sigma") {
    IntegratorSettings st;
    CHECK(echo_check(sigma_point({2.2, 1.1}), 5.0, st) < 1e-8);
    CHECK(echo_check(sigma_point({kThetaStar, kPi / 2}), 2 * kTZ2, st) < 1e-8);
    UnitCell off;
    off.s = {Vec3(0, 0, 1), Vec3(std::sin(1.0), 0, std::cos(1.0))};
    CHECK(echo_check(off, 5.0, st) > 1e-2);
}

TEST_CASE("sigma crossing of the Z2 orbit") {
    IntegratorSettings st;
    const auto res = detect_sigma_crossing(sigma_point({kThetaStar, kPi / 2}), 10.0, st);
    REQUIRE(res.found);
    // First return lands on the phi_e = 3 pi / 2 twin after half a period.
    CHECK(res.t_star == doctest::Approx(kTZ2 / 2).epsilon(1e-9));
    CHECK(res.distance < 1e-10);
    const UnitCell twin = sigma_point({kThetaStar, 3 * kPi / 2});
    CHECK((flatten(res.cell.s) - flatten(twin.s)).norm() < 1e-6);
}

TEST_CASE("no sigma return from the decaying region") {
    IntegratorSettings st;
    const auto res = detect_sigma_crossing(sigma_point({3.0, 0.0}), 25.0, st);
    CHECK(!res.found);
}

TEST_CASE("tangent propagation is linear") {
    const UnitCell cell = sigma_point({2.3, 1.0});
    IntegratorSettings st;
    Rng rng(45);
    std::vector<CellTangent> init(3, CellTangent(2));
    for (int i = 0; i < 2; ++i) {
        for (int b = 0; b < 2; ++b) {
            Vec3 v(rng.gaussian(), rng.gaussian(), rng.gaussian());
            v -= v.dot(cell[i]) * cell[i];
            init[static_cast<std::size_t>(b)][static_cast<std::size_t>(i)] =
                v.cast<std::complex<double>>();
        }
        init[2][static_cast<std::size_t>(i)] =
            init[0][static_cast<std::size_t>(i)] + init[1][static_cast<std::size_t>(i)];
    }
    const auto out = integrate_tangent(cell, 3.0, 0.7, init, st);
    for (int i = 0; i < 2; ++i)
        CHECK((out[2][static_cast<std::size_t>(i)] - out[0][static_cast<std::size_t>(i)] -
               out[1][static_cast<std::size_t>(i)])
                  .norm() < 1e-7);
}

TEST_CASE("tangent flow conserves the spin symplectic form") {
    const UnitCell cell = sigma_point({2.35, kPi / 2});
    IntegratorSettings st;
    Rng rng(46);
    std::vector<CellTangent> init(2, CellTangent(2));
    for (auto& vec : init)
        for (int i = 0; i < 2; ++i) {
            Vec3 v(rng.gaussian(), rng.gaussian(), rng.gaussian());
            v -= v.dot(cell[i]) * cell[i];
            vec[static_cast<std::size_t>(i)] = v.normalized().cast<std::complex<double>>();
        }
    auto form = [](const UnitCell& base, const CellTangent& u, const CellTangent& v) {
        double w = 0.0;
        for (int i = 0; i < 2; ++i)
            w += base[i].dot(u[static_cast<std::size_t>(i)].real().cross(
                v[static_cast<std::size_t>(i)].real()));
        return w;
    };
    const double w0 = form(cell, init[0], init[1]);
    for (double t : {1.0, 5.0}) {
        const auto out = integrate_tangent(cell, t, 0.0, init, st);
        const auto sol = integrate_ode(make_spin_system(2), flatten(cell.s), 0.0, t, st);
        REQUIRE(sol.ok());
        const UnitCell base{unflatten(sol.y_end)};
        CHECK(form(base, out[0], out[1]) == doctest::Approx(w0).epsilon(1e-9));
    }
}

TEST_CASE("variational flow matches finite differences of the nonlinear flow") {
    const UnitCell cell = sigma_point({2.0, 0.8});
    IntegratorSettings st;
    st.rtol = 1e-12;
    st.atol = 1e-14;
    Rng rng(47);
    std::vector<CellTangent> init(1, CellTangent(2));
    Vec3 dirs[2];
    for (int i = 0; i < 2; ++i) {
        Vec3 v(rng.gaussian(), rng.gaussian(), rng.gaussian());
        v -= v.dot(cell[i]) * cell[i];
        dirs[i] = v.normalized();
        init[0][static_cast<std::size_t>(i)] = dirs[i].cast<std::complex<double>>();
    }
    const double t = 2.0;
    const auto var = integrate_tangent(cell, t, 0.0, init, st);
    const double eta = 1e-6;
    Eigen::VectorXd yp = flatten(cell.s), ym = flatten(cell.s);
    for (int i = 0; i < 2; ++i) {
        yp.segment<3>(3 * i) = (cell[i] + eta * dirs[i]).normalized();
        ym.segment<3>(3 * i) = (cell[i] - eta * dirs[i]).normalized();
    }
    const auto sp = integrate_ode(make_spin_system(2), yp, 0.0, t, st);
    const auto sm = integrate_ode(make_spin_system(2), ym, 0.0, t, st);
    REQUIRE(sp.ok());
    REQUIRE(sm.ok());
    const Eigen::VectorXd fd = (sp.y_end - sm.y_end) / (2 * eta);
    for (int i = 0; i < 2; ++i)
        CHECK((var[0][static_cast<std::size_t>(i)].real() - fd.segment<3>(3 * i)).norm() < 1e-4);
}

TEST_CASE("lyapunov exponent: regular versus chaotic") {
    IntegratorSettings st;
    const auto reg = lyapunov_max(zn_chain(2, 12), 30.0, 0.25, st, 99);
    CHECK(std::abs(reg.lambda) < 0.05);
    const auto cha = lyapunov_max(zn_chain(4, 12), 30.0, 0.25, st, 99);
    CHECK(cha.lambda > 0.05);
    CHECK(cha.lambda > 3.0 * cha.stderr_);
    CHECK(cha.n_renorms == 120);
}

}
