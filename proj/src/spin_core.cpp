#include "pxplab/spin_core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pxplab {

namespace kernel {

namespace {
inline int wrap(int i, int n) {
    int r = i % n;
    return r < 0 ? r + n : r;
}
}  // namespace

double energy(const double* s, int n) {
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
        const int im = wrap(i - 1, n), ip = wrap(i + 1, n);
        e += (1.0 - s[3 * im + 2]) * s[3 * i] * (1.0 - s[3 * ip + 2]);
    }
    return e;
}

void local_field(const double* s, double* h, int n) {
    for (int i = 0; i < n; ++i) {
        const int im = wrap(i - 1, n), ip = wrap(i + 1, n);
        const int im2 = wrap(i - 2, n), ip2 = wrap(i + 2, n);
        h[3 * i + 0] = -(1.0 - s[3 * im + 2]) * (1.0 - s[3 * ip + 2]);
        h[3 * i + 1] = 0.0;
        h[3 * i + 2] = s[3 * im] * (1.0 - s[3 * im2 + 2]) + s[3 * ip] * (1.0 - s[3 * ip2 + 2]);
    }
}

void eom_rhs(const double* s, double* ds, int n) {
    for (int i = 0; i < n; ++i) {
        const int im = wrap(i - 1, n), ip = wrap(i + 1, n);
        const int im2 = wrap(i - 2, n), ip2 = wrap(i + 2, n);
        const double hx = -(1.0 - s[3 * im + 2]) * (1.0 - s[3 * ip + 2]);
        const double hz = s[3 * im] * (1.0 - s[3 * im2 + 2]) + s[3 * ip] * (1.0 - s[3 * ip2 + 2]);
        const double sx = s[3 * i], sy = s[3 * i + 1], sz = s[3 * i + 2];
        // (hx, 0, hz) x (sx, sy, sz)
        ds[3 * i + 0] = -hz * sy;
        ds[3 * i + 1] = hz * sx - hx * sz;
        ds[3 * i + 2] = hx * sy;
    }
}

void normalize_sites(double* s, int n) {
    for (int i = 0; i < n; ++i) {
        double* p = s + 3 * i;
        const double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        if (r > 0.0) {
            p[0] /= r;
            p[1] /= r;
            p[2] /= r;
        }
    }
}

}  // namespace kernel

namespace {

void validate_sites(const std::vector<Vec3>& s, int min_sites, const char* what, double tol) {
    if (static_cast<int>(s.size()) < min_sites)
        throw std::invalid_argument(std::string(what) + ": need at least " +
                                    std::to_string(min_sites) + " sites, got " +
                                    std::to_string(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double dev = std::abs(s[i].norm() - 1.0);
        if (!(dev <= tol))
            throw std::invalid_argument(std::string(what) + ": site " + std::to_string(i) +
                                        " deviates from unit norm by " + std::to_string(dev));
    }
}

std::vector<Vec3> field_of(const std::vector<Vec3>& s) {
    const int n = static_cast<int>(s.size());
    std::vector<Vec3> h(s.size());
    kernel::local_field(s[0].data(), h[0].data(), n);
    return h;
}

std::vector<Vec3> rhs_of(const std::vector<Vec3>& s) {
    const int n = static_cast<int>(s.size());
    std::vector<Vec3> ds(s.size());
    kernel::eom_rhs(s[0].data(), ds[0].data(), n);
    return ds;
}

std::vector<Vec3> zn_sites(int n, int N) {
    if (n < 1) throw std::invalid_argument("zn pattern: n must be >= 1");
    std::vector<Vec3> s(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) s[static_cast<std::size_t>(i)] = Vec3(0, 0, i % n == 0 ? 1 : -1);
    return s;
}

template <typename State>
State translated(const State& in, int m) {
    const int n = in.size();
    State out = in;
    for (int i = 0; i < n; ++i) {
        int j = (i + m) % n;
        if (j < 0) j += n;
        out[i] = in[j];
    }
    return out;
}

}  // namespace

void validate(const SpinChain& chain, double tol) { validate_sites(chain.s, 3, "SpinChain", tol); }
void validate(const UnitCell& cell, double tol) { validate_sites(cell.s, 1, "UnitCell", tol); }

void normalize(SpinChain& chain) { kernel::normalize_sites(chain.s[0].data(), chain.size()); }
void normalize(UnitCell& cell) { kernel::normalize_sites(cell.s[0].data(), cell.size()); }

UnitCell zn_cell(int n) { return UnitCell{zn_sites(n, n)}; }

SpinChain zn_chain(int n, int N) {
    if (N < 3) throw std::invalid_argument("zn_chain: N must be >= 3");
    if (N % n != 0) throw std::invalid_argument("zn_chain: N must be a multiple of n");
    return SpinChain{zn_sites(n, N)};
}

UnitCell sigma_point(const SigmaCoords& c) {
    const Vec3 se(std::sin(c.theta_e) * std::cos(c.phi_e),
                  std::sin(c.theta_e) * std::sin(c.phi_e), std::cos(c.theta_e));
    return UnitCell{{se, rz_pi(se)}};
}

double sigma_distance(const UnitCell& cell) {
    if (cell.size() != 2) throw std::invalid_argument("sigma_distance: needs an n = 2 cell");
    return (cell[1] - rz_pi(cell[0])).squaredNorm();
}

double energy(const SpinChain& chain) {
    validate(chain);
    return kernel::energy(chain.s[0].data(), chain.size());
}
double energy(const UnitCell& cell) {
    validate(cell);
    return kernel::energy(cell.s[0].data(), cell.size());
}

std::vector<Vec3> local_field(const SpinChain& chain) {
    validate(chain);
    return field_of(chain.s);
}
std::vector<Vec3> local_field(const UnitCell& cell) {
    validate(cell);
    return field_of(cell.s);
}

std::vector<Vec3> eom_rhs(const SpinChain& chain) {
    validate(chain);
    return rhs_of(chain.s);
}
std::vector<Vec3> eom_rhs(const UnitCell& cell) {
    validate(cell);
    return rhs_of(cell.s);
}

SpinChain apply_rz_pi(const SpinChain& chain) {
    SpinChain out = chain;
    for (auto& v : out.s) v = rz_pi(v);
    return out;
}
UnitCell apply_rz_pi(const UnitCell& cell) {
    UnitCell out = cell;
    for (auto& v : out.s) v = rz_pi(v);
    return out;
}

SpinChain translate(const SpinChain& chain, int m) { return translated(chain, m); }
UnitCell translate(const UnitCell& cell, int m) { return translated(cell, m); }

SpinChain echo_conjugate(const SpinChain& chain) { return apply_rz_pi(translate(chain, 1)); }
UnitCell echo_conjugate(const UnitCell& cell) { return apply_rz_pi(translate(cell, 1)); }

Eigen::VectorXd flatten(const std::vector<Vec3>& sites) {
    Eigen::VectorXd y(3 * static_cast<int>(sites.size()));
    for (std::size_t i = 0; i < sites.size(); ++i) y.segment<3>(3 * static_cast<int>(i)) = sites[i];
    return y;
}

std::vector<Vec3> unflatten(const Eigen::VectorXd& y) {
    std::vector<Vec3> s(static_cast<std::size_t>(y.size() / 3));
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = y.segment<3>(3 * static_cast<int>(i));
    return s;
}

}  // namespace pxplab
