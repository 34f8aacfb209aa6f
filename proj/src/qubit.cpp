#include "coldamp/qubit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace coldamp {

namespace {

constexpr double kPi = std::numbers::pi;

double checked(double v, const char* what) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string("qubit: ") + what + " must be > 0");
    return v;
}

}  // namespace

double QubitParams::critical_current() const {
    return beta_l * phys::phi0 / (2.0 * kPi * l);
}

double QubitParams::energy_unit() const {
    return phys::phi0 * phys::phi0 / (2.0 * l);
}

FluxGrid default_grid(const QubitParams& q) {
    return {q.phi_e - 1.2, q.phi_e + 1.2, 2048};
}

Hamiltonian build_hamiltonian(const QubitParams& q, const FluxGrid& grid) {
    checked(q.l, "loop inductance");
    checked(q.c, "junction capacitance");
    if (q.beta_l < 0.0) throw std::invalid_argument("qubit: beta_l must be >= 0");
    if (grid.n < 3) throw std::invalid_argument("qubit: grid needs at least 3 points");
    if (!(grid.phi_min < grid.phi_max))
        throw std::invalid_argument("qubit: phi_min must be < phi_max");

    Hamiltonian ham;
    const int n = grid.n;
    ham.h = (grid.phi_max - grid.phi_min) / (n - 1);
    ham.kinetic = phys::hbar * phys::hbar * q.l / (q.c * std::pow(phys::phi0, 4));
    ham.e_unit = q.energy_unit();
    ham.phi.resize(n);
    ham.potential.resize(n);
    const double cos_amp = q.beta_l / (2.0 * kPi * kPi);
    for (int i = 0; i < n; ++i) {
        double phi = grid.phi_min + i * ham.h;
        double d = phi - q.phi_e;
        ham.phi[i] = phi;
        ham.potential[i] = d * d - cos_amp * std::cos(2.0 * kPi * phi);
    }
    double t = ham.kinetic / (ham.h * ham.h);
    ham.diag.resize(n);
    ham.offdiag.assign(n - 1, -t);
    for (int i = 0; i < n; ++i) ham.diag[i] = 2.0 * t + ham.potential[i];

    // Coarse-grid estimate: shortest local de Broglie wavelength of a state
    // bound below the boundary potential.
    double u_min = *std::min_element(ham.potential.begin(), ham.potential.end());
    double u_edge = std::min(ham.potential.front(), ham.potential.back());
    if (u_edge > u_min) {
        double p_max = std::sqrt((u_edge - u_min) / ham.kinetic);
        double lambda_min = 2.0 * kPi / p_max;
        ham.coarse_grid_warning = lambda_min / ham.h < 3.0;
    }
    return ham;
}

WellInfo analyze_wells(const Hamiltonian& h) {
    WellInfo info;
    const auto& u = h.potential;
    const int n = static_cast<int>(u.size());
    std::vector<int> minima;
    for (int i = 1; i + 1 < n; ++i)
        if (u[i] < u[i - 1] && u[i] <= u[i + 1]) minima.push_back(i);
    for (int i : minima) {
        info.minima_phi.push_back(h.phi[i]);
        info.minima_u.push_back(u[i]);
    }
    if (minima.size() >= 2) {
        int lo = minima.front(), hi = minima.back();
        int barrier = lo;
        for (int i = lo; i <= hi; ++i)
            if (u[i] > u[barrier]) barrier = i;
        info.barrier_phi = h.phi[barrier];
        info.barrier_u = u[barrier];
    }
    return info;
}

Well assign_well(const WellInfo& wells, double flux_expectation) {
    if (!wells.is_double_well()) return Well::Delocalized;
    if (std::abs(flux_expectation - wells.barrier_phi) < 0.01) return Well::Delocalized;
    bool deep_is_left = wells.minima_u[0] < wells.minima_u[1];
    bool state_is_left = flux_expectation < wells.barrier_phi;
    return state_is_left == deep_is_left ? Well::Lower : Well::Upper;
}

namespace {

// Eigenvalues of a symmetric tridiagonal matrix below x (Sturm count).
int sturm_count(const std::vector<double>& a, const std::vector<double>& b, double x) {
    constexpr double tiny = 1e-300;
    int count = 0;
    double d = a[0] - x;
    if (d < 0.0) ++count;
    for (size_t i = 1; i < a.size(); ++i) {
        if (std::abs(d) < tiny) d = d < 0.0 ? -tiny : tiny;
        d = a[i] - x - b[i - 1] * b[i - 1] / d;
        if (d < 0.0) ++count;
    }
    return count;
}

// k-th (0-based) eigenvalue by bisection.
double bisect_eigenvalue(const std::vector<double>& a, const std::vector<double>& b, int k,
                         double lo, double hi) {
    for (int iter = 0; iter < 128; ++iter) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (sturm_count(a, b, mid) >= k + 1)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

// LU of (T - shift*I) with partial pivoting, one fill diagonal (gttrf-style).
struct TriLU {
    std::vector<double> sub, d, sup, du2;  // sub[i]: multiplier for row i+1
    std::vector<int> pivot;

    TriLU(const std::vector<double>& diag, const std::vector<double>& off, double shift) {
        const size_t n = diag.size();
        constexpr double tiny = 1e-300;
        d.resize(n);
        sub.assign(n > 0 ? n - 1 : 0, 0.0);
        sup.assign(n > 0 ? n - 1 : 0, 0.0);
        du2.assign(n > 1 ? n - 2 : 0, 0.0);
        pivot.assign(n > 0 ? n - 1 : 0, 0);
        for (size_t i = 0; i < n; ++i) d[i] = diag[i] - shift;
        for (size_t i = 0; i + 1 < n; ++i) sub[i] = sup[i] = off[i];
        for (size_t i = 0; i + 1 < n; ++i) {
            if (std::abs(d[i]) >= std::abs(sub[i])) {
                pivot[i] = 0;
                if (d[i] == 0.0) d[i] = tiny;
                double m = sub[i] / d[i];
                sub[i] = m;
                d[i + 1] -= m * sup[i];
                if (i + 2 < n) du2[i] = 0.0;
            } else {
                pivot[i] = 1;  // swap rows i and i+1
                double m = d[i] / sub[i];
                d[i] = sub[i];
                sub[i] = m;
                double tmp = sup[i];
                sup[i] = d[i + 1];
                d[i + 1] = tmp - m * d[i + 1];
                if (i + 2 < n) {
                    du2[i] = sup[i + 1];
                    sup[i + 1] = -m * sup[i + 1];
                }
            }
        }
        if (d[n - 1] == 0.0) d[n - 1] = tiny;
    }

    void solve(std::vector<double>& x) const {
        const size_t n = d.size();
        for (size_t i = 0; i + 1 < n; ++i) {
            if (pivot[i] == 0) {
                x[i + 1] -= sub[i] * x[i];
            } else {
                double tmp = x[i];
                x[i] = x[i + 1];
                x[i + 1] = tmp - sub[i] * x[i];
            }
        }
        x[n - 1] /= d[n - 1];
        if (n >= 2) x[n - 2] = (x[n - 2] - sup[n - 2] * x[n - 1]) / d[n - 2];
        for (size_t ii = n; ii >= 3; --ii) {
            size_t i = ii - 3;
            x[i] = (x[i] - sup[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
        }
    }
};

// Deterministic start vector.
void fill_pseudo_random(std::vector<double>& v, unsigned seed) {
    unsigned state = 0x9e3779b9u ^ (seed * 2654435761u + 1u);
    for (double& x : v) {
        state ^= state << 13;
        state ^= state >> 17;
        state ^= state << 5;
        x = static_cast<double>(state) / 4294967296.0 - 0.5;
    }
}

}  // namespace

SpectrumResult eigensolve(const Hamiltonian& ham, int k) {
    const int n = static_cast<int>(ham.diag.size());
    if (k < 1 || k > n) throw std::invalid_argument("eigensolve: need 1 <= k <= n");
    const auto& a = ham.diag;
    const auto& b = ham.offdiag;

    double lo = a[0], hi = a[0];
    for (int i = 0; i < n; ++i) {
        double r = (i > 0 ? std::abs(b[i - 1]) : 0.0) + (i + 1 < n ? std::abs(b[i]) : 0.0);
        lo = std::min(lo, a[i] - r);
        hi = std::max(hi, a[i] + r);
    }
    double scale = std::max(std::abs(lo), std::abs(hi));

    SpectrumResult res;
    res.phi = ham.phi;
    res.potential_K.resize(ham.potential.size());
    for (size_t i = 0; i < ham.potential.size(); ++i)
        res.potential_K[i] = ham.potential[i] * ham.e_unit / phys::k_b;
    res.coarse_grid_warning = ham.coarse_grid_warning;
    res.wells = analyze_wells(ham);

    std::vector<std::vector<double>>& vecs = res.wavefunctions;
    for (int j = 0; j < k; ++j) {
        double ev = bisect_eigenvalue(a, b, j, lo, hi);
        res.energy.push_back(ev);

        // Inverse iteration at a slightly perturbed shift; re-orthogonalize
        // against the already-computed vectors so clustered (near-degenerate)
        // eigenvalues still give an orthonormal set.
        std::vector<double> v(n);
        double shift = ev + scale * 1e-14 * (j + 1);
        TriLU lu(a, b, shift);
        bool ok = false;
        for (unsigned attempt = 0; attempt < 4 && !ok; ++attempt) {
            fill_pseudo_random(v, static_cast<unsigned>(j) * 7u + attempt);
            for (int iter = 0; iter < 8; ++iter) {
                lu.solve(v);
                for (const auto& prev : vecs) {
                    double dot = 0.0;
                    for (int i = 0; i < n; ++i) dot += prev[i] * v[i];
                    for (int i = 0; i < n; ++i) v[i] -= dot * prev[i];
                }
                double nrm = 0.0;
                for (double x : v) nrm += x * x;
                nrm = std::sqrt(nrm);
                if (!(nrm > 1e-280)) break;  // collapsed onto earlier vectors
                for (double& x : v) x /= nrm;
                // residual ||(T - ev I) v||
                double resid = 0.0;
                for (int i = 0; i < n; ++i) {
                    double r = (a[i] - ev) * v[i];
                    if (i > 0) r += b[i - 1] * v[i - 1];
                    if (i + 1 < n) r += b[i] * v[i + 1];
                    resid += r * r;
                }
                if (std::sqrt(resid) < 1e-12 * scale) {
                    ok = true;
                    break;
                }
            }
        }
        // Deterministic sign: largest-magnitude component positive.
        int imax = 0;
        for (int i = 1; i < n; ++i)
            if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
        if (v[imax] < 0.0)
            for (double& x : v) x = -x;
        vecs.push_back(std::move(v));
    }

    // Trapezoidal normalization and flux expectations.
    for (int j = 0; j < k; ++j) {
        auto& v = vecs[j];
        double nrm = 0.0;
        for (int i = 0; i < n; ++i) {
            double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
            nrm += w * v[i] * v[i];
        }
        nrm = std::sqrt(nrm * ham.h);
        for (double& x : v) x /= nrm;
        double fx = 0.0;
        for (int i = 0; i < n; ++i) {
            double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
            fx += w * ham.phi[i] * v[i] * v[i];
        }
        fx *= ham.h;
        res.flux_expect.push_back(fx);
        res.well.push_back(assign_well(res.wells, fx));
        res.energy_J.push_back(res.energy[j] * ham.e_unit);
        res.energy_K.push_back(res.energy_J[j] / phys::k_b);
        res.energy_GHz.push_back(res.energy_J[j] / phys::h / 1e9);
    }
    return res;
}

namespace {

QubitParams with_value(const QubitParams& base, const std::string& vary, double value) {
    QubitParams q = base;
    if (vary == "beta_l") q.beta_l = value;
    else if (vary == "phi_e") q.phi_e = value;
    else if (vary == "l") q.l = value;
    else if (vary == "c") q.c = value;
    else throw std::invalid_argument("transition_scan: unknown parameter '" + vary + "'");
    return q;
}

std::vector<ScanPoint> run_scan(const QubitParams& q_base, const std::string& vary,
                                double start, double stop, int count, int level_i, int level_j,
                                bool parallel) {
    if (count < 1) throw std::invalid_argument("transition_scan: count must be >= 1");
    if (!(level_i >= 0 && level_i < level_j))
        throw std::invalid_argument("transition_scan: need 0 <= i < j");
    with_value(q_base, vary, start);  // reject unknown names before the loop
    std::vector<ScanPoint> rows(static_cast<size_t>(count));
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int s = 0; s < count; ++s) {
        double value = count == 1 ? start : start + (stop - start) * s / (count - 1);
        QubitParams q = with_value(q_base, vary, value);
        Hamiltonian ham = build_hamiltonian(q, default_grid(q));
        SpectrumResult sol = eigensolve(ham, level_j + 1);
        rows[static_cast<size_t>(s)] = {
            value, (sol.energy_J[level_j] - sol.energy_J[level_i]) / phys::h / 1e9};
    }
    return rows;
}

}  // namespace

std::vector<ScanPoint> transition_scan(const QubitParams& q_base, const std::string& vary,
                                       double start, double stop, int count,
                                       int level_i, int level_j) {
    return run_scan(q_base, vary, start, stop, count, level_i, level_j, true);
}

std::vector<ScanPoint> transition_scan_serial(const QubitParams& q_base, const std::string& vary,
                                              double start, double stop, int count,
                                              int level_i, int level_j) {
    return run_scan(q_base, vary, start, stop, count, level_i, level_j, false);
}

}  // namespace coldamp
