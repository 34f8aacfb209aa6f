#include "coldamp/qubit.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "coldamp/constants.hpp"
#include "doctest.h"

using namespace coldamp;

namespace {

QubitParams fig1_params() { return {2e-10, 76e-15, 1.325, 0.5135}; }

double trapezoid_dot(const std::vector<double>& a, const std::vector<double>& b, double h) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        double w = (i == 0 || i + 1 == a.size()) ? 0.5 : 1.0;
        s += w * a[i] * b[i];
    }
    return s * h;
}

}  // namespace

TEST_CASE("beta_l = 0 gives the bare parabola") {
    QubitParams q{2e-10, 76e-15, 0.0, 0.5};
    Hamiltonian ham = build_hamiltonian(q, {q.phi_e - 1.0, q.phi_e + 1.0, 201});
    for (size_t i = 0; i < ham.phi.size(); ++i) {
        double d = ham.phi[i] - q.phi_e;
        CHECK(ham.potential[i] == doctest::Approx(d * d).epsilon(1e-14));
    }
    CHECK_FALSE(analyze_wells(ham).is_double_well());
}

TEST_CASE("Fig-1 parameters produce a double well") {
    QubitParams q = fig1_params();
    Hamiltonian ham = build_hamiltonian(q, default_grid(q));
    WellInfo wells = analyze_wells(ham);
    REQUIRE(wells.is_double_well());
    CHECK(wells.minima_phi[0] == doctest::Approx(0.3265).epsilon(0.01));
    CHECK(wells.minima_phi[1] == doctest::Approx(0.7204).epsilon(0.01));
    CHECK(wells.barrier_phi == doctest::Approx(0.4566).epsilon(0.01));
    CHECK(wells.minima_u[1] < wells.minima_u[0]);  // right well is the deep one
    // both minima inside [0, 1], exactly two of them
    CHECK(wells.minima_phi[0] > 0.0);
    CHECK(wells.minima_phi[1] < 1.0);
}

TEST_CASE("derived critical current") {
    CHECK(fig1_params().critical_current() == doctest::Approx(2.1803e-6).epsilon(1e-3));
}

TEST_CASE("grid validation and coarse-grid warning") {
    QubitParams q = fig1_params();
    CHECK_THROWS_AS(build_hamiltonian(q, {0.0, 1.0, 2}), std::invalid_argument);
    CHECK_THROWS_AS(build_hamiltonian(q, {1.0, 0.0, 100}), std::invalid_argument);
    CHECK(build_hamiltonian(q, {q.phi_e - 1.2, q.phi_e + 1.2, 64}).coarse_grid_warning);
    CHECK_FALSE(build_hamiltonian(q, default_grid(q)).coarse_grid_warning);
}

TEST_CASE("harmonic limit matches 1/(2 pi sqrt(LC))") {
    QubitParams q{2e-10, 76e-15, 0.0, 0.5135};
    SpectrumResult s = eigensolve(build_hamiltonian(q, default_grid(q)), 6);
    double f_ho = 1.0 / (2.0 * std::numbers::pi * std::sqrt(q.l * q.c));
    CHECK(f_ho == doctest::Approx(40.822e9).epsilon(1e-4));
    for (int i = 0; i + 1 < 6; ++i) {
        double f = (s.energy_J[i + 1] - s.energy_J[i]) / phys::h;
        CHECK(f == doctest::Approx(f_ho).epsilon(0.005));
    }
}

TEST_CASE("eigenvectors are orthonormal with small residuals") {
    QubitParams q = fig1_params();
    Hamiltonian ham = build_hamiltonian(q, default_grid(q));
    SpectrumResult s = eigensolve(ham, 10);
    const int n = static_cast<int>(ham.diag.size());
    double h_norm = 0.0;
    for (int i = 0; i < n; ++i)
        h_norm = std::max(h_norm, std::abs(ham.diag[i]) +
                                      (i > 0 ? std::abs(ham.offdiag[i - 1]) : 0.0) +
                                      (i + 1 < n ? std::abs(ham.offdiag[i]) : 0.0));
    for (int a = 0; a < 10; ++a) {
        for (int b = 0; b <= a; ++b) {
            double g = trapezoid_dot(s.wavefunctions[a], s.wavefunctions[b], ham.h);
            CHECK(std::abs(g - (a == b ? 1.0 : 0.0)) < 1e-8);
        }
        double resid = 0.0;
        for (int i = 0; i < n; ++i) {
            double hv = ham.diag[i] * s.wavefunctions[a][i];
            if (i > 0) hv += ham.offdiag[i - 1] * s.wavefunctions[a][i - 1];
            if (i + 1 < n) hv += ham.offdiag[i] * s.wavefunctions[a][i + 1];
            double r = hv - s.energy[a] * s.wavefunctions[a][i];
            resid += r * r;
        }
        CHECK(std::sqrt(resid * ham.h) < 1e-8 * h_norm);
    }
    // sorted ascending
    for (int i = 0; i + 1 < 10; ++i) CHECK(s.energy[i] < s.energy[i + 1]);
}

TEST_CASE("flux separation between the working levels is about 0.3 Phi0") {
    QubitParams q = fig1_params();
    Hamiltonian ham = build_hamiltonian(q, default_grid(q));
    SpectrumResult s = eigensolve(ham, 10);
    // highest adjacent pair below the barrier localized in opposite wells
    int pick = -1;
    for (int i = 0; i + 1 < 10; ++i) {
        if (s.energy[i + 1] > s.wells.barrier_u) break;
        if (s.well[i] != Well::Delocalized && s.well[i + 1] != Well::Delocalized &&
            s.well[i] != s.well[i + 1])
            pick = i;
    }
    REQUIRE(pick >= 0);
    double sep = std::abs(s.flux_expect[pick] - s.flux_expect[pick + 1]);
    CHECK(sep == doctest::Approx(0.3).epsilon(0.17));  // 0.3 +- 0.05
    CHECK(sep >= 0.25);
    CHECK(sep <= 0.35);
    // that transition sits near the counter operating frequency
    double f_ghz = s.energy_GHz[pick + 1] - s.energy_GHz[pick];
    CHECK(f_ghz > 3.0);
    CHECK(f_ghz < 12.0);
}

TEST_CASE("well assignment is normalization-invariant") {
    QubitParams q = fig1_params();
    Hamiltonian ham = build_hamiltonian(q, default_grid(q));
    SpectrumResult s = eigensolve(ham, 8);
    for (int lvl = 0; lvl < 8; ++lvl) {
        std::vector<double> scaled = s.wavefunctions[lvl];
        for (double& x : scaled) x *= 7.25;  // arbitrary drive/normalization scale
        double num = 0.0, den = 0.0;
        for (size_t i = 0; i < scaled.size(); ++i) {
            double w = (i == 0 || i + 1 == scaled.size()) ? 0.5 : 1.0;
            num += w * ham.phi[i] * scaled[i] * scaled[i];
            den += w * scaled[i] * scaled[i];
        }
        CHECK(assign_well(s.wells, num / den) == s.well[lvl]);
    }
}

TEST_CASE("O(h^2) convergence under grid refinement") {
    QubitParams q = fig1_params();
    FluxGrid g1{q.phi_e - 1.2, q.phi_e + 1.2, 513};
    FluxGrid g2{q.phi_e - 1.2, q.phi_e + 1.2, 1025};
    FluxGrid g4{q.phi_e - 1.2, q.phi_e + 1.2, 2049};
    SpectrumResult s1 = eigensolve(build_hamiltonian(q, g1), 8);
    SpectrumResult s2 = eigensolve(build_hamiltonian(q, g2), 8);
    SpectrumResult s4 = eigensolve(build_hamiltonian(q, g4), 8);
    for (int i = 0; i < 8; ++i) {
        double ratio = (s1.energy[i] - s2.energy[i]) / (s2.energy[i] - s4.energy[i]);
        CHECK(ratio >= 3.5);
        CHECK(ratio <= 4.5);
    }
}

TEST_CASE("transition frequencies are positive everywhere") {
    auto rows = transition_scan_serial(fig1_params(), "phi_e", 0.505, 0.52, 5, 0, 3);
    for (const ScanPoint& p : rows) CHECK(p.f_ij_ghz > 0.0);
}

TEST_CASE("beta_l scan tunes the working transition by more than a factor two") {
    auto rows = transition_scan(fig1_params(), "beta_l", 1.26, 1.44, 19, 6, 7);
    REQUIRE(rows.size() == 19);
    // longest monotone stretch
    size_t best_lo = 0, best_hi = 0, lo = 0;
    for (size_t i = 1; i <= rows.size(); ++i) {
        if (i == rows.size() || rows[i].f_ij_ghz < rows[i - 1].f_ij_ghz) {
            if (i - 1 - lo > best_hi - best_lo) {
                best_lo = lo;
                best_hi = i - 1;
            }
            lo = i;
        }
    }
    CHECK(rows[best_hi].f_ij_ghz / rows[best_lo].f_ij_ghz > 2.0);
}

TEST_CASE("transition frequency is symmetric about phi_e = 0.5") {
    QubitParams qa = fig1_params(), qb = fig1_params();
    qa.phi_e = 0.5 + 0.0135;
    qb.phi_e = 0.5 - 0.0135;
    SpectrumResult sa = eigensolve(build_hamiltonian(qa, default_grid(qa)), 8);
    SpectrumResult sb = eigensolve(build_hamiltonian(qb, default_grid(qb)), 8);
    for (int i = 0; i + 1 < 8; ++i) {
        double fa = sa.energy_GHz[i + 1] - sa.energy_GHz[i];
        double fb = sb.energy_GHz[i + 1] - sb.energy_GHz[i];
        CHECK(fa == doctest::Approx(fb).epsilon(1e-6));
    }
}

TEST_CASE("parallel scan equals the serial reference") {
    auto par = transition_scan(fig1_params(), "beta_l", 1.30, 1.36, 7, 5, 7);
    auto ser = transition_scan_serial(fig1_params(), "beta_l", 1.30, 1.36, 7, 5, 7);
    REQUIRE(par.size() == ser.size());
    for (size_t i = 0; i < par.size(); ++i) {
        CHECK(par[i].value == ser[i].value);
        CHECK(par[i].f_ij_ghz == ser[i].f_ij_ghz);
    }
}

TEST_CASE("scan input validation") {
    CHECK_THROWS_AS(transition_scan_serial(fig1_params(), "bogus", 1, 2, 3, 0, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(transition_scan_serial(fig1_params(), "beta_l", 1, 2, 3, 2, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(eigensolve(build_hamiltonian(fig1_params(), default_grid(fig1_params())), 0),
                    std::invalid_argument);
}
