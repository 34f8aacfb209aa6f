#pragma once

#include <string>
#include <vector>

#include "coldamp/constants.hpp"

namespace coldamp {

/// RF-SQUID flux qubit: loop inductance, junction capacitance, screening
/// parameter beta_l = 2*pi*I_c*L/Phi0, external flux in units of Phi0.
struct QubitParams {
    double l = 0.0;       // H
    double c = 0.0;       // F
    double beta_l = 0.0;  // dimensionless
    double phi_e = 0.0;   // units of Phi0

    double critical_current() const;  // A, beta_l*Phi0/(2*pi*L)
    double energy_unit() const;       // J, Phi0^2/(2L)
};

struct FluxGrid {
    double phi_min = 0.0;  // units of Phi0
    double phi_max = 0.0;
    int n = 0;             // grid points, endpoints included
};

/// Default grid: [phi_e - 1.2, phi_e + 1.2] with 2048 points.
FluxGrid default_grid(const QubitParams& q);

/// Symmetric tridiagonal discretization of the flux Hamiltonian with
/// Dirichlet boundaries. Internal units: flux in Phi0, energy in
/// E_L = Phi0^2/(2L); kinetic coefficient hbar^2*L/(C*Phi0^4).
struct Hamiltonian {
    std::vector<double> diag;      // n
    std::vector<double> offdiag;   // n-1
    std::vector<double> phi;       // grid, Phi0 units
    std::vector<double> potential; // u(phi), E_L units
    double h = 0.0;                // grid spacing
    double kinetic = 0.0;          // dimensionless kinetic coefficient
    double e_unit = 0.0;           // J per dimensionless energy unit
    bool coarse_grid_warning = false;  // < 3 points per shortest local wavelength
};

Hamiltonian build_hamiltonian(const QubitParams& q, const FluxGrid& grid);

/// Double-well bookkeeping of the discretized potential.
struct WellInfo {
    std::vector<double> minima_phi;  // local minima, ascending in phi
    std::vector<double> minima_u;    // potential at those minima, E_L units
    double barrier_phi = 0.0;        // maximum between the outer minima
    double barrier_u = 0.0;          // E_L units
    bool is_double_well() const { return minima_phi.size() == 2; }
};
WellInfo analyze_wells(const Hamiltonian& h);

/// Lower = the deeper well, Upper = the shallower one; Delocalized when
/// <Phi> sits within 0.01 Phi0 of the barrier top.
enum class Well { Lower = -1, Delocalized = 0, Upper = 1 };

struct SpectrumResult {
    std::vector<double> phi;          // grid
    std::vector<double> potential_K;  // U/k_B per grid point
    std::vector<double> energy;       // dimensionless, ascending
    std::vector<double> energy_J;
    std::vector<double> energy_K;
    std::vector<double> energy_GHz;
    std::vector<std::vector<double>> wavefunctions;  // trapezoidal-normalized
    std::vector<double> flux_expect;                 // <Phi> per level, Phi0 units
    std::vector<Well> well;                          // per-level assignment
    WellInfo wells;
    bool coarse_grid_warning = false;
};

/// Lowest k eigenpairs by Sturm-sequence bisection plus inverse iteration
/// on the shifted tridiagonal system.
SpectrumResult eigensolve(const Hamiltonian& h, int k);

/// Which well holds a (possibly unnormalized) state, judged by its <Phi>.
Well assign_well(const WellInfo& wells, double flux_expectation);

struct ScanPoint {
    double value = 0.0;
    double f_ij_ghz = 0.0;
};

/// Re-solves the spectrum across a parameter scan and reports the i->j
/// transition frequency. vary is one of "beta_l", "phi_e", "l", "c".
/// Parallel across scan points with deterministic ordering.
std::vector<ScanPoint> transition_scan(const QubitParams& q_base, const std::string& vary,
                                       double start, double stop, int count,
                                       int level_i, int level_j);

/// Serial reference of transition_scan; kept for testing and benchmarking.
std::vector<ScanPoint> transition_scan_serial(const QubitParams& q_base, const std::string& vary,
                                              double start, double stop, int count,
                                              int level_i, int level_j);

}  // namespace coldamp
