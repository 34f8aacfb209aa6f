#pragma once

// Physical constants, 2019 SI exact values where defined, CODATA otherwise.
namespace coldamp::phys {

inline constexpr double h = 6.62607015e-34;       // Planck constant, J s
inline constexpr double hbar = 1.054571817e-34;   // reduced Planck constant, J s
inline constexpr double k_b = 1.380649e-23;       // Boltzmann constant, J/K
inline constexpr double c0 = 2.99792458e8;        // speed of light, m/s
inline constexpr double q_e = 1.602176634e-19;    // elementary charge, C
inline constexpr double phi0 = h / (2.0 * q_e);   // flux quantum h/2e, Wb

}  // namespace coldamp::phys
