#pragma once

namespace coldamp {

/// Blackbody spectral radiance 2hf^3/c^2 / (exp(hf/kT) - 1), W m^-2 Hz^-1 sr^-1.
/// t = 0 returns the limit 0.
double spectral_radiance(double f_hz, double t_k);

struct PhotonBudget {
    double f = 0.0;              // Hz
    double t = 0.0;              // K
    double area = 0.0;           // m^2
    double bandwidth = 0.0;      // Hz
    double radiance = 0.0;       // W m^-2 Hz^-1 sr^-1
    double power_density = 0.0;  // W/Hz, Lambertian hemisphere: pi * area * radiance
    double rate = 0.0;           // photons/s, power_density * bandwidth / (h f)
};

/// Thermal photon generation budget of a radiating area into a bandwidth.
PhotonBudget photon_rate(double f_hz, double t_k, double area_m2, double bandwidth_hz);

struct RadianceReduction {
    double ratio = 0.0;            // B_f(t_hot)/B_f(t_cold) at the given frequency
    double orders = 0.0;           // log10(ratio)
    double wideband_ratio = 0.0;   // (t_hot/t_cold)^4, Stefan-Boltzmann
    double wideband_orders = 0.0;  // log10 of the wide-band ratio
};

/// Narrow-band and frequency-integrated radiance drop when cooling
/// from t_hot to t_cold.
RadianceReduction radiance_reduction(double f_hz, double t_hot_k, double t_cold_k);

/// Brightness temperature of the amplifier input: T_b = T_g + |S12| * T_d
/// with |S12| a power ratio, 10^(s12_db/10). s12_db = -infinity means no
/// backward transmission and returns t_g.
double brightness_temperature(double t_g_k, double t_d_k, double s12_db);

}  // namespace coldamp
