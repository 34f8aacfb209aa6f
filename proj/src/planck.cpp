#include "coldamp/planck.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "coldamp/constants.hpp"

namespace coldamp {

double spectral_radiance(double f_hz, double t_k) {
    if (!(f_hz > 0.0)) throw std::invalid_argument("spectral_radiance: f must be > 0");
    if (t_k < 0.0) throw std::invalid_argument("spectral_radiance: t must be >= 0");
    if (t_k == 0.0) return 0.0;
    double x = phys::h * f_hz / (phys::k_b * t_k);
    double prefactor = 2.0 * phys::h * f_hz * f_hz * f_hz / (phys::c0 * phys::c0);
    // expm1 keeps the Rayleigh-Jeans tail accurate for hf << kT.
    return prefactor / std::expm1(x);
}

PhotonBudget photon_rate(double f_hz, double t_k, double area_m2, double bandwidth_hz) {
    if (!(area_m2 > 0.0) || !(bandwidth_hz > 0.0))
        throw std::invalid_argument("photon_rate: area and bandwidth must be > 0");
    PhotonBudget b;
    b.f = f_hz;
    b.t = t_k;
    b.area = area_m2;
    b.bandwidth = bandwidth_hz;
    b.radiance = spectral_radiance(f_hz, t_k);
    b.power_density = std::numbers::pi * area_m2 * b.radiance;
    b.rate = b.power_density * bandwidth_hz / (phys::h * f_hz);
    return b;
}

RadianceReduction radiance_reduction(double f_hz, double t_hot_k, double t_cold_k) {
    if (!(t_hot_k > t_cold_k) || !(t_cold_k > 0.0))
        throw std::invalid_argument("radiance_reduction: need t_hot > t_cold > 0");
    RadianceReduction r;
    r.ratio = spectral_radiance(f_hz, t_hot_k) / spectral_radiance(f_hz, t_cold_k);
    r.orders = std::log10(r.ratio);
    double t = t_hot_k / t_cold_k;
    r.wideband_ratio = t * t * t * t;
    r.wideband_orders = std::log10(r.wideband_ratio);
    return r;
}

double brightness_temperature(double t_g_k, double t_d_k, double s12_db) {
    if (t_g_k < 0.0 || t_d_k < 0.0)
        throw std::invalid_argument("brightness_temperature: temperatures must be >= 0");
    if (s12_db > 0.0)
        throw std::invalid_argument("brightness_temperature: s12_db must be <= 0");
    if (std::isinf(s12_db)) return t_g_k;  // no backward transmission
    return t_g_k + std::pow(10.0, s12_db / 10.0) * t_d_k;
}

}  // namespace coldamp
