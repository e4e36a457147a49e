#pragma once

#include <cmath>
#include <cstdio>
#include <string>

// Internal unit system is SI throughout (meters, rad/s, seconds, radians).
// Conversions to the nm / um / degree / Celsius forms used at the I/O
// boundary all live here so no formula ever embeds its own factor.

namespace ppsource {

inline constexpr double speed_of_light = 299792458.0;  // m/s

// Converts between a FWHM and the width parameter of exp(-x^2/w^2):
// exp(-a^2/4) = 1/2, so a profile exp(-a^2 u^2 / D^2) has FWHM exactly D.
inline const double fwhm_gauss_a = 2.0 * std::sqrt(std::log(2.0));

inline constexpr double pi = 3.14159265358979323846;

inline constexpr double nm_to_m(double nm) { return nm * 1e-9; }
inline constexpr double m_to_nm(double m) { return m * 1e9; }
inline constexpr double um_to_m(double um) { return um * 1e-6; }
inline constexpr double m_to_um(double m) { return m * 1e6; }
inline constexpr double mm_to_m(double mm) { return mm * 1e-3; }

inline double deg_to_rad(double deg) { return deg * pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / pi; }

inline double omega_from_lambda(double lambda_m) {
    return 2.0 * pi * speed_of_light / lambda_m;
}

inline double lambda_from_omega(double omega) {
    return 2.0 * pi * speed_of_light / omega;
}

// FWHM bandwidth conversion between wavelength (about lambda0) and angular
// frequency. First-order: |d omega| = 2 pi c / lambda0^2 * |d lambda|.
inline double bandwidth_nm_to_omega(double fwhm_nm, double lambda0_m) {
    return 2.0 * pi * speed_of_light * nm_to_m(fwhm_nm) / (lambda0_m * lambda0_m);
}

inline double bandwidth_omega_to_nm(double fwhm_omega, double lambda0_m) {
    return m_to_nm(fwhm_omega * lambda0_m * lambda0_m / (2.0 * pi * speed_of_light));
}

// Fixed significant-digit formatting for all machine-readable output.
inline std::string format_sig(double x, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
    return buf;
}

}  // namespace ppsource
