// SPDX-License-Identifier: Apache-2.0

#ifndef WXMIMO_CONSTANTS_HPP
#define WXMIMO_CONSTANTS_HPP

namespace wxmimo {

inline constexpr double kSpeedOfLight = 299792458.0; // m/s
inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }
inline constexpr double wavelength_m(double frequency_hz) { return kSpeedOfLight / frequency_hz; }

// Nyquist velocity for uniform sampling at interval prt: lambda / (4 * prt)
inline constexpr double nyquist_velocity_ms(double wavelength, double prt_s) {
    return wavelength / (4.0 * prt_s);
}

} // namespace wxmimo

#endif
