#pragma once

// Unit system used throughout the library:
//   time            microseconds (us)
//   angular freq.   rad/us
//   length          mm
//   magnetic field  Gauss
// Rabi frequencies are the coupling matrix elements of the rotating-frame
// Hamiltonian, H = -(Omega |e><g| + h.c.), also in rad/us.

#include <numbers>

namespace tripod::units {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Vacuum speed of light, mm/us.
inline constexpr double speed_of_light = 2.998e5;

/// Bohr magneton over Planck constant, MHz/G.
inline constexpr double bohr_magneton_mhz_per_gauss = 1.399624;

/// Natural linewidth of the Rb D1 line, 2 pi x 5.746 MHz in rad/us.
inline constexpr double rb_d1_linewidth = two_pi * 5.746;

inline constexpr double mhz_to_rad_per_us(double f_mhz) { return two_pi * f_mhz; }
inline constexpr double rad_per_us_to_mhz(double w) { return w / two_pi; }

/// Splitting between adjacent Zeeman sublevels, g_F mu_B B / hbar, in rad/us.
inline constexpr double zeeman_step(double b_gauss, double g_factor) {
    return two_pi * g_factor * bohr_magneton_mhz_per_gauss * b_gauss;
}

/// Frequency of a Delta m = 2 Raman coherence, 2 g_F mu_B B / h, in MHz.
inline constexpr double delta_m2_beat_mhz(double b_gauss, double g_factor) {
    return 2.0 * g_factor * bohr_magneton_mhz_per_gauss * b_gauss;
}

}  // namespace tripod::units
