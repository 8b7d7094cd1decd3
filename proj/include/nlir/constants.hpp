#pragma once

#include <numbers>

namespace nlir::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double speed_of_light_m_s = 299792458.0;
inline constexpr double speed_of_light_cm_s = 2.99792458e10;
inline constexpr double boltzmann_j_k = 1.380649e-23;
inline constexpr double atomic_mass_kg = 1.66053906660e-27;
/// Second radiation constant hc/k_B in cm*K.
inline constexpr double second_radiation_cm_k = 1.438776877;
inline constexpr double pascal_per_torr = 101325.0 / 760.0;
inline constexpr double torr_per_atm = 760.0;
/// HITRAN reference temperature.
inline constexpr double reference_temperature_k = 296.0;

}  // namespace nlir::constants
