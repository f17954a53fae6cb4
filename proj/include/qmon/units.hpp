// units.hpp
// Internal unit system and physical constants.
//
// Lengths are in micrometres, times in milliseconds and hbar = 1. This fixes
// the mass unit to hbar*ms/um^2 and the energy unit to hbar/ms. Anything in SI
// or eV is converted at the configuration boundary.

#pragma once

#include <cmath>
#include <numbers>

namespace qmon::units {

inline constexpr double hbar_si = 1.054571817e-34;       // J s
inline constexpr double boltzmann_si = 1.380649e-23;     // J/K
inline constexpr double electron_volt_si = 1.602176634e-19;  // J
// CODATA mass of the hydrogen atom (1H), kg.
inline constexpr double hydrogen_mass_si = 1.6735328e-27;

inline constexpr double length_si = 1e-6;  // m per internal length
inline constexpr double time_si = 1e-3;    // s per internal time
inline constexpr double mass_si = hbar_si * time_si / (length_si * length_si);
inline constexpr double energy_si = hbar_si / time_si;
inline constexpr double momentum_si = hbar_si / length_si;

inline constexpr double hydrogen_mass = hydrogen_mass_si / mass_si;

inline constexpr double ev_to_internal(double ev) {
    return ev * electron_volt_si / energy_si;
}
inline constexpr double internal_to_ev(double e) {
    return e * energy_si / electron_volt_si;
}
inline constexpr double kg_to_internal(double kg) { return kg / mass_si; }
inline constexpr double momentum_to_si(double p) { return p * momentum_si; }
inline constexpr double momentum_from_si(double p) { return p / momentum_si; }

// gamma given per (um^2 s) -> per (um^2 ms)
inline constexpr double gamma_per_um2_s(double g) { return g * time_si; }

inline constexpr double pi = std::numbers::pi;

}  // namespace qmon::units
