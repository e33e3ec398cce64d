#pragma once

// Working units: energies (and angular frequencies as hbar*omega) in eV,
// lengths in nm, temperatures in K. Free energy per area is eV/nm^2,
// pressure eV/nm^3.

namespace casimir::units {

inline constexpr double pi = 3.14159265358979323846;

inline constexpr double boltzmann_ev_per_k = 8.617333e-5;
inline constexpr double hbar_c_ev_nm = 197.327;
inline constexpr double hbar_ev_s = 6.582119569e-16;
inline constexpr double joule_per_ev = 1.602176634e-19;

/// eV/nm^2 -> J/m^2
inline constexpr double j_per_m2_per_ev_nm2 = joule_per_ev * 1e18;
/// eV/nm^3 -> Pa
inline constexpr double pa_per_ev_nm3 = joule_per_ev * 1e27;

inline constexpr double zeta3 = 1.2020569031595942854;

inline double thermal_energy(double temperature_k) { return boltzmann_ev_per_k * temperature_k; }

/// hbar * xi_l for Matsubara index l, in eV.
inline double matsubara_energy(double temperature_k, int l) {
  return 2.0 * pi * thermal_energy(temperature_k) * l;
}

inline double rad_per_s_to_ev(double omega) { return omega * hbar_ev_s; }

}  // namespace casimir::units
