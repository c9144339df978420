#pragma once

namespace iccool {

// SI values; h and e are exact by definition since the 2019 redefinition.
namespace constants {
inline constexpr double planck_h = 6.62607015e-34;        // J s
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double atomic_mass_unit = 1.66053906660e-27; // kg
inline constexpr double pi = 3.14159265358979323846;
}

// 40Ca+ as used throughout: atomic mass of 40Ca (the missing electron mass
// is below every tolerance in this package).
namespace ca40 {
inline constexpr double mass_u = 39.9625909;
inline constexpr double mass_kg = mass_u * constants::atomic_mass_unit;
inline constexpr double charge = constants::elementary_charge;
inline constexpr double sd_wavelength = 729e-9; // S1/2 <-> D5/2 quadrupole line
}

} // namespace iccool
