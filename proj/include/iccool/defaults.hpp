#pragma once

#include "iccool/constants.hpp"

namespace iccool {

// Shipped model defaults. The probe Rabi frequency is the attenuated
// spectroscopy value; cooling pulses run at higher power (quench-cooled
// transfer scales with the coupling squared and the weakly coupled cells
// set the pace). The quench-enhanced decay rate is a free model parameter.
inline constexpr double kProbeRabiHz = 14e3;
inline constexpr double kCoolingRabiHz = 28e3;
inline constexpr double kDefaultDecayRate = 2.0 * constants::pi * 5e3; // s^-1

} // namespace iccool
