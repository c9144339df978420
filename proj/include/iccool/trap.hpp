#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "iccool/constants.hpp"
#include "iccool/errors.hpp"

// Single-particle and crystal mode structure of the Penning trap.
//
// All frequencies are ordinary frequencies in hertz; none of the formulas
// here carry 2*pi factors.

namespace iccool {

struct TrapConfig {
    double magnetic_field;   // T
    double ion_mass;         // kg
    double ion_charge;       // C
    double wavelength;       // m, spectroscopy laser
    double axial_frequency;  // Hz, nu_z

    void validate() const {
        if (magnetic_field <= 0 || ion_mass <= 0 || ion_charge <= 0 ||
            wavelength <= 0 || axial_frequency <= 0)
            throw ConfigError("TrapConfig: all fields must be strictly positive");
        const double nc = cyclotron();
        if (nc * nc / 4.0 - axial_frequency * axial_frequency / 2.0 < 0)
            throw StabilityError("TrapConfig: nu_c^2/4 < nu_z^2/2, radial motion unstable");
    }

    double cyclotron() const {
        return ion_charge * magnetic_field / (2.0 * constants::pi * ion_mass);
    }

    static TrapConfig ca40(double b_tesla, double nu_z_hz,
                           double lambda_m = ca40::sd_wavelength) {
        return TrapConfig{b_tesla, ca40::mass_kg, ca40::charge, lambda_m, nu_z_hz};
    }
};

enum class Geometry { AxialString, Planar };

struct CrystalConfig {
    int ion_count = 1;                // 1, 2 or 3
    Geometry geometry = Geometry::AxialString;
    double rotation_frequency = 0.0;  // Hz, nu_r; meaningful for Planar only
};

enum class ModeLabel { COM, Breathing, Tilt };

inline const char* to_string(ModeLabel m) {
    switch (m) {
        case ModeLabel::COM: return "COM";
        case ModeLabel::Breathing: return "Breathing";
        case ModeLabel::Tilt: return "Tilt";
    }
    return "?";
}

struct AxialMode {
    ModeLabel label;
    double frequency;                // Hz
    std::vector<double> lamb_dicke;  // per-ion magnitudes, all positive
};

struct ModeSet {
    std::vector<AxialMode> modes;
};

inline double cyclotron_frequency(const TrapConfig& cfg) {
    cfg.validate();
    return cfg.cyclotron();
}

// nu_pm = nu_c/2 +- sqrt(nu_c^2/4 - nu_z^2/2). Identities: sum = nu_c,
// product = nu_z^2/2.
inline std::pair<double, double> radial_frequencies(const TrapConfig& cfg) {
    cfg.validate();
    const double nc = cfg.cyclotron();
    const double rad = nc * nc / 4.0 - cfg.axial_frequency * cfg.axial_frequency / 2.0;
    if (rad < 0)
        throw StabilityError("radial_frequencies: negative radicand, trap unstable");
    const double s = std::sqrt(rad);
    return {nc / 2.0 + s, nc / 2.0 - s};
}

// Effective radial confinement in the rotating frame,
// nu_eff = sqrt(nu_r (nu_c - nu_r) - nu_z^2/2). Maximal at nu_r = nu_c/2.
inline double effective_radial_frequency(double nu_r, const TrapConfig& cfg) {
    cfg.validate();
    const double nc = cfg.cyclotron();
    const double rad = nu_r * (nc - nu_r) - cfg.axial_frequency * cfg.axial_frequency / 2.0;
    if (rad < 0)
        throw StabilityError("effective_radial_frequency: rotation at " +
                             std::to_string(nu_r) + " Hz gives no radial confinement");
    return std::sqrt(rad);
}

// Single-ion Lamb-Dicke parameter eta_0 = (1/lambda) sqrt(h / (2 M nu_z)).
inline double lamb_dicke_single(const TrapConfig& cfg) {
    return std::sqrt(constants::planck_h / (2.0 * cfg.ion_mass * cfg.axial_frequency)) /
           cfg.wavelength;
}

namespace detail {

inline void check_crystal(const TrapConfig& trap, const CrystalConfig& crystal) {
    trap.validate();
    if (crystal.ion_count < 1 || crystal.ion_count > 3)
        throw ConfigError("CrystalConfig: ion_count must be 1, 2 or 3");
    if (crystal.ion_count == 1) return;

    const double nz = trap.axial_frequency;
    if (crystal.geometry == Geometry::AxialString) {
        // A string is only possible if the best achievable radial confinement
        // (rotation at nu_c/2) exceeds the axial one.
        const double best = effective_radial_frequency(trap.cyclotron() / 2.0, trap);
        if (best <= nz)
            throw StabilityError("CrystalConfig: nu_eff <= nu_z for every rotation "
                                 "frequency, axial string cannot form");
    } else {
        auto [np, nm] = radial_frequencies(trap);
        const double nr = crystal.rotation_frequency;
        if (!(nm < nr && nr < np))
            throw StabilityError("CrystalConfig: rotation frequency must lie between "
                                 "nu_minus and nu_plus");
        if (effective_radial_frequency(nr, trap) >= nz)
            throw StabilityError("CrystalConfig: nu_eff >= nu_z, crystal would leave "
                                 "the radial plane");
    }
}

} // namespace detail

// Per-mode Lamb-Dicke magnitudes. The COM mode of an N-ion crystal sees the
// full crystal mass, eta_COM = eta_0/sqrt(N); the two-ion breathing mode has
// eta_B = eta_0/sqrt(2 sqrt(3)); the planar tilt is taken equal to eta_COM
// (stated approximation, no correction applied).
inline ModeSet mode_set(const TrapConfig& trap, const CrystalConfig& crystal) {
    detail::check_crystal(trap, crystal);
    const double nz = trap.axial_frequency;
    const double eta0 = lamb_dicke_single(trap);
    const int n = crystal.ion_count;

    ModeSet out;
    if (n == 1) {
        out.modes.push_back({ModeLabel::COM, nz, {eta0}});
        return out;
    }

    const double eta_com = eta0 / std::sqrt(static_cast<double>(n));
    out.modes.push_back({ModeLabel::COM, nz, std::vector<double>(n, eta_com)});

    if (crystal.geometry == Geometry::AxialString) {
        if (n != 2)
            throw ConfigError("mode_set: axial strings are supported for 2 ions only");
        const double eta_b = eta0 / std::sqrt(2.0 * std::sqrt(3.0));
        out.modes.push_back(
            {ModeLabel::Breathing, std::sqrt(3.0) * nz, std::vector<double>(2, eta_b)});
    } else {
        const double nu_eff = effective_radial_frequency(crystal.rotation_frequency, trap);
        const double nu_tilt = std::sqrt(nz * nz - nu_eff * nu_eff);
        const AxialMode tilt{ModeLabel::Tilt, nu_tilt, std::vector<double>(n, eta_com)};
        out.modes.push_back(tilt);
        if (n == 3) out.modes.push_back(tilt); // two degenerate tilt modes
    }
    return out;
}

struct RotationRoots {
    double primary;    // near-magnetron root, the regime used in practice
    double secondary;  // mirror root above nu_c/2
};

// Inverts nu_tilt^2 = nu_z^2 - nu_eff(nu_r)^2 for nu_r. Quadratic in nu_r:
// nu_r^2 - nu_c nu_r + (3/2) nu_z^2 - nu_tilt^2 = 0.
inline RotationRoots rotation_from_tilt(double nu_tilt_measured, const TrapConfig& cfg) {
    cfg.validate();
    const double nz = cfg.axial_frequency;
    if (!(nu_tilt_measured > 0 && nu_tilt_measured < nz))
        throw ConfigError("rotation_from_tilt: tilt frequency must lie in (0, nu_z)");
    const double nc = cfg.cyclotron();
    const double disc =
        nc * nc / 4.0 - 1.5 * nz * nz + nu_tilt_measured * nu_tilt_measured;
    if (disc < 0)
        throw StabilityError("rotation_from_tilt: tilt frequency inconsistent with a "
                             "stable planar crystal");
    const double s = std::sqrt(disc);
    return {nc / 2.0 - s, nc / 2.0 + s};
}

} // namespace iccool
