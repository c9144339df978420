#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>

#include "iccool/defaults.hpp"
#include "iccool/errors.hpp"
#include "iccool/trap.hpp"

// Flat INI-style run configuration. Unknown keys are rejected with the line
// number; every physical value must be positive.
//
//   scenario = doppler-162k        (optional, outside any section)
//   [trap]
//   b_tesla = 1.865
//   species = Ca40
//   wavelength_nm = 729
//   nu_z_hz = 162e3
//   [crystal]
//   ions = 2
//   geometry = string              (string | planar)
//   nu_r_hz = 106e3                (planar only)
//   [simulation]
//   seed = 1
//   nmax1 = 0                      (0 = size from the thermal tail rule)
//   nmax2 = 0
//   leakage_eps = 1e-8
//   decay_rate_per_s = 31415.9
//   cooling_rabi_hz = 28e3
//   probe_rabi_hz = 14e3

namespace iccool {

struct RunConfig {
    std::string scenario;

    double b_tesla = 1.865;
    std::string species = "Ca40";
    double wavelength_nm = 729.0;
    double nu_z_hz = 162e3;

    int ions = 2;
    Geometry geometry = Geometry::AxialString;
    double nu_r_hz = 0.0;

    std::uint64_t seed = 1;
    int nmax1 = 0;
    int nmax2 = 0;
    double leakage_eps = 1e-8;
    double decay_rate_per_s = kDefaultDecayRate;
    double cooling_rabi_hz = kCoolingRabiHz;
    double probe_rabi_hz = kProbeRabiHz;

    TrapConfig trap() const {
        if (species != "Ca40")
            throw ConfigError("unsupported species '" + species + "' (only Ca40)");
        return TrapConfig::ca40(b_tesla, nu_z_hz, wavelength_nm * 1e-9);
    }

    CrystalConfig crystal() const { return {ions, geometry, nu_r_hz}; }

    void validate() const {
        trap().validate();
        if (ions < 1 || ions > 3) throw ConfigError("ions must be 1, 2 or 3");
        if (geometry == Geometry::Planar && nu_r_hz <= 0)
            throw ConfigError("planar crystals need nu_r_hz > 0");
        if (decay_rate_per_s < 0 || cooling_rabi_hz <= 0 || probe_rabi_hz <= 0)
            throw ConfigError("rates and Rabi frequencies must be positive");
        if (nmax1 < 0 || nmax2 < 0) throw ConfigError("nmax must be >= 0");
        if (leakage_eps <= 0 || leakage_eps > 1e-3)
            throw ConfigError("leakage_eps out of range");
    }
};

inline RunConfig parse_run_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;

    const auto bad = [&](const std::string& msg) {
        throw ConfigError("config line " + std::to_string(lineno) + ": " + msg);
    };

    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto strip = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string();
            const auto b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        line = strip(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') bad("unterminated section header");
            section = line.substr(1, line.size() - 2);
            if (section != "trap" && section != "crystal" && section != "simulation")
                bad("unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) bad("expected key = value");
        const std::string key = strip(line.substr(0, eq));
        const std::string val = strip(line.substr(eq + 1));
        if (val.empty()) bad("empty value for '" + key + "'");

        const auto num = [&]() {
            try {
                std::size_t used = 0;
                const double v = std::stod(val, &used);
                if (used != val.size()) throw std::invalid_argument("");
                return v;
            } catch (const std::exception&) {
                bad("numeric value expected for '" + key + "'");
                return 0.0;
            }
        };

        if (section.empty()) {
            if (key == "scenario")
                cfg.scenario = val;
            else
                bad("unknown top-level key '" + key + "'");
        } else if (section == "trap") {
            if (key == "b_tesla") cfg.b_tesla = num();
            else if (key == "species") cfg.species = val;
            else if (key == "wavelength_nm") cfg.wavelength_nm = num();
            else if (key == "nu_z_hz") cfg.nu_z_hz = num();
            else bad("unknown key '" + key + "' in [trap]");
        } else if (section == "crystal") {
            if (key == "ions") cfg.ions = static_cast<int>(num());
            else if (key == "geometry") {
                if (val == "string") cfg.geometry = Geometry::AxialString;
                else if (val == "planar") cfg.geometry = Geometry::Planar;
                else bad("geometry must be 'string' or 'planar'");
            }
            else if (key == "nu_r_hz") cfg.nu_r_hz = num();
            else bad("unknown key '" + key + "' in [crystal]");
        } else { // simulation
            if (key == "seed") cfg.seed = static_cast<std::uint64_t>(num());
            else if (key == "nmax1") cfg.nmax1 = static_cast<int>(num());
            else if (key == "nmax2") cfg.nmax2 = static_cast<int>(num());
            else if (key == "leakage_eps") cfg.leakage_eps = num();
            else if (key == "decay_rate_per_s") cfg.decay_rate_per_s = num();
            else if (key == "cooling_rabi_hz") cfg.cooling_rabi_hz = num();
            else if (key == "probe_rabi_hz") cfg.probe_rabi_hz = num();
            else bad("unknown key '" + key + "' in [simulation]");
        }
    }
    cfg.validate();
    return cfg;
}

} // namespace iccool
