#pragma once

#include <string>
#include <vector>

#include "iccool/config.hpp"
#include "iccool/cooling.hpp"
#include "iccool/spectrum.hpp"

// Named parameter sets shipped with the package, one per headline data set:
// single-mode strength curves, the two-mode strength maps, the Doppler
// spectrum of the hot string, the sideband-cooled string and the cooled
// planar crystal. Frequencies in Hz, durations in seconds.

namespace iccool {

// The published two-ion-string cooling schedule: a five-pulse block repeated
// 15 times, a four-pulse block repeated twice and a final three-pulse block.
// Mode 1 is the COM mode, mode 2 the breathing mode; "intermod" pulses are
// the 2nd red COM sideband of the 1st red breathing sideband.
inline CoolingSequence table1_sequence(double rabi_hz = kCoolingRabiHz) {
    const auto pulse = [rabi_hz](int d1, int d2, double us) {
        return PulseSpec{{d1, d2}, us * 1e-6, rabi_hz, 1};
    };
    CoolingSequence seq;
    seq.blocks.push_back({{pulse(-2, 0, 500), pulse(0, -2, 500), pulse(-3, 0, 300),
                           pulse(0, -1, 200), pulse(-2, -1, 500)},
                          15});
    seq.blocks.push_back({{pulse(0, -1, 200), pulse(-2, 0, 500), pulse(-1, 0, 500),
                           pulse(-2, -1, 500)},
                          2});
    seq.blocks.push_back({{pulse(-2, -1, 500), pulse(-1, 0, 2000), pulse(0, -1, 500)},
                          1});
    return seq;
}

// Same schedule with every intermodulation pulse dropped; population then
// collects in the joint dark region.
inline CoolingSequence table1_without_intermod(double rabi_hz = kCoolingRabiHz) {
    CoolingSequence seq = table1_sequence(rabi_hz);
    for (auto& block : seq.blocks) {
        std::erase_if(block.pulses, [](const PulseSpec& p) {
            return p.sideband.delta_n1 != 0 && p.sideband.delta_n2 != 0;
        });
    }
    return seq;
}

// Experiment-like sampling grid for cooled spectra: short scans across the
// carrier and the first red/blue sidebands of both modes.
inline std::vector<double> fit_window_detunings(double nu1, double nu2,
                                                double halfwidth = 3e3,
                                                double step = 500.0) {
    std::vector<double> out;
    for (double center : {-nu2, -nu1, 0.0, nu1, nu2})
        for (double d = center - halfwidth; d <= center + halfwidth + step / 2;
             d += step)
            out.push_back(d);
    return out;
}

struct ScenarioPreset {
    std::string name;
    std::string description;
    RunConfig config;

    // initial / synthesized mean phonon numbers
    double nbar1 = 0.0, nbar2 = 0.0;

    // spectrum scan
    double scan_halfwidth = 600e3; // Hz, wide Doppler scans
    double scan_step = 1e3;        // Hz
    ProbePulse probe{0.0, 60e-6, kProbeRabiHz};
    Observable observable = Observable::SingleIon;
    bool coherent = false;          // cooled scenarios use the coherent model
    double sigma1 = 0.0, sigma2 = 0.0; // Hz, Gaussian broadenings (planar)
    double detuning_split = 0.0;    // Hz, per-ion carrier difference
    int shots = 200;

    // strength-map panels
    int map_nmax = 140;
};

inline std::vector<std::string> scenario_names() {
    return {"fig2-strengths", "fig3-maps", "doppler-162k", "cooled-string-162k",
            "planar-346k"};
}

inline ScenarioPreset scenario(const std::string& name) {
    ScenarioPreset s;
    s.name = name;
    if (name == "fig2-strengths") {
        s.description = "single-ion carrier and red-sideband strength curves at "
                        "162 kHz with the Doppler-limit thermal weights";
        s.config.ions = 1;
        s.config.nu_z_hz = 162e3;
        s.nbar1 = 58.0; // Doppler limit at this frequency
        s.map_nmax = 160;
    } else if (name == "fig3-maps") {
        s.description = "two-ion string sideband strength maps and dark regions";
        s.config.ions = 2;
        s.config.nu_z_hz = 162e3;
        s.map_nmax = 140;
    } else if (name == "doppler-162k") {
        s.description = "Doppler-cooled two-ion string excitation spectrum";
        s.config.ions = 2;
        s.config.nu_z_hz = 162e3;
        s.nbar1 = 87.0;
        s.nbar2 = 51.0;
        s.probe = {0.0, 60e-6, kProbeRabiHz};
        s.scan_halfwidth = 600e3;
        s.scan_step = 1e3;
    } else if (name == "cooled-string-162k") {
        s.description = "sideband-cooled two-ion string spectrum with per-ion "
                        "carrier splitting";
        s.config.ions = 2;
        s.config.nu_z_hz = 162e3;
        s.nbar1 = 0.30;
        s.nbar2 = 0.07;
        s.coherent = true;
        s.probe = {0.0, 200e-6, kProbeRabiHz};
        s.detuning_split = 2e3;
    } else if (name == "planar-346k") {
        s.description = "sideband-cooled two-ion planar crystal, joint-excitation "
                        "detection, broadened tilt and COM peaks";
        s.config.ions = 2;
        s.config.geometry = Geometry::Planar;
        s.config.nu_z_hz = 346e3;
        s.config.nu_r_hz = 106e3;
        s.nbar1 = 0.10; // COM
        s.nbar2 = 0.10; // tilt
        s.coherent = true;
        s.probe = {0.0, 300e-6, kProbeRabiHz};
        s.observable = Observable::BothExcited;
        s.sigma1 = 700.0;  // COM broadening
        s.sigma2 = 1000.0; // tilt broadening
        s.detuning_split = 0.0;
    } else {
        throw ConfigError("unknown scenario '" + name + "'");
    }
    return s;
}

} // namespace iccool
