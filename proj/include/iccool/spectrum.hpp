#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "iccool/coupling.hpp"
#include "iccool/defaults.hpp"
#include "iccool/errors.hpp"
#include "iccool/phonon.hpp"
#include "iccool/rng.hpp"
#include "iccool/twoion.hpp"

// Excitation spectra: incoherent synthesis from a phonon distribution (the
// Doppler regime, where coherences between the many contributing states
// play no role), Gaussian post-broadening, detection-threshold observables
// and experiment-like sampling of synthetic data.

namespace iccool {

struct ProbePulse {
    double detuning = 0.0;       // Hz from the carrier
    double duration = 0.0;       // s
    double rabi_frequency = kProbeRabiHz; // Hz, carrier value

    void validate() const {
        if (duration <= 0) throw ConfigError("ProbePulse: duration must be > 0");
        if (rabi_frequency <= 0)
            throw ConfigError("ProbePulse: Rabi frequency must be > 0");
    }
};

enum class Observable { SingleIon, AllDarkVsAtLeastOneBright, BothExcited };

inline const char* to_string(Observable o) {
    switch (o) {
        case Observable::SingleIon: return "single_ion";
        case Observable::AllDarkVsAtLeastOneBright: return "at_least_one_bright";
        case Observable::BothExcited: return "both_excited";
    }
    return "?";
}

inline Observable observable_from_string(const std::string& s) {
    if (s == "single_ion") return Observable::SingleIon;
    if (s == "at_least_one_bright") return Observable::AllDarkVsAtLeastOneBright;
    if (s == "both_excited") return Observable::BothExcited;
    throw ConfigError("unknown observable '" + s + "'");
}

struct SpectrumPoint {
    double detuning = 0.0;   // Hz
    double excitation = 0.0; // probability
    int shots = 0;           // 0 = exact model value
    Observable observable = Observable::SingleIon;
};

// Detection from the joint electronic populations (index bit per ion, ion 0
// the most significant; for two ions this is the twoion.hpp joint array).
//  SingleIon               - marginal excitation of `ion`
//  AllDarkVsAtLeastOneBright - P(at least one ion still fluoresces)
//  BothExcited             - P(every ion shelved)
inline double detection_observable(const std::vector<double>& joint,
                                   Observable observable, int ion = 0) {
    const std::size_t n = joint.size();
    if (n < 2 || (n & (n - 1)) != 0)
        throw ConfigError("detection_observable: joint populations must have 2^N entries");
    int ions = 0;
    for (std::size_t v = n; v > 1; v >>= 1) ++ions;
    switch (observable) {
        case Observable::SingleIon: {
            if (ion < 0 || ion >= ions)
                throw ConfigError("detection_observable: ion index out of range");
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                if (k & (std::size_t(1) << (ions - 1 - ion))) s += joint[k];
            return s;
        }
        case Observable::AllDarkVsAtLeastOneBright:
            return 1.0 - joint[n - 1];
        case Observable::BothExcited:
            return joint[n - 1];
    }
    return 0.0;
}

struct SpectrumOptions {
    int max_order = kDefaultMaxSidebandOrder;
    double window = 25e3;      // Hz, sideband inclusion window around resonance
    double mass_floor = 1e-14; // skip phonon states below this occupancy
};

struct SpectrumResult {
    std::vector<SpectrumPoint> points;
    std::vector<std::string> warnings;
};

// Incoherent Doppler-regime spectrum: for each probe detuning, every
// sideband (m1, m2) within the window contributes
//   P(s) * f^2/(f^2 + D^2) * sin^2(pi sqrt(f^2 + D^2) tau)
// summed over start states s, with f the two-mode Rabi frequency of the
// transition and D the residual detuning. Returns the single-ion excitation
// probability.
inline SpectrumResult simulate_spectrum_thermal(
    const PhononDistribution& dist, std::pair<double, double> eta,
    const ProbePulse& probe, const std::vector<double>& detunings,
    std::pair<double, double> mode_freqs, const SpectrumOptions& opts = {}) {
    probe.validate();
    dist.check_normalized();
    if (detunings.empty())
        throw ConfigError("simulate_spectrum_thermal: no detunings");

    const int n1m = dist.probs.n1_max(), n2m = dist.probs.n2_max();
    detail::FactorCache cache(eta, {n1m, n2m});

    // candidate sidebands sorted once
    struct Sb {
        int m1, m2;
        double freq;
    };
    std::vector<Sb> sidebands;
    for (int m1 = -opts.max_order; m1 <= opts.max_order; ++m1)
        for (int m2 = -opts.max_order; m2 <= opts.max_order; ++m2)
            sidebands.push_back(
                {m1, m2, m1 * mode_freqs.first + m2 * mode_freqs.second});

    SpectrumResult out;
    out.points.reserve(detunings.size());
    int overlap_reports = 0;

    for (double delta : detunings) {
        double total = 0.0;
        int in_window = 0;
        for (const auto& sb : sidebands) {
            const double resid = delta - sb.freq;
            if (std::abs(resid) > opts.window) continue;
            ++in_window;
            const auto& f1 = cache.mode1(sb.m1);
            const auto& f2 = cache.mode2(sb.m2);
            for (int n1 = 0; n1 <= n1m; ++n1) {
                const double g1 = f1[n1];
                if (g1 == 0.0) continue;
                for (int n2 = 0; n2 <= n2m; ++n2) {
                    const double mass = dist.probs(n1, n2);
                    if (mass < opts.mass_floor) continue;
                    const double f = probe.rabi_frequency * g1 * f2[n2];
                    if (f <= std::abs(resid) * 1e-4) continue;
                    const double w2 = f * f + resid * resid;
                    const double s = std::sin(constants::pi * std::sqrt(w2) *
                                              probe.duration);
                    total += mass * (f * f / w2) * s * s;
                }
            }
        }
        if (in_window > 1 && overlap_reports < 8) {
            out.warnings.push_back("sidebands overlap within the window at detuning " +
                                   std::to_string(delta) + " Hz (" +
                                   std::to_string(in_window) + " lines summed)");
            ++overlap_reports;
        }
        out.points.push_back(
            {delta, std::min(total, 1.0), 0, Observable::SingleIon});
    }
    return out;
}

// Discrete convolution with a unit-area Gaussian, applied inside
// [window_lo, window_hi] only. The detuning grid must be uniform across the
// window; neighbouring points outside the window are read but not written.
inline std::vector<SpectrumPoint> convolve_gaussian(
    const std::vector<SpectrumPoint>& spectrum, double sigma, double window_lo,
    double window_hi, std::vector<std::string>* warnings = nullptr) {
    if (sigma < 0) throw ConfigError("convolve_gaussian: sigma must be >= 0");
    if (sigma == 0.0 || spectrum.size() < 2) return spectrum;
    if (window_hi - window_lo < 6.0 * sigma && warnings)
        warnings->push_back("convolution window is narrower than 3 sigma on each side");

    // uniform step inside the window
    double step = 0.0;
    for (std::size_t i = 1; i < spectrum.size(); ++i) {
        const double lo = std::min(spectrum[i - 1].detuning, spectrum[i].detuning);
        const double hi = std::max(spectrum[i - 1].detuning, spectrum[i].detuning);
        if (hi < window_lo || lo > window_hi) continue;
        const double d = spectrum[i].detuning - spectrum[i - 1].detuning;
        if (d <= 0)
            throw ConfigError("convolve_gaussian: detunings must be increasing");
        if (step == 0.0)
            step = d;
        else if (std::abs(d - step) > 1e-6 * step)
            throw ConfigError("convolve_gaussian: non-uniform grid inside the window");
    }
    if (step == 0.0) return spectrum;

    const int half = static_cast<int>(std::ceil(4.0 * sigma / step));
    std::vector<double> kernel(2 * half + 1);
    double ksum = 0.0;
    for (int k = -half; k <= half; ++k) {
        kernel[k + half] = std::exp(-0.5 * (k * step) * (k * step) / (sigma * sigma));
        ksum += kernel[k + half];
    }
    for (double& w : kernel) w /= ksum;

    std::vector<SpectrumPoint> out = spectrum;
    const int n = static_cast<int>(spectrum.size());
    for (int i = 0; i < n; ++i) {
        if (spectrum[i].detuning < window_lo || spectrum[i].detuning > window_hi)
            continue;
        double acc = 0.0, used = 0.0;
        for (int k = -half; k <= half; ++k) {
            const int j = i + k;
            if (j < 0 || j >= n) continue;
            acc += kernel[k + half] * spectrum[j].excitation;
            used += kernel[k + half];
        }
        out[i].excitation = acc / used;
    }
    return out;
}

// Experiment-like sampling: replace exact model values by binomial draws.
inline std::vector<SpectrumPoint> sample_spectrum(
    const std::vector<SpectrumPoint>& exact, int shots, Rng& rng) {
    if (shots <= 0) throw ConfigError("sample_spectrum: shots must be > 0");
    std::vector<SpectrumPoint> out = exact;
    for (auto& p : out) {
        p.excitation = static_cast<double>(rng.binomial(shots, p.excitation)) / shots;
        p.shots = shots;
    }
    return out;
}

inline double max_excitation_in(const std::vector<SpectrumPoint>& pts, double lo,
                                double hi) {
    double m = 0.0;
    for (const auto& p : pts)
        if (p.detuning >= lo && p.detuning <= hi) m = std::max(m, p.excitation);
    return m;
}

} // namespace iccool
