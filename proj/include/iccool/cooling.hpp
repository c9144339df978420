#pragma once

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "iccool/constants.hpp"
#include "iccool/coupling.hpp"
#include "iccool/defaults.hpp"
#include "iccool/errors.hpp"
#include "iccool/phonon.hpp"

// Incoherent rate model for multi-pulse sideband cooling over the 2D phonon
// grid, plus reservoir heating.
//
// The quench laser keeps the effective decay rate gamma high, so a single
// pulse of length tau contains roughly tau*gamma excite-decay cycles. Each
// cycle moves population from (n1, n2) to the pulse's target state with
// probability sin^2(pi f tau_c) for flopping angle below a pi pulse, and
// with the dephased saturation average 0.5 (1 - exp(-(2 pi f tau_c)^2 / 2))
// beyond it; decay returns the ion to the electronic ground state with the
// phonon number unchanged (recoil neglected).

namespace iccool {

struct PulseSpec {
    SidebandOrder sideband;
    double duration = 0.0;       // s
    double rabi_frequency = kCoolingRabiHz; // Hz, carrier value
    int repeats = 1;

    void validate(int max_order = kDefaultMaxSidebandOrder) const {
        if (duration <= 0) throw ConfigError("PulseSpec: duration must be > 0");
        if (repeats < 1) throw ConfigError("PulseSpec: repeats must be >= 1");
        check_order(sideband, max_order);
        if (!sideband.is_carrier() && sideband.delta_n1 >= 0 && sideband.delta_n2 >= 0)
            throw ConfigError("PulseSpec: cooling pulses need at least one negative "
                              "phonon change");
    }
};

struct PulseBlock {
    std::vector<PulseSpec> pulses;
    int repeat = 1;
};

struct CoolingSequence {
    std::vector<PulseBlock> blocks;

    void validate(int max_order = kDefaultMaxSidebandOrder) const {
        if (blocks.empty()) throw ConfigError("CoolingSequence: no blocks");
        for (const auto& b : blocks) {
            if (b.repeat < 1) throw ConfigError("CoolingSequence: block repeat < 1");
            if (b.pulses.empty()) throw ConfigError("CoolingSequence: empty block");
            for (const auto& p : b.pulses) p.validate(max_order);
        }
    }

    double total_time() const {
        double t = 0.0;
        for (const auto& b : blocks) {
            double tb = 0.0;
            for (const auto& p : b.pulses) tb += p.duration * p.repeats;
            t += tb * b.repeat;
        }
        return t;
    }
};

namespace detail {

// Per-cycle transfer probability for coupling f (Hz) over a coherence
// window tau_c.
inline double cycle_transfer(double f, double tau_c) {
    const double angle = f * tau_c; // in units of full flops; pi pulse at 1/2
    if (angle <= 0.5) {
        const double s = std::sin(constants::pi * angle);
        return s * s;
    }
    const double wt = 2.0 * constants::pi * angle; // Omega*tau in radians
    return 0.5 * (1.0 - std::exp(-wt * wt / 2.0));
}

} // namespace detail

// One resonant pulse on the whole distribution. Cycle count is set by the
// quench decay rate; with decay_rate = 0 the pulse is a single coherent shot.
inline PhononDistribution apply_pulse(const PhononDistribution& dist,
                                      const PulseSpec& pulse,
                                      std::pair<double, double> eta,
                                      double decay_rate) {
    pulse.validate();
    dist.check_normalized();
    if (decay_rate < 0) throw ConfigError("apply_pulse: decay rate must be >= 0");

    const int n1m = dist.probs.n1_max(), n2m = dist.probs.n2_max();
    const int d1 = pulse.sideband.delta_n1, d2 = pulse.sideband.delta_n2;
    detail::FactorCache cache(eta, {n1m, n2m});
    const auto& f1 = cache.mode1(d1);
    const auto& f2 = cache.mode2(d2);

    const int cycles =
        std::max(1, static_cast<int>(std::lround(pulse.duration * decay_rate)));
    const double tau_c = pulse.duration / cycles;

    PhononDistribution out = dist;
    for (int rep = 0; rep < pulse.repeats; ++rep) {
        for (int c = 0; c < cycles; ++c) {
            Grid2D next(n1m, n2m);
            for (int n1 = 0; n1 <= n1m; ++n1) {
                const int t1 = n1 + d1;
                const bool ok1 = t1 >= 0 && t1 <= n1m;
                for (int n2 = 0; n2 <= n2m; ++n2) {
                    const double mass = out.probs(n1, n2);
                    if (mass == 0.0) continue;
                    const int t2 = n2 + d2;
                    if (!ok1 || t2 < 0 || t2 > n2m) {
                        // target outside grid: no transfer; above-edge targets
                        // are counted as (potential) truncation leakage
                        if (t1 > n1m || t2 > n2m) {
                            const double p = detail::cycle_transfer(
                                pulse.rabi_frequency * f1[n1] * f2[n2], tau_c);
                            out.leakage += p * mass; // conservative: mass kept in place
                        }
                        next(n1, n2) += mass;
                        continue;
                    }
                    const double p = detail::cycle_transfer(
                        pulse.rabi_frequency * f1[n1] * f2[n2], tau_c);
                    next(n1, n2) += (1.0 - p) * mass;
                    next(t1, t2) += p * mass;
                }
            }
            out.probs = std::move(next);
        }
    }
    out.renormalize();
    out.check_normalized();
    return out;
}

struct SequenceResult {
    PhononDistribution dist;
    double nbar1 = 0.0;
    double nbar2 = 0.0;
};

inline SequenceResult run_sequence(const PhononDistribution& initial,
                                   const CoolingSequence& seq,
                                   std::pair<double, double> eta,
                                   double decay_rate) {
    seq.validate();
    PhononDistribution dist = initial;
    for (const auto& block : seq.blocks)
        for (int r = 0; r < block.repeat; ++r)
            for (const auto& pulse : block.pulses)
                dist = apply_pulse(dist, pulse, eta, decay_rate);
    SequenceResult res{std::move(dist), 0.0, 0.0};
    res.nbar1 = res.dist.nbar(0);
    res.nbar2 = res.dist.nbar(1);
    return res;
}

// Infinite-temperature reservoir heating: each mode evolves under the
// birth-death master equation
//   dP_n/dt = r [ n P_{n-1} + (n+1) P_{n+1} - (2n+1) P_n ],
// which gives dnbar/dt = r exactly. Integrated with RK4; step size set by
// the stiffest rate on the grid.
inline PhononDistribution apply_heating(const PhononDistribution& dist,
                                        std::pair<double, double> rates,
                                        double delay) {
    if (rates.first < 0 || rates.second < 0)
        throw ConfigError("apply_heating: rates must be >= 0");
    if (delay < 0) throw ConfigError("apply_heating: delay must be >= 0");
    dist.check_normalized();
    if (delay == 0.0 || (rates.first == 0.0 && rates.second == 0.0)) return dist;

    const int n1m = dist.probs.n1_max(), n2m = dist.probs.n2_max();
    const double lmax = rates.first * (2.0 * n1m + 2.0) +
                        rates.second * (2.0 * n2m + 2.0);
    const int steps = std::max(1, static_cast<int>(std::ceil(delay * lmax)));
    const double dt = delay / steps;

    auto deriv = [&](const Grid2D& p, Grid2D& dp) {
        for (int n1 = 0; n1 <= n1m; ++n1) {
            for (int n2 = 0; n2 <= n2m; ++n2) {
                double d = -(rates.first * (2.0 * n1 + 1.0) +
                             rates.second * (2.0 * n2 + 1.0)) * p(n1, n2);
                if (n1 > 0) d += rates.first * n1 * p(n1 - 1, n2);
                if (n1 < n1m) d += rates.first * (n1 + 1.0) * p(n1 + 1, n2);
                if (n2 > 0) d += rates.second * n2 * p(n1, n2 - 1);
                if (n2 < n2m) d += rates.second * (n2 + 1.0) * p(n1, n2 + 1);
                dp(n1, n2) = d;
            }
        }
    };

    PhononDistribution out = dist;
    Grid2D k1(n1m, n2m), k2(n1m, n2m), k3(n1m, n2m), k4(n1m, n2m), tmp(n1m, n2m);
    for (int s = 0; s < steps; ++s) {
        deriv(out.probs, k1);
        for (std::size_t i = 0; i < tmp.size(); ++i)
            tmp.raw()[i] = out.probs.raw()[i] + 0.5 * dt * k1.raw()[i];
        deriv(tmp, k2);
        for (std::size_t i = 0; i < tmp.size(); ++i)
            tmp.raw()[i] = out.probs.raw()[i] + 0.5 * dt * k2.raw()[i];
        deriv(tmp, k3);
        for (std::size_t i = 0; i < tmp.size(); ++i)
            tmp.raw()[i] = out.probs.raw()[i] + dt * k3.raw()[i];
        deriv(tmp, k4);
        for (std::size_t i = 0; i < tmp.size(); ++i)
            out.probs.raw()[i] += dt / 6.0 *
                (k1.raw()[i] + 2.0 * k2.raw()[i] + 2.0 * k3.raw()[i] + k4.raw()[i]);
    }

    // population reaching the top edge means the truncated operator is no
    // longer faithful
    double edge = 0.0;
    for (int n2 = 0; n2 <= n2m; ++n2) edge += out.probs(n1m, n2);
    for (int n1 = 0; n1 <= n1m; ++n1) edge += out.probs(n1, n2m);
    if (edge > kLeakageTolerance)
        throw NumericError("apply_heating: population reached the grid edge (" +
                           std::to_string(edge) + "); enlarge the grid");
    out.leakage += std::max(0.0, 1.0 - out.norm());
    out.renormalize();
    return out;
}

} // namespace iccool
