#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "iccool/cooling.hpp"
#include "iccool/rng.hpp"

// Greedy construction of a cooling sequence with local-search refinement.
// Candidates are scored by the drop of (nbar1 + nbar2) per unit pulse time
// on the evolving distribution; the refinement tries pairwise pulse swaps
// and duration substitutions. Deterministic for a fixed seed, and the
// result is never worse than a round-robin schedule over the same budget.

namespace iccool {

struct OptimizeOptions {
    std::vector<double> duration_grid{100e-6, 200e-6, 500e-6, 1000e-6}; // s
    double rabi_frequency = kCoolingRabiHz; // Hz
    double decay_rate = kDefaultDecayRate;  // s^-1
    int local_search_sweeps = 2;
    int max_swap_trials = 40;
    std::uint64_t seed = 1;
};

struct OptimizeResult {
    CoolingSequence sequence;
    double final_nbar_sum = 0.0;
    double baseline_nbar_sum = 0.0;
    std::vector<std::string> warnings;
};

namespace detail {

inline double nbar_sum_after(const PhononDistribution& initial,
                             const std::vector<PulseSpec>& pulses,
                             std::pair<double, double> eta, double decay_rate) {
    PhononDistribution d = initial;
    for (const auto& p : pulses) d = apply_pulse(d, p, eta, decay_rate);
    return d.nbar(0) + d.nbar(1);
}

inline CoolingSequence to_sequence(const std::vector<PulseSpec>& pulses) {
    CoolingSequence seq;
    seq.blocks.push_back({pulses, 1});
    return seq;
}

} // namespace detail

inline OptimizeResult optimize_sequence(const PhononDistribution& initial,
                                        std::pair<double, double> eta,
                                        double budget,
                                        const std::vector<SidebandOrder>& candidates,
                                        const OptimizeOptions& opts = {}) {
    if (budget <= 0) throw ConfigError("optimize_sequence: budget must be > 0");
    if (candidates.empty())
        throw ConfigError("optimize_sequence: empty candidate set");
    for (const auto& sb : candidates) check_order(sb);
    initial.check_normalized();

    OptimizeResult result;
    const double min_duration =
        *std::min_element(opts.duration_grid.begin(), opts.duration_grid.end());
    if (budget < min_duration) {
        result.warnings.push_back("budget shorter than the smallest pulse; empty "
                                  "sequence returned");
        result.final_nbar_sum = result.baseline_nbar_sum =
            initial.nbar(0) + initial.nbar(1);
        result.sequence.blocks.push_back({{}, 1});
        return result;
    }

    // round-robin baseline: cycle candidates at the shortest grid duration
    std::vector<PulseSpec> baseline;
    {
        double t = 0.0;
        std::size_t k = 0;
        while (t + min_duration <= budget) {
            baseline.push_back(
                {candidates[k % candidates.size()], min_duration,
                 opts.rabi_frequency, 1});
            t += min_duration;
            ++k;
        }
    }
    result.baseline_nbar_sum =
        detail::nbar_sum_after(initial, baseline, eta, opts.decay_rate);

    // greedy: always append the candidate/duration with the best cooling rate
    std::vector<PulseSpec> chosen;
    {
        PhononDistribution current = initial;
        double remaining = budget;
        while (remaining >= min_duration) {
            double best_rate = 0.0;
            PulseSpec best_pulse;
            PhononDistribution best_dist;
            const double before = current.nbar(0) + current.nbar(1);
            for (const auto& sb : candidates) {
                for (double dur : opts.duration_grid) {
                    if (dur > remaining) continue;
                    PulseSpec pulse{sb, dur, opts.rabi_frequency, 1};
                    const auto next = apply_pulse(current, pulse, eta, opts.decay_rate);
                    const double rate =
                        (before - next.nbar(0) - next.nbar(1)) / dur;
                    if (rate > best_rate) {
                        best_rate = rate;
                        best_pulse = pulse;
                        best_dist = next;
                    }
                }
            }
            if (best_rate <= 0.0) break; // nothing productive remains
            chosen.push_back(best_pulse);
            current = std::move(best_dist);
            remaining -= best_pulse.duration;
        }
    }

    // local search: pairwise swaps and duration substitutions
    if (!chosen.empty()) {
        double best = detail::nbar_sum_after(initial, chosen, eta, opts.decay_rate);
        Rng rng(opts.seed);
        for (int sweep = 0; sweep < opts.local_search_sweeps; ++sweep) {
            bool improved = false;
            for (int trial = 0;
                 trial < std::min<int>(opts.max_swap_trials,
                                       static_cast<int>(chosen.size() *
                                                        chosen.size()));
                 ++trial) {
                const auto i =
                    static_cast<std::size_t>(rng.uniform() * chosen.size());
                const auto j =
                    static_cast<std::size_t>(rng.uniform() * chosen.size());
                if (i == j || !(chosen[i].sideband == chosen[j].sideband) ||
                    chosen[i].duration != chosen[j].duration) {
                    std::swap(chosen[std::min(i, j)], chosen[std::max(i, j)]);
                    const double v = detail::nbar_sum_after(initial, chosen, eta,
                                                            opts.decay_rate);
                    if (v < best) {
                        best = v;
                        improved = true;
                    } else {
                        std::swap(chosen[std::min(i, j)], chosen[std::max(i, j)]);
                    }
                }
            }
            // duration substitutions that respect the budget
            for (std::size_t i = 0; i < chosen.size(); ++i) {
                for (double dur : opts.duration_grid) {
                    if (dur == chosen[i].duration) continue;
                    double total = dur;
                    for (std::size_t k = 0; k < chosen.size(); ++k)
                        if (k != i) total += chosen[k].duration;
                    if (total > budget) continue;
                    const double old = chosen[i].duration;
                    chosen[i].duration = dur;
                    const double v = detail::nbar_sum_after(initial, chosen, eta,
                                                            opts.decay_rate);
                    if (v < best) {
                        best = v;
                        improved = true;
                    } else {
                        chosen[i].duration = old;
                    }
                }
            }
            if (!improved) break;
        }
        result.final_nbar_sum = best;
    } else {
        result.final_nbar_sum = initial.nbar(0) + initial.nbar(1);
    }

    // the contract: never worse than the round-robin baseline
    if (result.final_nbar_sum > result.baseline_nbar_sum) {
        result.sequence = detail::to_sequence(baseline);
        result.final_nbar_sum = result.baseline_nbar_sum;
        result.warnings.push_back("greedy result lost to the round-robin baseline; "
                                  "baseline returned");
    } else {
        result.sequence = detail::to_sequence(chosen);
    }
    return result;
}

} // namespace iccool
