#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <thread>
#include <utility>
#include <vector>

#include "iccool/errors.hpp"
#include "iccool/grid.hpp"

// Carrier/sideband Rabi coupling strengths over one- and two-mode phonon
// spaces. The single-mode matrix element is
//
//   sqrt(lo!/hi!) * eta^|dn| * exp(-eta^2/2) * L_lo^{|dn|}(eta^2)
//
// with lo = min(n, n'), hi = max(n, n'). Only magnitudes are exposed; the
// phase factors belong to the coherent evolution in twoion.hpp. Factorial
// ratios are evaluated in log space so phonon numbers in the hundreds (the
// regime of interest here) never overflow.

namespace iccool {

inline constexpr int kDefaultMaxSidebandOrder = 4;
inline constexpr double kDarkThresholdFraction = 0.02;

struct SidebandOrder {
    int delta_n1 = 0; // phonon change of mode 1; negative = red
    int delta_n2 = 0;

    bool is_carrier() const { return delta_n1 == 0 && delta_n2 == 0; }
    bool operator==(const SidebandOrder&) const = default;
};

inline void check_order(const SidebandOrder& sb,
                        int max_order = kDefaultMaxSidebandOrder) {
    if (std::abs(sb.delta_n1) > max_order || std::abs(sb.delta_n2) > max_order)
        throw ConfigError("sideband order exceeds configured maximum |dn| <= " +
                          std::to_string(max_order));
}

namespace detail {

// L_k^a(x) by the three-term recurrence in the degree k.
inline double laguerre(int k, int a, double x) {
    if (k == 0) return 1.0;
    double lm1 = 1.0;
    double l = 1.0 + a - x;
    for (int i = 1; i < k; ++i) {
        const double lp1 = ((2.0 * i + 1.0 + a - x) * l - (i + a) * lm1) / (i + 1.0);
        lm1 = l;
        l = lp1;
    }
    return l;
}

inline double log_prefactor(int lo, int hi, double eta) {
    // log of sqrt(lo!/hi!) * eta^(hi-lo) * exp(-eta^2/2)
    return 0.5 * (std::lgamma(lo + 1.0) - std::lgamma(hi + 1.0)) +
           (hi - lo) * std::log(eta) - eta * eta / 2.0;
}

} // namespace detail

// |<n'| exp(i eta (a + a^dag)) |n>|, the single-mode factor of the two-mode
// sideband Rabi strength. Symmetric in (n, n'); always in [0, 1].
inline double relative_rabi(int n, int n_prime, double eta) {
    if (n < 0 || n_prime < 0) throw ConfigError("relative_rabi: negative phonon number");
    if (eta < 0) throw ConfigError("relative_rabi: eta must be >= 0");
    const int lo = std::min(n, n_prime);
    const int hi = std::max(n, n_prime);
    if (eta == 0.0) return lo == hi ? 1.0 : 0.0;
    const double val = detail::laguerre(lo, hi - lo, eta * eta);
    const double mag = std::exp(detail::log_prefactor(lo, hi, eta)) * std::abs(val);
    return std::min(mag, 1.0);
}

inline double two_mode_rabi(int n1, int n1_prime, int n2, int n2_prime,
                            double eta1, double eta2) {
    return relative_rabi(n1, n1_prime, eta1) * relative_rabi(n2, n2_prime, eta2);
}

// Strength of the order-|delta_n| sideband as a function of the start state
// n = 0..n_max. Entries where the target n + delta_n falls below zero are 0.
// One recurrence pass over the whole curve.
inline std::vector<double> sideband_curve(double eta, int delta_n, int n_max) {
    if (n_max < 0) throw ConfigError("sideband_curve: n_max must be >= 0");
    std::vector<double> out(n_max + 1, 0.0);
    const int m = std::abs(delta_n);
    if (eta == 0.0) {
        if (m == 0) std::fill(out.begin(), out.end(), 1.0);
        return out;
    }
    const double x = eta * eta;
    double lm1 = 0.0, l = 1.0; // L_0
    for (int k = 0; k + (delta_n < 0 ? m : 0) <= n_max; ++k) {
        // k = min(n, n'): start state n = k + m for red, n = k for blue/carrier
        const int n = delta_n < 0 ? k + m : k;
        if (n <= n_max)
            out[n] = std::min(std::exp(detail::log_prefactor(k, k + m, eta)) *
                              std::abs(l), 1.0);
        const double lp1 = ((2.0 * k + 1.0 + m - x) * l - (k + m) * lm1) / (k + 1.0);
        lm1 = l;
        l = lp1;
    }
    return out;
}

// Local minima of a sideband strength curve that fall below the dark
// threshold (a fraction of the curve's global maximum). These are the
// phonon numbers where population gets trapped during cooling.
inline std::vector<int> find_minima(double eta, int order, int n_max,
                                    double threshold_fraction = kDarkThresholdFraction) {
    if (n_max < 2) throw ConfigError("find_minima: n_max must be >= 2");
    if (order < 0) throw ConfigError("find_minima: order must be >= 0");
    const auto curve = sideband_curve(eta, -order, n_max);
    const double cutoff =
        threshold_fraction * *std::max_element(curve.begin(), curve.end());
    std::vector<int> minima;
    for (int n = 1; n < n_max; ++n) {
        if (curve[n] < curve[n - 1] && curve[n] <= curve[n + 1] && curve[n] < cutoff)
            minima.push_back(n);
    }
    return minima;
}

struct StrengthMap {
    Grid2D grid;                        // max over the sideband set, in [0, 1]
    std::vector<SidebandOrder> sidebands;
    double eta1 = 0.0, eta2 = 0.0;

    // True if at least one sideband of the set has a valid target from
    // (n1, n2); the all-red set cannot act on the ground state at all.
    bool reachable(int n1, int n2) const {
        for (const auto& sb : sidebands) {
            const int t1 = n1 + sb.delta_n1, t2 = n2 + sb.delta_n2;
            if (t1 >= 0 && t2 >= 0 && t1 <= grid.n1_max() && t2 <= grid.n2_max())
                return true;
        }
        return false;
    }

    double dark_threshold(double fraction = kDarkThresholdFraction) const {
        return fraction * grid.max();
    }
};

namespace detail {

// Cached single-mode factor curves per (eta, delta).
class FactorCache {
public:
    FactorCache(std::pair<double, double> eta, std::pair<int, int> n_max)
        : eta_(eta), n_max_(n_max) {}

    const std::vector<double>& mode1(int delta) { return get(0, delta); }
    const std::vector<double>& mode2(int delta) { return get(1, delta); }

private:
    const std::vector<double>& get(int mode, int delta) {
        auto& slot = cache_[mode][delta];
        if (slot.empty())
            slot = sideband_curve(mode == 0 ? eta_.first : eta_.second, delta,
                                  mode == 0 ? n_max_.first : n_max_.second);
        return slot;
    }

    std::pair<double, double> eta_;
    std::pair<int, int> n_max_;
    std::map<int, std::vector<double>> cache_[2];
};

template <typename F>
void parallel_rows(int rows, F&& body) {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (hw == 1 || rows < 8) {
        for (int r = 0; r < rows; ++r) body(r);
        return;
    }
    std::vector<std::thread> pool;
    const int chunk = (rows + static_cast<int>(hw) - 1) / static_cast<int>(hw);
    for (unsigned t = 0; t < hw; ++t) {
        const int lo = static_cast<int>(t) * chunk;
        const int hi = std::min(rows, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (int r = lo; r < hi; ++r) body(r);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace detail

// Max-combined strength of a sideband set over the (n1, n2) phonon grid.
// grid(n1, n2) = max over the set of |two-mode Rabi factor| for a pulse
// starting from (n1, n2); sidebands whose target leaves the grid contribute 0.
inline StrengthMap strength_map(const std::vector<SidebandOrder>& sidebands,
                                std::pair<double, double> eta,
                                std::pair<int, int> n_max,
                                int max_order = kDefaultMaxSidebandOrder) {
    if (sidebands.empty()) throw ConfigError("strength_map: empty sideband set");
    for (const auto& sb : sidebands) check_order(sb, max_order);

    StrengthMap map;
    map.sidebands = sidebands;
    map.eta1 = eta.first;
    map.eta2 = eta.second;
    map.grid = Grid2D(n_max.first, n_max.second);

    // per-sideband factor curves, cached once
    std::vector<std::vector<double>> f1, f2;
    f1.reserve(sidebands.size());
    f2.reserve(sidebands.size());
    for (const auto& sb : sidebands) {
        f1.push_back(sideband_curve(eta.first, sb.delta_n1, n_max.first));
        f2.push_back(sideband_curve(eta.second, sb.delta_n2, n_max.second));
    }

    detail::parallel_rows(n_max.first + 1, [&](int n1) {
        for (int n2 = 0; n2 <= n_max.second; ++n2) {
            double best = 0.0;
            for (std::size_t s = 0; s < sidebands.size(); ++s) {
                const double v = f1[s][n1] * f2[s][n2];
                best = v > best ? v : best;
            }
            map.grid(n1, n2) = best;
        }
    });
    return map;
}

// Connected components (4-neighbour) of grid cells whose strength is below
// threshold. Cells that no sideband of the set can act on are excluded:
// they are not "trapped", there is simply nothing addressing them (for an
// all-red set that is only the ground cell).
inline std::vector<std::vector<std::pair<int, int>>> dark_components(
    const StrengthMap& map, double threshold) {
    const int rows = map.grid.n1_max() + 1;
    const int cols = map.grid.n2_max() + 1;
    std::vector<char> dark(static_cast<std::size_t>(rows) * cols, 0);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            dark[static_cast<std::size_t>(i) * cols + j] =
                map.grid(i, j) < threshold && map.reachable(i, j);

    std::vector<std::vector<std::pair<int, int>>> components;
    std::vector<char> seen(dark.size(), 0);
    std::vector<std::pair<int, int>> stack;
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            const std::size_t at = static_cast<std::size_t>(i) * cols + j;
            if (!dark[at] || seen[at]) continue;
            std::vector<std::pair<int, int>> comp;
            stack.assign(1, {i, j});
            seen[at] = 1;
            while (!stack.empty()) {
                auto [a, b] = stack.back();
                stack.pop_back();
                comp.emplace_back(a, b);
                constexpr int d[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
                for (const auto& dd : d) {
                    const int x = a + dd[0], y = b + dd[1];
                    if (x < 0 || y < 0 || x >= rows || y >= cols) continue;
                    const std::size_t k = static_cast<std::size_t>(x) * cols + y;
                    if (dark[k] && !seen[k]) {
                        seen[k] = 1;
                        stack.emplace_back(x, y);
                    }
                }
            }
            components.push_back(std::move(comp));
        }
    }
    return components;
}

} // namespace iccool
