#pragma once

#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "iccool/errors.hpp"
#include "iccool/grid.hpp"

// Truncated two-dimensional phonon occupancy P(n1, n2) and the thermal
// initial states used throughout the cooling and spectroscopy code.

namespace iccool {

inline constexpr double kNormTolerance = 1e-9;
inline constexpr double kLeakageTolerance = 1e-6;

struct PhononDistribution {
    Grid2D probs;
    std::array<std::string, 2> mode_labels{"mode1", "mode2"};
    double leakage = 0.0; // probability mass lost to truncation so far

    double norm() const { return probs.sum(); }

    void check_normalized() const {
        if (std::abs(norm() - 1.0) > kNormTolerance)
            throw NumericError("PhononDistribution: norm drifted to " +
                               std::to_string(norm()));
        if (leakage > kLeakageTolerance)
            throw NumericError("PhononDistribution: truncation leakage " +
                               std::to_string(leakage) + " exceeds tolerance");
    }

    double nbar(int mode) const {
        double s = 0.0;
        for (int n1 = 0; n1 <= probs.n1_max(); ++n1)
            for (int n2 = 0; n2 <= probs.n2_max(); ++n2)
                s += (mode == 0 ? n1 : n2) * probs(n1, n2);
        return s;
    }

    // marginal P(n_mode = 0)
    double ground_occupation(int mode) const {
        double s = 0.0;
        if (mode == 0) {
            for (int n2 = 0; n2 <= probs.n2_max(); ++n2) s += probs(0, n2);
        } else {
            for (int n1 = 0; n1 <= probs.n1_max(); ++n1) s += probs(n1, 0);
        }
        return s;
    }

    double mass_in(const std::vector<std::pair<int, int>>& cells) const {
        double s = 0.0;
        for (auto [a, b] : cells)
            if (a <= probs.n1_max() && b <= probs.n2_max()) s += probs(a, b);
        return s;
    }

    void renormalize() {
        const double s = norm();
        if (s <= 0) throw NumericError("PhononDistribution: vanished norm");
        for (double& v : probs.raw()) v /= s;
    }
};

// Smallest n_max with untruncated geometric tail mass below eps:
// P(n > n_max) = (nbar/(nbar+1))^(n_max+1).
inline int thermal_grid_size(double nbar, double eps = kLeakageTolerance) {
    if (nbar <= 0) return 1;
    const double r = nbar / (nbar + 1.0);
    const int n = static_cast<int>(std::ceil(std::log(eps) / std::log(r))) - 1;
    return std::max(n, 1);
}

// Product of two geometric (thermal) distributions, renormalized on the
// truncated grid. Refuses grids that would silently drop more than the
// leakage tolerance per mode.
inline PhononDistribution thermal_distribution(double nbar1, double nbar2,
                                               std::pair<int, int> n_max) {
    if (nbar1 < 0 || nbar2 < 0)
        throw ConfigError("thermal_distribution: nbar must be >= 0");
    const auto tail = [](double nbar, int nm) {
        return nbar <= 0 ? 0.0 : std::pow(nbar / (nbar + 1.0), nm + 1);
    };
    const double t1 = tail(nbar1, n_max.first), t2 = tail(nbar2, n_max.second);
    if (t1 > kLeakageTolerance || t2 > kLeakageTolerance)
        throw NumericError(
            "thermal_distribution: grid (" + std::to_string(n_max.first) + ", " +
            std::to_string(n_max.second) + ") drops tail mass " +
            std::to_string(std::max(t1, t2)) + "; need n_max >= (" +
            std::to_string(thermal_grid_size(nbar1)) + ", " +
            std::to_string(thermal_grid_size(nbar2)) + ")");

    PhononDistribution dist;
    dist.probs = Grid2D(n_max.first, n_max.second);
    const double r1 = nbar1 / (nbar1 + 1.0), r2 = nbar2 / (nbar2 + 1.0);
    std::vector<double> p1(n_max.first + 1), p2(n_max.second + 1);
    p1[0] = 1.0;
    for (int n = 1; n <= n_max.first; ++n) p1[n] = p1[n - 1] * r1;
    p2[0] = 1.0;
    for (int n = 1; n <= n_max.second; ++n) p2[n] = p2[n - 1] * r2;
    for (int n1 = 0; n1 <= n_max.first; ++n1)
        for (int n2 = 0; n2 <= n_max.second; ++n2)
            dist.probs(n1, n2) = p1[n1] * p2[n2];
    dist.renormalize();
    return dist;
}

// P(n_mode > n0) marginal of the truncated distribution.
inline double mass_above(const PhononDistribution& dist, int mode, int n0) {
    double s = 0.0;
    for (int n1 = 0; n1 <= dist.probs.n1_max(); ++n1)
        for (int n2 = 0; n2 <= dist.probs.n2_max(); ++n2)
            if ((mode == 0 ? n1 : n2) > n0) s += dist.probs(n1, n2);
    return s;
}

} // namespace iccool
