#include <catch2/catch_amalgamated.hpp>

#include "iccool/cooling.hpp"
#include "iccool/scenarios.hpp"

using namespace iccool;
using Catch::Approx;

namespace {
const std::pair<double, double> kEta{0.17, 0.13};

PhononDistribution delta_state(int n1, int n2, std::pair<int, int> nmax) {
    PhononDistribution d;
    d.probs = Grid2D(nmax.first, nmax.second);
    d.probs(n1, n2) = 1.0;
    return d;
}
} // namespace

TEST_CASE("single pi-like pulse empties P(1,0)") {
    auto d = delta_state(1, 0, {8, 8});
    const double f = kProbeRabiHz * relative_rabi(1, 0, kEta.first) *
                     relative_rabi(0, 0, kEta.second);
    // full coherent transfer: half a flop, no quench cycling
    PulseSpec pulse{{-1, 0}, 0.5 / f, kProbeRabiHz, 1};
    const auto out = apply_pulse(d, pulse, kEta, 0.0);
    CHECK(out.probs(0, 0) == Approx(1.0).epsilon(1e-12));
    CHECK(out.nbar(0) == Approx(0.0).margin(1e-12));
}

TEST_CASE("carrier pulse leaves the distribution unchanged") {
    auto d = thermal_distribution(3.0, 2.0, {60, 60});
    PulseSpec carrier{{0, 0}, 500e-6, kCoolingRabiHz, 1};
    const auto out = apply_pulse(d, carrier, kEta, kDefaultDecayRate);
    CHECK(out.nbar(0) == Approx(d.nbar(0)).epsilon(1e-12));
    CHECK(out.nbar(1) == Approx(d.nbar(1)).epsilon(1e-12));
}

TEST_CASE("dark state at (49,86) barely responds to the plain sideband sets") {
    auto d = delta_state(49, 86, {140, 140});
    const std::vector<PulseSpec> fig3ab{
        {{-1, 0}, 500e-6, kCoolingRabiHz, 1}, {{-2, 0}, 500e-6, kCoolingRabiHz, 1},
        {{-3, 0}, 300e-6, kCoolingRabiHz, 1}, {{0, -1}, 200e-6, kCoolingRabiHz, 1},
        {{0, -2}, 500e-6, kCoolingRabiHz, 1}};
    for (const auto& pulse : fig3ab) {
        const auto out = apply_pulse(d, pulse, kEta, kDefaultDecayRate);
        INFO("sideband (" << pulse.sideband.delta_n1 << "," << pulse.sideband.delta_n2
                          << ")");
        CHECK(1.0 - out.probs(49, 86) < 1e-2);
    }
    SECTION("the intermodulation sideband moves it") {
        PulseSpec intermod{{-2, -1}, 500e-6, kCoolingRabiHz, 1};
        const auto out = apply_pulse(d, intermod, kEta, kDefaultDecayRate);
        CHECK(1.0 - out.probs(49, 86) > 0.5);
    }
}

TEST_CASE("probability is conserved through pulses") {
    auto d = thermal_distribution(10.0, 6.0, {200, 150});
    PulseSpec pulse{{-2, -1}, 500e-6, kCoolingRabiHz, 3};
    const auto out = apply_pulse(d, pulse, kEta, kDefaultDecayRate);
    CHECK(out.norm() == Approx(1.0).epsilon(1e-12));
    out.check_normalized();
}

TEST_CASE("a resonant red pulse never raises the target mode's nbar") {
    auto d = thermal_distribution(8.0, 5.0, {160, 120});
    for (int order = 1; order <= 3; ++order) {
        PulseSpec pulse{{-order, 0}, 400e-6, kCoolingRabiHz, 1};
        const auto out = apply_pulse(d, pulse, kEta, kDefaultDecayRate);
        CHECK(out.nbar(0) <= d.nbar(0) + 1e-12);
        CHECK(out.nbar(1) == Approx(d.nbar(1)).epsilon(1e-12));
        d = out;
    }
}

TEST_CASE("pulse validation") {
    CHECK_THROWS_AS((PulseSpec{{0, 1}, 1e-4, kCoolingRabiHz, 1}.validate()), ConfigError);
    CHECK_THROWS_AS((PulseSpec{{-1, 0}, 0.0, kCoolingRabiHz, 1}.validate()), ConfigError);
    CHECK_THROWS_AS((PulseSpec{{-5, 0}, 1e-4, kCoolingRabiHz, 1}.validate()), ConfigError);
    CHECK_NOTHROW((PulseSpec{{-2, -1}, 1e-4, kCoolingRabiHz, 2}.validate()));
    CHECK_THROWS_AS(CoolingSequence{}.validate(), ConfigError);
}

TEST_CASE("sequence bookkeeping") {
    const CoolingSequence seq = table1_sequence();
    seq.validate();
    CHECK(seq.blocks.size() == 3);
    CHECK(seq.blocks[0].repeat == 15);
    CHECK(seq.total_time() == Approx(15 * 2000e-6 + 2 * 1700e-6 + 3000e-6));

    const CoolingSequence bare = table1_without_intermod();
    int intermods = 0;
    for (const auto& b : bare.blocks)
        for (const auto& p : b.pulses)
            intermods += (p.sideband.delta_n1 != 0 && p.sideband.delta_n2 != 0);
    CHECK(intermods == 0);
}

TEST_CASE("heating: identity, linear growth, thermal form") {
    SECTION("zero delay is the identity") {
        const auto d = thermal_distribution(0.3, 0.3, {40, 40});
        const auto out = apply_heating(d, {11.0, 1.0}, 0.0);
        for (int i = 0; i <= 40; ++i)
            for (int j = 0; j <= 40; ++j)
                CHECK(out.probs(i, j) == d.probs(i, j));
    }
    SECTION("nbar(t) = nbar0 + rate * t") {
        const auto d = thermal_distribution(0.3, 0.0, {80, 1});
        const auto out = apply_heating(d, {11.0, 0.0}, 0.1);
        CHECK(out.nbar(0) == Approx(1.4).epsilon(0.01));
        CHECK(out.norm() == Approx(1.0).epsilon(1e-12));
    }
    SECTION("fitted slope over [0, 200 ms] matches the rate within 2%") {
        const double rate = 11.0;
        auto d = thermal_distribution(0.3, 0.0, {120, 1});
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (int k = 0; k <= 10; ++k) {
            const double t = 0.02 * k;
            const auto h = apply_heating(d, {rate, 0.0}, t);
            sx += t;
            sy += h.nbar(0);
            sxx += t * t;
            sxy += t * h.nbar(0);
            ++n;
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        CHECK(slope == Approx(rate).epsilon(0.02));
    }
    SECTION("a thermal state stays thermal under reservoir heating") {
        const auto d = thermal_distribution(0.5, 0.0, {90, 1});
        const auto out = apply_heating(d, {5.0, 0.0}, 0.1);
        const auto ref = thermal_distribution(1.0, 0.0, {90, 1});
        for (int i = 0; i <= 60; ++i)
            CHECK(out.probs(i, 0) == Approx(ref.probs(i, 0)).margin(2e-5));
    }
    SECTION("population reaching the grid edge is an error") {
        const auto d = delta_state(0, 0, {6, 1});
        CHECK_THROWS_AS(apply_heating(d, {50.0, 0.0}, 0.5), NumericError);
    }
}

// The spec-level properties of the full published schedule (ground-state
// occupation, dark-region evacuation, grid-size independence) take tens of
// seconds on the full Doppler grid and live in the acceptance suite. Here a
// scaled-down run checks run_sequence end to end.
TEST_CASE("sequence run on a reduced Doppler state") {
    const auto d = thermal_distribution(20.0, 12.0, {thermal_grid_size(20.0, 1e-8),
                                                     thermal_grid_size(12.0, 1e-8)});
    const auto res = run_sequence(d, table1_sequence(), kEta, kDefaultDecayRate);
    CHECK(res.dist.norm() == Approx(1.0).epsilon(1e-9));
    CHECK(res.nbar1 < 2.0);
    CHECK(res.nbar2 < 2.0);
    CHECK(res.dist.ground_occupation(0) > 0.5);
    CHECK(res.dist.ground_occupation(1) > 0.5);
    CHECK(res.nbar1 == Approx(res.dist.nbar(0)));
}
