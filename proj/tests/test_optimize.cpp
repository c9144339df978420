#include <catch2/catch_amalgamated.hpp>

#include "iccool/optimize.hpp"
#include "iccool/scenarios.hpp"

using namespace iccool;
using Catch::Approx;

namespace {
OptimizeOptions fast_opts(std::uint64_t seed = 1) {
    OptimizeOptions o;
    o.duration_grid = {200e-6, 500e-6};
    o.seed = seed;
    return o;
}
} // namespace

TEST_CASE("single-mode problem below the first minimum uses first-red pulses only") {
    // eta2 ~ 0: mode 2 never couples, and all population sits well below the
    // first red-sideband minimum of mode 1
    const auto d = thermal_distribution(3.0, 0.0, {60, 1});
    const std::vector<SidebandOrder> candidates{{-1, 0}, {-2, 0}, {0, -1}};
    const auto res =
        optimize_sequence(d, {0.17, 1e-9}, 4e-3, candidates, fast_opts());
    REQUIRE_FALSE(res.sequence.blocks.empty());
    REQUIRE_FALSE(res.sequence.blocks[0].pulses.empty());
    int first_red = 0, other = 0;
    for (const auto& p : res.sequence.blocks[0].pulses)
        (p.sideband.delta_n1 == -1 && p.sideband.delta_n2 == 0 ? first_red : other)++;
    CHECK(other == 0);
    CHECK(first_red > 0);
    CHECK(res.final_nbar_sum < d.nbar(0));
}

TEST_CASE("optimizer beats or matches round robin and is deterministic") {
    const auto d = thermal_distribution(12.0, 8.0, {thermal_grid_size(12.0, 1e-8),
                                                    thermal_grid_size(8.0, 1e-8)});
    const std::vector<SidebandOrder> candidates{
        {-1, 0}, {-2, 0}, {-3, 0}, {0, -1}, {0, -2}, {-2, -1}};
    const auto a = optimize_sequence(d, {0.17, 0.13}, 6e-3, candidates, fast_opts(42));
    CHECK(a.final_nbar_sum <= a.baseline_nbar_sum + 1e-12);

    const auto b = optimize_sequence(d, {0.17, 0.13}, 6e-3, candidates, fast_opts(42));
    REQUIRE(a.sequence.blocks.size() == b.sequence.blocks.size());
    REQUIRE(a.sequence.blocks[0].pulses.size() == b.sequence.blocks[0].pulses.size());
    for (std::size_t i = 0; i < a.sequence.blocks[0].pulses.size(); ++i) {
        const auto& pa = a.sequence.blocks[0].pulses[i];
        const auto& pb = b.sequence.blocks[0].pulses[i];
        CHECK(pa.sideband == pb.sideband);
        CHECK(pa.duration == pb.duration);
    }
    CHECK(a.final_nbar_sum == b.final_nbar_sum);
}

TEST_CASE("budget too small yields a warning and an empty sequence") {
    const auto d = thermal_distribution(1.0, 0.5, {30, 20});
    const auto res =
        optimize_sequence(d, {0.17, 0.13}, 50e-6, {{-1, 0}}, fast_opts());
    CHECK_FALSE(res.warnings.empty());
    CHECK(res.sequence.blocks[0].pulses.empty());
}

TEST_CASE("validation errors") {
    const auto d = thermal_distribution(1.0, 0.5, {30, 20});
    CHECK_THROWS_AS(optimize_sequence(d, {0.17, 0.13}, -1.0, {{-1, 0}}),
                    ConfigError);
    CHECK_THROWS_AS(optimize_sequence(d, {0.17, 0.13}, 1e-3, {}), ConfigError);
}
