#include <catch2/catch_amalgamated.hpp>

#include "iccool/coupling.hpp"
#include "iccool/phonon.hpp"

using namespace iccool;
using Catch::Approx;

TEST_CASE("thermal distribution construction") {
    SECTION("geometric decay P(n)/P(0) = (nbar/(nbar+1))^n") {
        // single-mode case via a degenerate second axis
        const auto d = thermal_distribution(58.0, 0.0, {thermal_grid_size(58.0), 1});
        const double ratio = 58.0 / 59.0;
        for (int n : {1, 10, 100})
            CHECK(d.probs(n, 0) / d.probs(0, 0) ==
                  Approx(std::pow(ratio, n)).epsilon(1e-9));
        CHECK(d.norm() == Approx(1.0).epsilon(1e-12));
    }
    SECTION("nbar = 0 is the ground state") {
        const auto d = thermal_distribution(0.0, 0.0, {4, 4});
        CHECK(d.probs(0, 0) == Approx(1.0));
        CHECK(d.nbar(0) == 0.0);
        CHECK(d.nbar(1) == 0.0);
    }
    SECTION("mean phonon numbers are reproduced on an adequate grid") {
        const auto d = thermal_distribution(87.0, 51.0,
                                            {thermal_grid_size(87.0),
                                             thermal_grid_size(51.0)});
        CHECK(d.nbar(0) == Approx(87.0).epsilon(1e-4));
        CHECK(d.nbar(1) == Approx(51.0).epsilon(1e-4));
    }
    SECTION("undersized grid is rejected with the required sizes in the message") {
        CHECK_THROWS_AS(thermal_distribution(87.0, 51.0, {300, 300}), NumericError);
    }
    SECTION("negative nbar is rejected") {
        CHECK_THROWS_AS(thermal_distribution(-0.1, 0.0, {4, 4}), ConfigError);
    }
}

TEST_CASE("Doppler tail above the first red-sideband minimum") {
    // nbar_COM = 87 at eta = 0.17: about 24% sits above the minimum;
    // nbar_B = 51 at eta = 0.13: below 1.4%
    const int min1 = find_minima(0.17, 1, 400).front();
    const int min2 = find_minima(0.13, 1, 400).front();
    const auto d = thermal_distribution(
        87.0, 51.0, {thermal_grid_size(87.0), thermal_grid_size(51.0)});
    CHECK(mass_above(d, 0, min1) == Approx(0.24).margin(0.03));
    CHECK(mass_above(d, 1, min2) <= 0.014 + 0.005);
}

TEST_CASE("grid size helper covers the tail bound") {
    for (double nbar : {0.3, 5.0, 51.0, 87.0}) {
        const int n = thermal_grid_size(nbar);
        const double r = nbar / (nbar + 1.0);
        CHECK(std::pow(r, n + 1) <= kLeakageTolerance);
        CHECK(std::pow(r, n) > kLeakageTolerance); // minimal
    }
}
