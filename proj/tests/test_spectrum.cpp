#include <catch2/catch_amalgamated.hpp>

#include "iccool/spectrum.hpp"

using namespace iccool;
using Catch::Approx;

namespace {
std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
    return v;
}
} // namespace

TEST_CASE("ground state with eta -> 0 gives a single carrier peak") {
    const auto d = thermal_distribution(0.0, 0.0, {4, 4});
    ProbePulse probe{0.0, 100e-6, 14e3};
    const auto res = simulate_spectrum_thermal(d, {1e-6, 1e-6}, probe,
                                               linspace(-400e3, 400e3, 401),
                                               {162e3, 280.6e3});
    double peak = 0.0, off = 0.0;
    for (const auto& p : res.points) {
        if (std::abs(p.detuning) < 1e3)
            peak = std::max(peak, p.excitation);
        else if (std::abs(p.detuning) > 40e3)
            off = std::max(off, p.excitation);
    }
    CHECK(peak == Approx(std::pow(std::sin(constants::pi * 14e3 * 100e-6), 2))
                      .margin(1e-6));
    CHECK(off < 1e-4);
}

TEST_CASE("Doppler spectrum shows sidebands at the combination frequencies") {
    // a reduced version of the published Doppler scenario (smaller nbar so
    // the grid stays small); the structure is the same
    const auto d = thermal_distribution(20.0, 12.0, {thermal_grid_size(20.0),
                                                     thermal_grid_size(12.0)});
    ProbePulse probe{0.0, 60e-6, 14e3};
    const double nu1 = 162e3, nu2 = 280592.0;
    const auto res = simulate_spectrum_thermal(
        d, {0.17, 0.13}, probe, linspace(-600e3, 600e3, 1201), {nu1, nu2});

    // every low-order combination line inside +-600 kHz shows up
    const std::vector<std::pair<int, int>> combos{
        {1, 0}, {-1, 0}, {0, 1}, {0, -1}, {2, 0}, {-2, 0},
        {1, 1}, {-1, -1}, {1, -1}, {-1, 1}, {3, 0}, {0, 2}};
    for (auto [m1, m2] : combos) {
        const double f = m1 * nu1 + m2 * nu2;
        if (std::abs(f) > 590e3) continue;
        INFO("combination (" << m1 << "," << m2 << ") at " << f);
        CHECK(max_excitation_in(res.points, f - 3e3, f + 3e3) > 0.02);
    }
    // far outside the Lamb-Dicke regime the carrier does not dominate
    const double carrier = max_excitation_in(res.points, -3e3, 3e3);
    const double red1 = max_excitation_in(res.points, -nu1 - 3e3, -nu1 + 3e3);
    CHECK(carrier < 2.0 * red1);
    // overlapping sidebands were reported
    CHECK_FALSE(res.warnings.empty());
}

TEST_CASE("thermal sideband asymmetry equals nbar/(nbar+1) in the weak limit") {
    const double nbar = 0.3;
    const auto d = thermal_distribution(nbar, 0.0, {60, 1});
    // weak and short probe, small eta: first-order sidebands dominate
    ProbePulse probe{0.0, 50e-6, 2e3};
    const double nu1 = 120e3;
    const auto res = simulate_spectrum_thermal(d, {0.05, 1e-8}, probe,
                                               linspace(-125e3, 125e3, 2501),
                                               {nu1, 7.77e6});
    const double red = max_excitation_in(res.points, -nu1 - 2e3, -nu1 + 2e3);
    const double blue = max_excitation_in(res.points, nu1 - 2e3, nu1 + 2e3);
    CHECK(red / blue == Approx(nbar / (nbar + 1.0)).epsilon(0.02));
}

TEST_CASE("gaussian convolution") {
    SECTION("sigma = 0 is the identity") {
        std::vector<SpectrumPoint> pts;
        for (int i = 0; i < 50; ++i) pts.push_back({i * 100.0, i % 7 * 0.1, 0});
        const auto out = convolve_gaussian(pts, 0.0, 0.0, 5000.0);
        for (std::size_t i = 0; i < pts.size(); ++i)
            CHECK(out[i].excitation == pts[i].excitation);
    }
    SECTION("delta peak spreads to height h * step / (sigma sqrt(2 pi))") {
        std::vector<SpectrumPoint> pts;
        const double step = 100.0, h = 0.8, sigma = 700.0;
        for (int i = -100; i <= 100; ++i)
            pts.push_back({i * step, i == 0 ? h : 0.0, 0});
        const auto out = convolve_gaussian(pts, sigma, -8e3, 8e3);
        const double expected = h * step / (sigma * std::sqrt(2.0 * constants::pi));
        CHECK(max_excitation_in(out, -50.0, 50.0) == Approx(expected).epsilon(0.02));
        // integral preserved away from edges
        double sum_in = 0.0, sum_out = 0.0;
        for (const auto& p : pts) sum_in += p.excitation;
        for (const auto& p : out) sum_out += p.excitation;
        CHECK(sum_out == Approx(sum_in).epsilon(0.01));
    }
    SECTION("points outside the window are untouched") {
        std::vector<SpectrumPoint> pts;
        for (int i = 0; i <= 200; ++i) pts.push_back({i * 50.0, i == 60 ? 1.0 : 0.0, 0});
        const auto out = convolve_gaussian(pts, 200.0, 0.0, 2000.0);
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (pts[i].detuning > 2000.0)
                CHECK(out[i].excitation == pts[i].excitation);
    }
    SECTION("narrow window warns") {
        std::vector<SpectrumPoint> pts;
        for (int i = 0; i <= 20; ++i) pts.push_back({i * 50.0, 0.1, 0});
        std::vector<std::string> warnings;
        convolve_gaussian(pts, 400.0, 0.0, 1000.0, &warnings);
        CHECK_FALSE(warnings.empty());
    }
    SECTION("non-uniform grid in the window is rejected") {
        std::vector<SpectrumPoint> pts{{0.0, 0.1, 0}, {100.0, 0.2, 0}, {350.0, 0.1, 0}};
        CHECK_THROWS_AS(convolve_gaussian(pts, 50.0, 0.0, 400.0), ConfigError);
    }
}

TEST_CASE("detection observables") {
    SECTION("independent ions at p = 0.5") {
        // joint populations of a product state, ion 0 is the MSB
        const std::vector<double> joint{0.25, 0.25, 0.25, 0.25};
        CHECK(detection_observable(joint, Observable::BothExcited) == Approx(0.25));
        CHECK(detection_observable(joint, Observable::AllDarkVsAtLeastOneBright) ==
              Approx(0.75));
        CHECK(detection_observable(joint, Observable::SingleIon, 0) == Approx(0.5));
        CHECK(detection_observable(joint, Observable::SingleIon, 1) == Approx(0.5));
    }
    SECTION("maximally correlated single excitation never excites both") {
        const std::vector<double> joint{0.0, 0.5, 0.5, 0.0};
        CHECK(detection_observable(joint, Observable::BothExcited) == 0.0);
        CHECK(detection_observable(joint, Observable::SingleIon, 0) == Approx(0.5));
    }
    SECTION("three independent strongly excited ions") {
        // product state over 3 ions with per-ion excitation 0.98; on the
        // first blue COM sideband after ground-state cooling every
        // threshold-style observable saturates near one
        const double p = 0.98;
        std::vector<double> joint(8);
        for (int k = 0; k < 8; ++k) {
            double v = 1.0;
            for (int b = 0; b < 3; ++b) v *= (k >> b) & 1 ? p : 1.0 - p;
            joint[k] = v;
        }
        CHECK(detection_observable(joint, Observable::BothExcited) ==
              Approx(p * p * p));
        // probability that at least one ion is excited
        CHECK(1.0 - joint[0] == Approx(1.0).margin(1e-4));
        CHECK(detection_observable(joint, Observable::BothExcited) > 0.9);
    }
    SECTION("rejects non-power-of-two input") {
        CHECK_THROWS_AS(detection_observable({0.5, 0.3, 0.2}, Observable::BothExcited),
                        ConfigError);
    }
}

TEST_CASE("binomial sampling is deterministic under a seed") {
    std::vector<SpectrumPoint> pts;
    for (int i = 0; i < 40; ++i) pts.push_back({i * 1e3, 0.15 + 0.2 * (i % 3), 0});
    Rng a(12345), b(12345);
    const auto s1 = sample_spectrum(pts, 200, a);
    const auto s2 = sample_spectrum(pts, 200, b);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(s1[i].excitation == s2[i].excitation);
        CHECK(s1[i].shots == 200);
    }
    // sampling statistics are sane
    double diff = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        diff = std::max(diff, std::abs(s1[i].excitation - pts[i].excitation));
    CHECK(diff < 0.2);
    CHECK(diff > 0.0);
}
