#include <catch2/catch_amalgamated.hpp>

#include "iccool/twoion.hpp"

using namespace iccool;
using Catch::Approx;

namespace {
TwoIonParams string_params(double delta) {
    TwoIonParams p;
    p.rabi_frequency = 14e3;
    p.eta1 = 0.17;
    p.eta2 = 0.13;
    p.nu1 = 50e3; // scaled-down mode frequencies keep the integrator quick
    p.nu2 = 86.6e3;
    p.delta1 = delta + 1e3;
    p.delta2 = delta - 1e3;
    p.n1_max = 4;
    p.n2_max = 4;
    return p;
}
} // namespace

TEST_CASE("decoupled carrier: both ions flop independently") {
    TwoIonParams p = string_params(0.0);
    p.eta1 = p.eta2 = 0.0;
    p.delta1 = p.delta2 = 0.0;
    const TwoIonSystem sys(p);
    const auto psi0 = TwoIonState::ground(p, 0, 0);
    for (double t : {20e-6, 35.7e-6 / 2.0, 35.7e-6}) {
        const auto psi = sys.evolve(psi0, t);
        const double expected = std::pow(std::sin(constants::pi * 14e3 * t), 2);
        CHECK(psi.excitation(p, 0) == Approx(expected).margin(1e-7));
        CHECK(psi.excitation(p, 1) == Approx(expected).margin(1e-7));
        // product state: joint = marginal product
        const auto j = psi.joint_populations(p);
        CHECK(j[3] == Approx(expected * expected).margin(1e-7));
    }
}

TEST_CASE("per-ion detuning split separates the excitation curves") {
    const TwoIonParams p = string_params(0.0); // laser on the mean carrier
    const TwoIonSystem sys(p);
    const auto psi = sys.evolve(TwoIonState::ground(p, 0, 0), 150e-6);
    // detunings are +-1 kHz, so the two ions acquire different excitation
    CHECK(std::abs(psi.excitation(p, 0) - psi.excitation(p, 1)) > 1e-3);
    CHECK(psi.norm() == Approx(1.0).epsilon(1e-8));
}

TEST_CASE("norm is preserved through long evolutions") {
    const TwoIonParams p = string_params(-50e3); // on the mode-1 red sideband
    const TwoIonSystem sys(p);
    const auto psi = sys.evolve(TwoIonState::ground(p, 2, 1), 2e-3);
    CHECK(std::abs(psi.norm() - 1.0) < 1e-8);
}

TEST_CASE("integrator matches the dense propagator") {
    // truncation <= 4 per mode; amplitudes, not just populations
    for (double delta : {0.0, -50e3, 86.6e3}) {
        const TwoIonParams p = string_params(delta);
        const TwoIonSystem sys(p);
        const TwoIonPropagator prop(p);
        for (auto [n1, n2] : std::vector<std::pair<int, int>>{{1, 0}, {3, 2}}) {
            const auto psi0 = TwoIonState::ground(p, n1, n2);
            const double t = 120e-6;
            const auto rk = sys.evolve(psi0, t, 1e-8, 1e-8);
            const auto exact = prop.propagate(psi0, t);
            const double diff = (rk.amp - exact.amp).norm();
            INFO("delta " << delta << " start (" << n1 << "," << n2 << ")");
            CHECK(diff < 1e-6);
        }
    }
}

TEST_CASE("red sideband from |gg,1,0> transfers within the single-excitation manifold") {
    TwoIonParams p = string_params(0.0);
    p.delta1 = p.delta2 = -p.nu1; // resonant first red of mode 1, no split
    const TwoIonSystem sys(p);
    const TwoIonPropagator prop(p);
    const auto psi0 = TwoIonState::ground(p, 1, 0);
    const auto rk = sys.evolve(psi0, 100e-6, 1e-8, 1e-8);
    const auto exact = prop.propagate(psi0, 100e-6);
    CHECK((rk.amp - exact.amp).norm() < 1e-6);
    // excitation goes with phonon removal: excited population sits at n1 = 0
    double excited_n0 = 0.0, excited_other = 0.0;
    for (int e1 = 0; e1 < 2; ++e1)
        for (int e2 = 0; e2 < 2; ++e2) {
            if (e1 + e2 == 0) continue;
            for (int n1 = 0; n1 <= p.n1_max; ++n1)
                for (int n2 = 0; n2 <= p.n2_max; ++n2) {
                    const double w = std::norm(rk.amp(p.index(e1, e2, n1, n2)));
                    (n1 == 0 && n2 == 0 && e1 + e2 == 1 ? excited_n0 : excited_other) += w;
                }
        }
    CHECK(excited_n0 > 0.1);
    // the rest is off-resonant carrier excitation, of order (f DW / 2 nu)^2
    CHECK(excited_other < 0.1);
}

TEST_CASE("batched excitations agree with single propagations") {
    const TwoIonParams p = string_params(-86.6e3);
    const TwoIonPropagator prop(p);
    const double t = 200e-6;
    const auto batch = prop.excitations({{0, 0}, {1, 2}, {4, 4}}, t);
    REQUIRE(batch.size() == 3);
    int k = 0;
    for (auto [n1, n2] : std::vector<std::pair<int, int>>{{0, 0}, {1, 2}, {4, 4}}) {
        const auto full = prop.propagate(TwoIonState::ground(p, n1, n2), t);
        CHECK(batch[k].ion1 == Approx(full.excitation(p, 0)).margin(1e-10));
        CHECK(batch[k].ion2 == Approx(full.excitation(p, 1)).margin(1e-10));
        const auto joint = full.joint_populations(p);
        for (int i = 0; i < 4; ++i)
            CHECK(batch[k].joint[i] == Approx(joint[i]).margin(1e-10));
        ++k;
    }
}

TEST_CASE("Lamb-Dicke validity flag") {
    // eta sqrt(2 n_max + 1) = 0.17 * 3 sits just past the 0.5 warning line
    TwoIonParams p = string_params(0.0);
    CHECK_FALSE(p.lamb_dicke_valid());
    p.eta1 = 0.13;
    CHECK(p.lamb_dicke_valid());
    p.eta2 = 0.3;
    CHECK_FALSE(p.lamb_dicke_valid());
}
