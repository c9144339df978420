#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "iccool/constants.hpp"
#include "iccool/errors.hpp"

// Coherent dynamics of two two-level ions sharing two axial modes, in the
// Lamb-Dicke interaction picture: carrier with Debye-Waller correction and
// the first red/blue sidebands of both modes, with independent detunings
// for the two ions. Basis index packs (e1, e2, n1, n2) with e = 0 the
// electronic ground state.
//
// Two routes through the same Hamiltonian are provided:
//  * TwoIonSystem::evolve        - adaptive RK integration of the explicitly
//                                  time-dependent interaction-picture form;
//                                  step acceptance is tied to the norm drift.
//  * TwoIonPropagator            - exact propagation via eigendecomposition
//                                  in the co-rotating frame, where the
//                                  Hamiltonian is a real symmetric constant
//                                  (used by the spectrum fitter, and as the
//                                  dense reference in tests).

namespace iccool {

using complexd = std::complex<double>;

struct TwoIonParams {
    double rabi_frequency = 0.0; // Hz, carrier value Omega_0 / 2 pi
    double eta1 = 0.0, eta2 = 0.0;
    double nu1 = 0.0, nu2 = 0.0;     // mode frequencies, Hz
    double delta1 = 0.0, delta2 = 0.0; // per-ion laser detunings, Hz
    int n1_max = 4, n2_max = 4;

    int levels1() const { return n1_max + 1; }
    int levels2() const { return n2_max + 1; }
    int dim() const { return 4 * levels1() * levels2(); }

    int index(int e1, int e2, int n1, int n2) const {
        return ((e1 * 2 + e2) * levels1() + n1) * levels2() + n2;
    }

    double debye_waller(int n1, int n2) const {
        return 1.0 - eta1 * eta1 * (n1 + 0.5) - eta2 * eta2 * (n2 + 0.5);
    }

    // Lamb-Dicke expansion validity over the truncated space
    bool lamb_dicke_valid() const {
        return eta1 * std::sqrt(2.0 * n1_max + 1.0) < 0.5 &&
               eta2 * std::sqrt(2.0 * n2_max + 1.0) < 0.5;
    }
};

struct TwoIonState {
    Eigen::VectorXcd amp;

    double norm() const { return amp.norm(); }

    // probability of ion j (0 or 1) being in the excited state
    double excitation(const TwoIonParams& p, int ion) const {
        double s = 0.0;
        for (int e1 = 0; e1 < 2; ++e1)
            for (int e2 = 0; e2 < 2; ++e2) {
                if ((ion == 0 ? e1 : e2) != 1) continue;
                for (int n1 = 0; n1 <= p.n1_max; ++n1)
                    for (int n2 = 0; n2 <= p.n2_max; ++n2)
                        s += std::norm(amp(p.index(e1, e2, n1, n2)));
            }
        return s;
    }

    // joint electronic populations, index e1*2 + e2
    std::array<double, 4> joint_populations(const TwoIonParams& p) const {
        std::array<double, 4> out{};
        for (int e1 = 0; e1 < 2; ++e1)
            for (int e2 = 0; e2 < 2; ++e2)
                for (int n1 = 0; n1 <= p.n1_max; ++n1)
                    for (int n2 = 0; n2 <= p.n2_max; ++n2)
                        out[e1 * 2 + e2] +=
                            std::norm(amp(p.index(e1, e2, n1, n2)));
        return out;
    }

    static TwoIonState ground(const TwoIonParams& p, int n1, int n2) {
        TwoIonState s;
        s.amp = Eigen::VectorXcd::Zero(p.dim());
        s.amp(p.index(0, 0, n1, n2)) = 1.0;
        return s;
    }
};

namespace detail {

// one off-diagonal coupling of the interaction-picture Hamiltonian:
// H(t) += amp * exp(2 pi i freq t) |row><col| (+ conjugate, applied
// implicitly). freq_id points into the shared frequency table; the handful
// of distinct frequencies keeps the phase evaluation cheap.
struct HTerm {
    int row, col;
    complexd amp; // rad/s
    int freq_id;
};

struct TermTable {
    std::vector<HTerm> terms;
    std::vector<double> freqs; // Hz
};

inline TermTable build_terms(const TwoIonParams& p) {
    TermTable tab;
    auto freq_id = [&tab](double f) {
        for (std::size_t i = 0; i < tab.freqs.size(); ++i)
            if (tab.freqs[i] == f) return static_cast<int>(i);
        tab.freqs.push_back(f);
        return static_cast<int>(tab.freqs.size() - 1);
    };
    const double g = constants::pi * p.rabi_frequency; // Omega_0 / 2 in rad/s
    for (int ion = 0; ion < 2; ++ion) {
        const double delta = ion == 0 ? p.delta1 : p.delta2;
        for (int eo = 0; eo < 2; ++eo) { // the other ion's electronic state
            for (int n1 = 0; n1 <= p.n1_max; ++n1) {
                for (int n2 = 0; n2 <= p.n2_max; ++n2) {
                    const auto idx = [&](int e_this, int m1, int m2) {
                        return ion == 0 ? p.index(e_this, eo, m1, m2)
                                        : p.index(eo, e_this, m1, m2);
                    };
                    const int excited = idx(1, n1, n2);
                    // rows are the excited states, columns their ground
                    // partners; this is the h.c. of the |g><e| form, so the
                    // carrier rotates at +delta_j and |e,n><g,n-1| (a blue
                    // pairing) at delta_j - nu.
                    tab.terms.push_back({excited, idx(0, n1, n2),
                                     complexd(g * p.debye_waller(n1, n2), 0.0),
                                     freq_id(delta)});
                    if (n1 > 0)
                        tab.terms.push_back({excited, idx(0, n1 - 1, n2),
                                         complexd(0.0, -g * p.eta1 * std::sqrt(n1)),
                                         freq_id(delta - p.nu1)});
                    if (n1 < p.n1_max)
                        tab.terms.push_back(
                                   {excited, idx(0, n1 + 1, n2),
                                    complexd(0.0, -g * p.eta1 * std::sqrt(n1 + 1.0)),
                                    freq_id(delta + p.nu1)});
                    if (n2 > 0)
                        tab.terms.push_back({excited, idx(0, n1, n2 - 1),
                                         complexd(0.0, -g * p.eta2 * std::sqrt(n2)),
                                         freq_id(delta - p.nu2)});
                    if (n2 < p.n2_max)
                        tab.terms.push_back(
                                   {excited, idx(0, n1, n2 + 1),
                                    complexd(0.0, -g * p.eta2 * std::sqrt(n2 + 1.0)),
                                    freq_id(delta + p.nu2)});
                }
            }
        }
    }
    return tab;
}


} // namespace detail

class TwoIonSystem {
public:
    explicit TwoIonSystem(const TwoIonParams& params)
        : p_(params), tab_(detail::build_terms(params)) {
        double fmax = p_.rabi_frequency;
        for (double f : tab_.freqs) fmax = std::max(fmax, std::abs(f));
        max_step_ = 0.02 / std::max(fmax, 1.0);
    }

    const TwoIonParams& params() const { return p_; }

    // i d/dt psi = H(t) psi
    void apply(double t, const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const {
        out.setZero();
        const double w = 2.0 * constants::pi * t;
        phases_.resize(tab_.freqs.size());
        for (std::size_t i = 0; i < tab_.freqs.size(); ++i)
            phases_[i] = std::exp(complexd(0.0, w * tab_.freqs[i]));
        for (const auto& term : tab_.terms) {
            const complexd phase = phases_[term.freq_id] * term.amp;
            out(term.row) += phase * in(term.col);
            out(term.col) += std::conj(phase) * in(term.row);
        }
    }

    // Dormand-Prince 5(4). A step is accepted when its embedded error
    // estimate stays inside the share of the global budget proportional to
    // the step length, and when the norm has not drifted; the global
    // amplitude error then lands near err_tol.
    TwoIonState evolve(const TwoIonState& initial, double duration,
                       double norm_tol = 1e-8, double err_tol = 1e-8) const {
        if (duration < 0) throw ConfigError("evolve: negative duration");
        TwoIonState state = initial;
        if (duration == 0) return state;

        const int dim = p_.dim();
        Eigen::VectorXcd k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim),
            k7(dim), tmp(dim), y5(dim);
        const double start_norm = state.amp.norm();

        double t = 0.0;
        double h = std::min(max_step_, duration);
        int rejected = 0;

        auto deriv = [&](double at, const Eigen::VectorXcd& y, Eigen::VectorXcd& dy) {
            apply(at, y, dy);
            dy *= complexd(0.0, -1.0);
        };

        while (t < duration) {
            h = std::min(h, duration - t);
            const double step_tol = err_tol * h / duration;
            deriv(t, state.amp, k1);
            tmp = state.amp + h * (1.0 / 5.0) * k1;
            deriv(t + h / 5.0, tmp, k2);
            tmp = state.amp + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2);
            deriv(t + 3.0 * h / 10.0, tmp, k3);
            tmp = state.amp + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3);
            deriv(t + 4.0 * h / 5.0, tmp, k4);
            tmp = state.amp + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 +
                                   64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4);
            deriv(t + 8.0 * h / 9.0, tmp, k5);
            tmp = state.amp + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 +
                                   46732.0 / 5247.0 * k3 + 49.0 / 176.0 * k4 -
                                   5103.0 / 18656.0 * k5);
            deriv(t + h, tmp, k6);
            y5 = state.amp + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 +
                                  125.0 / 192.0 * k4 - 2187.0 / 6784.0 * k5 +
                                  11.0 / 84.0 * k6);
            deriv(t + h, y5, k7);
            tmp = h * ((35.0 / 384.0 - 5179.0 / 57600.0) * k1 +
                       (500.0 / 1113.0 - 7571.0 / 16695.0) * k3 +
                       (125.0 / 192.0 - 393.0 / 640.0) * k4 +
                       (-2187.0 / 6784.0 + 92097.0 / 339200.0) * k5 +
                       (11.0 / 84.0 - 187.0 / 2100.0) * k6 - 1.0 / 40.0 * k7);
            const double err = tmp.norm();
            const double drift = std::abs(y5.norm() - start_norm);

            if (err <= step_tol && drift <= norm_tol) {
                t += h;
                state.amp.swap(y5);
                rejected = 0;
            } else if (++rejected > 200) {
                throw NumericError("evolve: step size collapsed, norm drift " +
                                   std::to_string(drift));
            }
            const double scale =
                err > 0 ? 0.9 * std::pow(step_tol / err, 0.2) : 2.0;
            h *= std::clamp(scale, 0.2, 2.0);
        }

        if (std::abs(state.amp.norm() - start_norm) > norm_tol)
            throw NumericError("evolve: norm drifted beyond tolerance");
        return state;
    }

private:
    TwoIonParams p_;
    detail::TermTable tab_;
    double max_step_ = 1e-7;
    mutable std::vector<complexd> phases_;
};

// Exact propagation via the co-rotating frame. With
//   A = 2 pi (nu1 n1 + nu2 n2 - delta1 P_e1 - delta2 P_e2)
// the transformed Hamiltonian is time-independent, and the phonon gauge
// |n> -> i^(n1+n2) |n> makes it real symmetric. Populations of basis states
// are frame-invariant (all transformations are diagonal phases); amplitudes
// can be mapped back when needed.
class TwoIonPropagator {
public:
    explicit TwoIonPropagator(const TwoIonParams& params) : p_(params) {
        build();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h_);
        if (es.info() != Eigen::Success)
            throw NumericError("TwoIonPropagator: eigendecomposition failed");
        evecs_ = es.eigenvectors();
        evals_ = es.eigenvalues();
    }

    const TwoIonParams& params() const { return p_; }
    const Eigen::MatrixXd& hamiltonian() const { return h_; } // rad/s, rotated frame

    // evolve an arbitrary rotated-frame vector
    Eigen::VectorXcd propagate_rotated(const Eigen::VectorXcd& chi0, double t) const {
        Eigen::VectorXcd proj = evecs_.transpose() * chi0;
        for (int k = 0; k < proj.size(); ++k)
            proj(k) *= std::exp(complexd(0.0, -evals_(k) * t));
        return evecs_ * proj;
    }

    // full amplitudes in the interaction-picture frame of TwoIonSystem
    TwoIonState propagate(const TwoIonState& initial, double t) const {
        Eigen::VectorXcd chi0 = initial.amp;
        gauge(chi0, -1);           // chi(0) = D^dag psi(0)
        Eigen::VectorXcd chi = propagate_rotated(chi0, t);
        gauge(chi, +1);            // psi = V^dag(t) D chi
        unrotate(chi, t);
        TwoIonState out;
        out.amp = std::move(chi);
        return out;
    }

    // per-ion excitations for a batch of phonon start states (electronic
    // ground), sharing one eigendecomposition
    struct Excitations {
        double ion1, ion2;
        std::array<double, 4> joint; // P(e1, e2), index e1*2+e2
    };
    std::vector<Excitations> excitations(
        const std::vector<std::pair<int, int>>& starts, double t) const {
        std::vector<Excitations> out;
        out.reserve(starts.size());
        Eigen::VectorXcd phases(evals_.size());
        for (int k = 0; k < evals_.size(); ++k)
            phases(k) = std::exp(complexd(0.0, -evals_(k) * t));
        for (auto [n1, n2] : starts) {
            const int s = p_.index(0, 0, n1, n2);
            // column of the propagator: E diag(phases) E^T e_s; the initial
            // gauge phase is global and drops out of populations
            Eigen::VectorXcd proj = evecs_.row(s).transpose().cast<complexd>();
            proj.array() *= phases.array();
            Eigen::VectorXcd col = evecs_ * proj;
            Excitations ex{0.0, 0.0, {0.0, 0.0, 0.0, 0.0}};
            for (int e1 = 0; e1 < 2; ++e1)
                for (int e2 = 0; e2 < 2; ++e2)
                    for (int n1i = 0; n1i <= p_.n1_max; ++n1i)
                        for (int n2i = 0; n2i <= p_.n2_max; ++n2i) {
                            const double w =
                                std::norm(col(p_.index(e1, e2, n1i, n2i)));
                            ex.joint[e1 * 2 + e2] += w;
                            if (e1) ex.ion1 += w;
                            if (e2) ex.ion2 += w;
                        }
            out.push_back(ex);
        }
        return out;
    }

private:
    void build() {
        const int dim = p_.dim();
        h_ = Eigen::MatrixXd::Zero(dim, dim);
        const double twopi = 2.0 * constants::pi;
        const double g = constants::pi * p_.rabi_frequency;
        for (int e1 = 0; e1 < 2; ++e1)
            for (int e2 = 0; e2 < 2; ++e2)
                for (int n1 = 0; n1 <= p_.n1_max; ++n1)
                    for (int n2 = 0; n2 <= p_.n2_max; ++n2) {
                        const int i = p_.index(e1, e2, n1, n2);
                        h_(i, i) = twopi * (-p_.nu1 * n1 - p_.nu2 * n2 +
                                            p_.delta1 * e1 + p_.delta2 * e2);
                        for (int ion = 0; ion < 2; ++ion) {
                            if ((ion == 0 ? e1 : e2) != 1) continue;
                            const auto lower = [&](int m1, int m2) {
                                return ion == 0 ? p_.index(0, e2, m1, m2)
                                                : p_.index(e1, 0, m1, m2);
                            };
                            set(i, lower(n1, n2), g * p_.debye_waller(n1, n2));
                            if (n1 > 0)
                                set(i, lower(n1 - 1, n2), -g * p_.eta1 * std::sqrt(n1));
                            if (n1 < p_.n1_max)
                                set(i, lower(n1 + 1, n2),
                                    g * p_.eta1 * std::sqrt(n1 + 1.0));
                            if (n2 > 0)
                                set(i, lower(n1, n2 - 1), -g * p_.eta2 * std::sqrt(n2));
                            if (n2 < p_.n2_max)
                                set(i, lower(n1, n2 + 1),
                                    g * p_.eta2 * std::sqrt(n2 + 1.0));
                        }
                    }
    }

    void set(int a, int b, double v) {
        h_(a, b) = v;
        h_(b, a) = v;
    }

    // multiply by D^(dir): diag(i^(n1+n2))^dir
    void gauge(Eigen::VectorXcd& v, int dir) const {
        constexpr complexd ii(0.0, 1.0);
        for (int e1 = 0; e1 < 2; ++e1)
            for (int e2 = 0; e2 < 2; ++e2)
                for (int n1 = 0; n1 <= p_.n1_max; ++n1)
                    for (int n2 = 0; n2 <= p_.n2_max; ++n2)
                        v(p_.index(e1, e2, n1, n2)) *=
                            std::pow(ii, dir * ((n1 + n2) % 4));
    }

    // multiply by V^dag(t) = exp(-i A t)
    void unrotate(Eigen::VectorXcd& v, double t) const {
        const double twopi = 2.0 * constants::pi;
        for (int e1 = 0; e1 < 2; ++e1)
            for (int e2 = 0; e2 < 2; ++e2)
                for (int n1 = 0; n1 <= p_.n1_max; ++n1)
                    for (int n2 = 0; n2 <= p_.n2_max; ++n2) {
                        const double a = twopi * (p_.nu1 * n1 + p_.nu2 * n2 -
                                                  p_.delta1 * e1 - p_.delta2 * e2);
                        v(p_.index(e1, e2, n1, n2)) *=
                            std::exp(complexd(0.0, -a * t));
                    }
    }

    TwoIonParams p_;
    Eigen::MatrixXd h_;
    Eigen::MatrixXd evecs_;
    Eigen::VectorXd evals_;
};

} // namespace iccool
