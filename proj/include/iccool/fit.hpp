#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "iccool/errors.hpp"
#include "iccool/rng.hpp"
#include "iccool/spectrum.hpp"
#include "iccool/twoion.hpp"

// Sideband-spectrum fitting against the coherent two-ion model, and the
// weighted linear regression used for heating-rate extraction.
//
// The model spectrum is a thermal mixture over the lowest five states of
// each mode evolved under the Lamb-Dicke Hamiltonian. Mean phonon numbers
// enter only through the mixture weights, so the fit nests: an outer
// derivative-free search over the "shape" parameters (Rabi frequency,
// carrier offset, Gaussian broadenings) recomputes the per-start-state
// excitation table, and an inner search over (nbar1, nbar2) reuses it.

namespace iccool {

struct FitResult {
    std::array<double, 2> nbar{0.0, 0.0};
    std::array<double, 2> nbar_err{0.0, 0.0};
    std::array<double, 2> gaussian_sigma{0.0, 0.0};     // Hz
    std::array<double, 2> gaussian_sigma_err{0.0, 0.0}; // Hz
    double carrier_offset = 0.0, carrier_offset_err = 0.0; // Hz
    double rabi_frequency = 0.0, rabi_frequency_err = 0.0; // Hz
    double chi2 = 0.0;
    int dof = 0;
    bool converged = false;
    bool nbar_upper_bound_only = false;
    std::vector<std::string> warnings;
};

// ---------------------------------------------------------------------
// Nelder-Mead

struct SimplexOptions {
    int max_iter = 200;
    double xtol = 1e-4;
    double ftol = 1e-8;
};

struct SimplexResult {
    Eigen::VectorXd x;
    double fval = 0.0;
    int iterations = 0;
    bool converged = false;
};

inline SimplexResult nelder_mead(
    const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x0,
    const Eigen::VectorXd& step, const SimplexOptions& opts = {}) {
    const int n = static_cast<int>(x0.size());
    std::vector<Eigen::VectorXd> pts(n + 1, x0);
    std::vector<double> vals(n + 1);
    for (int i = 1; i <= n; ++i) pts[i](i - 1) += step(i - 1);
    for (int i = 0; i <= n; ++i) vals[i] = f(pts[i]);

    SimplexResult res;
    for (res.iterations = 0; res.iterations < opts.max_iter; ++res.iterations) {
        std::vector<int> order(n + 1);
        for (int i = 0; i <= n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return vals[a] < vals[b]; });
        const int best = order[0], worst = order[n], second = order[n - 1];

        double spread = 0.0;
        for (int i = 0; i <= n; ++i)
            spread = std::max(spread, (pts[i] - pts[best]).cwiseAbs().maxCoeff());
        if (spread < opts.xtol &&
            std::abs(vals[worst] - vals[best]) <
                opts.ftol * (std::abs(vals[best]) + opts.ftol)) {
            res.converged = true;
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (int i = 0; i <= n; ++i)
            if (i != worst) centroid += pts[i];
        centroid /= n;

        const Eigen::VectorXd refl = centroid + (centroid - pts[worst]);
        const double frefl = f(refl);
        if (frefl < vals[best]) {
            const Eigen::VectorXd exp_pt = centroid + 2.0 * (centroid - pts[worst]);
            const double fexp = f(exp_pt);
            if (fexp < frefl) {
                pts[worst] = exp_pt;
                vals[worst] = fexp;
            } else {
                pts[worst] = refl;
                vals[worst] = frefl;
            }
        } else if (frefl < vals[second]) {
            pts[worst] = refl;
            vals[worst] = frefl;
        } else {
            const Eigen::VectorXd con =
                centroid + 0.5 * ((frefl < vals[worst] ? refl : pts[worst]) - centroid);
            const double fcon = f(con);
            if (fcon < std::min(frefl, vals[worst])) {
                pts[worst] = con;
                vals[worst] = fcon;
            } else {
                for (int i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
                    vals[i] = f(pts[i]);
                }
            }
        }
    }
    int best = 0;
    for (int i = 1; i <= n; ++i)
        if (vals[i] < vals[best]) best = i;
    res.x = pts[best];
    res.fval = vals[best];
    return res;
}

// ---------------------------------------------------------------------
// forward model

struct FitModelConfig {
    double eta1 = 0.17, eta2 = 0.13;
    double nu1 = 162e3, nu2 = 280592.0; // Hz
    double probe_duration = 200e-6;     // s
    double detuning_split = 2e3; // delta_ion1 - delta_ion2, Hz; 0 for planar
    Observable observable = Observable::SingleIon;
    int ion = 0;
    int mixture_max = 4; // thermal mixture over [0, mixture_max]^2
    bool fit_gaussian_sigma = false;
    double conv_window_halfwidth = 3e3; // Hz around each first-sideband peak
    double conv_step = 250.0;           // Hz, fine grid for the convolution
    double rabi_guess = kProbeRabiHz;
    double nbar_guess = 0.2;
    double sigma_guess = 600.0; // Hz
    double nbar_max = 5.0;
    int restarts = 2;
    int max_outer_iter = 120;
    int max_inner_iter = 120;
    std::uint64_t seed = 1;
};

namespace detail {

struct ObsTable {
    // excitation of the configured observable per mixture start state (row)
    // and data point (column), already convolved where applicable
    Eigen::MatrixXd values;
    std::vector<std::pair<int, int>> starts;
};

inline double observable_value(const TwoIonPropagator::Excitations& ex,
                               Observable obs, int ion) {
    switch (obs) {
        case Observable::SingleIon: return ion == 0 ? ex.ion1 : ex.ion2;
        case Observable::AllDarkVsAtLeastOneBright: return 1.0 - ex.joint[3];
        case Observable::BothExcited: return ex.joint[3];
    }
    return 0.0;
}

// per-start-state model excitations at the given laser detunings; the
// detuning sweep is embarrassingly parallel
inline Eigen::MatrixXd raw_table(const FitModelConfig& cfg, double rabi,
                                 double offset,
                                 const std::vector<std::pair<int, int>>& starts,
                                 const std::vector<double>& detunings) {
    Eigen::MatrixXd out(starts.size(), detunings.size());
    parallel_rows(static_cast<int>(detunings.size()), [&](int j) {
        TwoIonParams p;
        p.rabi_frequency = rabi;
        p.eta1 = cfg.eta1;
        p.eta2 = cfg.eta2;
        p.nu1 = cfg.nu1;
        p.nu2 = cfg.nu2;
        p.delta1 = detunings[j] - offset + cfg.detuning_split / 2.0;
        p.delta2 = detunings[j] - offset - cfg.detuning_split / 2.0;
        p.n1_max = cfg.mixture_max;
        p.n2_max = cfg.mixture_max;
        const TwoIonPropagator prop(p);
        const auto ex = prop.excitations(starts, cfg.probe_duration);
        for (std::size_t s = 0; s < starts.size(); ++s)
            out(s, j) = observable_value(ex[s], cfg.observable, cfg.ion);
    });
    return out;
}

struct ConvWindow {
    double lo, hi; // Hz
    int mode;      // 0: sigma applies to mode-1 peaks, 1: mode-2 peaks
};

inline std::vector<ConvWindow> convolution_windows(const FitModelConfig& cfg) {
    const double hw = cfg.conv_window_halfwidth;
    return {{-cfg.nu1 - hw, -cfg.nu1 + hw, 0},
            {cfg.nu1 - hw, cfg.nu1 + hw, 0},
            {-cfg.nu2 - hw, -cfg.nu2 + hw, 1},
            {cfg.nu2 - hw, cfg.nu2 + hw, 1}};
}

// Builds the observation table for the configured data detunings. Inside a
// convolution window the model is evaluated on a fine uniform grid, smoothed
// with that window's Gaussian, and read off by linear interpolation.
inline ObsTable build_table(const FitModelConfig& cfg, double rabi, double offset,
                            double sigma1, double sigma2,
                            const std::vector<double>& detunings) {
    ObsTable tab;
    for (int a = 0; a <= cfg.mixture_max; ++a)
        for (int b = 0; b <= cfg.mixture_max; ++b) tab.starts.emplace_back(a, b);
    tab.values.resize(tab.starts.size(), detunings.size());

    std::vector<char> handled(detunings.size(), 0);
    if (cfg.fit_gaussian_sigma) {
        for (const auto& w : convolution_windows(cfg)) {
            const double sigma = w.mode == 0 ? sigma1 : sigma2;
            std::vector<std::size_t> inside;
            for (std::size_t j = 0; j < detunings.size(); ++j)
                if (!handled[j] && detunings[j] >= w.lo && detunings[j] <= w.hi)
                    inside.push_back(j);
            if (inside.empty()) continue;
            const double pad = 4.0 * sigma;
            const int n = static_cast<int>(
                std::ceil((w.hi - w.lo + 2.0 * pad) / cfg.conv_step)) + 1;
            std::vector<double> grid(n);
            for (int i = 0; i < n; ++i) grid[i] = w.lo - pad + i * cfg.conv_step;
            Eigen::MatrixXd fine = raw_table(cfg, rabi, offset, tab.starts, grid);
            // smooth each start state's row
            if (sigma > 0) {
                const int half =
                    static_cast<int>(std::ceil(4.0 * sigma / cfg.conv_step));
                std::vector<double> kernel(2 * half + 1);
                double ks = 0.0;
                for (int k = -half; k <= half; ++k) {
                    kernel[k + half] = std::exp(-0.5 * std::pow(k * cfg.conv_step / sigma, 2));
                    ks += kernel[k + half];
                }
                for (double& v : kernel) v /= ks;
                Eigen::MatrixXd sm = fine;
                for (int i = 0; i < fine.rows(); ++i)
                    for (int j = 0; j < n; ++j) {
                        double acc = 0.0, used = 0.0;
                        for (int k = -half; k <= half; ++k) {
                            const int jj = j + k;
                            if (jj < 0 || jj >= n) continue;
                            acc += kernel[k + half] * fine(i, jj);
                            used += kernel[k + half];
                        }
                        sm(i, j) = acc / used;
                    }
                fine = std::move(sm);
            }
            for (std::size_t j : inside) {
                const double x = (detunings[j] - grid.front()) / cfg.conv_step;
                const int i0 = std::clamp(static_cast<int>(x), 0, n - 2);
                const double frac = x - i0;
                for (int s = 0; s < fine.rows(); ++s)
                    tab.values(s, j) =
                        (1.0 - frac) * fine(s, i0) + frac * fine(s, i0 + 1);
                handled[j] = 1;
            }
        }
    }
    std::vector<double> direct;
    std::vector<std::size_t> direct_idx;
    for (std::size_t j = 0; j < detunings.size(); ++j)
        if (!handled[j]) {
            direct.push_back(detunings[j]);
            direct_idx.push_back(j);
        }
    if (!direct.empty()) {
        const Eigen::MatrixXd d = raw_table(cfg, rabi, offset, tab.starts, direct);
        for (std::size_t k = 0; k < direct_idx.size(); ++k)
            tab.values.col(direct_idx[k]) = d.col(k);
    }
    return tab;
}

inline Eigen::VectorXd mixture_weights(const std::vector<std::pair<int, int>>& starts,
                                       double nbar1, double nbar2) {
    Eigen::VectorXd w(starts.size());
    const double r1 = nbar1 <= 0 ? 0.0 : nbar1 / (nbar1 + 1.0);
    const double r2 = nbar2 <= 0 ? 0.0 : nbar2 / (nbar2 + 1.0);
    for (std::size_t s = 0; s < starts.size(); ++s)
        w(s) = std::pow(r1, starts[s].first) * std::pow(r2, starts[s].second);
    w /= w.sum();
    return w;
}

} // namespace detail

// model spectrum for explicit parameters (also the synthetic-data generator)
inline std::vector<SpectrumPoint> model_spectrum(
    const FitModelConfig& cfg, const std::vector<double>& detunings, double nbar1,
    double nbar2, double rabi, double offset = 0.0, double sigma1 = 0.0,
    double sigma2 = 0.0) {
    const auto tab = detail::build_table(cfg, rabi, offset, sigma1, sigma2, detunings);
    const Eigen::VectorXd w = detail::mixture_weights(tab.starts, nbar1, nbar2);
    const Eigen::VectorXd m = tab.values.transpose() * w;
    std::vector<SpectrumPoint> out;
    out.reserve(detunings.size());
    for (std::size_t j = 0; j < detunings.size(); ++j)
        out.push_back({detunings[j], m(j), 0, cfg.observable});
    return out;
}

inline FitResult fit_sideband_spectrum(const std::vector<SpectrumPoint>& data,
                                       const FitModelConfig& cfg) {
    if (data.size() < 8)
        throw ConfigError("fit_sideband_spectrum: too few data points");
    std::vector<double> detunings;
    std::vector<double> y, sig;
    for (const auto& p : data) {
        detunings.push_back(p.detuning);
        y.push_back(p.excitation);
        const int shots = p.shots > 0 ? p.shots : 200;
        const double var = std::max(p.excitation * (1.0 - p.excitation), 0.01) / shots;
        sig.push_back(std::sqrt(var));
    }

    FitResult result;

    // data coverage: a red sideband of each mode must be sampled for nbar to
    // be more than an upper bound
    const auto covered = [&](double center) {
        for (double d : detunings)
            if (std::abs(d - center) < 4e3) return true;
        return false;
    };
    if (!covered(-cfg.nu1) || !covered(-cfg.nu2)) {
        result.nbar_upper_bound_only = true;
        result.warnings.push_back("no red-sideband coverage: fitted nbar is an "
                                  "upper bound only");
    }
    TwoIonParams ld;
    ld.eta1 = cfg.eta1;
    ld.eta2 = cfg.eta2;
    ld.n1_max = ld.n2_max = cfg.mixture_max;
    if (!ld.lamb_dicke_valid())
        result.warnings.push_back("Lamb-Dicke expansion marginal over the fitted "
                                  "mixture: eta sqrt(2n+1) >= 0.5");

    const int n_outer = cfg.fit_gaussian_sigma ? 4 : 2;

    // inner chi^2 over the mixture weights, given a fixed excitation table
    const auto inner_fit = [&](const detail::ObsTable& tab) {
        const auto chi2_of = [&](double n1, double n2) {
            if (n1 < 0 || n2 < 0 || n1 > cfg.nbar_max || n2 > cfg.nbar_max)
                return 1e30;
            const Eigen::VectorXd w = detail::mixture_weights(tab.starts, n1, n2);
            const Eigen::VectorXd m = tab.values.transpose() * w;
            double acc = 0.0;
            for (std::size_t j = 0; j < y.size(); ++j) {
                const double r = (y[j] - m(j)) / sig[j];
                acc += r * r;
            }
            return acc;
        };
        SimplexOptions so;
        so.max_iter = cfg.max_inner_iter;
        so.xtol = 1e-5;
        Eigen::VectorXd x0(2), st(2);
        double best = 1e30;
        Eigen::Vector2d bx(cfg.nbar_guess, cfg.nbar_guess);
        for (double start : {cfg.nbar_guess, 0.02}) {
            x0 << start, start;
            st << 0.1, 0.1;
            const auto r = nelder_mead(
                [&](const Eigen::VectorXd& v) { return chi2_of(v(0), v(1)); }, x0, st,
                so);
            if (r.fval < best) {
                best = r.fval;
                bx = r.x;
            }
        }
        return std::pair<Eigen::Vector2d, double>(bx, best);
    };

    // full objective for the outer search
    Eigen::Vector2d inner_best(cfg.nbar_guess, cfg.nbar_guess);
    const auto outer_obj = [&](const Eigen::VectorXd& theta) {
        const double rabi = theta(0), offset = theta(1);
        const double s1 = cfg.fit_gaussian_sigma ? theta(2) : 0.0;
        const double s2 = cfg.fit_gaussian_sigma ? theta(3) : 0.0;
        if (rabi <= 0.1 * cfg.rabi_guess || rabi > 10.0 * cfg.rabi_guess) return 1e30;
        if (std::abs(offset) > 10e3) return 1e30;
        if (cfg.fit_gaussian_sigma && (s1 < 0 || s2 < 0 || s1 > 5e3 || s2 > 5e3))
            return 1e30;
        const auto tab = detail::build_table(cfg, rabi, offset, s1, s2, detunings);
        auto [nb, chi2] = inner_fit(tab);
        inner_best = nb;
        return chi2;
    };

    SimplexOptions so;
    so.max_iter = cfg.max_outer_iter;
    so.xtol = 1e-3;

    Rng rng(cfg.seed);
    double best_chi2 = 1e30;
    Eigen::VectorXd best_theta;
    Eigen::Vector2d best_nbar(cfg.nbar_guess, cfg.nbar_guess);
    bool any_converged = false;
    for (int attempt = 0; attempt < cfg.restarts; ++attempt) {
        Eigen::VectorXd x0(n_outer), st(n_outer);
        const double jitter = attempt == 0 ? 0.0 : 1.0;
        x0(0) = cfg.rabi_guess * (1.0 + 0.1 * jitter * (rng.uniform() - 0.5));
        x0(1) = 200.0 * jitter * (rng.uniform() - 0.5);
        st(0) = 0.05 * cfg.rabi_guess;
        st(1) = 200.0;
        if (cfg.fit_gaussian_sigma) {
            x0(2) = cfg.sigma_guess * (1.0 + 0.5 * jitter * (rng.uniform() - 0.5));
            x0(3) = cfg.sigma_guess * (1.0 + 0.5 * jitter * (rng.uniform() - 0.5));
            st(2) = 200.0;
            st(3) = 200.0;
        }
        const auto r = nelder_mead(outer_obj, x0, st, so);
        any_converged |= r.converged;
        if (r.fval < best_chi2) {
            best_chi2 = r.fval;
            best_theta = r.x;
            best_nbar = inner_best;
        }
    }
    // refresh inner state for the winning shape parameters
    best_chi2 = outer_obj(best_theta);
    best_nbar = inner_best;

    result.converged = any_converged && best_chi2 < 1e29;
    if (!result.converged)
        result.warnings.push_back("fit did not converge within the configured restarts");

    result.nbar = {best_nbar(0), best_nbar(1)};
    result.rabi_frequency = best_theta(0);
    result.carrier_offset = best_theta(1);
    if (cfg.fit_gaussian_sigma) {
        result.gaussian_sigma = {best_theta(2), best_theta(3)};
    }
    result.chi2 = best_chi2;
    result.dof = static_cast<int>(y.size()) - (n_outer + 2);

    // uncertainties: local quadratic model of chi^2 around the optimum,
    // cov = 2 H^-1
    const int np = n_outer + 2;
    Eigen::VectorXd p0(np);
    p0 << best_nbar(0), best_nbar(1), best_theta;
    const auto chi2_full = [&](const Eigen::VectorXd& p) {
        Eigen::VectorXd theta = p.tail(n_outer);
        const double rabi = theta(0), offset = theta(1);
        const double s1 = cfg.fit_gaussian_sigma ? theta(2) : 0.0;
        const double s2 = cfg.fit_gaussian_sigma ? theta(3) : 0.0;
        const auto tab =
            detail::build_table(cfg, rabi, offset, s1, s2, detunings);
        const Eigen::VectorXd w =
            detail::mixture_weights(tab.starts, std::max(p(0), 0.0),
                                    std::max(p(1), 0.0));
        const Eigen::VectorXd m = tab.values.transpose() * w;
        double acc = 0.0;
        for (std::size_t j = 0; j < y.size(); ++j) {
            const double r = (y[j] - m(j)) / sig[j];
            acc += r * r;
        }
        return acc;
    };
    Eigen::VectorXd h(np);
    h << 0.02, 0.02, 0.01 * cfg.rabi_guess, 50.0,
        Eigen::VectorXd::Constant(n_outer - 2, 50.0);
    Eigen::MatrixXd hess(np, np);
    const double f0 = chi2_full(p0);
    std::vector<double> fp(np), fm(np);
    for (int i = 0; i < np; ++i) {
        Eigen::VectorXd up = p0, dn = p0;
        up(i) += h(i);
        dn(i) -= h(i);
        fp[i] = chi2_full(up);
        fm[i] = chi2_full(dn);
        hess(i, i) = (fp[i] - 2.0 * f0 + fm[i]) / (h(i) * h(i));
    }
    for (int i = 0; i < np; ++i)
        for (int j = i + 1; j < np; ++j) {
            Eigen::VectorXd pp = p0;
            pp(i) += h(i);
            pp(j) += h(j);
            const double fij = chi2_full(pp);
            hess(i, j) = hess(j, i) =
                (fij - fp[i] - fp[j] + f0) / (h(i) * h(j));
        }
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(np, np);
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(hess);
    if (lu.isInvertible()) {
        cov = 2.0 * lu.inverse();
        const auto err = [&](int i) {
            return cov(i, i) > 0 ? std::sqrt(cov(i, i)) : 0.0;
        };
        result.nbar_err = {err(0), err(1)};
        result.rabi_frequency_err = err(2);
        result.carrier_offset_err = err(3);
        if (cfg.fit_gaussian_sigma) result.gaussian_sigma_err = {err(4), err(5)};
    } else {
        result.warnings.push_back("chi^2 Hessian is singular; uncertainties not "
                                  "reported");
    }
    return result;
}

// ---------------------------------------------------------------------
// heating-rate regression

struct HeatingPoint {
    double delay = 0.0;       // s
    double nbar = 0.0;
    double uncertainty = 0.0; // absolute, on nbar; <= 0 means unweighted
};

inline std::pair<double, double> heating_rate_fit(
    const std::vector<HeatingPoint>& points) {
    if (points.size() < 3)
        throw ConfigError("heating_rate_fit: need at least 3 delay points");
    bool weighted = true;
    for (const auto& p : points) weighted &= p.uncertainty > 0;

    double sw = 0, swx = 0, swy = 0;
    for (const auto& p : points) {
        const double w = weighted ? 1.0 / (p.uncertainty * p.uncertainty) : 1.0;
        sw += w;
        swx += w * p.delay;
        swy += w * p.nbar;
    }
    const double xbar = swx / sw, ybar = swy / sw;
    double sxx = 0, sxy = 0;
    for (const auto& p : points) {
        const double w = weighted ? 1.0 / (p.uncertainty * p.uncertainty) : 1.0;
        sxx += w * (p.delay - xbar) * (p.delay - xbar);
        sxy += w * (p.delay - xbar) * (p.nbar - ybar);
    }
    if (sxx <= 0) throw ConfigError("heating_rate_fit: degenerate delays");
    const double slope = sxy / sxx;

    double err;
    if (weighted) {
        err = std::sqrt(1.0 / sxx);
    } else {
        double ssr = 0;
        const double icpt = ybar - slope * xbar;
        for (const auto& p : points) {
            const double r = p.nbar - (icpt + slope * p.delay);
            ssr += r * r;
        }
        err = std::sqrt(ssr / (points.size() - 2) / sxx);
    }
    return {slope, err};
}

} // namespace iccool
