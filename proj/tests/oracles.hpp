#pragma once

// Brute-force reference computations used only by tests. These must stay
// independent of the implementation paths they check: couplings come from
// an explicit displacement-operator matrix exponential, not from Laguerre
// polynomials.

#include <Eigen/Dense>
#include <complex>

namespace oracle {

// |<n'| exp(i eta (a + a^dag)) |n>| on a truncated oscillator with `levels`
// Fock states, via eigendecomposition of the (real symmetric) position
// quadrature.
inline Eigen::MatrixXd displacement_magnitudes(double eta, int levels) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(levels, levels);
    for (int n = 1; n < levels; ++n) {
        x(n - 1, n) = std::sqrt(static_cast<double>(n));
        x(n, n - 1) = x(n - 1, n);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
    const Eigen::MatrixXd& v = es.eigenvectors();
    Eigen::VectorXcd phases(levels);
    for (int k = 0; k < levels; ++k)
        phases(k) = std::exp(std::complex<double>(0.0, eta * es.eigenvalues()(k)));
    Eigen::MatrixXcd d = v * phases.asDiagonal() * v.transpose();
    return d.cwiseAbs();
}

} // namespace oracle
