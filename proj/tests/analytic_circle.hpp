// Test-only analytic eigenbasis of the unit circle and brute-force
// quadrature oracles for the SEC tensors. Everything here evaluates the
// defining inner products directly from trigonometric eigenfunctions and
// their derivatives; none of it goes through the closed-form tensor
// assembly it is used to check.
//
// Basis convention: phi_0 = 1, phi_{2k-1} = sqrt(2) cos(k t),
// phi_{2k} = sqrt(2) sin(k t), lambda = k^2, quadrature weights 1/N on a
// uniform grid. On the circle every 2-form vanishes, so the Dirichlet form
// of 1-forms reduces to the codifferential part, with
// delta(f dh) = -f' h' + f (Delta h).

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "sec/diffusion.hpp"

namespace sec_test {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct AnalyticCircle {
    int N = 0;
    int Ms = 0;
    MatrixXd phi;       // N x Ms eigenfunction samples
    MatrixXd dphi;      // N x Ms derivative samples
    VectorXd lambdas;   // k^2 spectrum
    VectorXd theta;     // grid angles
};

inline AnalyticCircle make_analytic_circle(int ms, int n = 512) {
    AnalyticCircle c;
    c.N = n;
    c.Ms = ms;
    c.phi.resize(n, ms);
    c.dphi.resize(n, ms);
    c.lambdas.resize(ms);
    c.theta.resize(n);
    const double root2 = std::sqrt(2.0);
    for (int i = 0; i < n; ++i) c.theta(i) = 2.0 * std::numbers::pi * i / n;
    for (int j = 0; j < ms; ++j) {
        const int k = (j + 1) / 2;
        c.lambdas(j) = double(k) * k;
        for (int i = 0; i < n; ++i) {
            const double t = c.theta(i);
            if (j == 0) {
                c.phi(i, j) = 1.0;
                c.dphi(i, j) = 0.0;
            } else if (j % 2 == 1) {
                c.phi(i, j) = root2 * std::cos(k * t);
                c.dphi(i, j) = -root2 * k * std::sin(k * t);
            } else {
                c.phi(i, j) = root2 * std::sin(k * t);
                c.dphi(i, j) = root2 * k * std::cos(k * t);
            }
        }
    }
    return c;
}

/// Packs the analytic samples into a SpectralBasis usable by the tensor
/// assembly (uniform quadrature weights; epsilon is never consulted).
inline sec::SpectralBasis as_basis(const AnalyticCircle& c, int m) {
    sec::SpectralBasis basis;
    basis.lambdas = c.lambdas;
    basis.phi = c.phi;
    basis.weights = VectorXd::Constant(c.N, 1.0 / c.N);
    basis.epsilon = 1.0;
    basis.M = m;
    return basis;
}

inline double quad(const AnalyticCircle& c, const VectorXd& f) { return f.sum() / c.N; }

/// <phi_i phi_j, phi_k>
inline double oracle_c(const AnalyticCircle& c, int i, int j, int k) {
    return quad(c, c.phi.col(i).cwiseProduct(c.phi.col(j)).cwiseProduct(c.phi.col(k)));
}

/// <g(grad phi_i, grad phi_j), phi_k>
inline double oracle_g(const AnalyticCircle& c, int k, int i, int j) {
    return quad(c, c.dphi.col(i).cwiseProduct(c.dphi.col(j)).cwiseProduct(c.phi.col(k)));
}

/// Hodge inner product <b^ij, b^kl> = <phi_i phi_k, phi_j' phi_l'>
inline double oracle_G(const AnalyticCircle& c, int i, int j, int k, int l) {
    return quad(c, c.phi.col(i).cwiseProduct(c.phi.col(k)).cwiseProduct(c.dphi.col(j)).cwiseProduct(c.dphi.col(l)));
}

/// Samples of delta(b^ij) = -phi_i' phi_j' + lambda_j phi_i phi_j.
inline VectorXd codiff(const AnalyticCircle& c, int i, int j) {
    return c.lambdas(j) * c.phi.col(i).cwiseProduct(c.phi.col(j)) - c.dphi.col(i).cwiseProduct(c.dphi.col(j));
}

/// Dirichlet form <b^ij, Delta_1 b^kl> = <delta b^ij, delta b^kl> on S^1.
inline double oracle_E(const AnalyticCircle& c, int i, int j, int k, int l) {
    return quad(c, codiff(c, i, j).cwiseProduct(codiff(c, k, l)));
}

/// Antisymmetric counterparts via bhat^ij = b^ij - b^ji.
inline double oracle_Ghat(const AnalyticCircle& c, int i, int j, int k, int l) {
    auto hodge = [&](int a, int b, int p, int q) { return oracle_G(c, a, b, p, q); };
    return hodge(i, j, k, l) - hodge(j, i, k, l) - hodge(i, j, l, k) + hodge(j, i, l, k);
}

inline double oracle_Ehat(const AnalyticCircle& c, int i, int j, int k, int l) {
    VectorXd left = codiff(c, i, j) - codiff(c, j, i);
    VectorXd right = codiff(c, k, l) - codiff(c, l, k);
    return quad(c, left.cwiseProduct(right));
}

}  // namespace sec_test
