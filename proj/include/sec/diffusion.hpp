#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sec/dataset.hpp"
#include "sec/error.hpp"
#include "sec/numerics.hpp"

namespace sec {

/// Discretely orthonormal Laplacian eigenbasis estimated from a point cloud:
/// sum_i w_i phi_a(x_i) phi_b(x_i) = delta_ab, lambdas ascending with
/// lambda_0 = 0 and phi_0 identically 1. M is the working truncation used by
/// the tensor constructions; columns up to Ms = lambdas.size() are kept for
/// the inner spectral sums.
struct SpectralBasis {
    VectorXd lambdas;
    MatrixXd phi;
    VectorXd weights;
    double epsilon = 0.0;
    int M = 0;

    int Ms() const { return static_cast<int>(lambdas.size()); }
    Eigen::Index size() const { return phi.rows(); }
};

/// Matrix of squared pairwise distances.
inline MatrixXd squared_distances(const PointCloud& cloud) {
    const MatrixXd& x = cloud.points;
    VectorXd sq = x.rowwise().squaredNorm();
    MatrixXd d2 = sq.replicate(1, x.rows());
    d2 += sq.transpose().replicate(x.rows(), 1);
    d2.noalias() -= 2.0 * x * x.transpose();
    d2 = d2.cwiseMax(0.0);
    d2.diagonal().setZero();
    return d2;
}

/// Gaussian kernel matrix K_ij = exp(-|x_i - x_j|^2 / (4 eps)) with unit
/// diagonal.
inline MatrixXd kernel_matrix(const PointCloud& cloud, double eps) {
    if (!(eps > 0.0)) throw Error("diffusion", "kernel bandwidth must be positive");
    MatrixXd k = (squared_distances(cloud) / (-4.0 * eps)).array().exp();
    k.diagonal().setOnes();
    return k;
}

/// Bandwidth selection by the kernel-sum criterion: sweep eps over a
/// logarithmic grid spanning [1e-6, 1e2] times the median squared pairwise
/// distance and return the eps maximizing d log S / d log eps, where
/// S(eps) = sum_ij K_ij(eps).
inline double tune_bandwidth(const PointCloud& cloud) {
    if (cloud.size() < 2) throw Error("diffusion", "bandwidth tuning needs at least 2 points");
    MatrixXd d2 = squared_distances(cloud);

    std::vector<double> offdiag;
    offdiag.reserve(static_cast<std::size_t>(cloud.size()) * (cloud.size() - 1) / 2);
    for (Eigen::Index i = 0; i < d2.rows(); ++i)
        for (Eigen::Index j = i + 1; j < d2.cols(); ++j) offdiag.push_back(d2(i, j));
    std::nth_element(offdiag.begin(), offdiag.begin() + offdiag.size() / 2, offdiag.end());
    const double med = offdiag[offdiag.size() / 2];
    if (!(med > 0.0)) throw Error("diffusion", "degenerate cloud: median pairwise distance is zero");

    const int per_decade = 8;
    const double lo = std::log10(1e-6 * med), hi = std::log10(1e2 * med);
    const int n_grid = static_cast<int>(std::lround((hi - lo) * per_decade)) + 1;
    VectorXd log_eps(n_grid), log_s(n_grid);
    for (int k = 0; k < n_grid; ++k) {
        const double le = lo + (hi - lo) * k / (n_grid - 1);
        const double eps = std::pow(10.0, le);
        const double s = (d2 / (-4.0 * eps)).array().exp().sum();
        log_eps(k) = le * std::numbers::ln10;
        log_s(k) = std::log(s);
    }
    // The slope is maximized over the pre-saturation range only (S below
    // N^{3/2}, the log midpoint between the floor N and the ceiling N^2):
    // as the kernel width approaches the manifold diameter, distance
    // concentration inflates the slope past the dim/2 scaling plateau and
    // would pull the argmax far outside the accurate-bandwidth regime.
    const double s_cut = 1.5 * std::log(static_cast<double>(cloud.size()));
    int best = 1;
    double best_slope = -1.0;
    for (int k = 1; k + 1 < n_grid; ++k) {
        if (log_s(k) > s_cut) break;
        const double slope = (log_s(k + 1) - log_s(k - 1)) / (log_eps(k + 1) - log_eps(k - 1));
        if (slope > best_slope) { best_slope = slope; best = k; }
    }
    return std::exp(log_eps(best));
}

/// Removes the sampling-density bias and forms the symmetric kernel
/// Khat = Q^-1 K Q^-1 with Q_ii = sum_j K_ij, plus the diagonal D with
/// D_ii = sum_j Khat_ij, so that D^-1 Khat is row-stochastic.
inline std::pair<MatrixXd, VectorXd> markov_normalize(const MatrixXd& k) {
    detail::require_symmetric(k, "markov_normalize kernel");
    if (k.minCoeff() <= 0.0) throw Error("diffusion", "kernel entries must be positive");
    VectorXd q = k.rowwise().sum();
    if (q.minCoeff() <= 0.0) throw Error("diffusion", "kernel row sum vanished");
    VectorXd qinv = q.cwiseInverse();
    MatrixXd khat = qinv.asDiagonal() * k * qinv.asDiagonal();
    VectorXd d = khat.rowwise().sum();
    if (d.minCoeff() <= 0.0) throw Error("diffusion", "normalized kernel row sum vanished");
    return {std::move(khat), std::move(d)};
}

/// Solves Khat v = Lambda D v, keeps the Ms largest Lambda, and converts to
/// Laplacian eigenvalues. The default conversion is lambda = -log(Lambda)/eps
/// (matching the heat-semigroup identification); lambda = (1-Lambda)/eps is
/// available via `use_linear_rate`. Eigenfunctions are rescaled to discrete
/// orthonormality under w_i = D_ii / sum_k D_kk, sign-fixed so the largest-
/// magnitude entry is positive, and phi_0 is replaced by its exact constant
/// limit.
inline SpectralBasis eigenbasis(const MatrixXd& khat, const VectorXd& d, double eps, int ms, int m,
                                bool use_linear_rate = false) {
    const Eigen::Index n = khat.rows();
    if (!(eps > 0.0)) throw Error("diffusion", "eigenbasis needs eps > 0");
    if (m < 1 || ms < m) throw Error("diffusion", "need 1 <= M <= Ms");
    if (ms > n) throw Error("diffusion", "need Ms <= N (requested Ms=" + std::to_string(ms) +
                                             ", N=" + std::to_string(n) + ")");

    EigenDecomposition ed = sym_geig_diag(khat, d, 1e-14);
    if (ed.values.size() < ms)
        throw Error("diffusion", "generalized eigensolve retained fewer than Ms modes");

    // sym_geig sorts ascending; the top Ms transfer-operator eigenvalues sit
    // at the tail, with the Perron pair last.
    SpectralBasis basis;
    basis.epsilon = eps;
    basis.M = m;
    basis.lambdas.resize(ms);
    basis.phi.resize(n, ms);
    const double dsum = d.sum();
    basis.weights = d / dsum;

    for (int j = 0; j < ms; ++j) {
        const Eigen::Index src = ed.values.size() - 1 - j;
        const double transfer_eig = ed.values(src);
        if (!(transfer_eig > 0.0))
            throw Error("diffusion", "bandwidth too small for requested M_s (transfer eigenvalue " +
                                         std::to_string(transfer_eig) + " at mode " + std::to_string(j) + ")");
        basis.lambdas(j) = use_linear_rate ? (1.0 - transfer_eig) / eps : -std::log(transfer_eig) / eps;
        basis.phi.col(j) = ed.vectors.col(src);
    }
    basis.lambdas.array() -= basis.lambdas(0);

    for (int j = 0; j < ms; ++j) {
        const double norm2 = basis.weights.dot(basis.phi.col(j).cwiseAbs2());
        basis.phi.col(j) /= std::sqrt(norm2);
        Eigen::Index imax = 0;
        basis.phi.col(j).cwiseAbs().maxCoeff(&imax);
        if (basis.phi(imax, j) < 0.0) basis.phi.col(j) = -basis.phi.col(j);
    }
    basis.phi.col(0).setOnes();
    return basis;
}

/// Generalized Fourier transform: fhat_j = sum_i phi_j(x_i) w_i f(x_i).
inline VectorXd fourier(const SpectralBasis& basis, const VectorXd& f) {
    if (f.size() != basis.size()) throw Error("diffusion", "fourier: sample count mismatch");
    return basis.phi.transpose() * basis.weights.cwiseProduct(f);
}

/// Inverse transform f = Phi fhat (rank-Ms reconstruction).
inline VectorXd synth(const SpectralBasis& basis, const VectorXd& coeffs) {
    if (coeffs.size() != basis.Ms()) throw Error("diffusion", "synth: coefficient count mismatch");
    return basis.phi * coeffs;
}

namespace detail {

/// Bandwidth floor from the nearest-neighbor structure: below roughly the
/// largest nearest-neighbor squared distance the kernel stops bridging the
/// sparsest sampling gaps. Regular samplings (grids, lattices; small spread
/// of nearest-neighbor distances) tolerate kernels well under that scale,
/// while irregular clouds need margin against sampling variance.
inline double bandwidth_floor(const MatrixXd& d2) {
    const Eigen::Index n = d2.rows();
    VectorXd nn(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < n; ++j)
            if (j != i) best = std::min(best, d2(i, j));
        nn(i) = std::sqrt(best);
    }
    const double mean = nn.mean();
    const double var = (nn.array() - mean).square().sum() / n;
    const double spread = mean > 0.0 ? std::sqrt(var) / mean : 0.0;
    const double max_nn2 = nn.maxCoeff() * nn.maxCoeff();
    return (spread < 0.25 ? 0.25 : 1.5) * max_nn2;
}

}  // namespace detail

/// Convenience wrapper: tune the bandwidth if eps <= 0, then run the kernel,
/// normalization, and eigensolve in sequence.
///
/// In auto mode the max-slope bandwidth is refined by halving while either
/// (a) the top requested mode is unresolved (transfer eigenvalue <= 0, or
///     eps * lambda_Ms > 18, i.e. below ~e^-18 and near the eigensolver
///     noise floor), or
/// (b) the heat-kernel bias across the working band is large
///     (eps * lambda_M > 0.08, a few percent of relative eigenvalue bias).
/// Bias-driven halving applies only when the requested band sits safely
/// inside the discrete spectrum (Ms <= N/2; closer to Nyquist the top modes
/// degrade as the kernel narrows), and stops at the nearest-neighbor
/// sampling floor, where narrower kernels stop bridging the sparsest gaps
/// and variance takes over from bias.
inline SpectralBasis build_basis(const PointCloud& cloud, double eps, int ms, int m,
                                 bool use_linear_rate = false) {
    const bool autotuned = !(eps > 0.0);
    double bw = autotuned ? tune_bandwidth(cloud) : eps;
    const double floor_eps = autotuned ? detail::bandwidth_floor(squared_distances(cloud)) : 0.0;
    const bool allow_bias_refinement = 2 * static_cast<Eigen::Index>(ms) <= cloud.size();
    SpectralBasis best;
    const double inf = std::numeric_limits<double>::infinity();
    double best_score = inf;
    for (int attempt = 0; attempt <= 16; ++attempt) {
        auto [khat, d] = markov_normalize(kernel_matrix(cloud, bw));
        try {
            SpectralBasis basis = eigenbasis(khat, d, bw, ms, m, use_linear_rate);
            const double band_score = bw * basis.lambdas(ms - 1);
            const double bias_score = bw * basis.lambdas(m - 1);
            if (!autotuned) return basis;
            if (band_score <= 18.0) {
                const bool refine = allow_bias_refinement && bias_score > 0.08 && 0.5 * bw >= floor_eps;
                if (!refine) return basis;
                if (band_score < best_score) {
                    best_score = band_score;
                    best = basis;
                }
            } else if (band_score < best_score) {
                best_score = band_score;
                best = std::move(basis);
            }
        } catch (const Error& e) {
            const bool undersized =
                std::string(e.what()).rfind("bandwidth too small for requested M_s", 0) == 0;
            if (!autotuned || !undersized) throw;
        }
        bw *= 0.5;
    }
    if (best_score == inf)
        throw Error("diffusion", "auto bandwidth search failed to resolve the requested mode count");
    return best;
}

}  // namespace sec
