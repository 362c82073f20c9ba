#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <utility>

#include "sec/diffusion.hpp"
#include "sec/error.hpp"

namespace sec {

/// Four-index tensor over the truncated basis, stored as its row-major
/// flattening: entry (i,j,k,l) lives at (i*M+j, k*M+l). The flattening
/// convention is shared by every module that consumes these tensors.
struct Tensor4 {
    int dim = 0;
    MatrixXd flat;

    Tensor4() = default;
    explicit Tensor4(int m) : dim(m), flat(MatrixXd::Zero(Eigen::Index(m) * m, Eigen::Index(m) * m)) {}

    Eigen::Index pair(int i, int j) const { return Eigen::Index(i) * dim + j; }
    double operator()(int i, int j, int k, int l) const { return flat(pair(i, j), pair(k, l)); }
    double& operator()(int i, int j, int k, int l) { return flat(pair(i, j), pair(k, l)); }
};

/// Triple-product tensor c_ijk = sum_n w_n phi_i phi_j phi_k with i,j < M
/// and k < Ms, stored with (i,j) flattened row-major.
struct TripleProduct {
    int M = 0;
    int Ms = 0;
    MatrixXd c;  // (M*M) x Ms

    Eigen::Index pair(int i, int j) const { return Eigen::Index(i) * M + j; }
    double operator()(int i, int j, int k) const { return c(pair(i, j), k); }
};

/// Spectral quadrature of the triple products of basis functions.
inline TripleProduct triple_product(const SpectralBasis& basis) {
    const int m = basis.M, ms = basis.Ms();
    if (m > ms) throw Error("tensors", "triple product needs M <= Ms");
    const Eigen::Index n = basis.size();
    MatrixXd weighted_pairs(n, Eigen::Index(m) * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            weighted_pairs.col(Eigen::Index(i) * m + j) =
                basis.weights.cwiseProduct(basis.phi.col(i)).cwiseProduct(basis.phi.col(j));
    TripleProduct tp;
    tp.M = m;
    tp.Ms = ms;
    tp.c.noalias() = weighted_pairs.transpose() * basis.phi.leftCols(ms);
    return tp;
}

/// Fourier coefficients of the Riemannian metric on eigenfunction gradients:
/// g_kij = (lambda_i + lambda_j - lambda_k) c_ijk / 2, stored Ms x (M*M).
inline MatrixXd metric_coeffs(const TripleProduct& c, const VectorXd& lambdas) {
    if (lambdas.size() < c.Ms) throw Error("tensors", "metric_coeffs: eigenvalue count below Ms");
    MatrixXd g(c.Ms, Eigen::Index(c.M) * c.M);
    for (int k = 0; k < c.Ms; ++k)
        for (int i = 0; i < c.M; ++i)
            for (int j = 0; j < c.M; ++j)
                g(k, c.pair(i, j)) = 0.5 * (lambdas(i) + lambdas(j) - lambdas(k)) * c(i, j, k);
    return g;
}

/// Product-energy tensor c^p_ijkl = sum_s lambda_s^p c_ijs c_skl, the inner
/// sum running over the full Ms range.
inline Tensor4 cp_tensor(const TripleProduct& c, const VectorXd& lambdas, int p) {
    if (p < 0 || p > 2) throw Error("tensors", "cp_tensor supports p in {0,1,2}");
    if (lambdas.size() < c.Ms) throw Error("tensors", "cp_tensor: eigenvalue count below Ms");
    Tensor4 t(c.M);
    if (p == 0) {
        t.flat.noalias() = c.c * c.c.transpose();
    } else {
        VectorXd lp = lambdas.head(c.Ms).array().pow(double(p));
        t.flat.noalias() = c.c * lp.asDiagonal() * c.c.transpose();
    }
    return t;
}

/// Hodge Grammian of the 1-form frame elements b^ij = phi_i d phi_j:
/// G_ijkl = sum_m c_ikm c_jlm (lambda_j + lambda_l - lambda_m) / 2, realized
/// as an index permutation of the c^0 and c^1 tensors.
inline Tensor4 hodge_grammian(const Tensor4& c0, const Tensor4& c1, const VectorXd& lambdas) {
    const int m = c0.dim;
    Tensor4 g(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l)
                    g(i, j, k, l) = 0.5 * ((lambdas(j) + lambdas(l)) * c0(i, k, j, l) - c1(i, k, j, l));
    return g;
}

/// Dirichlet form E_ijkl = <b^ij, Laplacian_1 b^kl> in closed form from the
/// product-energy tensors.
inline Tensor4 dirichlet_energy(const Tensor4& c1, const Tensor4& c2, const VectorXd& lambdas) {
    const int m = c1.dim;
    Tensor4 e(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l) {
                    const double lam_sum = lambdas(i) + lambdas(j) + lambdas(k) + lambdas(l);
                    e(i, j, k, l) = 0.25 * (lam_sum * (c1(i, l, j, k) - c1(i, k, j, l)) +
                                            (lambdas(j) + lambdas(l) - lambdas(i) - lambdas(k)) * c1(i, j, k, l) +
                                            (c2(i, j, k, l) + c2(i, k, j, l) - c2(i, l, j, k)));
                }
    return e;
}

/// Grammian, Dirichlet form, and frame-to-operator tensor of the
/// antisymmetric elements bhat^ij = b^ij - b^ji. Ehat uses its own closed
/// form; assembly cross-checks it against the combination of E entries.
struct AntisymmetricTensors {
    Tensor4 Ghat;
    Tensor4 Ehat;
    Tensor4 H;
};

inline AntisymmetricTensors antisymmetrize(const Tensor4& g, const Tensor4& e, const Tensor4& c1,
                                           const Tensor4& c2, const VectorXd& lambdas) {
    const int m = g.dim;
    AntisymmetricTensors out{Tensor4(m), Tensor4(m), Tensor4(m)};
    double max_dev = 0.0, scale = 1.0;
    // Each antisymmetric entry is computed once for the canonical index
    // order i<j, k<l and mirrored by sign, so the i<->j and k<->l
    // antisymmetries hold exactly rather than to summation roundoff.
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            for (int k = 0; k < m; ++k)
                for (int l = k + 1; l < m; ++l) {
                    const double ghat = g(i, j, k, l) + g(j, i, l, k) - g(j, i, k, l) - g(i, j, l, k);
                    out.Ghat(i, j, k, l) = ghat;
                    out.Ghat(j, i, k, l) = -ghat;
                    out.Ghat(i, j, l, k) = -ghat;
                    out.Ghat(j, i, l, k) = ghat;
                    const double lam_sum = lambdas(i) + lambdas(j) + lambdas(k) + lambdas(l);
                    const double ehat = lam_sum * (c1(i, l, j, k) - c1(i, k, j, l)) +
                                        (c2(i, k, j, l) - c2(i, l, j, k));
                    out.Ehat(i, j, k, l) = ehat;
                    out.Ehat(j, i, k, l) = -ehat;
                    out.Ehat(i, j, l, k) = -ehat;
                    out.Ehat(j, i, l, k) = ehat;
                    const double via_e = e(i, j, k, l) - e(j, i, k, l) - e(i, j, l, k) + e(j, i, l, k);
                    max_dev = std::max(max_dev, std::abs(ehat - via_e));
                    scale = std::max(scale, std::abs(ehat));
                }
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l)
                    out.H(i, j, k, l) = g(i, j, k, l) - g(j, i, k, l);
    if (max_dev > 1e-8 * scale)
        throw Error("internal", "antisymmetric Dirichlet form disagrees with E combination by " +
                                    std::to_string(max_dev));
    return out;
}

/// Sobolev H^1 Grammian G^1 = G + E (same formula for the antisymmetric
/// family).
inline Tensor4 sobolev_grammian(const Tensor4& g, const Tensor4& e) {
    if (g.dim != e.dim) throw Error("tensors", "sobolev_grammian: dimension mismatch");
    Tensor4 out(g.dim);
    out.flat = g.flat + e.flat;
    return out;
}

/// Every closed-form SEC tensor, assembled from the eigenvalues and triple
/// products alone.
struct SecTensors {
    TripleProduct c;
    MatrixXd g;  // metric coefficients, Ms x (M*M)
    Tensor4 c0, c1, c2;
    Tensor4 G, E, Ghat, Ehat, H;
    Tensor4 G1, G1hat;
    VectorXd lambdas;  // first M entries of the basis spectrum
    int M = 0;
};

inline SecTensors assemble_tensors(const SpectralBasis& basis) {
    SecTensors t;
    t.M = basis.M;
    t.c = triple_product(basis);
    t.g = metric_coeffs(t.c, basis.lambdas);
    t.c0 = cp_tensor(t.c, basis.lambdas, 0);
    t.c1 = cp_tensor(t.c, basis.lambdas, 1);
    t.c2 = cp_tensor(t.c, basis.lambdas, 2);
    t.lambdas = basis.lambdas.head(basis.M);
    t.G = hodge_grammian(t.c0, t.c1, t.lambdas);
    t.E = dirichlet_energy(t.c1, t.c2, t.lambdas);
    AntisymmetricTensors anti = antisymmetrize(t.G, t.E, t.c1, t.c2, t.lambdas);
    t.Ghat = std::move(anti.Ghat);
    t.Ehat = std::move(anti.Ehat);
    t.H = std::move(anti.H);
    t.G1 = sobolev_grammian(t.G, t.E);
    t.G1hat = sobolev_grammian(t.Ghat, t.Ehat);
    return t;
}

}  // namespace sec
