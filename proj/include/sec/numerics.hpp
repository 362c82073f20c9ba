#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "sec/error.hpp"

namespace sec {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Result of a (generalized) symmetric eigensolve. Eigenvalues ascend and
/// the columns of `vectors` are orthonormal in the inner product of the
/// problem that produced them (Euclidean for sym_eig, B-weighted for
/// sym_geig restricted to the retained subspace).
struct EigenDecomposition {
    VectorXd values;
    MatrixXd vectors;
};

namespace detail {

inline void require_symmetric(const MatrixXd& a, const char* name) {
    if (a.rows() != a.cols())
        throw Error("numerics", std::string(name) + " must be square, got " +
                                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    if (!a.allFinite())
        throw Error("numerics", std::string(name) + " has non-finite entries");
    const double scale = a.size() ? a.cwiseAbs().maxCoeff() : 0.0;
    const double asym = a.size() ? (a - a.transpose()).cwiseAbs().maxCoeff() : 0.0;
    if (asym > 1e-10 * std::max(scale, 1e-300))
        throw Error("numerics", std::string(name) + " is not symmetric (relative asymmetry " +
                                    std::to_string(asym / std::max(scale, 1e-300)) + ")");
}

inline bool is_diagonal(const MatrixXd& a) {
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            if (i != j && a(i, j) != 0.0) return false;
    return true;
}

}  // namespace detail

/// Full eigendecomposition of a symmetric matrix, values ascending.
/// The input is symmetrized (averaged with its transpose) before the solve
/// to absorb roundoff-level asymmetries from tensor assembly.
inline EigenDecomposition sym_eig(const MatrixXd& a) {
    detail::require_symmetric(a, "sym_eig input");
    MatrixXd s = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(s);
    if (es.info() != Eigen::Success)
        throw Error("numerics", "symmetric eigensolver failed to converge");
    return {es.eigenvalues(), es.eigenvectors()};
}

/// Generalized symmetric-definite problem A v = mu B v with diagonal B,
/// given as the vector of diagonal entries. Same retention and whitening
/// semantics as the dense-B overload, but without an O(N^3) B eigensolve.
inline EigenDecomposition sym_geig_diag(const MatrixXd& a, const VectorXd& bdiag, double rtol) {
    detail::require_symmetric(a, "sym_geig A");
    if (a.rows() != bdiag.size()) throw Error("numerics", "sym_geig A and B sizes differ");
    if (!(rtol > 0.0 && rtol < 1.0)) throw Error("numerics", "sym_geig rtol must lie in (0,1)");
    if (!bdiag.allFinite()) throw Error("numerics", "sym_geig B has non-finite entries");

    const double bmax = bdiag.size() ? bdiag.maxCoeff() : 0.0;
    const double cut = rtol * bmax;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < bdiag.size(); ++i)
        if (bdiag(i) > cut && bdiag(i) > 0.0) keep.push_back(i);
    if (keep.empty()) throw Error("degenerate_metric", "degenerate metric: no B eigenvalue above threshold");

    const auto w = static_cast<Eigen::Index>(keep.size());
    VectorXd scale(w);
    for (Eigen::Index k = 0; k < w; ++k) scale(k) = 1.0 / std::sqrt(bdiag(keep[k]));

    MatrixXd awhite(w, w);
    for (Eigen::Index j = 0; j < w; ++j)
        for (Eigen::Index i = 0; i < w; ++i)
            awhite(i, j) = a(keep[i], keep[j]) * scale(i) * scale(j);
    awhite = 0.5 * (awhite + awhite.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<MatrixXd> es(awhite);
    if (es.info() != Eigen::Success)
        throw Error("numerics", "generalized eigensolver failed to converge");

    MatrixXd vectors = MatrixXd::Zero(a.rows(), w);
    for (Eigen::Index k = 0; k < w; ++k)
        vectors.row(keep[k]) = scale(k) * es.eigenvectors().row(k);
    return {es.eigenvalues(), vectors};
}

/// Generalized symmetric-definite problem A v = mu B v for symmetric A and
/// symmetric positive-semidefinite B, solved on the span of B-eigenvectors
/// whose eigenvalues exceed rtol * max(eig B). B is eigendecomposed and the
/// problem whitened on the retained subspace; Cholesky is avoided since B is
/// rank-deficient in frame Grammians. Returned vectors are B-orthonormal.
inline EigenDecomposition sym_geig(const MatrixXd& a, const MatrixXd& b, double rtol) {
    detail::require_symmetric(a, "sym_geig A");
    detail::require_symmetric(b, "sym_geig B");
    if (a.rows() != b.rows()) throw Error("numerics", "sym_geig A and B sizes differ");
    if (detail::is_diagonal(b)) return sym_geig_diag(a, VectorXd(b.diagonal()), rtol);
    if (!(rtol > 0.0 && rtol < 1.0)) throw Error("numerics", "sym_geig rtol must lie in (0,1)");

    EigenDecomposition be = sym_eig(b);
    const double bmax = be.values.size() ? be.values.maxCoeff() : 0.0;
    const double cut = rtol * bmax;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < be.values.size(); ++i)
        if (be.values(i) > cut && be.values(i) > 0.0) keep.push_back(i);
    if (keep.empty()) throw Error("degenerate_metric", "degenerate metric: no B eigenvalue above threshold");

    MatrixXd w(b.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k)
        w.col(static_cast<Eigen::Index>(k)) = be.vectors.col(keep[k]) / std::sqrt(be.values(keep[k]));

    MatrixXd awhite = w.transpose() * a * w;
    awhite = 0.5 * (awhite + awhite.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(awhite);
    if (es.info() != Eigen::Success)
        throw Error("numerics", "generalized eigensolver failed to converge");
    return {es.eigenvalues(), w * es.eigenvectors()};
}

/// Moore-Penrose pseudoinverse; singular values below rtol * sigma_max are
/// treated as zero.
inline MatrixXd pinv(const MatrixXd& a, double rtol) {
    if (!a.allFinite()) throw Error("numerics", "pinv input has non-finite entries");
    if (!(rtol > 0.0 && rtol < 1.0)) throw Error("numerics", "pinv rtol must lie in (0,1)");
    Eigen::BDCSVD<MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VectorXd& sv = svd.singularValues();
    const double cut = sv.size() ? rtol * sv(0) : 0.0;
    VectorXd inv = VectorXd::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cut) inv(i) = 1.0 / sv(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace sec
