#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sec/error.hpp"
#include "sec/frames.hpp"
#include "sec/numerics.hpp"

namespace sec {

/// Well-conditioned Galerkin basis for H^1 1-forms: the dominant
/// eigenvectors of the flattened Sobolev Grammian, retained while
/// h_ii > rtol * h_11. Columns of Utilde hold frame coefficients of
/// orthogonal 1-forms.
struct GalerkinBasis {
    MatrixXd Utilde;
    VectorXd h;
    double rtol = 1e-3;
    FrameKind kind = FrameKind::antisymmetric;

    int retained() const { return static_cast<int>(h.size()); }
};

inline GalerkinBasis sobolev_basis(const MatrixXd& g1flat, double rtol = 1e-3,
                                   FrameKind kind = FrameKind::antisymmetric) {
    EigenDecomposition ed = sym_eig(g1flat);
    const Eigen::Index n = ed.values.size();
    const double hmax = n ? ed.values(n - 1) : 0.0;
    if (!(hmax > 0.0)) throw Error("hodge1", "Sobolev Grammian has no positive eigenvalue");
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = n - 1; i >= 0; --i)
        if (ed.values(i) > rtol * hmax) keep.push_back(i);
    if (keep.empty()) throw Error("hodge1", "all Sobolev Grammian eigenvalues below threshold");
    GalerkinBasis basis;
    basis.rtol = rtol;
    basis.kind = kind;
    basis.h.resize(static_cast<Eigen::Index>(keep.size()));
    basis.Utilde.resize(g1flat.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
        basis.h(static_cast<Eigen::Index>(k)) = ed.values(keep[k]);
        basis.Utilde.col(static_cast<Eigen::Index>(k)) = ed.vectors.col(keep[k]);
    }
    return basis;
}

/// Eigenvalues and eigenforms of the Galerkin-projected 1-Laplacian.
/// `coeffs` columns are frame coefficients (Utilde expanded) per eigenform;
/// `residuals` holds |L a - nu B a| per pair relative to |L|.
struct EigenformSet {
    VectorXd nus;
    MatrixXd coeffs;
    FrameKind kind = FrameKind::antisymmetric;
    std::string method = "intro";
    double theta = 0.0;
    VectorXd residuals;
};

namespace detail {

inline VectorXd pair_residuals(const MatrixXd& l, const MatrixXd& b, const VectorXd& nus,
                               const MatrixXd& vecs) {
    const double lnorm = std::max(l.cwiseAbs().maxCoeff(), 1e-300);
    VectorXd res(nus.size());
    for (Eigen::Index k = 0; k < nus.size(); ++k)
        res(k) = (l * vecs.col(k) - nus(k) * (b * vecs.col(k))).norm() / lnorm;
    return res;
}

// The continuum Dirichlet and Grammian forms are positive semidefinite;
// discretization noise can leave small negative directions that would
// surface as spurious negative eigenvalues, so the projected forms are
// clipped to the PSD cone before the solve.
inline MatrixXd psd_project(const MatrixXd& a) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (a + a.transpose()));
    VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace detail

/// Galerkin eigenproblem in the Sobolev basis without regularization:
/// L = U~' E U~, B = U~' G U~, solve L a = nu B a with B-nullspace exclusion.
inline EigenformSet solve_intro(const MatrixXd& eflat, const MatrixXd& gflat, const GalerkinBasis& basis,
                                double b_rtol = 1e-6) {
    if (eflat.rows() != basis.Utilde.rows() || gflat.rows() != basis.Utilde.rows())
        throw Error("hodge1", "solve_intro: matrix size does not match basis enumeration");
    MatrixXd l = detail::psd_project(basis.Utilde.transpose() * eflat * basis.Utilde);
    MatrixXd b = detail::psd_project(basis.Utilde.transpose() * gflat * basis.Utilde);
    EigenDecomposition ed = sym_geig(l, b, b_rtol);
    EigenformSet out;
    out.nus = ed.values;
    out.coeffs = basis.Utilde * ed.vectors;
    out.kind = basis.kind;
    out.method = "intro";
    out.theta = 0.0;
    out.residuals = detail::pair_residuals(l, b, ed.values, ed.vectors);
    return out;
}

/// Coercive variant: L = H^-1/2 U~' (E + theta G) U~ H^-1/2 and
/// B = H^-1/2 U~' G U~ H^-1/2, solved the same way; reported eigenvalues
/// subtract theta so both solvers target classical 1-Laplacian eigenvalues.
/// Pass the flattened matrices (usually H^1-normalized, matching the basis)
/// that produced `basis`; g1flat is used to confirm the basis diagonalizes it.
inline EigenformSet solve_theta(const MatrixXd& eflat, const MatrixXd& gflat, const MatrixXd& g1flat,
                                const GalerkinBasis& basis, double theta, double b_rtol = 1e-6) {
    if (!(theta > 0.0)) throw Error("hodge1", "solve_theta needs theta > 0");
    if (eflat.rows() != basis.Utilde.rows() || gflat.rows() != basis.Utilde.rows())
        throw Error("hodge1", "solve_theta: matrix size does not match basis enumeration");

    MatrixXd check = basis.Utilde.transpose() * g1flat * basis.Utilde;
    check.diagonal() -= basis.h;
    if (check.cwiseAbs().maxCoeff() > 1e-6 * basis.h(0))
        throw Error("hodge1", "solve_theta: basis does not diagonalize the supplied Sobolev Grammian");

    VectorXd hinv_sqrt = basis.h.array().rsqrt();
    MatrixXd w = basis.Utilde * hinv_sqrt.asDiagonal();
    MatrixXd l = detail::psd_project(w.transpose() * (eflat + theta * gflat) * w);
    MatrixXd b = detail::psd_project(w.transpose() * gflat * w);
    EigenDecomposition ed = sym_geig(l, b, b_rtol);
    EigenformSet out;
    out.nus = ed.values.array() - theta;
    out.coeffs = w * ed.vectors;
    out.kind = basis.kind;
    out.method = "theta";
    out.theta = theta;
    out.residuals = detail::pair_residuals(l, b, ed.values, ed.vectors);
    return out;
}

/// Betti-number estimate from the low end of the 1-Laplacian spectrum.
/// Default: count of eigenvalues below abs_threshold. With use_gap, the
/// count k maximizing nu_{k+1}/max(nu_k, 1e-12) over the first eight
/// eigenvalues is returned instead; when even nu_1 is above abs_threshold
/// there is no near-zero cluster and the count is zero.
inline int betti_estimate(const VectorXd& nus, double abs_threshold = 0.05, bool use_gap = false) {
    if (nus.size() == 0) throw Error("hodge1", "betti_estimate: empty spectrum");
    for (Eigen::Index i = 1; i < nus.size(); ++i)
        if (nus(i) < nus(i - 1) - 1e-12) throw Error("hodge1", "betti_estimate: spectrum not ascending");
    if (!use_gap) {
        int count = 0;
        for (Eigen::Index i = 0; i < nus.size(); ++i)
            if (nus(i) < abs_threshold) ++count;
        return count;
    }
    if (nus(0) >= abs_threshold) return 0;
    const int limit = static_cast<int>(std::min<Eigen::Index>(8, nus.size() - 1));
    int best_k = 1;
    double best_ratio = -1.0;
    for (int k = 1; k <= limit; ++k) {
        const double ratio = nus(k) / std::max(nus(k - 1), 1e-12);
        if (ratio > best_ratio) { best_ratio = ratio; best_k = k; }
    }
    return best_k;
}

}  // namespace sec
