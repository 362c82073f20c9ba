#pragma once

#include <Eigen/Dense>

#include <cmath>

#include "sec/error.hpp"
#include "sec/numerics.hpp"
#include "sec/tensors.hpp"

namespace sec {

enum class FrameKind { nonsymmetric, antisymmetric };
enum class FrameScaling { unit, exponential };

/// Enumeration of the 1-form frame elements over a basis truncation M.
/// The nonsymmetric family runs over all ordered pairs (p,q) in lexicographic
/// order; the antisymmetric family over pairs with p < q (bhat^pq = -bhat^qp
/// and bhat^pp = 0, so those are the distinct elements). The exponential
/// scaling weights element k by s_k = exp(-lambda_{q_k}/2).
struct FrameIndex {
    int M = 0;
    FrameKind kind = FrameKind::nonsymmetric;
    FrameScaling scaling = FrameScaling::unit;

    int size() const {
        return kind == FrameKind::nonsymmetric ? M * M : M * (M - 1) / 2;
    }

    std::pair<int, int> pair(int k) const {
        if (kind == FrameKind::nonsymmetric) return {k / M, k % M};
        // antisymmetric: (0,1),(0,2),...,(0,M-1),(1,2),...
        int p = 0, row = M - 1;
        while (k >= row) { k -= row; ++p; --row; }
        return {p, p + 1 + k};
    }

    int index(int p, int q) const {
        if (kind == FrameKind::nonsymmetric) return p * M + q;
        if (p >= q) throw Error("frames", "antisymmetric enumeration needs p < q");
        return p * (2 * M - p - 1) / 2 + (q - p - 1);
    }

    double scale(int k, const VectorXd& lambdas) const {
        if (scaling == FrameScaling::unit) return 1.0;
        return std::exp(-0.5 * lambdas(pair(k).second));
    }
};

/// A 1-form (equivalently its dual vector field) as coefficients over the
/// enumerated frame elements.
struct FrameCoefficients {
    FrameIndex index;
    VectorXd values;
};

enum class OperatorNormalization { plain, h1 };

/// A vector field as the matrix of its action on basis functions,
/// entry (i,j) = <phi_i, v(phi_j)> under the discrete inner product. The h1
/// normalization divides column j by sqrt(1 + lambda_j).
struct OperatorRep {
    MatrixXd matrix;
    OperatorNormalization normalization = OperatorNormalization::plain;
};

/// Pairwise inner products of the enumerated (scaled) frame elements, read
/// from a four-index tensor: pass the plain tensor (G, E, G1) with the
/// nonsymmetric enumeration and the hat tensor (Ghat, Ehat, G1hat) with the
/// antisymmetric one. With h1_normalized, element (p,q) is additionally
/// divided by |phi_p|_{H^1} = sqrt(1 + lambda_p).
inline MatrixXd frame_matrix(const Tensor4& tensor, const FrameIndex& idx, const VectorXd& lambdas,
                             bool h1_normalized = false) {
    if (tensor.dim != idx.M) throw Error("frames", "frame_matrix: tensor/index dimension mismatch");
    const int n = idx.size();
    VectorXd factor(n);
    for (int k = 0; k < n; ++k) {
        const auto [p, q] = idx.pair(k);
        double f = idx.scale(k, lambdas);
        if (h1_normalized) f /= std::sqrt(1.0 + lambdas(p));
        factor(k) = f;
        (void)q;
    }
    MatrixXd out(n, n);
    for (int r = 0; r < n; ++r) {
        const auto [pr, qr] = idx.pair(r);
        for (int s = 0; s < n; ++s) {
            const auto [ps, qs] = idx.pair(s);
            out(r, s) = factor(r) * factor(s) * tensor(pr, qr, ps, qs);
        }
    }
    return out;
}

/// Maps frame coefficients to the operator representation: V_kl =
/// sum G_ijkl a^ij for the nonsymmetric family, V_kl = sum H_ijkl a_ij for
/// the antisymmetric one.
inline OperatorRep frame_to_operator(const FrameCoefficients& a, const SecTensors& tensors) {
    const FrameIndex& idx = a.index;
    if (idx.M != tensors.M) throw Error("frames", "frame_to_operator: truncation mismatch");
    if (a.values.size() != idx.size()) throw Error("frames", "frame_to_operator: coefficient length mismatch");
    const int m = idx.M;
    OperatorRep rep;
    rep.matrix = MatrixXd::Zero(m, m);
    const Tensor4& contraction = idx.kind == FrameKind::nonsymmetric ? tensors.G : tensors.H;
    for (int r = 0; r < idx.size(); ++r) {
        const double coeff = a.values(r) * idx.scale(r, tensors.lambdas);
        if (coeff == 0.0) continue;
        const auto [p, q] = idx.pair(r);
        for (int k = 0; k < m; ++k)
            for (int l = 0; l < m; ++l) rep.matrix(k, l) += coeff * contraction(p, q, k, l);
    }
    rep.normalization = OperatorNormalization::plain;
    return rep;
}

/// Reads the dual-frame coefficients off the operator matrix:
/// vhat'_k = s_k L_{p_k q_k} (antisymmetric family: s_k (L_pq - L_qp)).
inline FrameCoefficients operator_to_dual_frame(const OperatorRep& rep, const FrameIndex& idx,
                                                const VectorXd& lambdas) {
    if (rep.normalization != OperatorNormalization::plain)
        throw Error("frames", "operator_to_dual_frame expects a plain-normalized operator");
    FrameCoefficients out;
    out.index = idx;
    out.values.resize(idx.size());
    for (int k = 0; k < idx.size(); ++k) {
        const auto [p, q] = idx.pair(k);
        const double raw = idx.kind == FrameKind::nonsymmetric ? rep.matrix(p, q)
                                                               : rep.matrix(p, q) - rep.matrix(q, p);
        out.values(k) = idx.scale(k, lambdas) * raw;
    }
    return out;
}

/// Minimum-norm frame coefficients from dual-frame coefficients via the
/// pseudoinverse of the matching frame Grammian.
inline FrameCoefficients dual_to_frame(const FrameCoefficients& vprime, const MatrixXd& grammian,
                                       double rtol = 1e-3) {
    if (grammian.rows() != vprime.values.size())
        throw Error("frames", "dual_to_frame: Grammian size does not match enumeration");
    FrameCoefficients out;
    out.index = vprime.index;
    out.values = pinv(grammian, rtol) * vprime.values;
    return out;
}

/// Frame coefficients of a gradient field grad f = sum_j fhat_j b_{0j}.
inline FrameCoefficients gradient_coeffs(const VectorXd& fhat, int m) {
    FrameIndex idx{m, FrameKind::nonsymmetric, FrameScaling::unit};
    FrameCoefficients out;
    out.index = idx;
    out.values = VectorXd::Zero(idx.size());
    const int top = std::min<int>(m, static_cast<int>(fhat.size()));
    for (int j = 1; j < top; ++j) out.values(idx.index(0, j)) = fhat(j);
    return out;
}

/// Switches an operator representation to the h1 normalization (column j
/// divided by sqrt(1 + lambda_j)).
inline OperatorRep h1_normalize(const OperatorRep& rep, const VectorXd& lambdas) {
    if (rep.normalization == OperatorNormalization::h1) return rep;
    OperatorRep out = rep;
    for (Eigen::Index j = 0; j < out.matrix.cols(); ++j)
        out.matrix.col(j) /= std::sqrt(1.0 + lambdas(j));
    out.normalization = OperatorNormalization::h1;
    return out;
}

}  // namespace sec
