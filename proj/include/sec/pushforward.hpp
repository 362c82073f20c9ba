#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "sec/dataset.hpp"
#include "sec/diffusion.hpp"
#include "sec/error.hpp"
#include "sec/frames.hpp"

namespace sec {

/// Ambient-space arrows at the sample points.
struct ArrowField {
    MatrixXd base;    // N x n sample coordinates
    MatrixXd arrows;  // N x n vectors
};

/// Pushes a frame-represented 1-form (via its dual vector field) forward
/// into data space: V is the operator representation, Xhat the coordinate
/// Fourier coefficients Xhat_{.j} = sum_i w_i x_i phi_j(x_i), and the arrow
/// matrix is Xhat V' Phi' evaluated at the samples (a rank-M low-pass
/// reconstruction).
inline ArrowField pushforward(const FrameCoefficients& a, const SecTensors& tensors,
                              const SpectralBasis& basis, const PointCloud& cloud) {
    if (cloud.size() != basis.size())
        throw Error("pushforward", "cloud and basis sample counts differ");
    if (a.index.M != tensors.M) throw Error("pushforward", "coefficient/tensor truncation mismatch");
    const int m = tensors.M;
    OperatorRep rep = frame_to_operator(a, tensors);
    const MatrixXd phi_m = basis.phi.leftCols(m);
    MatrixXd xhat = cloud.points.transpose() * basis.weights.asDiagonal() * phi_m;  // n x M
    ArrowField field;
    field.base = cloud.points;
    field.arrows = phi_m * rep.matrix * xhat.transpose();  // N x n
    return field;
}

/// Writes the field as CSV with columns x_1..x_n,v_1..v_n.
inline void export_arrows(const ArrowField& field, const std::string& path) {
    if (field.base.rows() != field.arrows.rows() || field.base.cols() != field.arrows.cols())
        throw Error("pushforward", "arrow field shapes do not match");
    std::ofstream out(path);
    if (!out) throw Error("io", "cannot open '" + path + "' for writing");
    const Eigen::Index n = field.base.cols();
    for (Eigen::Index j = 0; j < n; ++j) out << (j ? "," : "") << "x_" << (j + 1);
    for (Eigen::Index j = 0; j < n; ++j) out << ",v_" << (j + 1);
    out << '\n';
    char buf[40];
    for (Eigen::Index i = 0; i < field.base.rows(); ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", field.base(i, j));
            out << (j ? "," : "") << buf;
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", field.arrows(i, j));
            out << ',' << buf;
        }
        out << '\n';
    }
    if (!out) throw Error("io", "write failed for '" + path + "'");
}

struct SvgOptions {
    int stride = 1;
    int axis_x = 0;       // projection axes for clouds with n > 2
    int axis_y = 1;
    double scale = 1.0;   // uniform arrow rescaling, recorded in the SVG
};

/// Draws every stride-th arrow of a 2-D (or axis-projected) field into an
/// SVG with a unit-square viewBox; the data extent is fitted affinely with a
/// small margin. Zero-length arrows leave only the base marker.
inline void export_svg(const ArrowField& field, const std::string& path, const SvgOptions& opts = {}) {
    if (opts.stride < 1) throw Error("pushforward", "svg stride must be >= 1");
    const Eigen::Index n = field.base.cols();
    if (opts.axis_x < 0 || opts.axis_y < 0 || opts.axis_x >= n || opts.axis_y >= n || opts.axis_x == opts.axis_y)
        throw Error("pushforward", "svg projection axes out of range");
    std::ofstream out(path);
    if (!out) throw Error("io", "cannot open '" + path + "' for writing");

    const Eigen::Index rows = field.base.rows();
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double bx = field.base(i, opts.axis_x), by = field.base(i, opts.axis_y);
        const double tx = bx + opts.scale * field.arrows(i, opts.axis_x);
        const double ty = by + opts.scale * field.arrows(i, opts.axis_y);
        xmin = std::min({xmin, bx, tx});
        xmax = std::max({xmax, bx, tx});
        ymin = std::min({ymin, by, ty});
        ymax = std::max({ymax, by, ty});
    }
    const double margin = 0.05;
    const double span = std::max({xmax - xmin, ymax - ymin, 1e-12});
    auto map_x = [&](double x) { return margin + (1.0 - 2.0 * margin) * (x - xmin) / span; };
    auto map_y = [&](double y) { return 1.0 - (margin + (1.0 - 2.0 * margin) * (y - ymin) / span); };

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 1 1\">\n"
        << "<desc>arrow scale=" << opts.scale << " axes=" << opts.axis_x << "," << opts.axis_y
        << " stride=" << opts.stride << "</desc>\n";
    char buf[256];
    for (Eigen::Index i = 0; i < rows; i += opts.stride) {
        const double bx = map_x(field.base(i, opts.axis_x));
        const double by = map_y(field.base(i, opts.axis_y));
        std::snprintf(buf, sizeof buf, "<circle cx=\"%.5f\" cy=\"%.5f\" r=\"0.0035\" fill=\"#444\"/>\n", bx, by);
        out << buf;
        const double ax = opts.scale * field.arrows(i, opts.axis_x);
        const double ay = opts.scale * field.arrows(i, opts.axis_y);
        if (ax == 0.0 && ay == 0.0) continue;
        const double tx = map_x(field.base(i, opts.axis_x) + ax);
        const double ty = map_y(field.base(i, opts.axis_y) + ay);
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.5f\" y1=\"%.5f\" x2=\"%.5f\" y2=\"%.5f\" "
                      "stroke=\"#c02020\" stroke-width=\"0.0015\"/>\n",
                      bx, by, tx, ty);
        out << buf;
    }
    out << "</svg>\n";
    if (!out) throw Error("io", "write failed for '" + path + "'");
}

}  // namespace sec
