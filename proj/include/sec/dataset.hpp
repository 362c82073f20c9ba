#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sec/error.hpp"

namespace sec {

using Eigen::MatrixXd;
using Eigen::Vector3d;

/// A point cloud of N samples in ambient dimension n (rows are samples),
/// tagged with its generator name and parameters.
struct PointCloud {
    MatrixXd points;
    std::string label;
    std::map<std::string, double> params;

    Eigen::Index size() const { return points.rows(); }
    Eigen::Index dim() const { return points.cols(); }
};

namespace detail {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Uniform double in [0,1) from the top 53 bits of the engine output,
/// independent of the standard library's distribution implementation.
inline double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline void validate_cloud(const PointCloud& cloud) {
    if (cloud.size() < 2) throw Error("dataset", "point cloud needs at least 2 samples");
    if (!cloud.points.allFinite()) throw Error("dataset", "point cloud has non-finite coordinates");
    std::vector<Eigen::Index> order(static_cast<std::size_t>(cloud.size()));
    for (Eigen::Index i = 0; i < cloud.size(); ++i) order[static_cast<std::size_t>(i)] = i;
    auto less = [&](Eigen::Index a, Eigen::Index b) {
        for (Eigen::Index j = 0; j < cloud.dim(); ++j) {
            if (cloud.points(a, j) < cloud.points(b, j)) return true;
            if (cloud.points(a, j) > cloud.points(b, j)) return false;
        }
        return false;
    };
    std::sort(order.begin(), order.end(), less);
    for (std::size_t k = 1; k < order.size(); ++k)
        if (cloud.points.row(order[k - 1]) == cloud.points.row(order[k]))
            throw Error("dataset", "point cloud has duplicate rows");
}

}  // namespace detail

/// N uniformly spaced points on the unit circle in R^2.
inline PointCloud circle_grid(int n) {
    if (n < 2) throw Error("dataset", "circle grid needs n >= 2");
    PointCloud cloud;
    cloud.points.resize(n, 2);
    for (int i = 0; i < n; ++i) {
        const double t = detail::kTwoPi * i / n;
        cloud.points(i, 0) = std::cos(t);
        cloud.points(i, 1) = std::sin(t);
    }
    cloud.label = "circle";
    cloud.params = {{"n", double(n)}, {"random", 0.0}};
    detail::validate_cloud(cloud);
    return cloud;
}

/// N uniform-random points on the unit circle in R^2.
inline PointCloud circle_random(int n, std::uint64_t seed) {
    if (n < 2) throw Error("dataset", "circle needs n >= 2");
    std::mt19937_64 rng(seed);
    PointCloud cloud;
    cloud.points.resize(n, 2);
    for (int i = 0; i < n; ++i) {
        const double t = detail::kTwoPi * detail::unit_uniform(rng);
        cloud.points(i, 0) = std::cos(t);
        cloud.points(i, 1) = std::sin(t);
    }
    cloud.label = "circle_random";
    cloud.params = {{"n", double(n)}, {"random", 1.0}, {"seed", double(seed)}};
    detail::validate_cloud(cloud);
    return cloud;
}

/// n_per_dim^2 grid points on the flat torus embedded in R^4 as
/// (cos a, sin a, cos b, sin b).
inline PointCloud flat_torus(int n_per_dim) {
    if (n_per_dim < 2) throw Error("dataset", "flat torus needs n_per_dim >= 2");
    const int n = n_per_dim;
    PointCloud cloud;
    cloud.points.resize(Eigen::Index(n) * n, 4);
    for (int i = 0; i < n; ++i) {
        const double a = detail::kTwoPi * i / n;
        for (int j = 0; j < n; ++j) {
            const double b = detail::kTwoPi * j / n;
            const Eigen::Index row = Eigen::Index(i) * n + j;
            cloud.points(row, 0) = std::cos(a);
            cloud.points(row, 1) = std::sin(a);
            cloud.points(row, 2) = std::cos(b);
            cloud.points(row, 3) = std::sin(b);
        }
    }
    cloud.label = "flat_torus";
    cloud.params = {{"n_per_dim", double(n)}};
    detail::validate_cloud(cloud);
    return cloud;
}

/// N points on the standard torus in R^3 with major radius R and tube
/// radius r, laid out by a golden-angle sweep of the two angles so that
/// arbitrary N covers the surface without a grid seam.
inline PointCloud torus_r3(int n, double big_radius = 2.0, double small_radius = 0.8) {
    if (n < 2) throw Error("dataset", "torus needs n >= 2");
    if (big_radius <= 0.0 || small_radius <= 0.0 || small_radius >= big_radius)
        throw Error("dataset", "torus needs 0 < r < R");
    const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
    PointCloud cloud;
    cloud.points.resize(n, 3);
    for (int i = 0; i < n; ++i) {
        const double u = detail::kTwoPi * std::fmod(golden * i, 1.0);
        const double v = detail::kTwoPi * (i + 0.5) / n;
        const double ring = big_radius + small_radius * std::cos(v);
        cloud.points(i, 0) = ring * std::cos(u);
        cloud.points(i, 1) = ring * std::sin(u);
        cloud.points(i, 2) = small_radius * std::sin(v);
    }
    cloud.label = "torus_r3";
    cloud.params = {{"n", double(n)}, {"R", big_radius}, {"r", small_radius}};
    detail::validate_cloud(cloud);
    return cloud;
}

/// N near-uniform points on the unit sphere via the Fibonacci lattice.
inline PointCloud sphere(int n) {
    if (n < 2) throw Error("dataset", "sphere needs n >= 2");
    const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
    PointCloud cloud;
    cloud.points.resize(n, 3);
    for (int i = 0; i < n; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / n;
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double t = golden_angle * i;
        cloud.points(i, 0) = rho * std::cos(t);
        cloud.points(i, 1) = rho * std::sin(t);
        cloud.points(i, 2) = z;
    }
    cloud.label = "sphere";
    cloud.params = {{"n", double(n)}};
    detail::validate_cloud(cloud);
    return cloud;
}

/// Grid sample of a Mobius band: ((1 + (s/2)cos(t/2))cos t,
/// (1 + (s/2)cos(t/2))sin t, (s/2)sin(t/2)) with s in [-1,1], t in [0,2pi).
/// The grid factors are chosen so spacing along and across the band is
/// comparable; the realized count n_t*n_s is at most the requested n.
inline PointCloud mobius(int n) {
    if (n < 8) throw Error("dataset", "mobius needs n >= 8");
    int n_s = std::max(3, int(std::lround(std::sqrt(n / detail::kTwoPi))));
    int n_t = std::max(4, n / n_s);
    PointCloud cloud;
    cloud.points.resize(Eigen::Index(n_t) * n_s, 3);
    for (int i = 0; i < n_t; ++i) {
        const double t = detail::kTwoPi * i / n_t;
        for (int j = 0; j < n_s; ++j) {
            const double s = -1.0 + 2.0 * j / (n_s - 1);
            const double w = 1.0 + 0.5 * s * std::cos(0.5 * t);
            const Eigen::Index row = Eigen::Index(i) * n_s + j;
            cloud.points(row, 0) = w * std::cos(t);
            cloud.points(row, 1) = w * std::sin(t);
            cloud.points(row, 2) = 0.5 * s * std::sin(0.5 * t);
        }
    }
    cloud.label = "mobius";
    cloud.params = {{"n", double(n_t) * n_s}, {"n_t", double(n_t)}, {"n_s", double(n_s)}};
    detail::validate_cloud(cloud);
    return cloud;
}

namespace detail {

// Two-holed torus as the level set f1(p) f2(p) = delta of the product of two
// standard torus implicits f_i = (|(x -+ c, y)| - R)^2 + z^2 - r^2. The level
// joins the side-by-side solid tori through a neck into a genus-2 handlebody;
// fat tubes and a wide neck keep all four 1-homology generators at low
// spectral order. The sampled coordinates are scaled up afterwards, which
// only shifts the spectrum scale.
struct Genus2Surface {
    double big_radius = 1.0;
    double tube_radius = 0.6;
    double center = 1.8;
    double delta = 0.5;
    double scale = 3.0;

    double torus(const Vector3d& p, double cx) const {
        const double ring = std::sqrt((p.x() - cx) * (p.x() - cx) + p.y() * p.y());
        return (ring - big_radius) * (ring - big_radius) + p.z() * p.z() - tube_radius * tube_radius;
    }

    Vector3d torus_grad(const Vector3d& p, double cx) const {
        const double ring = std::sqrt((p.x() - cx) * (p.x() - cx) + p.y() * p.y());
        if (ring < 1e-12) return {0.0, 0.0, 2.0 * p.z()};
        const double s = 2.0 * (ring - big_radius) / ring;
        return {s * (p.x() - cx), s * p.y(), 2.0 * p.z()};
    }

    double f(const Vector3d& p) const { return torus(p, -center) * torus(p, center) - delta; }

    Vector3d grad(const Vector3d& p) const {
        return torus(p, center) * torus_grad(p, -center) + torus(p, -center) * torus_grad(p, center);
    }
};

}  // namespace detail

/// N points on a genus-2 surface (two plumbed tori), sampled by rejection
/// from a bounding box followed by Newton projection onto the level set.
inline PointCloud genus2(int n, std::uint64_t seed = 0) {
    if (n < 2) throw Error("dataset", "genus2 needs n >= 2");
    detail::Genus2Surface surf;
    std::mt19937_64 rng(seed);
    const double xb = surf.center + surf.big_radius + surf.tube_radius + 0.5;
    const double yb = surf.big_radius + surf.tube_radius + 0.5;
    const double zb = surf.tube_radius + 0.4;
    PointCloud cloud;
    cloud.points.resize(n, 3);
    int got = 0;
    long attempts = 0;
    const long max_attempts = 4000L * n;
    while (got < n && attempts < max_attempts) {
        ++attempts;
        Vector3d p(xb * (2.0 * detail::unit_uniform(rng) - 1.0),
                   yb * (2.0 * detail::unit_uniform(rng) - 1.0),
                   zb * (2.0 * detail::unit_uniform(rng) - 1.0));
        bool ok = false;
        for (int it = 0; it < 80; ++it) {
            const double fv = surf.f(p);
            if (std::abs(fv) < 1e-12) { ok = true; break; }
            const Vector3d gr = surf.grad(p);
            const double gn2 = gr.squaredNorm();
            if (gn2 < 1e-14) break;
            p -= (fv / gn2) * gr;
        }
        if (!ok || std::abs(p.x()) > xb || std::abs(p.y()) > yb || std::abs(p.z()) > zb) continue;
        cloud.points.row(got++) = surf.scale * p.transpose();
    }
    if (got < n) throw Error("dataset", "genus2 sampling failed to converge");
    cloud.label = "genus2";
    cloud.params = {{"n", double(n)}, {"seed", double(seed)}, {"delta", surf.delta},
                    {"scale", surf.scale}};
    detail::validate_cloud(cloud);
    return cloud;
}

/// N samples along a Lorenz 63 trajectory (sigma=10, rho=28, beta=8/3),
/// integrated with fixed-step classical Runge-Kutta; the first `spinup`
/// steps are discarded so samples lie on the attractor.
inline PointCloud lorenz63(int n, double dt = 0.01, int spinup = 1000) {
    if (n < 2) throw Error("dataset", "lorenz63 needs n >= 2");
    if (dt <= 0.0) throw Error("dataset", "lorenz63 needs dt > 0");
    if (spinup < 0) throw Error("dataset", "lorenz63 needs spinup >= 0");
    const double sigma = 10.0, rho = 28.0, beta = 8.0 / 3.0;
    auto deriv = [&](const Vector3d& s) -> Vector3d {
        return {sigma * (s.y() - s.x()), s.x() * (rho - s.z()) - s.y(), s.x() * s.y() - beta * s.z()};
    };
    auto rk4_step = [&](Vector3d s) -> Vector3d {
        const Vector3d k1 = deriv(s);
        const Vector3d k2 = deriv(s + 0.5 * dt * k1);
        const Vector3d k3 = deriv(s + 0.5 * dt * k2);
        const Vector3d k4 = deriv(s + dt * k3);
        return s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    };
    Vector3d state(1.0, 1.0, 1.05);
    for (int i = 0; i < spinup; ++i) state = rk4_step(state);
    PointCloud cloud;
    cloud.points.resize(n, 3);
    for (int i = 0; i < n; ++i) {
        cloud.points.row(i) = state.transpose();
        state = rk4_step(state);
    }
    cloud.label = "lorenz63";
    cloud.params = {{"n", double(n)}, {"dt", dt}, {"spinup", double(spinup)}};
    detail::validate_cloud(cloud);
    return cloud;
}

/// Dataset request as it arrives from the CLI or a config file.
struct DatasetSpec {
    std::string kind;
    int n = 0;
    std::uint64_t seed = 0;
    double dt = 0.01;
    int spinup = 1000;
    double big_radius = 2.0;
    double small_radius = 0.8;
};

inline PointCloud generate(const DatasetSpec& spec) {
    if (spec.kind == "circle") return circle_grid(spec.n);
    if (spec.kind == "circle_random") return circle_random(spec.n, spec.seed);
    if (spec.kind == "flat_torus") return flat_torus(spec.n);
    if (spec.kind == "torus_r3") return torus_r3(spec.n, spec.big_radius, spec.small_radius);
    if (spec.kind == "sphere") return sphere(spec.n);
    if (spec.kind == "mobius") return mobius(spec.n);
    if (spec.kind == "genus2") return genus2(spec.n, spec.seed);
    if (spec.kind == "lorenz63") return lorenz63(spec.n, spec.dt, spec.spinup);
    throw Error("dataset", "unknown dataset kind '" + spec.kind + "'");
}

/// Writes a cloud as CSV, one point per line, 17 significant digits.
inline void save_point_cloud(const PointCloud& cloud, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("io", "cannot open '" + path + "' for writing");
    char buf[40];
    for (Eigen::Index i = 0; i < cloud.size(); ++i) {
        for (Eigen::Index j = 0; j < cloud.dim(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", cloud.points(i, j));
            out << (j ? "," : "") << buf;
        }
        out << '\n';
    }
    if (!out) throw Error("io", "write failed for '" + path + "'");
}

/// Reads a CSV point cloud: comma separator, optional header row, "#"
/// comment lines ignored, dimension inferred from the first data row.
inline PointCloud load_point_cloud(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("io", "cannot open '" + path + "' for reading");
    std::vector<std::vector<double>> rows;
    std::string line;
    long lineno = 0;
    bool header_allowed = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> fields;
        std::stringstream ss(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            std::size_t pos = 0;
            double v = 0.0;
            try {
                v = std::stod(cell, &pos);
            } catch (...) {
                numeric = false;
            }
            while (numeric && pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
            if (!numeric || pos != cell.size()) { numeric = false; break; }
            fields.push_back(v);
        }
        if (!numeric) {
            if (header_allowed) { header_allowed = false; continue; }
            throw Error("parse", "non-numeric field at line " + std::to_string(lineno) + " of '" + path + "'");
        }
        header_allowed = false;
        if (!rows.empty() && fields.size() != rows.front().size())
            throw Error("parse", "ragged row at line " + std::to_string(lineno) + " of '" + path + "': expected " +
                                     std::to_string(rows.front().size()) + " fields, got " +
                                     std::to_string(fields.size()));
        if (fields.empty())
            throw Error("parse", "empty row at line " + std::to_string(lineno) + " of '" + path + "'");
        rows.push_back(std::move(fields));
    }
    if (rows.empty()) throw Error("parse", "no data rows in '" + path + "'");
    PointCloud cloud;
    cloud.points.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.front().size(); ++j)
            cloud.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    cloud.label = "file";
    detail::validate_cloud(cloud);
    return cloud;
}

}  // namespace sec
