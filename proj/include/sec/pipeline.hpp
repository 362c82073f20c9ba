#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sec/dataset.hpp"
#include "sec/diffusion.hpp"
#include "sec/error.hpp"
#include "sec/frames.hpp"
#include "sec/hodge1.hpp"
#include "sec/pushforward.hpp"
#include "sec/tensors.hpp"

namespace sec {

/// Fully resolved pipeline configuration. Every field is echoed into the
/// run manifest so a run can be reproduced from the manifest alone.
struct RunConfig {
    std::string dataset;                 // generator kind; empty when reading --input
    std::string input;                   // CSV path; empty when generating
    int n = 0;                           // dataset size parameter
    std::string eps = "auto";            // "auto" or a positive number
    int m = 20;
    int ms = 100;
    std::string frame = "antisym";       // antisym | nonsym
    std::string method = "intro";        // intro | theta
    double theta = 1.0;
    double rtol = 1e-3;                  // Sobolev-basis retention threshold
    double betti_threshold = 0.05;
    bool betti_gap = false;
    std::string out = "sec_out";
    std::uint64_t seed = 0;
    std::vector<int> eigenform = {0};
    int stride = 1;
    // config-file-only knobs
    double dt = 0.01;                    // lorenz63 step
    int spinup = 1000;                   // lorenz63 discarded steps
    double torus_R = 2.0;
    double torus_r = 0.8;
    double b_rtol = 1e-6;                // B-nullspace exclusion in the Galerkin solve
    std::string lambda_conversion = "log";  // log: -log(Lambda)/eps, linear: (1-Lambda)/eps
};

namespace detail {

inline std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

inline void save_matrix(const MatrixXd& m, const std::string& path, const std::string& comment = "") {
    std::ofstream out(path);
    if (!out) throw Error("io", "cannot open '" + path + "' for writing");
    if (!comment.empty()) out << "# " << comment << '\n';
    char buf[40];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
            out << (j ? "," : "") << buf;
        }
        out << '\n';
    }
    if (!out) throw Error("io", "write failed for '" + path + "'");
}

inline MatrixXd load_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("io", "cannot open '" + path + "' for reading");
    std::vector<std::vector<double>> rows;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> fields;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            std::size_t pos = 0;
            double v;
            try {
                v = std::stod(cell, &pos);
            } catch (...) {
                throw Error("parse", "non-numeric field at line " + std::to_string(lineno) + " of '" + path + "'");
            }
            fields.push_back(v);
        }
        if (!rows.empty() && fields.size() != rows.front().size())
            throw Error("parse", "ragged row at line " + std::to_string(lineno) + " of '" + path + "'");
        rows.push_back(std::move(fields));
    }
    if (rows.empty()) throw Error("parse", "no data rows in '" + path + "'");
    MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.front().size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void require_artifact(const std::string& path, const std::string& producer) {
    if (!std::filesystem::exists(path))
        throw Error("missing_artifact",
                    "missing artifact '" + path + "'; run `sec " + producer + "` first");
}

}  // namespace detail

/// Applies one key=value setting (config-file key names match the CLI flag
/// names without the leading dashes).
inline void apply_config_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    auto as_double = [&](const char* what) {
        try {
            return std::stod(value);
        } catch (...) {
            throw Error("config", std::string("invalid numeric value for ") + what + ": '" + value + "'");
        }
    };
    auto as_int = [&](const char* what) {
        try {
            return std::stoi(value);
        } catch (...) {
            throw Error("config", std::string("invalid integer value for ") + what + ": '" + value + "'");
        }
    };
    auto as_bool = [&](const char* what) {
        if (value == "1" || value == "true" || value == "yes") return true;
        if (value == "0" || value == "false" || value == "no") return false;
        throw Error("config", std::string("invalid boolean value for ") + what + ": '" + value + "'");
    };
    if (key == "dataset") cfg.dataset = value;
    else if (key == "input") cfg.input = value;
    else if (key == "n") cfg.n = as_int("n");
    else if (key == "eps") cfg.eps = value;
    else if (key == "eps_value") { /* informational echo of a tuned bandwidth */ }
    else if (key == "m") cfg.m = as_int("m");
    else if (key == "ms") cfg.ms = as_int("ms");
    else if (key == "frame") cfg.frame = value;
    else if (key == "method") cfg.method = value;
    else if (key == "theta") cfg.theta = as_double("theta");
    else if (key == "rtol") cfg.rtol = as_double("rtol");
    else if (key == "betti-threshold") cfg.betti_threshold = as_double("betti-threshold");
    else if (key == "betti-gap") cfg.betti_gap = as_bool("betti-gap");
    else if (key == "out") cfg.out = value;
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
    else if (key == "stride") cfg.stride = as_int("stride");
    else if (key == "eigenform") {
        cfg.eigenform.clear();
        std::stringstream ss(value);
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (!tok.empty()) cfg.eigenform.push_back(std::stoi(tok));
        if (cfg.eigenform.empty()) cfg.eigenform = {0};
    } else if (key == "dt") cfg.dt = as_double("dt");
    else if (key == "spinup") cfg.spinup = as_int("spinup");
    else if (key == "torus_R") cfg.torus_R = as_double("torus_R");
    else if (key == "torus_r") cfg.torus_r = as_double("torus_r");
    else if (key == "b_rtol") cfg.b_rtol = as_double("b_rtol");
    else if (key == "lambda_conversion") cfg.lambda_conversion = value;
    else throw Error("config", "unknown config key '" + key + "'");
}

/// Reads a line-oriented key=value config file; '#' starts a comment.
inline void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("io", "cannot open config file '" + path + "'");
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = strip(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error("config", "expected key=value at line " + std::to_string(lineno) + " of '" + path + "'");
        apply_config_key(cfg, strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
    }
}

inline void validate_config(const RunConfig& cfg) {
    if (cfg.dataset.empty() && cfg.input.empty())
        throw Error("config", "either a dataset kind or an input file is required");
    if (cfg.m < 2) throw Error("config", "m must be at least 2");
    if (cfg.ms < cfg.m) throw Error("config", "ms must be at least m");
    if (cfg.frame != "antisym" && cfg.frame != "nonsym")
        throw Error("config", "frame must be 'antisym' or 'nonsym'");
    if (cfg.method != "intro" && cfg.method != "theta")
        throw Error("config", "method must be 'intro' or 'theta'");
    if (cfg.method == "theta" && !(cfg.theta > 0.0)) throw Error("config", "theta must be positive");
    if (!(cfg.rtol > 0.0 && cfg.rtol < 1.0)) throw Error("config", "rtol must lie in (0,1)");
    if (cfg.stride < 1) throw Error("config", "stride must be >= 1");
    if (cfg.lambda_conversion != "log" && cfg.lambda_conversion != "linear")
        throw Error("config", "lambda_conversion must be 'log' or 'linear'");
    if (cfg.eps != "auto") {
        try {
            if (std::stod(cfg.eps) <= 0.0) throw Error("config", "eps must be positive or 'auto'");
        } catch (const Error&) {
            throw;
        } catch (...) {
            throw Error("config", "eps must be a number or 'auto', got '" + cfg.eps + "'");
        }
    }
}

inline FrameKind frame_kind(const RunConfig& cfg) {
    return cfg.frame == "antisym" ? FrameKind::antisymmetric : FrameKind::nonsymmetric;
}

/// Writes the manifest echoing every resolved setting (plus the tuned
/// bandwidth when eps was "auto"). The manifest itself parses as a config
/// file.
inline void write_manifest(const RunConfig& cfg, double eps_value, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("io", "cannot open '" + path + "' for writing");
    out << "# sec run manifest; valid as --config input\n";
    out << "dataset=" << cfg.dataset << '\n';
    out << "input=" << cfg.input << '\n';
    out << "n=" << cfg.n << '\n';
    out << "eps=" << cfg.eps << '\n';
    if (eps_value > 0.0) out << "eps_value=" << detail::fmt_double(eps_value) << '\n';
    out << "m=" << cfg.m << '\n';
    out << "ms=" << cfg.ms << '\n';
    out << "frame=" << cfg.frame << '\n';
    out << "method=" << cfg.method << '\n';
    out << "theta=" << detail::fmt_double(cfg.theta) << '\n';
    out << "rtol=" << detail::fmt_double(cfg.rtol) << '\n';
    out << "betti-threshold=" << detail::fmt_double(cfg.betti_threshold) << '\n';
    out << "betti-gap=" << (cfg.betti_gap ? 1 : 0) << '\n';
    out << "out=" << cfg.out << '\n';
    out << "seed=" << cfg.seed << '\n';
    out << "eigenform=";
    for (std::size_t i = 0; i < cfg.eigenform.size(); ++i) out << (i ? "," : "") << cfg.eigenform[i];
    out << '\n';
    out << "stride=" << cfg.stride << '\n';
    out << "dt=" << detail::fmt_double(cfg.dt) << '\n';
    out << "spinup=" << cfg.spinup << '\n';
    out << "torus_R=" << detail::fmt_double(cfg.torus_R) << '\n';
    out << "torus_r=" << detail::fmt_double(cfg.torus_r) << '\n';
    out << "b_rtol=" << detail::fmt_double(cfg.b_rtol) << '\n';
    out << "lambda_conversion=" << cfg.lambda_conversion << '\n';
    if (!out) throw Error("io", "write failed for '" + path + "'");
}

/// Resolves the dataset: load from CSV when an input path is set, generate
/// otherwise.
inline PointCloud pipeline_dataset(const RunConfig& cfg) {
    if (!cfg.input.empty()) return load_point_cloud(cfg.input);
    DatasetSpec spec;
    spec.kind = cfg.dataset;
    spec.n = cfg.n;
    spec.seed = cfg.seed;
    spec.dt = cfg.dt;
    spec.spinup = cfg.spinup;
    spec.big_radius = cfg.torus_R;
    spec.small_radius = cfg.torus_r;
    return generate(spec);
}

inline void guard_cloud_size(const PointCloud& cloud, const RunConfig& cfg) {
    if (cloud.size() < 3 || cloud.size() < cfg.ms)
        throw Error("dataset",
                    "dataset too small: N=" + std::to_string(cloud.size()) + " but M_s=" +
                        std::to_string(cfg.ms) + " modes requested; reduce --ms or supply more points");
}

/// Stage 1: resolve the dataset and write points.csv.
inline void stage_generate(const RunConfig& cfg) {
    validate_config(cfg);
    std::filesystem::create_directories(cfg.out);
    PointCloud cloud = pipeline_dataset(cfg);
    save_point_cloud(cloud, detail::join_path(cfg.out, "points.csv"));
    write_manifest(cfg, 0.0, detail::join_path(cfg.out, "manifest.txt"));
}

/// Stage 2: diffusion-maps eigenbasis from points.csv. Returns the bandwidth
/// actually used (tuned when eps=auto) and records it in the manifest.
inline double stage_spectrum(const RunConfig& cfg) {
    validate_config(cfg);
    const std::string points_path = detail::join_path(cfg.out, "points.csv");
    detail::require_artifact(points_path, "generate");
    PointCloud cloud = load_point_cloud(points_path);
    guard_cloud_size(cloud, cfg);
    const double requested_eps = cfg.eps == "auto" ? -1.0 : std::stod(cfg.eps);
    SpectralBasis basis = build_basis(cloud, requested_eps, cfg.ms, cfg.m, cfg.lambda_conversion == "linear");
    const double eps_value = basis.epsilon;
    detail::save_matrix(basis.lambdas, detail::join_path(cfg.out, "eigenvalues_0lap.csv"), "lambda");
    detail::save_matrix(basis.phi, detail::join_path(cfg.out, "basis_phi.csv"));
    detail::save_matrix(basis.weights, detail::join_path(cfg.out, "basis_weights.csv"));
    write_manifest(cfg, eps_value, detail::join_path(cfg.out, "manifest.txt"));
    return eps_value;
}

/// Reassembles the SpectralBasis from the spectrum-stage artifacts.
inline SpectralBasis load_basis_artifacts(const RunConfig& cfg) {
    const std::string lam_path = detail::join_path(cfg.out, "eigenvalues_0lap.csv");
    const std::string phi_path = detail::join_path(cfg.out, "basis_phi.csv");
    const std::string w_path = detail::join_path(cfg.out, "basis_weights.csv");
    detail::require_artifact(lam_path, "spectrum");
    detail::require_artifact(phi_path, "spectrum");
    detail::require_artifact(w_path, "spectrum");
    SpectralBasis basis;
    basis.lambdas = detail::load_matrix(lam_path).col(0);
    basis.phi = detail::load_matrix(phi_path);
    basis.weights = detail::load_matrix(w_path).col(0);
    basis.M = cfg.m;
    if (basis.phi.cols() != basis.lambdas.size() || basis.phi.rows() != basis.weights.size())
        throw Error("parse", "basis artifacts are inconsistent; rerun `sec spectrum`");
    if (basis.Ms() < cfg.m)
        throw Error("config", "stored basis has fewer modes than requested m; rerun `sec spectrum`");
    return basis;
}

/// Stage 3: SEC tensors, Galerkin solve, Betti estimate.
inline EigenformSet stage_eigenforms(const RunConfig& cfg) {
    validate_config(cfg);
    SpectralBasis basis = load_basis_artifacts(cfg);
    SecTensors tensors = assemble_tensors(basis);
    const FrameKind kind = frame_kind(cfg);
    FrameIndex idx{cfg.m, kind, FrameScaling::unit};

    EigenformSet forms;
    if (cfg.method == "intro") {
        const Tensor4& gten = kind == FrameKind::antisymmetric ? tensors.Ghat : tensors.G;
        const Tensor4& eten = kind == FrameKind::antisymmetric ? tensors.Ehat : tensors.E;
        const Tensor4& g1ten = kind == FrameKind::antisymmetric ? tensors.G1hat : tensors.G1;
        MatrixXd gflat = frame_matrix(gten, idx, tensors.lambdas);
        MatrixXd eflat = frame_matrix(eten, idx, tensors.lambdas);
        MatrixXd g1flat = frame_matrix(g1ten, idx, tensors.lambdas);
        GalerkinBasis gal = sobolev_basis(g1flat, cfg.rtol, kind);
        forms = solve_intro(eflat, gflat, gal, cfg.b_rtol);
    } else {
        const Tensor4& gten = kind == FrameKind::antisymmetric ? tensors.Ghat : tensors.G;
        const Tensor4& eten = kind == FrameKind::antisymmetric ? tensors.Ehat : tensors.E;
        const Tensor4& g1ten = kind == FrameKind::antisymmetric ? tensors.G1hat : tensors.G1;
        MatrixXd gflat = frame_matrix(gten, idx, tensors.lambdas, /*h1_normalized=*/true);
        MatrixXd eflat = frame_matrix(eten, idx, tensors.lambdas, /*h1_normalized=*/true);
        MatrixXd g1flat = frame_matrix(g1ten, idx, tensors.lambdas, /*h1_normalized=*/true);
        // The coercive formulation keeps every numerically nonzero Sobolev
        // mode (the H^-1/2 whitening absorbs the conditioning); the rtol
        // flag governs the intro path only.
        GalerkinBasis gal = sobolev_basis(g1flat, 1e-9, kind);
        forms = solve_theta(eflat, gflat, g1flat, gal, cfg.theta, cfg.b_rtol);
    }

    detail::save_matrix(forms.nus, detail::join_path(cfg.out, "eigenvalues_1lap.csv"), "nu");
    detail::save_matrix(forms.coeffs, detail::join_path(cfg.out, "eigenform_coeffs.csv"));
    const int betti = betti_estimate(forms.nus, cfg.betti_threshold, cfg.betti_gap);
    {
        std::ofstream out(detail::join_path(cfg.out, "betti.txt"));
        if (!out) throw Error("io", "cannot write betti.txt");
        out << betti << '\n';
    }
    return forms;
}

/// Stage 4: pushforward of the requested eigenforms into arrow CSV + SVG.
inline void stage_export(const RunConfig& cfg) {
    validate_config(cfg);
    const std::string points_path = detail::join_path(cfg.out, "points.csv");
    const std::string coeffs_path = detail::join_path(cfg.out, "eigenform_coeffs.csv");
    detail::require_artifact(points_path, "generate");
    detail::require_artifact(coeffs_path, "eigenforms");
    PointCloud cloud = load_point_cloud(points_path);
    SpectralBasis basis = load_basis_artifacts(cfg);
    MatrixXd coeffs = detail::load_matrix(coeffs_path);
    SecTensors tensors = assemble_tensors(basis);
    FrameIndex idx{cfg.m, frame_kind(cfg), FrameScaling::unit};
    if (coeffs.rows() != idx.size())
        throw Error("config", "stored eigenform coefficients do not match the frame kind/truncation");
    for (int k : cfg.eigenform) {
        if (k < 0 || k >= coeffs.cols())
            throw Error("config", "eigenform index " + std::to_string(k) + " out of range (have " +
                                      std::to_string(coeffs.cols()) + ")");
        FrameCoefficients a{idx, coeffs.col(k)};
        ArrowField field = pushforward(a, tensors, basis, cloud);
        const std::string stem = "eigenform_" + std::to_string(k);
        export_arrows(field, detail::join_path(cfg.out, stem + "_arrows.csv"));
        SvgOptions opts;
        opts.stride = cfg.stride;
        export_svg(field, detail::join_path(cfg.out, stem + ".svg"), opts);
    }
}

/// Full pipeline: dataset, spectrum, eigenforms, exports, manifest.
inline int run(const RunConfig& cfg) {
    validate_config(cfg);
    std::filesystem::create_directories(cfg.out);
    PointCloud cloud = pipeline_dataset(cfg);
    guard_cloud_size(cloud, cfg);
    save_point_cloud(cloud, detail::join_path(cfg.out, "points.csv"));
    const double eps_value = stage_spectrum(cfg);
    stage_eigenforms(cfg);
    stage_export(cfg);
    write_manifest(cfg, eps_value, detail::join_path(cfg.out, "manifest.txt"));
    return 0;
}

}  // namespace sec
