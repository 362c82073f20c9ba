#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "analytic_circle.hpp"
#include "sec/hodge1.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using sec::FrameIndex;
using sec::FrameKind;
using sec::FrameScaling;

namespace {

struct CircleSolve {
    sec::SpectralBasis basis;
    sec::SecTensors tensors;
    MatrixXd gflat, eflat, g1flat;
    sec::GalerkinBasis galerkin;
    sec::EigenformSet forms;
};

CircleSolve solve_circle(int n, int ms, int m, FrameKind kind = FrameKind::antisymmetric) {
    CircleSolve s;
    s.basis = sec::build_basis(sec::circle_grid(n), -1.0, ms, m);
    s.tensors = sec::assemble_tensors(s.basis);
    FrameIndex idx{m, kind, FrameScaling::unit};
    const bool anti = kind == FrameKind::antisymmetric;
    s.gflat = sec::frame_matrix(anti ? s.tensors.Ghat : s.tensors.G, idx, s.tensors.lambdas);
    s.eflat = sec::frame_matrix(anti ? s.tensors.Ehat : s.tensors.E, idx, s.tensors.lambdas);
    s.g1flat = sec::frame_matrix(anti ? s.tensors.G1hat : s.tensors.G1, idx, s.tensors.lambdas);
    s.galerkin = sec::sobolev_basis(s.g1flat, 1e-3, kind);
    s.forms = sec::solve_intro(s.eflat, s.gflat, s.galerkin);
    return s;
}

}  // namespace

TEST_CASE("sobolev_basis retention semantics") {
    auto all = sec::sobolev_basis(MatrixXd::Identity(5, 5), 1e-3, FrameKind::nonsymmetric);
    CHECK(all.retained() == 5);
    CHECK((all.h.array() == 1.0).all());

    MatrixXd two = MatrixXd::Zero(2, 2);
    two(0, 0) = 1.0;
    two(1, 1) = 1e-5;
    auto kept = sec::sobolev_basis(two, 1e-3, FrameKind::nonsymmetric);
    CHECK(kept.retained() == 1);
    CHECK(kept.h(0) == Catch::Approx(1.0));

    CHECK_THROWS_AS(sec::sobolev_basis(-MatrixXd::Identity(3, 3), 1e-3, FrameKind::nonsymmetric), sec::Error);
}

TEST_CASE("circle antisymmetric Sobolev basis is smaller than the pair count") {
    CircleSolve s = solve_circle(101, 100, 20);
    INFO("retained dimension " << s.galerkin.retained() << " of 190 pairs");
    CHECK(s.galerkin.retained() < 190);
    CHECK(s.galerkin.retained() > 20);
    // eigenvalues descend and stay above threshold
    for (int k = 1; k < s.galerkin.retained(); ++k) CHECK(s.galerkin.h(k) <= s.galerkin.h(k - 1));
    CHECK(s.galerkin.h(s.galerkin.retained() - 1) > 1e-3 * s.galerkin.h(0));
}

TEST_CASE("circle 1-Laplacian spectrum matches k^2 with doubled multiplicity") {
    CircleSolve s = solve_circle(101, 100, 20);
    REQUIRE(s.forms.nus.size() >= 9);
    CHECK(s.forms.nus(0) <= 1e-3);
    const double expected[] = {1, 1, 4, 4, 9, 9, 16, 16};
    for (int k = 0; k < 8; ++k)
        CHECK(std::abs(s.forms.nus(k + 1) - expected[k]) / expected[k] < 0.20);
    // residuals and positive semidefiniteness up to numerics
    CHECK(s.forms.residuals.maxCoeff() < 1e-6);
    CHECK(s.forms.nus(0) >= -1e-6 * s.forms.nus(s.forms.nus.size() - 1));
}

TEST_CASE("nonsymmetric frame also recovers the circle spectrum") {
    // The nonsymmetric family resolves the nonzero spectrum as well as the
    // antisymmetric one but the harmonic mode is noticeably less accurate,
    // which is why the antisymmetric family is the default.
    CircleSolve s = solve_circle(101, 100, 12, FrameKind::nonsymmetric);
    CHECK(s.forms.nus(0) < 0.5 * s.forms.nus(1));
    const double expected[] = {1, 1, 4, 4};
    for (int k = 0; k < 4; ++k)
        CHECK(std::abs(s.forms.nus(k + 1) - expected[k]) / expected[k] < 0.25);
}

TEST_CASE("solve_theta agrees with solve_intro") {
    CircleSolve s = solve_circle(101, 100, 20);
    FrameIndex idx{20, FrameKind::antisymmetric, FrameScaling::unit};
    MatrixXd gflat = sec::frame_matrix(s.tensors.Ghat, idx, s.tensors.lambdas, true);
    MatrixXd eflat = sec::frame_matrix(s.tensors.Ehat, idx, s.tensors.lambdas, true);
    MatrixXd g1flat = sec::frame_matrix(s.tensors.G1hat, idx, s.tensors.lambdas, true);
    // keep all numerically nonzero Sobolev modes for the coercive path
    sec::GalerkinBasis gal = sec::sobolev_basis(g1flat, 1e-9, idx.kind);
    sec::EigenformSet theta1 = sec::solve_theta(eflat, gflat, g1flat, gal, 1.0);

    const int count = std::min<int>(10, std::min(theta1.nus.size(), s.forms.nus.size()));
    for (int k = 1; k < count; ++k)
        CHECK(std::abs(theta1.nus(k) - s.forms.nus(k)) / s.forms.nus(k) < 0.05);
    CHECK(std::abs(theta1.nus(0) - s.forms.nus(0)) < 0.05);
}

TEST_CASE("solve_theta with tiny theta reproduces solve_intro on its own basis") {
    CircleSolve s = solve_circle(101, 60, 10);
    sec::EigenformSet intro = sec::solve_intro(s.eflat, s.gflat, s.galerkin);
    sec::EigenformSet theta = sec::solve_theta(s.eflat, s.gflat, s.g1flat, s.galerkin, 1e-6);
    const int count = std::min(intro.nus.size(), theta.nus.size());
    for (int k = 0; k < count; ++k)
        CHECK(std::abs(theta.nus(k) - intro.nus(k)) < 1e-4 * std::max(1.0, intro.nus(k)));
}

TEST_CASE("theta shift cancels exactly on a synthetic harmonic direction") {
    // E annihilates e_1, G is the identity there: the weak eigenvalue is
    // exactly theta and the reported value must return to zero.
    MatrixXd e = MatrixXd::Zero(2, 2);
    e(1, 1) = 2.0;
    MatrixXd g = MatrixXd::Identity(2, 2);
    MatrixXd g1 = e + g;
    sec::GalerkinBasis gal = sec::sobolev_basis(g1, 1e-6, FrameKind::nonsymmetric);
    sec::EigenformSet forms = sec::solve_theta(e, g, g1, gal, 1.0);
    CHECK(std::abs(forms.nus(0)) < 1e-8);
    CHECK(forms.nus(1) == Catch::Approx(2.0).margin(1e-8));
}

TEST_CASE("betti_estimate on the published spectra") {
    VectorXd mobius(8), genus2(8), sphere(8), torus(8);
    mobius << 0.0242, 1.0415, 1.0449, 3.8684, 3.8948, 8.0352, 8.1018, 8.9369;
    genus2 << 0.0021, 0.0026, 0.0026, 0.0041, 0.0893, 0.0901, 0.2151, 0.2175;
    sphere << 1.9349, 1.9521, 1.9781, 1.9817, 2.0042, 2.0172, 5.8001, 5.8142;
    torus << 0.0040, 0.0093, 0.2574, 0.2575, 0.2575, 0.2587, 0.8061, 0.8067;
    CHECK(sec::betti_estimate(mobius) == 1);
    CHECK(sec::betti_estimate(genus2, 0.05, true) == 4);
    CHECK(sec::betti_estimate(sphere) == 0);
    CHECK(sec::betti_estimate(sphere, 0.05, true) == 0);
    CHECK(sec::betti_estimate(torus, 0.05, true) == 2);
    CHECK(sec::betti_estimate(mobius, 0.05, true) == 1);
    CHECK_THROWS_AS(sec::betti_estimate(VectorXd()), sec::Error);
}

TEST_CASE("spectrum is invariant under eigenfunction sign flips") {
    sec::SpectralBasis basis = sec::build_basis(sec::circle_grid(101), -1.0, 30, 10);
    CircleSolve ref;
    ref.basis = basis;
    sec::SpectralBasis flipped = basis;
    flipped.phi.col(3) = -flipped.phi.col(3);
    flipped.phi.col(7) = -flipped.phi.col(7);

    auto spectrum = [](const sec::SpectralBasis& b) {
        sec::SecTensors t = sec::assemble_tensors(b);
        FrameIndex idx{b.M, FrameKind::antisymmetric, FrameScaling::unit};
        MatrixXd gflat = sec::frame_matrix(t.Ghat, idx, t.lambdas);
        MatrixXd eflat = sec::frame_matrix(t.Ehat, idx, t.lambdas);
        MatrixXd g1flat = sec::frame_matrix(t.G1hat, idx, t.lambdas);
        sec::GalerkinBasis gal = sec::sobolev_basis(g1flat, 1e-3, idx.kind);
        return sec::solve_intro(eflat, gflat, gal).nus;
    };
    VectorXd a = spectrum(basis), b = spectrum(flipped);
    REQUIRE(a.size() == b.size());
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("refining M does not hurt the leading circle eigenvalues") {
    CircleSolve coarse = solve_circle(101, 100, 10);
    CircleSolve fine = solve_circle(101, 100, 20);
    const double expected[] = {1, 1, 4, 4};
    double err_coarse = 0.0, err_fine = 0.0;
    for (int k = 0; k < 4; ++k) {
        err_coarse = std::max(err_coarse, std::abs(coarse.forms.nus(k + 1) - expected[k]) / expected[k]);
        err_fine = std::max(err_fine, std::abs(fine.forms.nus(k + 1) - expected[k]) / expected[k]);
    }
    CHECK(err_fine <= err_coarse + 1e-9);
}
