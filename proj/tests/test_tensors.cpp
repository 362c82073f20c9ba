#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "analytic_circle.hpp"
#include "sec/tensors.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using sec_test::make_analytic_circle;

namespace {

// M = 10 over a 512-point quadrature grid; the frequency content of all
// products stays below the Ms = 41 band, so discrete sums are exact.
struct Fixture {
    sec_test::AnalyticCircle circle = make_analytic_circle(41, 512);
    sec::SpectralBasis basis = sec_test::as_basis(circle, 10);
    sec::SecTensors t = sec::assemble_tensors(basis);
};

const Fixture& fixture() {
    static Fixture f;
    return f;
}

}  // namespace

TEST_CASE("triple product against the quadrature oracle and trig identities") {
    const auto& f = fixture();
    const auto& c = f.t.c;
    // c_{0jk} = delta_jk
    for (int j = 0; j < 10; ++j)
        for (int k = 0; k < 10; ++k)
            CHECK(std::abs(c(0, j, k) - (j == k ? 1.0 : 0.0)) < 1e-12);
    // 2 cos^2 = 1 + cos 2t gives c_113 = 1/sqrt(2)
    CHECK(c(1, 1, 3) == Catch::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    // exact pairwise commutativity and full symmetry over the common range
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j)
            for (int k = 0; k < 10; ++k) {
                CHECK(c(i, j, k) == c(j, i, k));
                CHECK(std::abs(c(i, j, k) - c(i, k, j)) < 1e-10);
                CHECK(std::abs(c(i, j, k) - c(k, j, i)) < 1e-10);
                CHECK(std::abs(c(i, j, k) - sec_test::oracle_c(f.circle, i, j, k)) < 1e-12);
            }
}

TEST_CASE("metric coefficients reproduce gradient inner products") {
    const auto& f = fixture();
    const auto& g = f.t.g;
    const auto& lam = f.basis.lambdas;
    auto at = [&](int k, int i, int j) { return g(k, f.t.c.pair(i, j)); };
    // grad phi_0 = 0
    for (int k = 0; k < 10; ++k)
        for (int j = 0; j < 10; ++j) CHECK(std::abs(at(k, 0, j)) < 1e-12);
    // Dirichlet identity <|grad phi_j|^2, 1> = lambda_j
    for (int j = 0; j < 10; ++j) CHECK(at(0, j, j) == Catch::Approx(lam(j)).margin(1e-10));
    // 2 sin^2 = 1 - cos 2t gives g_311 = -1/sqrt(2)
    CHECK(at(3, 1, 1) == Catch::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-12));
    // against the derivative quadrature oracle
    for (int k = 0; k < 10; ++k)
        for (int i = 0; i < 10; ++i)
            for (int j = 0; j < 10; ++j)
                CHECK(std::abs(at(k, i, j) - sec_test::oracle_g(f.circle, k, i, j)) < 1e-10);
}

TEST_CASE("product-energy tensors and their symmetries") {
    const auto& f = fixture();
    const auto& lam = f.basis.lambdas;
    // collapse through c_{0js} = delta_js
    for (int j = 0; j < 10; ++j)
        for (int l = 0; l < 10; ++l) {
            CHECK(std::abs(f.t.c0(0, j, 0, l) - (j == l ? 1.0 : 0.0)) < 1e-10);
            CHECK(std::abs(f.t.c1(0, j, 0, l) - (j == l ? lam(j) : 0.0)) < 1e-10);
        }
    CHECK(f.t.c0(1, 1, 1, 1) == Catch::Approx(1.5).epsilon(1e-12));
    for (const sec::Tensor4* t : {&f.t.c0, &f.t.c1, &f.t.c2}) {
        for (int i = 0; i < 10; ++i)
            for (int j = 0; j < 10; ++j)
                for (int k = 0; k < 10; ++k)
                    for (int l = 0; l < 10; ++l) {
                        CHECK(std::abs((*t)(i, j, k, l) - (*t)(j, i, k, l)) < 1e-10);
                        CHECK(std::abs((*t)(i, j, k, l) - (*t)(i, j, l, k)) < 1e-10);
                        CHECK(std::abs((*t)(i, j, k, l) - (*t)(k, l, i, j)) < 1e-10);
                    }
    }
}

TEST_CASE("Hodge Grammian identities, symmetries, and positivity") {
    const auto& f = fixture();
    const auto& lam = f.basis.lambdas;
    for (int i = 0; i < 10; ++i)
        for (int k = 0; k < 10; ++k)
            for (int l = 0; l < 10; ++l) CHECK(std::abs(f.t.G(i, 0, k, l)) < 1e-10);
    for (int j = 0; j < 10; ++j) CHECK(f.t.G(0, j, 0, j) == Catch::Approx(lam(j)).margin(1e-10));
    CHECK(f.t.G(1, 1, 1, 1) == Catch::Approx(0.5).epsilon(1e-10));
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j)
            for (int k = 0; k < 10; ++k)
                for (int l = 0; l < 10; ++l) {
                    CHECK(std::abs(f.t.G(i, j, k, l) - f.t.G(k, j, i, l)) < 1e-10);
                    CHECK(std::abs(f.t.G(i, j, k, l) - f.t.G(i, l, k, j)) < 1e-10);
                }
    auto eig = sec::sym_eig(f.t.G.flat);
    CHECK(eig.values(0) > -1e-8 * eig.values(eig.values.size() - 1));
}

TEST_CASE("Dirichlet energy matches the codifferential quadrature oracle") {
    const auto& f = fixture();
    const auto& lam = f.basis.lambdas;
    for (int j = 0; j < 10; ++j)
        CHECK(f.t.E(0, j, 0, j) == Catch::Approx(lam(j) * lam(j)).margin(1e-9));
    for (int j = 0; j < 10; ++j)
        for (int l = 0; l < 10; ++l)
            if (lam(j) != lam(l)) CHECK(std::abs(f.t.E(0, j, 0, l)) < 1e-9);
    double max_dev = 0.0;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j)
            for (int k = 0; k < 10; ++k)
                for (int l = 0; l < 10; ++l)
                    max_dev = std::max(max_dev, std::abs(f.t.E(i, j, k, l) -
                                                         sec_test::oracle_E(f.circle, i, j, k, l)));
    CHECK(max_dev <= 0.05);
    // flattened symmetry
    CHECK((f.t.E.flat - f.t.E.flat.transpose()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("antisymmetric tensors") {
    const auto& f = fixture();
    for (int i = 0; i < 10; ++i)
        for (int k = 0; k < 10; ++k)
            for (int l = 0; l < 10; ++l) {
                CHECK(f.t.Ehat(i, i, k, l) == 0.0);
                CHECK(f.t.Ghat(i, i, k, l) == 0.0);
            }
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) {
            CHECK(f.t.Ghat(i, j, i, j) >= -1e-8);
            for (int k = 0; k < 10; ++k)
                for (int l = 0; l < 10; ++l) {
                    CHECK(f.t.Ghat(i, j, k, l) == -f.t.Ghat(j, i, k, l));
                    CHECK(f.t.Ghat(i, j, k, l) == -f.t.Ghat(i, j, l, k));
                    CHECK(f.t.Ehat(i, j, k, l) == -f.t.Ehat(j, i, k, l));
                    CHECK(f.t.H(i, j, k, l) == -f.t.H(j, i, k, l));
                }
        }
    double max_dev = 0.0;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j)
            for (int k = 0; k < 10; ++k)
                for (int l = 0; l < 10; ++l)
                    max_dev = std::max(max_dev, std::abs(f.t.Ehat(i, j, k, l) -
                                                         sec_test::oracle_Ehat(f.circle, i, j, k, l)));
    CHECK(max_dev <= 0.05);
}

TEST_CASE("Sobolev Grammians") {
    const auto& f = fixture();
    const auto& lam = f.basis.lambdas;
    for (int j = 0; j < 10; ++j)
        CHECK(f.t.G1(0, j, 0, j) == Catch::Approx(lam(j) + lam(j) * lam(j)).margin(1e-9));
    sec::Tensor4 zero_e(10);
    sec::Tensor4 g1_with_zero = sec::sobolev_grammian(f.t.G, zero_e);
    CHECK((g1_with_zero.flat - f.t.G.flat).cwiseAbs().maxCoeff() == 0.0);
    auto eig = sec::sym_eig(f.t.G1hat.flat);
    CHECK(eig.values(0) >= -1e-8 * eig.values(eig.values.size() - 1));
    auto eig1 = sec::sym_eig(f.t.G1.flat);
    CHECK(eig1.values(0) >= -1e-8 * eig1.values(eig1.values.size() - 1));
}

TEST_CASE("Hodge Grammian against the quadrature oracle") {
    const auto& f = fixture();
    double max_dev_g = 0.0, max_dev_ghat = 0.0;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j)
            for (int k = 0; k < 10; ++k)
                for (int l = 0; l < 10; ++l) {
                    max_dev_g = std::max(max_dev_g, std::abs(f.t.G(i, j, k, l) -
                                                             sec_test::oracle_G(f.circle, i, j, k, l)));
                    max_dev_ghat = std::max(max_dev_ghat, std::abs(f.t.Ghat(i, j, k, l) -
                                                                   sec_test::oracle_Ghat(f.circle, i, j, k, l)));
                }
    CHECK(max_dev_g <= 0.05);
    CHECK(max_dev_ghat <= 0.05);
}

TEST_CASE("grid data keeps c_{0jk} near the identity") {
    sec::PointCloud cloud = sec::circle_grid(101);
    sec::SpectralBasis basis = sec::build_basis(cloud, -1.0, 40, 12);
    sec::TripleProduct c = sec::triple_product(basis);
    for (int j = 0; j < 12; ++j)
        for (int k = 0; k < 12; ++k)
            CHECK(std::abs(c(0, j, k) - (j == k ? 1.0 : 0.0)) < 1e-6);
}
