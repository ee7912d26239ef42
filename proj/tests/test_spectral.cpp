#include "esn/spectral.hpp"

#include "test_support.hpp"

#include <Eigen/Eigenvalues>
#include <doctest.h>

using namespace esn;

namespace {

// Dense QR eigensolver; test-only oracle.
double dense_radius(const Matrix& m)
{
    return Eigen::EigenSolver<Matrix>(m, false).eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("identity has radius one")
{
    CHECK(spectral_radius(Matrix::Identity(3, 3)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("nilpotent matrices report zero")
{
    Matrix m(2, 2);
    m << 0, 1, 0, 0;
    CHECK(spectral_radius(m) == 0.0);

    Matrix shift = Matrix::Zero(40, 40);
    for (int i = 0; i + 1 < 40; ++i) {
        shift(i, i + 1) = 0.7;
    }
    CHECK(spectral_radius(shift) == 0.0);
    CHECK(spectral_radius(Matrix::Zero(4, 4)) == 0.0);
}

TEST_CASE("random 5x5 matches the dense eigensolver")
{
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix m = test::random_matrix(rng, 5, 5);
        CHECK(std::abs(spectral_radius(m) - dense_radius(m)) <= 1e-8);
    }
}

TEST_CASE("complex dominant pair converges")
{
    // Rotation by 30 degrees scaled by 2 sits on top of a smaller block; a
    // bare Rayleigh quotient would oscillate forever here.
    Matrix m = Matrix::Zero(30, 30);
    m(0, 0) = 2 * std::cos(0.5236);
    m(0, 1) = -2 * std::sin(0.5236);
    m(1, 0) = 2 * std::sin(0.5236);
    m(1, 1) = 2 * std::cos(0.5236);
    Rng rng(12);
    m.bottomRightCorner(28, 28) = test::random_matrix(rng, 28, 28, 0.1);
    CHECK(spectral_radius(m) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("sparse reservoir-sized matrices agree with the oracle")
{
    Rng rng(13);
    for (int n : {50, 120, 300}) {
        Matrix m = test::random_matrix(rng, n, n, 0.1);
        for (Eigen::Index i = 0; i < m.size(); ++i) {
            if (rng.uniform01() > 0.3) {
                m.data()[i] = 0.0;
            }
        }
        const double want = dense_radius(m);
        CHECK(std::abs(spectral_radius(m) - want) <= 1e-8 * want);
    }
}

TEST_CASE("iteration budget exhaustion carries the last estimate")
{
    Rng rng(14);
    const Matrix m = test::random_matrix(rng, 200, 200);
    try {
        spectral_radius(m, 1e-10, 1);
        FAIL("expected SpectralNonConvergence");
    } catch (const SpectralNonConvergence& e) {
        CHECK(e.last_estimate() > 0.0);
        CHECK(std::string(e.what()).find("no convergence") != std::string::npos);
    }
}

TEST_CASE("bad input is rejected")
{
    CHECK_THROWS_AS(spectral_radius(Matrix::Zero(2, 3)), PreconditionError);
    Matrix m = Matrix::Identity(2, 2);
    m(0, 1) = std::nan("");
    CHECK_THROWS_AS(spectral_radius(m), PreconditionError);
}
