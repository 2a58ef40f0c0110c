#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "corrchange/errors.hpp"
#include "corrchange/linalg.hpp"

using namespace corrchange;

namespace {

Eigen::MatrixXd random_spd(int n, unsigned seed, double shift = 0.5) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> dist;
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = dist(rng);
    return a.transpose() * a + shift * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace

TEST_CASE("is_positive_definite basics") {
    REQUIRE(is_positive_definite(Eigen::MatrixXd::Identity(3, 3), 1e-6));
    REQUIRE_FALSE(is_positive_definite(Eigen::MatrixXd::Zero(3, 3), 1e-6));

    // eigenvalues 1.999 and 0.001
    Eigen::MatrixXd near(2, 2);
    near << 1.0, 0.999, 0.999, 1.0;
    REQUIRE(is_positive_definite(near, 1e-6));
    REQUIRE_FALSE(is_positive_definite(near, 1e-2));

    Eigen::MatrixXd asym(2, 2);
    asym << 1.0, 0.5, -0.5, 1.0;
    REQUIRE_THROWS_AS(is_positive_definite(asym, 1e-6), InputError);
}

TEST_CASE("inv_sqrt of diagonal matrices") {
    Eigen::MatrixXd r1 = inv_sqrt(Eigen::MatrixXd::Identity(3, 3));
    REQUIRE((r1 - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-14);

    Eigen::MatrixXd r4 = inv_sqrt(4.0 * Eigen::MatrixXd::Identity(2, 2));
    REQUIRE((r4 - 0.5 * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("inv_sqrt squares to the inverse") {
    // closed-form eigensystem: eigenvalues 3 and 1 on (1,1)/sqrt2, (1,-1)/sqrt2
    Eigen::MatrixXd m(2, 2);
    m << 2, 1, 1, 2;
    Eigen::MatrixXd r = inv_sqrt(m);
    REQUIRE((r - r.transpose()).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE((r * m * r - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE((r * r * m - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

    for (unsigned seed : {1u, 2u, 3u}) {
        Eigen::MatrixXd spd = random_spd(6, seed);
        Eigen::MatrixXd rs = inv_sqrt(spd);
        REQUIRE((rs * spd * rs - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("inv_sqrt scaling law") {
    Eigen::MatrixXd m = random_spd(4, 7);
    const double c = 2.5;
    Eigen::MatrixXd lhs = inv_sqrt(c * m);
    Eigen::MatrixXd rhs = inv_sqrt(m) / std::sqrt(c);
    REQUIRE((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("inv_sqrt ridge and failure paths") {
    // rank-1 PSD matrix: eigenvalues 2 and 0; one ridge pass rescues it
    Eigen::MatrixXd psd(2, 2);
    psd << 1, 1, 1, 1;
    Eigen::MatrixXd r = inv_sqrt(psd, 1e-8);
    REQUIRE(r.allFinite());

    try {
        inv_sqrt(Eigen::MatrixXd::Zero(3, 3));
        FAIL("expected NotPositiveDefiniteError");
    } catch (const NotPositiveDefiniteError& e) {
        REQUIRE(e.min_eigenvalue() <= 0.0);
    }

    // covariances at squared-roundoff scale are noise, not information
    REQUIRE_THROWS_AS(inv_sqrt(8e-31 * Eigen::MatrixXd::Identity(1, 1)),
                      NotPositiveDefiniteError);

    Eigen::MatrixXd asym(2, 2);
    asym << 1.0, 0.3, 0.0, 1.0;
    REQUIRE_THROWS_AS(inv_sqrt(asym), InputError);
}
