#include "corrchange/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "corrchange/errors.hpp"

namespace corrchange {

namespace {

void require_symmetric(const Eigen::MatrixXd& m, double tol, const char* who) {
    if (m.rows() != m.cols()) {
        throw InputError(std::string(who) + ": matrix is not square (" +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ")");
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > tol * scale) {
        throw InputError(std::string(who) + ": matrix is not symmetric (max asymmetry " +
                         std::to_string(asym) + ")");
    }
}

}  // namespace

bool is_positive_definite(const Eigen::MatrixXd& m, double tol) {
    require_symmetric(m, tol, "is_positive_definite");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    return lo > tol * std::max(1.0, hi);
}

Eigen::MatrixXd inv_sqrt(const Eigen::MatrixXd& m, double ridge) {
    require_symmetric(m, 1e-8, "inv_sqrt");
    const Eigen::Index n = m.rows();

    // Eigenvalues at roundoff scale count as non-positive: a bootstrap
    // covariance of perfectly dependent data lands at ~1e-30 instead of an
    // exact zero, and inverting that would manufacture a standardizer of
    // 1e+15. The absolute floor is far below any covariance of sqrt(T)-scaled
    // correlations from non-degenerate data.
    const auto pd_floor = [](double max_eigenvalue) {
        return 1e-20 + 1e-13 * std::max(max_eigenvalue, 0.0);
    };

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    if (eig.eigenvalues().minCoeff() <= pd_floor(eig.eigenvalues().maxCoeff())) {
        // one ridge pass scaled by the matrix magnitude, then give up
        const double shift = ridge * m.trace() / static_cast<double>(n);
        Eigen::MatrixXd ridged = m + shift * Eigen::MatrixXd::Identity(n, n);
        eig.compute(ridged);
        if (eig.eigenvalues().minCoeff() <= pd_floor(eig.eigenvalues().maxCoeff())) {
            throw NotPositiveDefiniteError(
                "matrix is not positive definite after ridging (min eigenvalue " +
                    std::to_string(eig.eigenvalues().minCoeff()) + ")",
                eig.eigenvalues().minCoeff());
        }
    }

    const Eigen::VectorXd inv_roots = eig.eigenvalues().array().rsqrt();
    Eigen::MatrixXd result =
        eig.eigenvectors() * inv_roots.asDiagonal() * eig.eigenvectors().transpose();
    // the eigenvector product is symmetric only up to roundoff
    result = 0.5 * (result + result.transpose()).eval();
    return result;
}

}  // namespace corrchange
