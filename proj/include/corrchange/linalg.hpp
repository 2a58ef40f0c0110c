#pragma once

#include <Eigen/Dense>

namespace corrchange {

/// True iff the smallest eigenvalue exceeds tol * max(1, largest eigenvalue).
/// Throws InputError if m is not symmetric within tol.
bool is_positive_definite(const Eigen::MatrixXd& m, double tol = 1e-10);

/// Inverse square root of a symmetric positive definite matrix via
/// eigendecomposition. If the smallest eigenvalue is <= 0, adds
/// ridge * trace(m)/d to the diagonal once and retries; if that still
/// fails, throws NotPositiveDefiniteError carrying the offending
/// eigenvalue. Absent ridging the result R satisfies R*m*R ~ I to 1e-8.
Eigen::MatrixXd inv_sqrt(const Eigen::MatrixXd& m, double ridge = 1e-8);

}  // namespace corrchange
