#pragma once

#include <Eigen/Core>

namespace handpose::linalg {

// Condition number above which symmetric solves are refused.
inline constexpr double kConditionLimit = 1e12;

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m);

bool is_symmetric(const Eigen::MatrixXd& m, double rel_tol = 1e-10);

// |lambda|_max / |lambda|_min of a symmetric matrix; +inf when singular.
double sym_condition_number(const Eigen::MatrixXd& m);

bool is_positive_semidefinite(const Eigen::MatrixXd& m, double tol = 1e-8);

bool is_positive_definite(const Eigen::MatrixXd& m);

int numeric_rank(const Eigen::MatrixXd& m);

// Moore-Penrose pseudo-inverse via SVD with a relative rank cutoff.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m);

// Orthonormal basis of the right null space, n x (n - rank).
Eigen::MatrixXd null_space_basis(const Eigen::MatrixXd& m);

// Lower factor L with L * L^T = m for a symmetric PSD matrix. Falls back to
// an eigendecomposition square root when Cholesky fails, clamping small
// negative eigenvalues to zero.
Eigen::MatrixXd psd_sqrt_lower(const Eigen::MatrixXd& m);

}  // namespace handpose::linalg
