#pragma once

#include <string>

#include <Eigen/Core>

#include "handpose/hand_model.hpp"

namespace handpose {

// A batch of recorded hand poses, one per row, angles in degrees.
struct PoseSet {
  HandModel model;
  Eigen::MatrixXd poses;  // N x n
  std::string source;
};

// Validates finiteness and dimensions.
PoseSet make_pose_set(HandModel model, Eigen::MatrixXd poses, std::string source = {});

// Gaussian summary of a grasp-pose corpus. `cov` already contains the
// diagonal ridge load recorded in `ridge`.
struct PriorModel {
  HandModel model;
  Eigen::VectorXd mu;    // n, degrees
  Eigen::MatrixXd cov;   // n x n, degrees^2
  int sample_count = 0;
  double ridge = 0.0;    // degrees^2, included in cov
};

inline constexpr double kDefaultRidge = 1e-9;  // degrees^2

// Sample mean and unbiased sample covariance (plus ridge * I). Symmetry is
// enforced by averaging with the transpose.
PriorModel build_prior(const PoseSet& poses, double ridge = kDefaultRidge);

// Squared Mahalanobis distance (x - mu)^T cov^-1 (x - mu).
double squared_mahalanobis(const PriorModel& prior, const Eigen::VectorXd& x);

// Eigendecomposition of the prior covariance: the principal coordination
// patterns of the pose corpus, strongest first.
struct SynergyDecomposition {
  Eigen::VectorXd eigenvalues;              // descending, nonnegative
  Eigen::MatrixXd eigenvectors;             // orthonormal columns, same order
  Eigen::VectorXd explained_variance_ratio;
  int clamped_count = 0;                    // negative eigenvalues clamped to zero
};

SynergyDecomposition synergies(const PriorModel& prior);

// Quantile-quantile diagnostic for the multivariate normality of a pose set
// under a prior: sorted squared Mahalanobis distances against chi-square(n)
// quantiles at plotting positions (i + 0.5) / N, scored by adjusted R^2
// against the fixed identity line (slope 1, intercept 0, zero fitted
// parameters: residual df = N, total df = N - 1).
struct NormalityDiagnostic {
  Eigen::VectorXd squared_mahalanobis;   // sorted ascending
  Eigen::VectorXd chi_square_quantiles;  // nondecreasing
  double adjusted_r_squared = 0.0;       // in (-inf, 1]
  bool degenerate = false;               // all distances zero
};

NormalityDiagnostic normality_diagnostic(const PoseSet& poses, const PriorModel& prior);

}  // namespace handpose
