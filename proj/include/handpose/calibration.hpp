#pragma once

#include <vector>

#include <Eigen/Core>

namespace handpose {

// Paired reference poses and glove readings recorded in parallel.
// Columns are samples: reference_poses is n x N, glove_readings is m x N.
struct CalibrationSet {
  Eigen::MatrixXd reference_poses;
  Eigen::MatrixXd glove_readings;
  std::vector<Eigen::MatrixXd> raw_windows;  // optional, one m x W block per sample
};

// Samples averaged per reading during acquisition.
inline constexpr int kDefaultWindowLength = 50;

// Least-squares fit of readings = H * poses, i.e. H = Y * pinv(X). Requires
// the reference poses to span the full state space (rank n, so N >= n).
Eigen::MatrixXd estimate_measurement_matrix(const CalibrationSet& cal);

// Pooled covariance of per-window fluctuations around each window mean;
// windows must hold at least 2 samples each.
Eigen::MatrixXd estimate_noise_covariance(const std::vector<Eigen::MatrixXd>& raw_windows);

}  // namespace handpose
