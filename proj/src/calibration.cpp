#include "handpose/calibration.hpp"

#include <string>

#include <Eigen/Dense>

#include "handpose/errors.hpp"
#include "handpose/linalg.hpp"

namespace handpose {

Eigen::MatrixXd estimate_measurement_matrix(const CalibrationSet& cal) {
  const Eigen::MatrixXd& X = cal.reference_poses;
  const Eigen::MatrixXd& Y = cal.glove_readings;
  if (X.cols() != Y.cols()) {
    fail(ErrorCode::DimensionMismatch,
         "reference poses and readings disagree on sample count (" + std::to_string(X.cols()) +
             " vs " + std::to_string(Y.cols()) + ")");
  }
  if (!X.allFinite() || !Y.allFinite()) {
    fail(ErrorCode::NonFiniteInput, "calibration data contains non-finite entries");
  }
  if (X.cols() < X.rows() || linalg::numeric_rank(X) < X.rows()) {
    fail(ErrorCode::RankDeficientPoses,
         "calibration poses do not span the state space; collect at least n = " +
             std::to_string(X.rows()) + " independent poses");
  }
  return Y * linalg::pseudo_inverse(X);
}

Eigen::MatrixXd estimate_noise_covariance(const std::vector<Eigen::MatrixXd>& raw_windows) {
  if (raw_windows.empty()) {
    fail(ErrorCode::InsufficientWindowSamples, "no raw windows provided");
  }
  const Eigen::Index channels = raw_windows.front().rows();
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(channels, channels);
  Eigen::Index dof = 0;
  for (const Eigen::MatrixXd& window : raw_windows) {
    if (window.rows() != channels) {
      fail(ErrorCode::DimensionMismatch, "raw windows disagree on channel count");
    }
    if (window.cols() < 2) {
      fail(ErrorCode::InsufficientWindowSamples,
           "each window needs at least 2 samples, got " + std::to_string(window.cols()));
    }
    if (!window.allFinite()) {
      fail(ErrorCode::NonFiniteInput, "raw window contains non-finite entries");
    }
    const Eigen::VectorXd mean = window.rowwise().mean();
    const Eigen::MatrixXd centered = window.colwise() - mean;
    scatter += centered * centered.transpose();
    dof += window.cols() - 1;
  }
  return linalg::symmetrized(scatter / static_cast<double>(dof));
}

}  // namespace handpose
