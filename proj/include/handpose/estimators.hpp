#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "handpose/prior.hpp"

namespace handpose {

// Linear measurement model y = H x + noise, noise ~ N(0, R).
struct MeasurementModel {
  Eigen::MatrixXd H;        // m x n, full row rank, m <= n
  Eigen::MatrixXd R;        // m x m, symmetric PSD, degrees^2
  bool is_selection = false;
};

// True when every row of H is a canonical basis vector (exact zeros/ones)
// and no column is selected twice.
bool is_selection_matrix(const Eigen::MatrixXd& H);

// Validates rank, symmetry and PSD-ness; detects selection structure.
MeasurementModel make_measurement_model(Eigen::MatrixXd H, Eigen::MatrixXd R);

// Convenience: selection rows over named DoFs with isotropic noise sigma_deg.
MeasurementModel make_selection_model(const HandModel& model,
                                      const std::vector<std::string>& names,
                                      double sigma_deg = 0.0);

enum class EstimatorKind { Pinv, MapNoiseless, ConditionalGaussian, MveInformation, MveSmw };

const char* to_string(EstimatorKind kind);

struct Estimate {
  Eigen::VectorXd x_hat;  // degrees
  std::optional<Eigen::MatrixXd> posterior_cov;
  EstimatorKind method = EstimatorKind::Pinv;
};

// Minimum-Euclidean-norm solution x = pinv(H) y. Selection matrices take the
// transpose fast path. No posterior covariance (no prior involved).
Estimate estimate_pinv(const Eigen::MatrixXd& H, const Eigen::VectorXd& y);

// Full solution family of H x = y: pinv(H) y + N_h xi, with N_h an
// orthonormal null-space basis. Every xi satisfies the measurements.
Eigen::VectorXd general_solution(const Eigen::MatrixXd& H, const Eigen::VectorXd& y,
                                 const Eigen::VectorXd& xi);

// Noiseless maximum-probability pose: minimizes the squared Mahalanobis
// distance to the prior mean subject to H x = y, solved in closed form as
//   x = mu - P H^T (H P H^T)^-1 (H mu - y).
// Posterior covariance is the Schur complement P - P H^T (H P H^T)^-1 H P.
Estimate estimate_map_noiseless(const PriorModel& prior, const Eigen::MatrixXd& H,
                                const Eigen::VectorXd& y);

// Same optimum computed through the null-space parameterization:
//   xi = (N^T P^-1 N)^-1 N^T P^-1 (mu - pinv(H) y),  x = pinv(H) y + N xi.
// Requires an invertible prior covariance.
Estimate estimate_map_nullspace(const PriorModel& prior, const Eigen::MatrixXd& H,
                                const Eigen::VectorXd& y);

// Selection-measurement shortcut via the conditional Gaussian: measured DoFs
// are pinned to y, the rest get the conditional mean
//   mu_u + P_um P_mm^-1 (y - mu_m).
Estimate estimate_conditional_gaussian(const PriorModel& prior, const MeasurementModel& selection,
                                       const Eigen::VectorXd& y);

// Minimum variance estimate (posterior mean), innovation form:
//   x = mu - P H^T (H P H^T + R)^-1 (H mu - y).
// Stable for any PSD R including R = 0, where it reduces to the noiseless
// maximum-probability estimate.
Estimate estimate_mve(const PriorModel& prior, const MeasurementModel& model,
                      const Eigen::VectorXd& y);

// Information form of the same posterior mean:
//   x = (P^-1 + H^T R^-1 H)^-1 (H^T R^-1 y + P^-1 mu).
// Requires invertible P and R; kept as an independent cross-check and for
// overdetermined problems.
Estimate estimate_mve_information(const PriorModel& prior, const MeasurementModel& model,
                                  const Eigen::VectorXd& y);

// A posteriori covariance P - P H^T (H P H^T + R)^-1 H P. An empty H
// (m = 0) is allowed here and returns the prior covariance unchanged.
Eigen::MatrixXd posterior_covariance(const PriorModel& prior, const Eigen::MatrixXd& H,
                                     const Eigen::MatrixXd& R);
Eigen::MatrixXd posterior_covariance(const PriorModel& prior, const MeasurementModel& model);

}  // namespace handpose
