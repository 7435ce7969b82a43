#include "handpose/prior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>

#include "handpose/errors.hpp"
#include "handpose/linalg.hpp"

namespace handpose {

PoseSet make_pose_set(HandModel model, Eigen::MatrixXd poses, std::string source) {
  if (poses.rows() < 1 || poses.cols() != model.size()) {
    fail(ErrorCode::DimensionMismatch,
         "pose matrix is " + std::to_string(poses.rows()) + "x" + std::to_string(poses.cols()) +
             ", expected N x " + std::to_string(model.size()) + " with N >= 1");
  }
  if (!poses.allFinite()) {
    fail(ErrorCode::NonFiniteInput, "pose matrix contains non-finite entries");
  }
  return PoseSet{std::move(model), std::move(poses), std::move(source)};
}

PriorModel build_prior(const PoseSet& poses, double ridge) {
  const Eigen::Index n_samples = poses.poses.rows();
  if (n_samples < 2) {
    fail(ErrorCode::InsufficientSamples,
         "need at least 2 poses for a covariance, got " + std::to_string(n_samples));
  }
  if (!poses.poses.allFinite()) {
    fail(ErrorCode::NonFiniteInput, "pose matrix contains non-finite entries");
  }
  if (ridge < 0.0) {
    fail(ErrorCode::InvalidConfig, "ridge must be nonnegative");
  }

  const Eigen::VectorXd mu = poses.poses.colwise().mean();
  const Eigen::MatrixXd centered = poses.poses.rowwise() - mu.transpose();
  Eigen::MatrixXd cov =
      centered.transpose() * centered / static_cast<double>(n_samples - 1);
  cov = linalg::symmetrized(cov);
  cov.diagonal().array() += ridge;

  return PriorModel{poses.model, mu, cov, static_cast<int>(n_samples), ridge};
}

namespace {

Eigen::LDLT<Eigen::MatrixXd> checked_covariance_factor(const Eigen::MatrixXd& cov) {
  if (!linalg::is_positive_definite(cov)) {
    fail(ErrorCode::SingularCovariance, "prior covariance is not positive definite");
  }
  return cov.ldlt();
}

}  // namespace

double squared_mahalanobis(const PriorModel& prior, const Eigen::VectorXd& x) {
  if (x.size() != prior.mu.size()) {
    fail(ErrorCode::DimensionMismatch, "pose vector size does not match the prior");
  }
  const auto ldlt = checked_covariance_factor(prior.cov);
  const Eigen::VectorXd d = x - prior.mu;
  return d.dot(ldlt.solve(d));
}

SynergyDecomposition synergies(const PriorModel& prior) {
  if (!linalg::is_symmetric(prior.cov, 1e-10)) {
    fail(ErrorCode::SingularCovariance, "prior covariance is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(linalg::symmetrized(prior.cov));

  // Eigen returns ascending order; flip to strongest-first.
  const Eigen::Index n = prior.cov.rows();
  SynergyDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double ev = es.eigenvalues()(n - 1 - i);
    if (ev < 0.0) {
      ev = 0.0;
      ++out.clamped_count;
    }
    out.eigenvalues(i) = ev;
    out.eigenvectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  const double total = out.eigenvalues.sum();
  out.explained_variance_ratio =
      total > 0.0 ? Eigen::VectorXd(out.eigenvalues / total) : Eigen::VectorXd::Zero(n);
  return out;
}

NormalityDiagnostic normality_diagnostic(const PoseSet& poses, const PriorModel& prior) {
  if (!(poses.model == prior.model)) {
    fail(ErrorCode::DimensionMismatch, "pose set and prior use different hand models");
  }
  const Eigen::Index n_samples = poses.poses.rows();
  const Eigen::Index n = poses.poses.cols();

  const auto ldlt = checked_covariance_factor(prior.cov);

  NormalityDiagnostic diag;
  diag.squared_mahalanobis.resize(n_samples);
  for (Eigen::Index i = 0; i < n_samples; ++i) {
    const Eigen::VectorXd d = poses.poses.row(i).transpose() - prior.mu;
    diag.squared_mahalanobis(i) = d.dot(ldlt.solve(d));
  }
  std::sort(diag.squared_mahalanobis.data(), diag.squared_mahalanobis.data() + n_samples);

  const boost::math::chi_squared chi2(static_cast<double>(n));
  diag.chi_square_quantiles.resize(n_samples);
  for (Eigen::Index i = 0; i < n_samples; ++i) {
    const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(n_samples);
    diag.chi_square_quantiles(i) = boost::math::quantile(chi2, p);
  }

  // Fit quality against the fixed line y = x. No parameters are estimated,
  // so the residual sum keeps all N degrees of freedom.
  const Eigen::VectorXd& y = diag.squared_mahalanobis;
  const Eigen::VectorXd& q = diag.chi_square_quantiles;
  const double y_mean = y.mean();
  const double ss_res = (y - q).squaredNorm();
  const double ss_tot = (y.array() - y_mean).matrix().squaredNorm();
  if (ss_tot <= 0.0) {
    diag.degenerate = true;
    diag.adjusted_r_squared = -std::numeric_limits<double>::infinity();
  } else {
    const double nn = static_cast<double>(n_samples);
    diag.adjusted_r_squared = 1.0 - (ss_res / nn) / (ss_tot / (nn - 1.0));
  }
  return diag;
}

}  // namespace handpose
