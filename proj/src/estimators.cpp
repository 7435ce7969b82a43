#include "handpose/estimators.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "handpose/errors.hpp"
#include "handpose/linalg.hpp"

namespace handpose {

namespace {

void check_measurement_dims(const Eigen::MatrixXd& H, const Eigen::VectorXd& y) {
  if (y.size() != H.rows()) {
    fail(ErrorCode::DimensionMismatch,
         "measurement vector has " + std::to_string(y.size()) + " entries, H has " +
             std::to_string(H.rows()) + " rows");
  }
}

void check_prior_dims(const PriorModel& prior, const Eigen::MatrixXd& H) {
  if (H.cols() != prior.mu.size()) {
    fail(ErrorCode::DimensionMismatch,
         "H has " + std::to_string(H.cols()) + " columns, prior dimension is " +
             std::to_string(prior.mu.size()));
  }
}

void check_full_row_rank(const Eigen::MatrixXd& H) {
  if (H.rows() == 0 || linalg::numeric_rank(H) < H.rows()) {
    fail(ErrorCode::RankDeficient, "H does not have full row rank");
  }
}

// LDLT of a symmetric matrix, refusing ill-conditioned or indefinite inputs.
Eigen::LDLT<Eigen::MatrixXd> checked_spd_factor(const Eigen::MatrixXd& m, ErrorCode code,
                                                const char* what) {
  const double cond = linalg::sym_condition_number(m);
  if (!(cond <= linalg::kConditionLimit)) {
    fail(code, std::string(what) + " condition number " + std::to_string(cond) +
                   " exceeds " + std::to_string(linalg::kConditionLimit));
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(linalg::symmetrized(m));
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    fail(code, std::string(what) + " is not positive definite");
  }
  return ldlt;
}

std::vector<Eigen::Index> selected_indices(const Eigen::MatrixXd& H) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(H.rows()));
  for (Eigen::Index r = 0; r < H.rows(); ++r) {
    for (Eigen::Index c = 0; c < H.cols(); ++c) {
      if (H(r, c) == 1.0) idx[static_cast<std::size_t>(r)] = c;
    }
  }
  return idx;
}

}  // namespace

bool is_selection_matrix(const Eigen::MatrixXd& H) {
  if (H.rows() == 0 || H.cols() == 0) return false;
  std::vector<bool> used(static_cast<std::size_t>(H.cols()), false);
  for (Eigen::Index r = 0; r < H.rows(); ++r) {
    int ones = 0;
    Eigen::Index col = -1;
    for (Eigen::Index c = 0; c < H.cols(); ++c) {
      const double v = H(r, c);
      if (v == 1.0) {
        ++ones;
        col = c;
      } else if (v != 0.0) {
        return false;
      }
    }
    if (ones != 1) return false;
    if (used[static_cast<std::size_t>(col)]) return false;
    used[static_cast<std::size_t>(col)] = true;
  }
  return true;
}

MeasurementModel make_measurement_model(Eigen::MatrixXd H, Eigen::MatrixXd R) {
  if (H.rows() == 0 || H.cols() == 0) {
    fail(ErrorCode::DimensionMismatch, "measurement matrix must be nonempty");
  }
  if (H.rows() > H.cols()) {
    fail(ErrorCode::DimensionMismatch, "measurement matrix must have m <= n");
  }
  if (!H.allFinite()) fail(ErrorCode::NonFiniteInput, "H contains non-finite entries");
  check_full_row_rank(H);
  if (R.rows() != H.rows() || R.cols() != H.rows()) {
    fail(ErrorCode::DimensionMismatch, "R must be m x m");
  }
  if (!R.allFinite()) fail(ErrorCode::NonFiniteInput, "R contains non-finite entries");
  if (!linalg::is_symmetric(R, 1e-10) || !linalg::is_positive_semidefinite(R)) {
    fail(ErrorCode::SingularNoise, "R must be symmetric positive semidefinite");
  }
  MeasurementModel model{std::move(H), std::move(R), false};
  model.is_selection = is_selection_matrix(model.H);
  return model;
}

MeasurementModel make_selection_model(const HandModel& model,
                                      const std::vector<std::string>& names, double sigma_deg) {
  Eigen::MatrixXd H = selection_matrix(model, names);
  const Eigen::Index m = H.rows();
  Eigen::MatrixXd R = Eigen::MatrixXd::Identity(m, m) * (sigma_deg * sigma_deg);
  return make_measurement_model(std::move(H), std::move(R));
}

const char* to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Pinv: return "Pinv";
    case EstimatorKind::MapNoiseless: return "MapNoiseless";
    case EstimatorKind::ConditionalGaussian: return "ConditionalGaussian";
    case EstimatorKind::MveInformation: return "MveInformation";
    case EstimatorKind::MveSmw: return "MveSmw";
  }
  return "Unknown";
}

Estimate estimate_pinv(const Eigen::MatrixXd& H, const Eigen::VectorXd& y) {
  check_measurement_dims(H, y);
  check_full_row_rank(H);
  Estimate est;
  est.method = EstimatorKind::Pinv;
  if (is_selection_matrix(H)) {
    est.x_hat = H.transpose() * y;
  } else {
    est.x_hat = linalg::pseudo_inverse(H) * y;
  }
  return est;
}

Eigen::VectorXd general_solution(const Eigen::MatrixXd& H, const Eigen::VectorXd& y,
                                 const Eigen::VectorXd& xi) {
  check_measurement_dims(H, y);
  check_full_row_rank(H);
  const Eigen::MatrixXd null_basis = linalg::null_space_basis(H);
  if (xi.size() != null_basis.cols()) {
    fail(ErrorCode::DimensionMismatch,
         "free vector has " + std::to_string(xi.size()) + " entries, null space has dimension " +
             std::to_string(null_basis.cols()));
  }
  return linalg::pseudo_inverse(H) * y + null_basis * xi;
}

Estimate estimate_map_noiseless(const PriorModel& prior, const Eigen::MatrixXd& H,
                                const Eigen::VectorXd& y) {
  check_prior_dims(prior, H);
  check_measurement_dims(H, y);

  const Eigen::MatrixXd cross = prior.cov * H.transpose();         // P H^T
  const Eigen::MatrixXd gram = linalg::symmetrized(H * cross);     // H P H^T
  const auto ldlt = checked_spd_factor(gram, ErrorCode::IllConditionedGram, "H*P*H^T");

  Estimate est;
  est.method = EstimatorKind::MapNoiseless;
  est.x_hat = prior.mu - cross * ldlt.solve(H * prior.mu - y);
  est.posterior_cov =
      linalg::symmetrized(prior.cov - cross * ldlt.solve(cross.transpose()));
  return est;
}

Estimate estimate_map_nullspace(const PriorModel& prior, const Eigen::MatrixXd& H,
                                const Eigen::VectorXd& y) {
  check_prior_dims(prior, H);
  check_measurement_dims(H, y);
  check_full_row_rank(H);

  const auto prior_ldlt = checked_spd_factor(prior.cov, ErrorCode::SingularPrior, "P_o");
  const Eigen::MatrixXd null_basis = linalg::null_space_basis(H);
  const Eigen::VectorXd particular = linalg::pseudo_inverse(H) * y;

  // xi = (N^T P^-1 N)^-1 N^T P^-1 (mu - particular)
  const Eigen::MatrixXd pinv_null = prior_ldlt.solve(null_basis);    // P^-1 N
  const Eigen::MatrixXd reduced = null_basis.transpose() * pinv_null;  // N^T P^-1 N
  const auto reduced_ldlt =
      checked_spd_factor(reduced, ErrorCode::SingularPrior, "N^T*P^-1*N");
  const Eigen::VectorXd xi =
      reduced_ldlt.solve(pinv_null.transpose() * (prior.mu - particular));

  Estimate est;
  est.method = EstimatorKind::MapNoiseless;
  est.x_hat = particular + null_basis * xi;
  // Same posterior as the innovation form, expressed on the null space.
  est.posterior_cov = linalg::symmetrized(
      null_basis * reduced_ldlt.solve(null_basis.transpose()));
  return est;
}

Estimate estimate_conditional_gaussian(const PriorModel& prior, const MeasurementModel& selection,
                                       const Eigen::VectorXd& y) {
  if (!selection.is_selection) {
    fail(ErrorCode::NotSelectionMatrix, "conditional estimate requires a selection matrix");
  }
  check_prior_dims(prior, selection.H);
  check_measurement_dims(selection.H, y);

  const Eigen::Index n = prior.mu.size();
  const Eigen::Index m = selection.H.rows();
  const std::vector<Eigen::Index> measured = selected_indices(selection.H);
  std::vector<bool> is_measured(static_cast<std::size_t>(n), false);
  for (Eigen::Index i : measured) is_measured[static_cast<std::size_t>(i)] = true;
  std::vector<Eigen::Index> unmeasured;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!is_measured[static_cast<std::size_t>(i)]) unmeasured.push_back(i);
  }
  const Eigen::Index u = static_cast<Eigen::Index>(unmeasured.size());

  Eigen::MatrixXd cov_mm(m, m), cov_um(u, m), cov_uu(u, u);
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index c = 0; c < m; ++c) cov_mm(r, c) = prior.cov(measured[r], measured[c]);
  for (Eigen::Index r = 0; r < u; ++r)
    for (Eigen::Index c = 0; c < m; ++c) cov_um(r, c) = prior.cov(unmeasured[r], measured[c]);
  for (Eigen::Index r = 0; r < u; ++r)
    for (Eigen::Index c = 0; c < u; ++c) cov_uu(r, c) = prior.cov(unmeasured[r], unmeasured[c]);

  const auto mm_ldlt =
      checked_spd_factor(cov_mm, ErrorCode::SingularMeasuredBlock, "measured covariance block");

  Eigen::VectorXd mu_m(m);
  for (Eigen::Index i = 0; i < m; ++i) mu_m(i) = prior.mu(measured[i]);

  const Eigen::VectorXd gain_rhs = mm_ldlt.solve(y - mu_m);  // P_mm^-1 (y - mu_m)

  Estimate est;
  est.method = EstimatorKind::ConditionalGaussian;
  est.x_hat.resize(n);
  for (Eigen::Index i = 0; i < m; ++i) est.x_hat(measured[i]) = y(i);
  const Eigen::VectorXd cond_mean_offset = cov_um * gain_rhs;
  for (Eigen::Index i = 0; i < u; ++i) {
    est.x_hat(unmeasured[i]) = prior.mu(unmeasured[i]) + cond_mean_offset(i);
  }

  // Posterior: zero on measured DoFs, Schur complement on the rest.
  const Eigen::MatrixXd cond_cov =
      linalg::symmetrized(cov_uu - cov_um * mm_ldlt.solve(cov_um.transpose()));
  Eigen::MatrixXd post = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index r = 0; r < u; ++r)
    for (Eigen::Index c = 0; c < u; ++c) post(unmeasured[r], unmeasured[c]) = cond_cov(r, c);
  est.posterior_cov = std::move(post);
  return est;
}

Estimate estimate_mve(const PriorModel& prior, const MeasurementModel& model,
                      const Eigen::VectorXd& y) {
  check_prior_dims(prior, model.H);
  check_measurement_dims(model.H, y);

  const Eigen::MatrixXd cross = prior.cov * model.H.transpose();
  const Eigen::MatrixXd innovation = linalg::symmetrized(model.H * cross + model.R);
  const auto ldlt =
      checked_spd_factor(innovation, ErrorCode::IllConditionedInnovation, "H*P*H^T + R");

  Estimate est;
  est.method = EstimatorKind::MveSmw;
  est.x_hat = prior.mu - cross * ldlt.solve(model.H * prior.mu - y);
  est.posterior_cov =
      linalg::symmetrized(prior.cov - cross * ldlt.solve(cross.transpose()));
  return est;
}

Estimate estimate_mve_information(const PriorModel& prior, const MeasurementModel& model,
                                  const Eigen::VectorXd& y) {
  check_prior_dims(prior, model.H);
  check_measurement_dims(model.H, y);

  const auto prior_ldlt = checked_spd_factor(prior.cov, ErrorCode::SingularPrior, "P_o");
  const auto noise_ldlt = checked_spd_factor(model.R, ErrorCode::SingularNoise, "R");

  const Eigen::Index n = prior.mu.size();
  const Eigen::MatrixXd info = linalg::symmetrized(
      prior_ldlt.solve(Eigen::MatrixXd::Identity(n, n)) +
      model.H.transpose() * noise_ldlt.solve(model.H));
  const auto info_ldlt =
      checked_spd_factor(info, ErrorCode::IllConditionedInnovation, "P_o^-1 + H^T*R^-1*H");

  Estimate est;
  est.method = EstimatorKind::MveInformation;
  est.x_hat = info_ldlt.solve(model.H.transpose() * noise_ldlt.solve(y) +
                              prior_ldlt.solve(prior.mu));
  est.posterior_cov =
      linalg::symmetrized(info_ldlt.solve(Eigen::MatrixXd::Identity(n, n)));
  return est;
}

Eigen::MatrixXd posterior_covariance(const PriorModel& prior, const Eigen::MatrixXd& H,
                                     const Eigen::MatrixXd& R) {
  if (H.rows() == 0) return prior.cov;  // no measurement, nothing gained
  check_prior_dims(prior, H);
  if (R.rows() != H.rows() || R.cols() != H.rows()) {
    fail(ErrorCode::DimensionMismatch, "R must be m x m");
  }
  const Eigen::MatrixXd cross = prior.cov * H.transpose();
  const Eigen::MatrixXd innovation = linalg::symmetrized(H * cross + R);
  const auto ldlt =
      checked_spd_factor(innovation, ErrorCode::IllConditionedInnovation, "H*P*H^T + R");
  return linalg::symmetrized(prior.cov - cross * ldlt.solve(cross.transpose()));
}

Eigen::MatrixXd posterior_covariance(const PriorModel& prior, const MeasurementModel& model) {
  return posterior_covariance(prior, model.H, model.R);
}

}  // namespace handpose
