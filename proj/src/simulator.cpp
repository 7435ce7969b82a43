#include "handpose/simulator.hpp"

#include <string>
#include <utility>

#include <Eigen/Dense>

#include "handpose/errors.hpp"
#include "handpose/linalg.hpp"
#include "handpose/rng.hpp"

namespace handpose {

namespace {

// Substream tags keep measurement noise, population setup and pose sampling
// independent of each other for the same user seed.
constexpr std::uint64_t kNoiseTag = 0x6d656173ULL;
constexpr std::uint64_t kPopulationTag = 0x706f7075ULL;
constexpr std::uint64_t kPoseTag = 0x706f7365ULL;

std::vector<double> to_vector(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

SimulationConfig make_simulation_config(MeasurementModel measurement, std::uint64_t seed,
                                        int trials_per_pose) {
  if (trials_per_pose < 1) {
    fail(ErrorCode::InvalidConfig, "trials_per_pose must be >= 1");
  }
  SimulationConfig cfg;
  cfg.noise_covariance = measurement.R;
  cfg.measurement = std::move(measurement);
  cfg.seed = seed;
  cfg.trials_per_pose = trials_per_pose;
  return cfg;
}

std::vector<Eigen::MatrixXd> simulate_measurements(const PoseSet& poses,
                                                   const SimulationConfig& cfg) {
  const Eigen::Index n = cfg.measurement.H.cols();
  const Eigen::Index m = cfg.measurement.H.rows();
  if (poses.poses.cols() != n) {
    fail(ErrorCode::DimensionMismatch, "pose set dimension does not match the measurement matrix");
  }
  if (cfg.noise_covariance.rows() != m || cfg.noise_covariance.cols() != m) {
    fail(ErrorCode::DimensionMismatch, "noise covariance must be m x m");
  }
  if (cfg.trials_per_pose < 1) {
    fail(ErrorCode::InvalidConfig, "trials_per_pose must be >= 1");
  }

  const bool noiseless = cfg.noise_covariance.isZero(0.0);
  const Eigen::MatrixXd chol =
      noiseless ? Eigen::MatrixXd::Zero(m, m) : linalg::psd_sqrt_lower(cfg.noise_covariance);

  std::vector<Eigen::MatrixXd> out;
  out.reserve(static_cast<std::size_t>(poses.poses.rows()));
  for (Eigen::Index p = 0; p < poses.poses.rows(); ++p) {
    const Eigen::VectorXd clean = cfg.measurement.H * poses.poses.row(p).transpose();
    Eigen::MatrixXd block(cfg.trials_per_pose, m);
    for (int t = 0; t < cfg.trials_per_pose; ++t) {
      auto stream = rng::Stream::substream(rng::mix(cfg.seed, kNoiseTag),
                                           static_cast<std::uint64_t>(p),
                                           static_cast<std::uint64_t>(t));
      block.row(t) = (clean + chol * stream.normal_vector(m)).transpose();
    }
    out.push_back(std::move(block));
  }
  return out;
}

const char* to_string(Method method) {
  switch (method) {
    case Method::Pinv: return "pinv";
    case Method::Mve: return "mve";
    case Method::Conditional: return "conditional";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  if (name == "pinv") return Method::Pinv;
  if (name == "mve") return Method::Mve;
  if (name == "conditional") return Method::Conditional;
  fail(ErrorCode::InvalidConfig, "unknown method '" + name + "' (expected pinv, mve or conditional)");
}

EvaluationReport run_reconstruction_experiment(const PriorModel& prior, const PoseSet& test,
                                               const SimulationConfig& cfg,
                                               const std::vector<Method>& methods) {
  if (!(prior.model == test.model)) {
    fail(ErrorCode::DimensionMismatch, "prior and test set use different hand models");
  }
  if (methods.empty()) {
    fail(ErrorCode::IncompleteReport, "no reconstruction methods requested");
  }

  const std::vector<Eigen::MatrixXd> measurements = simulate_measurements(test, cfg);

  const Eigen::Index n = test.poses.cols();
  const Eigen::Index pose_count = test.poses.rows();
  const int trials = cfg.trials_per_pose;
  const Eigen::Index total = pose_count * trials;

  Eigen::MatrixXd reference(total, n);
  for (Eigen::Index p = 0; p < pose_count; ++p) {
    for (int t = 0; t < trials; ++t) {
      reference.row(p * trials + t) = test.poses.row(p);
    }
  }

  EvaluationReport report;
  report.dof_names = test.model.names();

  for (Method method : methods) {
    Eigen::MatrixXd estimates(total, n);
    for (Eigen::Index p = 0; p < pose_count; ++p) {
      for (int t = 0; t < trials; ++t) {
        const Eigen::VectorXd y = measurements[static_cast<std::size_t>(p)].row(t).transpose();
        Eigen::VectorXd x_hat;
        switch (method) {
          case Method::Pinv:
            x_hat = estimate_pinv(cfg.measurement.H, y).x_hat;
            break;
          case Method::Mve:
            x_hat = estimate_mve(prior, cfg.measurement, y).x_hat;
            break;
          case Method::Conditional:
            x_hat = estimate_conditional_gaussian(prior, cfg.measurement, y).x_hat;
            break;
        }
        estimates.row(p * trials + t) = x_hat.transpose();
      }
    }
    report.summaries.push_back(MethodSummary{to_string(method), stats::pose_errors(estimates, reference)});
  }

  if (total >= 4) {
    for (std::size_t i = 0; i < report.summaries.size(); ++i) {
      for (std::size_t j = i + 1; j < report.summaries.size(); ++j) {
        const auto& a = report.summaries[i];
        const auto& b = report.summaries[j];
        MethodComparison cmp;
        cmp.method_a = a.method;
        cmp.method_b = b.method;
        cmp.pose_level.scope = "pose";
        cmp.pose_level.test = stats::select_and_compare(to_vector(a.errors.per_pose_errors),
                                                        to_vector(b.errors.per_pose_errors));
        for (Eigen::Index d = 0; d < n; ++d) {
          ComparisonRow row;
          row.scope = report.dof_names[static_cast<std::size_t>(d)];
          row.test = stats::select_and_compare(to_vector(a.errors.per_dof_errors.row(d)),
                                               to_vector(b.errors.per_dof_errors.row(d)));
          cmp.per_dof.push_back(std::move(row));
        }
        report.comparisons.push_back(std::move(cmp));
      }
    }
  }

  nlohmann::json config;
  config["rng"] = std::string(rng::kAlgorithm);
  config["seed"] = cfg.seed;
  config["trials_per_pose"] = cfg.trials_per_pose;
  config["ridge"] = prior.ridge;
  config["measurement"] =
      cfg.measurement_spec.empty() ? std::to_string(cfg.measurement.H.rows()) + "-channel matrix"
                                   : cfg.measurement_spec;
  config["noise"] = cfg.noise_spec.empty()
                        ? (cfg.noise_covariance.isZero(0.0) ? std::string("none")
                                                            : std::string("covariance matrix"))
                        : cfg.noise_spec;
  config["prior"] = nlohmann::json{{"poses", prior.sample_count}};
  config["test"] = nlohmann::json{{"poses", test.poses.rows()},
                                  {"source", test.source.empty() ? "unnamed" : test.source}};
  report.config = std::move(config);
  return report;
}

EvaluationReport run_reconstruction_experiment(const PoseSet& train, const PoseSet& test,
                                               const SimulationConfig& cfg,
                                               const std::vector<Method>& methods, double ridge) {
  if (!(train.model == test.model)) {
    fail(ErrorCode::DimensionMismatch, "train and test sets use different hand models");
  }
  EvaluationReport report = run_reconstruction_experiment(build_prior(train, ridge), test, cfg, methods);
  report.config["prior"] =
      nlohmann::json{{"poses", train.poses.rows()},
                     {"source", train.source.empty() ? "unnamed" : train.source}};
  return report;
}

SyntheticPopulation make_synthetic_population(const HandModel& model,
                                              const SyntheticDesign& design, std::uint64_t seed) {
  if (design.leading_variance <= 0.0 || design.decay_ratio <= 0.0 || design.decay_ratio >= 1.0) {
    fail(ErrorCode::InvalidConfig, "synthetic design needs leading_variance > 0 and 0 < decay_ratio < 1");
  }
  const Eigen::Index n = model.size();
  auto stream = rng::Stream::substream(seed, kPopulationTag);

  // Haar-like orthonormal basis from the QR of a Gaussian matrix.
  Eigen::MatrixXd gauss(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) gauss(r, c) = stream.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gauss);
  Eigen::MatrixXd basis = qr.householderQ();

  Eigen::VectorXd variances(n);
  double v = design.leading_variance;
  for (Eigen::Index i = 0; i < n; ++i) {
    variances(i) = v;
    v *= design.decay_ratio;
  }

  SyntheticPopulation pop;
  pop.cov = linalg::symmetrized(basis * variances.asDiagonal() * basis.transpose());
  pop.mu.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    pop.mu(i) = design.mean_low_deg + (design.mean_high_deg - design.mean_low_deg) * stream.uniform01();
  }
  return pop;
}

PoseSet sample_poses(const HandModel& model, const SyntheticPopulation& population, int count,
                     std::uint64_t seed, std::string label) {
  if (count < 1) fail(ErrorCode::InvalidConfig, "pose count must be >= 1");
  const Eigen::Index n = model.size();
  if (population.mu.size() != n || population.cov.rows() != n || population.cov.cols() != n) {
    fail(ErrorCode::DimensionMismatch, "population dimensions do not match the hand model");
  }
  const Eigen::MatrixXd chol = linalg::psd_sqrt_lower(population.cov);
  auto stream = rng::Stream::substream(seed, kPoseTag);
  Eigen::MatrixXd poses(count, n);
  for (int i = 0; i < count; ++i) {
    poses.row(i) = (population.mu + chol * stream.normal_vector(n)).transpose();
  }
  return make_pose_set(model, std::move(poses), std::move(label));
}

}  // namespace handpose
