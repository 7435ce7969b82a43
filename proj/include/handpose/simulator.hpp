#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "handpose/estimators.hpp"
#include "handpose/reporting.hpp"

namespace handpose {

// Metacarpal flexion joints of the five fingers: the classic low-cost glove
// measurement set.
inline const std::vector<std::string> kMetacarpalDofs = {"TM", "IM", "MM", "RM", "LM"};

inline constexpr double kDefaultNoiseSigmaDeg = 7.0;

// Synthetic glove experiment: measurement model used by the estimators plus
// the noise actually injected (equal by default). Fixed seed means
// bit-reproducible measurements.
struct SimulationConfig {
  MeasurementModel measurement;
  Eigen::MatrixXd noise_covariance;  // m x m; zero = noiseless
  std::uint64_t seed = 0;
  int trials_per_pose = 1;
  std::string measurement_spec;  // echo text for reports
  std::string noise_spec;        // echo text for reports
};

SimulationConfig make_simulation_config(MeasurementModel measurement, std::uint64_t seed,
                                        int trials_per_pose = 1);

// One trials x m block per pose: each row is H * pose + noise.
std::vector<Eigen::MatrixXd> simulate_measurements(const PoseSet& poses,
                                                   const SimulationConfig& cfg);

enum class Method { Pinv, Mve, Conditional };

const char* to_string(Method method);
Method method_from_string(const std::string& name);

// Full evaluation pipeline: simulated glove measurements of the test set,
// every requested estimator, error summaries and pairwise statistical
// comparisons. Comparisons are emitted when at least 4 reconstructed poses
// are available.
EvaluationReport run_reconstruction_experiment(const PriorModel& prior, const PoseSet& test,
                                               const SimulationConfig& cfg,
                                               const std::vector<Method>& methods);

// Same, with the prior built from a training pose set first.
EvaluationReport run_reconstruction_experiment(const PoseSet& train, const PoseSet& test,
                                               const SimulationConfig& cfg,
                                               const std::vector<Method>& methods,
                                               double ridge = kDefaultRidge);

// Synthetic population for end-to-end replication runs: a random orthonormal
// synergy basis with geometrically decaying variances and a seeded mean.
struct SyntheticDesign {
  int train_poses = 114;
  int test_poses = 54;
  double leading_variance = 400.0;  // deg^2 of the strongest synergy
  double decay_ratio = 0.6;         // geometric eigenvalue decay
  double mean_low_deg = 5.0;
  double mean_high_deg = 60.0;
};

struct SyntheticPopulation {
  Eigen::VectorXd mu;
  Eigen::MatrixXd cov;
};

SyntheticPopulation make_synthetic_population(const HandModel& model, const SyntheticDesign& design,
                                              std::uint64_t seed);

PoseSet sample_poses(const HandModel& model, const SyntheticPopulation& population, int count,
                     std::uint64_t seed, std::string label);

}  // namespace handpose
