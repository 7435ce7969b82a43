#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "handpose/simulator.hpp"

namespace handpose {

// Prior bundle: a JSON document ("handpose-prior-v1") holding the model
// names, mean, covariance, sample count and ridge, plus mu/cov side CSVs
// next to it for auditing. Only the JSON is read back.
void save_prior(const std::filesystem::path& json_path, const PriorModel& prior);
PriorModel load_prior(const std::filesystem::path& json_path);

// Simulation / measurement-model document:
//   {"measured_dofs": [names]} or {"H_csv": path},
//   {"sigma_deg": number}      or {"R_csv": path},
//   "seed": integer, "trials": integer.
// Noise defaults to zero when absent; relative paths resolve against
// `base_dir` (the document's directory in load_simulation_config).
SimulationConfig simulation_config_from_json(const nlohmann::json& doc, const HandModel& model,
                                             const std::filesystem::path& base_dir);
SimulationConfig load_simulation_config(const std::filesystem::path& path, const HandModel& model);

// Measurement-model manifest written by calibration: H (and R, when
// estimated) as side CSVs referenced from the same JSON schema.
void save_measurement_model(const std::filesystem::path& json_path, const Eigen::MatrixXd& H,
                            const Eigen::MatrixXd* R);

}  // namespace handpose
