#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "handpose/prior.hpp"

namespace handpose::csv {

// Locale-independent numeric parsing/formatting ('.' decimal separator,
// shortest round-trip representation on output).
double parse_double(const std::string& token, const std::string& where);
std::string format_double(double value);

// Pose CSV: a header row of DoF names (any permutation of the model's
// names), then one pose per row in degrees. Columns bind by header name and
// are returned in model order.
PoseSet load_pose_csv(const std::filesystem::path& path, const HandModel& model);
void write_pose_csv(const std::filesystem::path& path, const PoseSet& poses);

// Plain numeric CSV with no header, one matrix row per line.
Eigen::MatrixXd load_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& matrix);

// Readings CSV: one header row of channel labels, then numeric rows.
struct ReadingsTable {
  std::vector<std::string> channels;
  Eigen::MatrixXd rows;  // samples x channels
};

ReadingsTable load_readings_csv(const std::filesystem::path& path);
void write_readings_csv(const std::filesystem::path& path, const ReadingsTable& table);

// Raw acquisition windows in long format: header `window_id,channel,value`,
// channel given either as a 0-based index or as a label from `channels`.
// Returns one channels x W block per window, in order of first appearance.
std::vector<Eigen::MatrixXd> load_raw_windows_csv(const std::filesystem::path& path,
                                                  const std::vector<std::string>& channels);

}  // namespace handpose::csv
