#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "handpose/stats.hpp"

namespace handpose {

// One hypothesis-test row of a method comparison: a DoF name or "pose".
struct ComparisonRow {
  std::string scope;
  stats::TestResult test;
};

struct MethodComparison {
  std::string method_a;
  std::string method_b;
  ComparisonRow pose_level;
  std::vector<ComparisonRow> per_dof;  // model order
};

struct MethodSummary {
  std::string method;
  stats::ErrorSummary errors;
};

// Full evaluation of one experiment: per-method error summaries plus the
// pairwise statistical comparisons. `config` echoes the experiment inputs
// (seed, measurement spec, noise, generator name) verbatim.
struct EvaluationReport {
  nlohmann::json config = nlohmann::json::object();
  std::vector<std::string> dof_names;
  std::vector<MethodSummary> summaries;
  std::vector<MethodComparison> comparisons;
};

enum class ReportFormat { Json, Markdown };

// Lossless, schema-stable JSON ("handpose-report-v1").
nlohmann::json report_to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const nlohmann::json& j);

// Markdown mirrors the tabular presentation: one row per DoF plus a
// pose-level row per comparison. Test markers: (diamond) pooled t, (double
// dagger) Welch t, unmarked Mann-Whitney U; non-significant p values bold.
std::string render_report(const EvaluationReport& report, ReportFormat format);

}  // namespace handpose
