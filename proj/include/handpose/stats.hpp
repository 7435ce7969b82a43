#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "handpose/prior.hpp"

namespace handpose::stats {

inline constexpr double kSignificance = 0.05;

struct ScopeStats {
  double mean = 0.0;
  double stddev = 0.0;
  double max = 0.0;
};

// Absolute estimation errors in degrees. Pose error is the mean over DoFs of
// the absolute per-DoF errors of that pose.
struct ErrorSummary {
  Eigen::VectorXd per_pose_errors;  // one entry per reconstructed pose
  Eigen::MatrixXd per_dof_errors;   // n x poses
  ScopeStats pose;                  // over per_pose_errors
  std::vector<ScopeStats> per_dof;  // one per DoF, over poses
};

ErrorSummary pose_errors(const Eigen::MatrixXd& estimates, const Eigen::MatrixXd& reference);
ErrorSummary pose_errors(const PoseSet& estimates, const PoseSet& reference);

enum class TestKind { Teq, Tneq, U, Lilliefors, Levene };

const char* to_string(TestKind kind);
TestKind test_kind_from_string(const std::string& name);

// p-values below 1e-4 are reported as zero; otherwise rounded to 1e-4.
double report_p(double p);

struct TestResult {
  TestKind kind = TestKind::Teq;
  double statistic = 0.0;
  double p_value = 1.0;
  bool significant_at_5pct = false;
  double reported_p = 1.0;
};

// Monte Carlo null distribution of the normality statistic for a given
// sample size, generated once per size from a fixed internal seed and
// memoized for the lifetime of the process.
struct MonteCarloTable {
  int sample_size = 0;
  std::vector<double> sorted_statistics;  // ascending
};

inline constexpr int kLillieforsReplicates = 10000;

const MonteCarloTable& lilliefors_table(int sample_size);

// Composite normality test: Kolmogorov-Smirnov distance between the sample
// and a normal with estimated mean/variance, p-value from the Monte Carlo
// null table with linear interpolation.
TestResult lilliefors_normality(const std::vector<double>& sample);

enum class LeveneCenter { Mean, Median };

// Homogeneity of variances: one-way ANOVA on absolute deviations from the
// group centers. Mean centering is the classic variant; median centering is
// the Brown-Forsythe alternative.
TestResult levene_variance_test(const std::vector<double>& a, const std::vector<double>& b,
                                LeveneCenter center = LeveneCenter::Mean);

// Two-tailed two-sample t test, pooled variance, df = n1 + n2 - 2.
TestResult t_test_equal_var(const std::vector<double>& a, const std::vector<double>& b);

// Two-tailed Welch test with Satterthwaite effective degrees of freedom.
TestResult t_test_welch(const std::vector<double>& a, const std::vector<double>& b);

// Two-tailed Mann-Whitney U: exact enumeration over group assignments when
// n1 + n2 <= 20, otherwise normal approximation with tie and continuity
// corrections. The statistic is U of the first sample (pairs a > b, ties
// counting one half).
TestResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b);

inline constexpr int kMannWhitneyExactLimit = 20;

// Comparison cascade: normality of both samples first (a degenerate constant
// sample counts as a rejection); if either fails, Mann-Whitney U. Otherwise
// Levene decides between the pooled-variance t test and Welch.
TestResult select_and_compare(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace handpose::stats
