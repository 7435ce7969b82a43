#include "handpose/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "handpose/errors.hpp"
#include "handpose/rng.hpp"

namespace handpose::stats {

namespace {

constexpr std::uint64_t kTableSeed = 0x4c494c4c49454653ULL;  // table substream base

double sample_mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_var(const std::vector<double>& v, double mean) {
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(v.size() - 1);
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

void require_sizes(const std::vector<double>& a, const std::vector<double>& b, std::size_t min) {
  if (a.size() < min || b.size() < min) {
    fail(ErrorCode::TooFewSamples, "each sample needs at least " + std::to_string(min) +
                                       " values, got " + std::to_string(a.size()) + " and " +
                                       std::to_string(b.size()));
  }
}

TestResult finish(TestKind kind, double statistic, double p) {
  TestResult r;
  r.kind = kind;
  r.statistic = statistic;
  r.p_value = std::clamp(p, 0.0, 1.0);
  r.significant_at_5pct = r.p_value < kSignificance;
  r.reported_p = report_p(r.p_value);
  return r;
}

// KS distance of a standardized sample against the standard normal.
double lilliefors_statistic(std::vector<double> sample) {
  const std::size_t n = sample.size();
  const double mean = sample_mean(sample);
  const double var = sample_var(sample, mean);
  if (var <= 0.0) {
    fail(ErrorCode::TooFewDistinct, "sample has zero variance");
  }
  const double sd = std::sqrt(var);
  std::sort(sample.begin(), sample.end());
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = std_normal_cdf((sample[i] - mean) / sd);
    const double upper = static_cast<double>(i + 1) / static_cast<double>(n) - f;
    const double lower = f - static_cast<double>(i) / static_cast<double>(n);
    d = std::max(d, std::max(upper, lower));
  }
  return d;
}

// Survival probability of a statistic against an ascending Monte Carlo null
// sample, piecewise linear through the plotting positions (i+1)/(M+1).
double monte_carlo_p(double statistic, const std::vector<double>& sorted_null) {
  const std::size_t m = sorted_null.size();
  const double denom = static_cast<double>(m + 1);
  if (statistic <= sorted_null.front()) return 1.0 - 1.0 / denom;
  if (statistic >= sorted_null.back()) return 1.0 - static_cast<double>(m) / denom;
  const auto it = std::upper_bound(sorted_null.begin(), sorted_null.end(), statistic);
  const std::size_t hi = static_cast<std::size_t>(it - sorted_null.begin());  // first > statistic
  const std::size_t lo = hi - 1;
  const double flo = static_cast<double>(lo + 1) / denom;
  const double fhi = static_cast<double>(hi + 1) / denom;
  const double span = sorted_null[hi] - sorted_null[lo];
  const double t = span > 0.0 ? (statistic - sorted_null[lo]) / span : 1.0;
  return 1.0 - (flo + t * (fhi - flo));
}

// Midranks of the pooled sample; ties share the average rank.
std::vector<double> midranks(const std::vector<double>& pooled) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return pooled[i] < pooled[j]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

double u_from_ranks(const std::vector<double>& ranks, const std::vector<std::size_t>& members,
                    std::size_t n1) {
  double rank_sum = 0.0;
  for (std::size_t idx : members) rank_sum += ranks[idx];
  return rank_sum - 0.5 * static_cast<double>(n1 * (n1 + 1));
}

double mann_whitney_exact_p(const std::vector<double>& ranks, std::size_t n1, double u_observed,
                            double u_mean) {
  const std::size_t n = ranks.size();
  const double threshold = std::abs(u_observed - u_mean) - 1e-9;

  std::vector<std::size_t> pick(n1);
  std::iota(pick.begin(), pick.end(), std::size_t{0});
  std::uint64_t total = 0, extreme = 0;
  while (true) {
    const double u = u_from_ranks(ranks, pick, n1);
    ++total;
    if (std::abs(u - u_mean) >= threshold) ++extreme;
    // next combination in lexicographic order
    std::size_t i = n1;
    while (i > 0 && pick[i - 1] == n - n1 + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < n1; ++j) pick[j] = pick[j - 1] + 1;
  }
  return static_cast<double>(extreme) / static_cast<double>(total);
}

}  // namespace

ErrorSummary pose_errors(const Eigen::MatrixXd& estimates, const Eigen::MatrixXd& reference) {
  if (estimates.rows() != reference.rows() || estimates.cols() != reference.cols()) {
    fail(ErrorCode::DimensionMismatch, "estimate and reference matrices differ in shape");
  }
  if (estimates.rows() < 1) {
    fail(ErrorCode::DimensionMismatch, "need at least one pose");
  }
  const Eigen::Index n = estimates.cols();

  ErrorSummary s;
  s.per_dof_errors = (estimates - reference).cwiseAbs().transpose();  // n x poses
  s.per_pose_errors = s.per_dof_errors.colwise().mean();

  auto scope = [](const Eigen::VectorXd& v) {
    ScopeStats st;
    st.mean = v.mean();
    st.max = v.maxCoeff();
    if (v.size() > 1) {
      st.stddev = std::sqrt((v.array() - st.mean).square().sum() /
                            static_cast<double>(v.size() - 1));
    }
    return st;
  };

  s.pose = scope(s.per_pose_errors);
  s.per_dof.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index d = 0; d < n; ++d) {
    s.per_dof.push_back(scope(s.per_dof_errors.row(d).transpose()));
  }
  return s;
}

ErrorSummary pose_errors(const PoseSet& estimates, const PoseSet& reference) {
  if (!(estimates.model == reference.model)) {
    fail(ErrorCode::DimensionMismatch, "estimate and reference pose sets use different models");
  }
  return pose_errors(estimates.poses, reference.poses);
}

const char* to_string(TestKind kind) {
  switch (kind) {
    case TestKind::Teq: return "Teq";
    case TestKind::Tneq: return "Tneq";
    case TestKind::U: return "U";
    case TestKind::Lilliefors: return "Lilliefors";
    case TestKind::Levene: return "Levene";
  }
  return "Unknown";
}

TestKind test_kind_from_string(const std::string& name) {
  if (name == "Teq") return TestKind::Teq;
  if (name == "Tneq") return TestKind::Tneq;
  if (name == "U") return TestKind::U;
  if (name == "Lilliefors") return TestKind::Lilliefors;
  if (name == "Levene") return TestKind::Levene;
  fail(ErrorCode::ParseError, "unknown test kind '" + name + "'");
}

double report_p(double p) {
  if (p < 1e-4) return 0.0;
  return std::round(p * 1e4) / 1e4;
}

const MonteCarloTable& lilliefors_table(int sample_size) {
  static std::mutex mutex;
  static std::map<int, MonteCarloTable> tables;

  std::lock_guard<std::mutex> lock(mutex);
  auto it = tables.find(sample_size);
  if (it != tables.end()) return it->second;

  MonteCarloTable table;
  table.sample_size = sample_size;
  table.sorted_statistics.reserve(kLillieforsReplicates);
  std::vector<double> draw(static_cast<std::size_t>(sample_size));
  for (int rep = 0; rep < kLillieforsReplicates; ++rep) {
    auto stream = rng::Stream::substream(kTableSeed, static_cast<std::uint64_t>(sample_size),
                                         static_cast<std::uint64_t>(rep));
    for (double& x : draw) x = stream.normal();
    table.sorted_statistics.push_back(lilliefors_statistic(draw));
  }
  std::sort(table.sorted_statistics.begin(), table.sorted_statistics.end());
  return tables.emplace(sample_size, std::move(table)).first->second;
}

TestResult lilliefors_normality(const std::vector<double>& sample) {
  if (sample.size() < 4) {
    fail(ErrorCode::TooFewSamples, "normality test needs at least 4 values");
  }
  const double d = lilliefors_statistic(sample);
  const MonteCarloTable& table = lilliefors_table(static_cast<int>(sample.size()));
  return finish(TestKind::Lilliefors, d, monte_carlo_p(d, table.sorted_statistics));
}

TestResult levene_variance_test(const std::vector<double>& a, const std::vector<double>& b,
                                LeveneCenter center) {
  require_sizes(a, b, 2);
  auto center_of = [center](std::vector<double> v) {
    if (center == LeveneCenter::Mean) return sample_mean(v);
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };

  const double ca = center_of(a);
  const double cb = center_of(b);
  std::vector<double> za(a.size()), zb(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) za[i] = std::abs(a[i] - ca);
  for (std::size_t i = 0; i < b.size(); ++i) zb[i] = std::abs(b[i] - cb);

  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = sample_mean(za);
  const double mb = sample_mean(zb);
  const double grand = (na * ma + nb * mb) / (na + nb);

  double between = na * (ma - grand) * (ma - grand) + nb * (mb - grand) * (mb - grand);
  double within = 0.0;
  for (double z : za) within += (z - ma) * (z - ma);
  for (double z : zb) within += (z - mb) * (z - mb);

  const double df2 = na + nb - 2.0;
  if (within <= 0.0) {
    // No spread in the deviations: either identical dispersion (p = 1) or a
    // perfectly separated one, which cannot happen with between == 0.
    return finish(TestKind::Levene, 0.0, between <= 0.0 ? 1.0 : 0.0);
  }
  const double f_stat = (df2 / 1.0) * between / within;
  const boost::math::fisher_f dist(1.0, df2);
  return finish(TestKind::Levene, f_stat, boost::math::cdf(boost::math::complement(dist, f_stat)));
}

namespace {

TestResult t_test_impl(const std::vector<double>& a, const std::vector<double>& b,
                       bool equal_variance) {
  require_sizes(a, b, 2);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = sample_mean(a);
  const double mb = sample_mean(b);
  const double va = sample_var(a, ma);
  const double vb = sample_var(b, mb);

  double se2 = 0.0, df = 0.0;
  if (equal_variance) {
    const double pooled = ((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0);
    se2 = pooled * (1.0 / na + 1.0 / nb);
    df = na + nb - 2.0;
  } else {
    const double ta = va / na;
    const double tb = vb / nb;
    se2 = ta + tb;
    const double denom = ta * ta / (na - 1.0) + tb * tb / (nb - 1.0);
    df = denom > 0.0 ? se2 * se2 / denom : na + nb - 2.0;
  }

  const TestKind kind = equal_variance ? TestKind::Teq : TestKind::Tneq;
  if (se2 <= 0.0) {
    // Zero variance in both samples: equal means are indistinguishable,
    // different means are trivially separated.
    return finish(kind, 0.0, ma == mb ? 1.0 : 0.0);
  }
  const double t = (ma - mb) / std::sqrt(se2);
  const boost::math::students_t dist(df);
  return finish(kind, t, 2.0 * boost::math::cdf(dist, -std::abs(t)));
}

}  // namespace

TestResult t_test_equal_var(const std::vector<double>& a, const std::vector<double>& b) {
  return t_test_impl(a, b, true);
}

TestResult t_test_welch(const std::vector<double>& a, const std::vector<double>& b) {
  return t_test_impl(a, b, false);
}

TestResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b) {
  require_sizes(a, b, 2);
  const std::size_t n1 = a.size();
  const std::size_t n2 = b.size();
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::vector<double> ranks = midranks(pooled);

  std::vector<std::size_t> first(n1);
  std::iota(first.begin(), first.end(), std::size_t{0});
  const double u = u_from_ranks(ranks, first, n1);
  const double u_mean = 0.5 * static_cast<double>(n1) * static_cast<double>(n2);

  if (n1 + n2 <= kMannWhitneyExactLimit) {
    return finish(TestKind::U, u, mann_whitney_exact_p(ranks, n1, u, u_mean));
  }

  // Normal approximation with tie correction.
  const double n = static_cast<double>(n1 + n2);
  double tie_term = 0.0;
  std::vector<double> sorted(pooled);
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  const double var = (static_cast<double>(n1) * static_cast<double>(n2) / 12.0) *
                     ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (var <= 0.0) return finish(TestKind::U, u, 1.0);

  const double shift = std::abs(u - u_mean);
  const double z = shift > 0.5 ? (shift - 0.5) / std::sqrt(var) : 0.0;  // continuity correction
  return finish(TestKind::U, u, 2.0 * std_normal_cdf(-z));
}

TestResult select_and_compare(const std::vector<double>& a, const std::vector<double>& b) {
  require_sizes(a, b, 4);

  auto looks_normal = [](const std::vector<double>& v) {
    try {
      return !lilliefors_normality(v).significant_at_5pct;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::TooFewDistinct) return false;  // constant sample
      throw;
    }
  };

  if (!looks_normal(a) || !looks_normal(b)) {
    return mann_whitney_u(a, b);
  }
  if (levene_variance_test(a, b).significant_at_5pct) {
    return t_test_welch(a, b);
  }
  return t_test_equal_var(a, b);
}

}  // namespace handpose::stats
