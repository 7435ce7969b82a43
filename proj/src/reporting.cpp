#include "handpose/reporting.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "handpose/errors.hpp"

namespace handpose {

namespace {

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

const char* marker(stats::TestKind kind) {
  switch (kind) {
    case stats::TestKind::Teq: return " ⋄";   // diamond
    case stats::TestKind::Tneq: return " ‡";  // double dagger
    default: return "";                            // U rows carry no marker
  }
}

std::string p_cell(const stats::TestResult& t) {
  std::string text = fixed4(t.reported_p) + marker(t.kind);
  if (!t.significant_at_5pct) return "**" + text + "**";
  return text;
}

nlohmann::json test_to_json(const stats::TestResult& t) {
  return nlohmann::json{{"kind", stats::to_string(t.kind)},
                        {"statistic", t.statistic},
                        {"p_value", t.p_value},
                        {"reported_p", t.reported_p},
                        {"significant_at_5pct", t.significant_at_5pct}};
}

stats::TestResult test_from_json(const nlohmann::json& j) {
  stats::TestResult t;
  t.kind = stats::test_kind_from_string(j.at("kind").get<std::string>());
  t.statistic = j.at("statistic").get<double>();
  t.p_value = j.at("p_value").get<double>();
  t.reported_p = j.at("reported_p").get<double>();
  t.significant_at_5pct = j.at("significant_at_5pct").get<bool>();
  return t;
}

nlohmann::json scope_to_json(const stats::ScopeStats& s) {
  return nlohmann::json{{"mean", s.mean}, {"std", s.stddev}, {"max", s.max}};
}

stats::ScopeStats scope_from_json(const nlohmann::json& j) {
  stats::ScopeStats s;
  s.mean = j.at("mean").get<double>();
  s.stddev = j.at("std").get<double>();
  s.max = j.at("max").get<double>();
  return s;
}

void validate(const EvaluationReport& report) {
  if (report.summaries.empty()) {
    fail(ErrorCode::IncompleteReport, "report has no method summaries");
  }
  if (report.dof_names.empty()) {
    fail(ErrorCode::IncompleteReport, "report has no DoF names");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(report.dof_names.size());
  for (const auto& s : report.summaries) {
    if (s.errors.per_dof_errors.rows() != n) {
      fail(ErrorCode::IncompleteReport,
           "summary for '" + s.method + "' does not cover every DoF");
    }
  }
  for (const auto& c : report.comparisons) {
    if (c.per_dof.size() != report.dof_names.size()) {
      fail(ErrorCode::IncompleteReport, "comparison '" + c.method_a + "' vs '" + c.method_b +
                                            "' does not cover every DoF");
    }
  }
}

}  // namespace

nlohmann::json report_to_json(const EvaluationReport& report) {
  validate(report);
  nlohmann::json j;
  j["schema"] = "handpose-report-v1";
  j["config"] = report.config;
  j["dofs"] = report.dof_names;

  nlohmann::json methods = nlohmann::json::array();
  for (const auto& s : report.summaries) {
    nlohmann::json per_dof = nlohmann::json::array();
    for (std::size_t d = 0; d < report.dof_names.size(); ++d) {
      nlohmann::json row = scope_to_json(s.errors.per_dof[d]);
      row["dof"] = report.dof_names[d];
      per_dof.push_back(std::move(row));
    }
    std::vector<double> pose_errors(
        s.errors.per_pose_errors.data(),
        s.errors.per_pose_errors.data() + s.errors.per_pose_errors.size());
    std::vector<std::vector<double>> dof_errors;
    for (Eigen::Index r = 0; r < s.errors.per_dof_errors.rows(); ++r) {
      dof_errors.emplace_back(s.errors.per_dof_errors.row(r).begin(),
                              s.errors.per_dof_errors.row(r).end());
    }
    methods.push_back(nlohmann::json{{"method", s.method},
                                     {"pose", scope_to_json(s.errors.pose)},
                                     {"per_dof", std::move(per_dof)},
                                     {"per_pose_errors", std::move(pose_errors)},
                                     {"per_dof_errors", std::move(dof_errors)}});
  }
  j["methods"] = std::move(methods);

  nlohmann::json comparisons = nlohmann::json::array();
  for (const auto& c : report.comparisons) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : c.per_dof) {
      nlohmann::json r = test_to_json(row.test);
      r["scope"] = row.scope;
      rows.push_back(std::move(r));
    }
    nlohmann::json pose = test_to_json(c.pose_level.test);
    pose["scope"] = c.pose_level.scope;
    comparisons.push_back(nlohmann::json{{"method_a", c.method_a},
                                         {"method_b", c.method_b},
                                         {"pose", std::move(pose)},
                                         {"per_dof", std::move(rows)}});
  }
  j["comparisons"] = std::move(comparisons);
  return j;
}

EvaluationReport report_from_json(const nlohmann::json& j) {
  if (!j.contains("schema") || j.at("schema") != "handpose-report-v1") {
    fail(ErrorCode::ParseError, "not a handpose-report-v1 document");
  }
  EvaluationReport report;
  report.config = j.at("config");
  report.dof_names = j.at("dofs").get<std::vector<std::string>>();

  for (const auto& m : j.at("methods")) {
    MethodSummary s;
    s.method = m.at("method").get<std::string>();
    s.errors.pose = scope_from_json(m.at("pose"));
    for (const auto& row : m.at("per_dof")) {
      s.errors.per_dof.push_back(scope_from_json(row));
    }
    const auto pose_errors = m.at("per_pose_errors").get<std::vector<double>>();
    s.errors.per_pose_errors =
        Eigen::Map<const Eigen::VectorXd>(pose_errors.data(),
                                          static_cast<Eigen::Index>(pose_errors.size()));
    const auto dof_errors = m.at("per_dof_errors").get<std::vector<std::vector<double>>>();
    s.errors.per_dof_errors.resize(static_cast<Eigen::Index>(dof_errors.size()),
                                   s.errors.per_pose_errors.size());
    for (std::size_t r = 0; r < dof_errors.size(); ++r) {
      s.errors.per_dof_errors.row(static_cast<Eigen::Index>(r)) =
          Eigen::Map<const Eigen::VectorXd>(dof_errors[r].data(),
                                            static_cast<Eigen::Index>(dof_errors[r].size()));
    }
    report.summaries.push_back(std::move(s));
  }

  for (const auto& c : j.at("comparisons")) {
    MethodComparison mc;
    mc.method_a = c.at("method_a").get<std::string>();
    mc.method_b = c.at("method_b").get<std::string>();
    mc.pose_level.scope = c.at("pose").at("scope").get<std::string>();
    mc.pose_level.test = test_from_json(c.at("pose"));
    for (const auto& row : c.at("per_dof")) {
      ComparisonRow r;
      r.scope = row.at("scope").get<std::string>();
      r.test = test_from_json(row);
      mc.per_dof.push_back(std::move(r));
    }
    report.comparisons.push_back(std::move(mc));
  }
  validate(report);
  return report;
}

std::string render_report(const EvaluationReport& report, ReportFormat format) {
  validate(report);
  if (format == ReportFormat::Json) {
    return report_to_json(report).dump(2) + "\n";
  }

  std::ostringstream out;
  out << "# Hand pose reconstruction report\n\n";
  if (!report.config.empty()) {
    out << "## Configuration\n\n";
    for (const auto& [key, value] : report.config.items()) {
      out << "- " << key << ": " << value.dump() << "\n";
    }
    out << "\n";
  }

  out << "## Pose errors [deg]\n\n";
  out << "| method | mean | std | max |\n";
  out << "|---|---|---|---|\n";
  for (const auto& s : report.summaries) {
    out << "| " << s.method << " | " << fixed2(s.errors.pose.mean) << " | "
        << fixed2(s.errors.pose.stddev) << " | " << fixed2(s.errors.pose.max) << " |\n";
  }
  out << "\n";

  auto summary_of = [&](const std::string& method) -> const MethodSummary& {
    for (const auto& s : report.summaries) {
      if (s.method == method) return s;
    }
    fail(ErrorCode::IncompleteReport, "comparison references unknown method '" + method + "'");
  };

  for (const auto& c : report.comparisons) {
    const MethodSummary& a = summary_of(c.method_a);
    const MethodSummary& b = summary_of(c.method_b);
    out << "## " << c.method_a << " vs " << c.method_b << " [deg]\n\n";
    out << "markers: ⋄ pooled t test, ‡ Welch t test, unmarked Mann-Whitney U; "
        << "bold p = no significant difference at 5%\n\n";
    out << "| DoF | " << c.method_a << " mean±std | " << c.method_a << " max | "
        << c.method_b << " mean±std | " << c.method_b << " max | p |\n";
    out << "|---|---|---|---|---|---|\n";
    for (std::size_t d = 0; d < c.per_dof.size(); ++d) {
      const auto& sa = a.errors.per_dof[d];
      const auto& sb = b.errors.per_dof[d];
      out << "| " << c.per_dof[d].scope << " | " << fixed2(sa.mean) << "±"
          << fixed2(sa.stddev) << " | " << fixed2(sa.max) << " | " << fixed2(sb.mean) << "±"
          << fixed2(sb.stddev) << " | " << fixed2(sb.max) << " | " << p_cell(c.per_dof[d].test)
          << " |\n";
    }
    out << "| pose | " << fixed2(a.errors.pose.mean) << "±" << fixed2(a.errors.pose.stddev)
        << " | " << fixed2(a.errors.pose.max) << " | " << fixed2(b.errors.pose.mean) << "±"
        << fixed2(b.errors.pose.stddev) << " | " << fixed2(b.errors.pose.max) << " | "
        << p_cell(c.pose_level.test) << " |\n\n";
  }
  return out.str();
}

}  // namespace handpose
