#include "handpose/config.hpp"

#include <fstream>
#include <string>
#include <vector>

#include "handpose/csv.hpp"
#include "handpose/errors.hpp"
#include "handpose/linalg.hpp"

namespace handpose {

namespace {

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  return j;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << j.dump(2) << "\n";
}

std::vector<std::vector<double>> matrix_to_rows(const Eigen::MatrixXd& m) {
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    rows.emplace_back(m.row(r).begin(), m.row(r).end());
  }
  return rows;
}

Eigen::MatrixXd rows_to_matrix(const std::vector<std::vector<double>>& rows,
                               const std::string& what) {
  if (rows.empty()) fail(ErrorCode::ParseError, what + " is empty");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows.front().size()) fail(ErrorCode::ParseError, what + " is ragged");
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return m;
}

std::filesystem::path resolve(const std::filesystem::path& base_dir, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base_dir / path;
}

}  // namespace

void save_prior(const std::filesystem::path& json_path, const PriorModel& prior) {
  nlohmann::json j;
  j["schema"] = "handpose-prior-v1";
  j["dofs"] = prior.model.names();
  j["sample_count"] = prior.sample_count;
  j["ridge"] = prior.ridge;
  j["mu"] = std::vector<double>(prior.mu.data(), prior.mu.data() + prior.mu.size());
  j["cov"] = matrix_to_rows(prior.cov);
  write_json(json_path, j);

  // Side CSVs for auditing; the JSON stays authoritative.
  std::filesystem::path mu_path = json_path;
  mu_path.replace_extension(".mu.csv");
  std::filesystem::path cov_path = json_path;
  cov_path.replace_extension(".cov.csv");
  csv::write_matrix_csv(mu_path, prior.mu.transpose());
  csv::write_matrix_csv(cov_path, prior.cov);
}

PriorModel load_prior(const std::filesystem::path& json_path) {
  const nlohmann::json j = read_json(json_path);
  if (!j.contains("schema") || j.at("schema") != "handpose-prior-v1") {
    fail(ErrorCode::ParseError, json_path.string() + ": not a handpose-prior-v1 document");
  }
  PriorModel prior{model_from_dof_names(j.at("dofs").get<std::vector<std::string>>()),
                   Eigen::VectorXd(), Eigen::MatrixXd(), 0, 0.0};
  const auto mu = j.at("mu").get<std::vector<double>>();
  prior.mu = Eigen::Map<const Eigen::VectorXd>(mu.data(), static_cast<Eigen::Index>(mu.size()));
  prior.cov = rows_to_matrix(j.at("cov").get<std::vector<std::vector<double>>>(), "cov");
  prior.sample_count = j.at("sample_count").get<int>();
  prior.ridge = j.at("ridge").get<double>();

  const Eigen::Index n = prior.model.size();
  if (prior.mu.size() != n || prior.cov.rows() != n || prior.cov.cols() != n) {
    fail(ErrorCode::DimensionMismatch, json_path.string() + ": mu/cov do not match the DoF list");
  }
  if (!linalg::is_symmetric(prior.cov, 1e-10)) {
    fail(ErrorCode::SingularCovariance, json_path.string() + ": covariance is not symmetric");
  }
  return prior;
}

SimulationConfig simulation_config_from_json(const nlohmann::json& doc, const HandModel& model,
                                             const std::filesystem::path& base_dir) {
  if (!doc.is_object()) fail(ErrorCode::InvalidConfig, "configuration must be a JSON object");
  const bool has_dofs = doc.contains("measured_dofs");
  const bool has_h = doc.contains("H_csv");
  if (has_dofs == has_h) {
    fail(ErrorCode::InvalidConfig, "specify exactly one of 'measured_dofs' or 'H_csv'");
  }
  const bool has_sigma = doc.contains("sigma_deg");
  const bool has_r = doc.contains("R_csv");
  if (has_sigma && has_r) {
    fail(ErrorCode::InvalidConfig, "specify at most one of 'sigma_deg' or 'R_csv'");
  }

  Eigen::MatrixXd H;
  std::string measurement_spec;
  if (has_dofs) {
    const auto names = doc.at("measured_dofs").get<std::vector<std::string>>();
    H = selection_matrix(model, names);
    measurement_spec = "selection:";
    for (std::size_t i = 0; i < names.size(); ++i) measurement_spec += (i ? "," : "") + names[i];
  } else {
    const auto path = resolve(base_dir, doc.at("H_csv").get<std::string>());
    H = csv::load_matrix_csv(path);
    if (H.cols() != model.size()) {
      fail(ErrorCode::DimensionMismatch, path.string() + ": H has " + std::to_string(H.cols()) +
                                             " columns, model has " + std::to_string(model.size()));
    }
    measurement_spec = "H_csv:" + doc.at("H_csv").get<std::string>();
  }

  const Eigen::Index m = H.rows();
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(m, m);
  std::string noise_spec = "none";
  if (has_sigma) {
    const double sigma = doc.at("sigma_deg").get<double>();
    if (sigma < 0.0) fail(ErrorCode::InvalidConfig, "sigma_deg must be nonnegative");
    R = Eigen::MatrixXd::Identity(m, m) * sigma * sigma;
    noise_spec = "sigma_deg:" + csv::format_double(sigma);
  } else if (has_r) {
    const auto path = resolve(base_dir, doc.at("R_csv").get<std::string>());
    R = csv::load_matrix_csv(path);
    if (R.rows() != m || R.cols() != m) {
      fail(ErrorCode::DimensionMismatch, path.string() + ": R must be " + std::to_string(m) + "x" +
                                             std::to_string(m));
    }
    noise_spec = "R_csv:" + doc.at("R_csv").get<std::string>();
  }

  SimulationConfig cfg = make_simulation_config(
      make_measurement_model(std::move(H), std::move(R)),
      doc.value("seed", std::uint64_t{0}), doc.value("trials", 1));
  cfg.measurement_spec = std::move(measurement_spec);
  cfg.noise_spec = std::move(noise_spec);
  return cfg;
}

SimulationConfig load_simulation_config(const std::filesystem::path& path, const HandModel& model) {
  return simulation_config_from_json(read_json(path), model, path.parent_path());
}

void save_measurement_model(const std::filesystem::path& json_path, const Eigen::MatrixXd& H,
                            const Eigen::MatrixXd* R) {
  std::filesystem::path h_path = json_path;
  h_path.replace_extension(".H.csv");
  csv::write_matrix_csv(h_path, H);

  nlohmann::json j;
  j["H_csv"] = h_path.filename().string();
  if (R != nullptr) {
    std::filesystem::path r_path = json_path;
    r_path.replace_extension(".R.csv");
    csv::write_matrix_csv(r_path, *R);
    j["R_csv"] = r_path.filename().string();
  }
  write_json(json_path, j);
}

}  // namespace handpose
