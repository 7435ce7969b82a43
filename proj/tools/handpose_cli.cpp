// Command-line front end: builds priors from pose corpora, runs glove
// simulation experiments, calibrates measurement models from paired
// recordings, reconstructs poses and evaluates estimates against references.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "handpose/calibration.hpp"
#include "handpose/config.hpp"
#include "handpose/csv.hpp"
#include "handpose/errors.hpp"
#include "handpose/estimators.hpp"
#include "handpose/prior.hpp"
#include "handpose/reporting.hpp"
#include "handpose/rng.hpp"
#include "handpose/simulator.hpp"
#include "handpose/stats.hpp"

namespace {

using handpose::ErrorCode;
using handpose::fail;

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << text;
}

// Reports go to <out>.json + <out>.md, or to stdout when no output base is
// given.
void emit_report(const handpose::EvaluationReport& report, const std::string& out_base,
                 const std::string& format) {
  if (out_base.empty()) {
    const auto fmt =
        format == "json" ? handpose::ReportFormat::Json : handpose::ReportFormat::Markdown;
    std::cout << handpose::render_report(report, fmt);
    return;
  }
  write_text(out_base + ".json", handpose::render_report(report, handpose::ReportFormat::Json));
  write_text(out_base + ".md", handpose::render_report(report, handpose::ReportFormat::Markdown));
  std::cout << "wrote " << out_base << ".json and " << out_base << ".md\n";
}

std::vector<handpose::Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<handpose::Method> methods;
  for (const auto& name : names) {
    const handpose::Method m = handpose::method_from_string(name);
    for (handpose::Method seen : methods) {
      if (seen == m) fail(ErrorCode::InvalidConfig, "method '" + name + "' listed twice");
    }
    methods.push_back(m);
  }
  if (methods.empty()) fail(ErrorCode::InvalidConfig, "no methods requested");
  return methods;
}

void add_build_prior(CLI::App& app) {
  auto* cmd = app.add_subcommand("build-prior", "Build a Gaussian prior from a pose CSV");
  auto poses = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto ridge = std::make_shared<double>(handpose::kDefaultRidge);
  cmd->add_option("--poses", *poses, "Pose CSV (header of DoF names)")->required();
  cmd->add_option("--out", *out, "Output prior JSON path")->required();
  cmd->add_option("--ridge", *ridge, "Diagonal load added to the covariance [deg^2]");
  cmd->callback([poses, out, ridge] {
    const auto set = handpose::csv::load_pose_csv(*poses, handpose::default_hand_model());
    const auto prior = handpose::build_prior(set, *ridge);
    handpose::save_prior(*out, prior);
    std::cout << "wrote " << *out << " (n=" << prior.model.size()
              << ", poses=" << prior.sample_count << ")\n";
  });
}

void add_simulate(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "simulate", "Run a reconstruction experiment on simulated glove measurements");
  auto prior_path = std::make_shared<std::string>();
  auto test_path = std::make_shared<std::string>();
  auto train_path = std::make_shared<std::string>();
  auto config_path = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto format = std::make_shared<std::string>("markdown");
  auto methods = std::make_shared<std::vector<std::string>>(std::vector<std::string>{"mve", "pinv"});
  auto seed = std::make_shared<std::optional<std::uint64_t>>();
  auto ridge = std::make_shared<double>(handpose::kDefaultRidge);
  auto paper_defaults = std::make_shared<bool>(false);

  cmd->add_option("--prior", *prior_path, "Prior JSON from build-prior");
  cmd->add_option("--train", *train_path, "Training pose CSV (alternative to --prior)");
  cmd->add_option("--test", *test_path, "Test pose CSV");
  cmd->add_option("--config", *config_path, "Simulation config JSON");
  cmd->add_option("--method", *methods, "Estimators to compare (pinv, mve, conditional)")
      ->delimiter(',');
  cmd->add_option("--seed", *seed, "Noise seed (overrides the config seed)");
  cmd->add_option("--ridge", *ridge, "Prior ridge [deg^2], used with --train");
  cmd->add_option("--out", *out, "Output base path (writes .json and .md)");
  cmd->add_option("--format", *format, "Stdout format when --out is absent")
      ->check(CLI::IsMember({"json", "markdown"}));
  cmd->add_flag("--paper-defaults", *paper_defaults,
                "Reference experiment design: measure TM,IM,MM,RM,LM with 7 deg noise; "
                "without pose inputs, a synthetic 114/54 train/test split is sampled");

  cmd->callback([prior_path, train_path, test_path, config_path, out, format, methods, seed,
                 ridge, paper_defaults] {
    const handpose::HandModel model = handpose::default_hand_model();

    handpose::SimulationConfig cfg;
    if (!config_path->empty()) {
      cfg = handpose::load_simulation_config(*config_path, model);
    } else if (*paper_defaults) {
      cfg = handpose::make_simulation_config(
          handpose::make_selection_model(model, handpose::kMetacarpalDofs,
                                         handpose::kDefaultNoiseSigmaDeg),
          seed->value_or(0));
      cfg.measurement_spec = "selection:TM,IM,MM,RM,LM";
      cfg.noise_spec = "sigma_deg:7";
    } else {
      fail(ErrorCode::InvalidConfig, "provide --config or --paper-defaults");
    }
    if (*seed) cfg.seed = **seed;

    const auto method_list = parse_methods(*methods);
    handpose::EvaluationReport report;

    if (test_path->empty()) {
      // Fully synthetic replication run.
      if (!*paper_defaults) {
        fail(ErrorCode::InvalidConfig,
             "--test is required unless --paper-defaults runs the synthetic design");
      }
      if (!prior_path->empty() || !train_path->empty()) {
        fail(ErrorCode::InvalidConfig, "synthetic runs take no --prior/--train");
      }
      const handpose::SyntheticDesign design;
      const auto population = handpose::make_synthetic_population(model, design, cfg.seed);
      const auto train = handpose::sample_poses(model, population, design.train_poses,
                                                handpose::rng::mix(cfg.seed, 1), "synthetic-train");
      const auto test = handpose::sample_poses(model, population, design.test_poses,
                                               handpose::rng::mix(cfg.seed, 2), "synthetic-test");
      report = handpose::run_reconstruction_experiment(train, test, cfg, method_list, *ridge);
    } else if (!prior_path->empty()) {
      if (!train_path->empty()) {
        fail(ErrorCode::InvalidConfig, "use either --prior or --train, not both");
      }
      const auto prior = handpose::load_prior(*prior_path);
      const auto test = handpose::csv::load_pose_csv(*test_path, prior.model);
      report = handpose::run_reconstruction_experiment(prior, test, cfg, method_list);
    } else if (!train_path->empty()) {
      const auto train = handpose::csv::load_pose_csv(*train_path, model);
      const auto test = handpose::csv::load_pose_csv(*test_path, model);
      report = handpose::run_reconstruction_experiment(train, test, cfg, method_list, *ridge);
    } else {
      fail(ErrorCode::InvalidConfig, "provide --prior or --train along with --test");
    }
    emit_report(report, *out, *format);
  });
}

void add_calibrate(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "calibrate", "Estimate the measurement matrix (and noise) from paired recordings");
  auto reference = std::make_shared<std::string>();
  auto readings = std::make_shared<std::string>();
  auto raw_windows = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  cmd->add_option("--reference", *reference, "Reference pose CSV")->required();
  cmd->add_option("--readings", *readings, "Glove readings CSV (channel header)")->required();
  cmd->add_option("--raw-windows", *raw_windows,
                  "Raw acquisition windows CSV (window_id,channel,value)");
  cmd->add_option("--out", *out, "Output measurement-model JSON path")->required();
  cmd->callback([reference, readings, raw_windows, out] {
    const auto model = handpose::default_hand_model();
    const auto poses = handpose::csv::load_pose_csv(*reference, model);
    const auto table = handpose::csv::load_readings_csv(*readings);
    if (table.rows.rows() != poses.poses.rows()) {
      fail(ErrorCode::DimensionMismatch,
           "reference poses and readings disagree on sample count");
    }

    handpose::CalibrationSet cal;
    cal.reference_poses = poses.poses.transpose();
    cal.glove_readings = table.rows.transpose();
    const Eigen::MatrixXd h_hat = handpose::estimate_measurement_matrix(cal);

    if (!raw_windows->empty()) {
      const auto windows = handpose::csv::load_raw_windows_csv(*raw_windows, table.channels);
      const Eigen::MatrixXd noise = handpose::estimate_noise_covariance(windows);
      handpose::save_measurement_model(*out, h_hat, &noise);
    } else {
      handpose::save_measurement_model(*out, h_hat, nullptr);
    }
    std::cout << "wrote " << *out << " (" << h_hat.rows() << "x" << h_hat.cols() << ")\n";
  });
}

void add_estimate(CLI::App& app) {
  auto* cmd = app.add_subcommand("estimate", "Reconstruct poses from measurement rows");
  auto prior_path = std::make_shared<std::string>();
  auto model_path = std::make_shared<std::string>();
  auto measurements = std::make_shared<std::string>();
  auto method = std::make_shared<std::string>("mve");
  auto out = std::make_shared<std::string>();
  cmd->add_option("--prior", *prior_path, "Prior JSON from build-prior")->required();
  cmd->add_option("--model", *model_path, "Measurement-model JSON")->required();
  cmd->add_option("--measurements", *measurements, "Measurements CSV (channel header)")
      ->required();
  cmd->add_option("--method", *method, "pinv, mve or conditional")
      ->check(CLI::IsMember({"pinv", "mve", "conditional"}));
  cmd->add_option("--out", *out, "Output pose CSV path")->required();
  cmd->callback([prior_path, model_path, measurements, method, out] {
    const auto prior = handpose::load_prior(*prior_path);
    const auto cfg = handpose::load_simulation_config(*model_path, prior.model);
    const auto table = handpose::csv::load_readings_csv(*measurements);
    if (table.rows.cols() != cfg.measurement.H.rows()) {
      fail(ErrorCode::DimensionMismatch,
           "measurements have " + std::to_string(table.rows.cols()) + " channels, model has " +
               std::to_string(cfg.measurement.H.rows()));
    }
    const handpose::Method m = handpose::method_from_string(*method);

    Eigen::MatrixXd estimates(table.rows.rows(), prior.model.size());
    for (Eigen::Index r = 0; r < table.rows.rows(); ++r) {
      const Eigen::VectorXd y = table.rows.row(r).transpose();
      switch (m) {
        case handpose::Method::Pinv:
          estimates.row(r) = handpose::estimate_pinv(cfg.measurement.H, y).x_hat.transpose();
          break;
        case handpose::Method::Mve:
          estimates.row(r) = handpose::estimate_mve(prior, cfg.measurement, y).x_hat.transpose();
          break;
        case handpose::Method::Conditional:
          estimates.row(r) =
              handpose::estimate_conditional_gaussian(prior, cfg.measurement, y).x_hat.transpose();
          break;
      }
    }
    handpose::csv::write_pose_csv(*out,
                                  handpose::make_pose_set(prior.model, std::move(estimates)));
    std::cout << "wrote " << *out << "\n";
  });
}

void add_evaluate(CLI::App& app) {
  auto* cmd = app.add_subcommand("evaluate", "Compare estimated poses against references");
  auto estimates = std::make_shared<std::string>();
  auto reference = std::make_shared<std::string>();
  auto baseline = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto format = std::make_shared<std::string>("markdown");
  cmd->add_option("--estimates", *estimates, "Estimated pose CSV")->required();
  cmd->add_option("--reference", *reference, "Reference pose CSV")->required();
  cmd->add_option("--baseline", *baseline, "Second estimate CSV to compare against");
  cmd->add_option("--out", *out, "Output base path (writes .json and .md)");
  cmd->add_option("--format", *format, "Stdout format when --out is absent")
      ->check(CLI::IsMember({"json", "markdown"}));
  cmd->callback([estimates, reference, baseline, out, format] {
    // The reference header defines the model, so any DoF layout evaluates.
    const auto header = handpose::csv::load_readings_csv(*reference).channels;
    const auto model = handpose::model_from_dof_names(header);
    const auto ref = handpose::csv::load_pose_csv(*reference, model);
    const auto est = handpose::csv::load_pose_csv(*estimates, model);

    handpose::EvaluationReport report;
    report.dof_names = model.names();
    report.config = nlohmann::json{{"estimates", *estimates},
                                   {"reference", *reference},
                                   {"baseline", baseline->empty() ? "none" : *baseline}};
    report.summaries.push_back(
        handpose::MethodSummary{std::filesystem::path(*estimates).stem().string(),
                                handpose::stats::pose_errors(est, ref)});

    if (!baseline->empty()) {
      const auto base = handpose::csv::load_pose_csv(*baseline, model);
      std::string base_label = std::filesystem::path(*baseline).stem().string();
      if (base_label == report.summaries[0].method) base_label += "-baseline";
      report.summaries.push_back(
          handpose::MethodSummary{std::move(base_label),
                                  handpose::stats::pose_errors(base, ref)});
      const auto& a = report.summaries[0].errors;
      const auto& b = report.summaries[1].errors;
      handpose::MethodComparison cmp;
      cmp.method_a = report.summaries[0].method;
      cmp.method_b = report.summaries[1].method;
      cmp.pose_level.scope = "pose";
      auto to_vec = [](const Eigen::VectorXd& v) {
        return std::vector<double>(v.data(), v.data() + v.size());
      };
      cmp.pose_level.test =
          handpose::stats::select_and_compare(to_vec(a.per_pose_errors), to_vec(b.per_pose_errors));
      for (Eigen::Index d = 0; d < model.size(); ++d) {
        handpose::ComparisonRow row;
        row.scope = report.dof_names[static_cast<std::size_t>(d)];
        row.test = handpose::stats::select_and_compare(to_vec(a.per_dof_errors.row(d)),
                                                       to_vec(b.per_dof_errors.row(d)));
        cmp.per_dof.push_back(std::move(row));
      }
      report.comparisons.push_back(std::move(cmp));
    }
    emit_report(report, *out, *format);
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hand posture reconstruction from sparse glove measurements"};
  app.require_subcommand(1);
  add_build_prior(app);
  add_simulate(app);
  add_calibrate(app);
  add_estimate(app);
  add_evaluate(app);

  try {
    CLI11_PARSE(app, argc, argv);
  } catch (const handpose::Error& e) {
    std::cerr << "error[" << handpose::to_string(e.code()) << "]: " << e.detail() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error[Internal]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
