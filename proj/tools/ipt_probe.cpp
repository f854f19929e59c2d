// ipt-probe: generate, transform, evaluate, report, mock.

#include <CLI11.hpp>

#include <csignal>
#include <iostream>
#include <sstream>

#include "ipt/commands.hpp"
#include "ipt/errors.hpp"

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGPIPE, SIG_IGN);

  CLI::App app{"Invariance probing toolkit for video action classifiers"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;

  auto* generate = app.add_subcommand("generate", "Render the configured factor sweeps into a dataset");
  generate->add_option("--config", config_path, "Config JSON")->required();
  generate->add_option("--out", out, "Output dataset directory")->required();
  generate->add_option("--seed", seed, "Root seed");
  generate->add_option("--jobs", jobs, "Render workers")->check(CLI::PositiveNumber);

  std::string in;
  std::string transform = "suite";
  std::optional<double> threshold;
  auto* transform_cmd = app.add_subcommand("transform", "Apply image-space or semantic transforms");
  transform_cmd->add_option("--in", in, "Input dataset directory")->required();
  transform_cmd->add_option("--out", out, "Output directory")->required();
  transform_cmd->add_option("--transform", transform,
                            "semantic | suite | identity | average_blur | hist_equalization | grayscale | "
                            "gaussian_noise | rotate_cw | JSON spec");
  transform_cmd->add_option("--config", config_path, "Config JSON (transforms list, report.drop_threshold)");
  transform_cmd->add_option("--seed", seed, "Root seed");
  transform_cmd->add_option("--threshold", threshold, "Max dropped-frame fraction kept in semantic mode");
  transform_cmd->add_option("--jobs", jobs, "Workers")->check(CLI::PositiveNumber);

  std::string dataset;
  std::string model;
  std::string features;
  std::optional<double> timeout_s;
  std::optional<std::size_t> eval_jobs;
  auto* evaluate = app.add_subcommand("evaluate", "Score every video of a dataset through a model endpoint");
  evaluate->add_option("--dataset", dataset, "Dataset directory")->required();
  evaluate->add_option("--model", model, "Endpoint: tcp:HOST:PORT or exec:COMMAND");
  evaluate->add_option("--features", features, "Comma-separated feature tags to request");
  evaluate->add_option("--out", out, "Output records (JSON lines)")->required();
  evaluate->add_option("--config", config_path, "Config JSON (evaluate section)");
  evaluate->add_option("--jobs", eval_jobs, "Parallel connections")->check(CLI::PositiveNumber);
  evaluate->add_option("--timeout", timeout_s, "Per-message timeout in seconds")->check(CLI::PositiveNumber);

  std::vector<std::string> records;
  std::string mode = "image";
  std::optional<std::size_t> window;
  std::optional<double> tau_lo, tau_hi;
  auto* report = app.add_subcommand("report", "Tables, curves and embeddings from record files");
  report->add_option("--records", records, "Record files")->required();
  report->add_option("--mode", mode, "image | semantic | sweep");
  report->add_option("--out", out, "Output directory")->required();
  report->add_option("--config", config_path, "Config JSON (report section)");
  report->add_option("--window", window, "Smoothing window (odd)");
  report->add_option("--threshold", tau_lo, "Low regime threshold");
  report->add_option("--threshold-hi", tau_hi, "High regime threshold");

  std::string mock_mode = "uniform";
  std::string labels;
  std::optional<std::uint16_t> tcp_port;
  auto* mock = app.add_subcommand("mock", "Serve the deterministic mock model on stdio");
  mock->add_option("--mode", mock_mode, "uniform | centroid | azimuth_oracle");
  mock->add_option("--seed", seed, "Prototype seed");
  mock->add_option("--labels", labels, "Comma list, labels file, or a dataset manifest.json")->required();
  mock->add_option("--tcp", tcp_port, "Listen on this TCP port instead of stdio");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : ipt::exit_code_for(ipt::ErrorKind::config);
  }

  try {
    if (*generate) {
      const auto summary = ipt::cmd_generate({config_path, out, seed, jobs});
      std::cerr << "generated " << summary.videos << " videos\n";
    } else if (*transform_cmd) {
      ipt::TransformOptions options;
      options.in = in;
      options.out = out;
      options.transform = transform;
      options.seed = seed;
      options.jobs = jobs;
      if (!config_path.empty()) {
        options.config = config_path;
        options.drop_threshold = ipt::load_config(config_path).report.drop_threshold;
      }
      if (threshold) options.drop_threshold = *threshold;
      const auto summary = ipt::cmd_transform(options);
      std::cerr << "wrote " << summary.datasets.size() << " dataset(s)";
      if (transform == "semantic") std::cerr << ", dropped " << summary.dropped_videos << " video(s)";
      std::cerr << '\n';
    } else if (*evaluate) {
      ipt::EvaluateConfig defaults;
      if (!config_path.empty()) defaults = ipt::load_config(config_path).evaluate;
      ipt::EvaluateOptions options;
      options.dataset = dataset;
      options.model = model.empty() ? defaults.model : model;
      options.features = features.empty() ? defaults.features : split_list(features);
      options.out = out;
      options.jobs = eval_jobs.value_or(defaults.jobs);
      options.timeout_s = timeout_s.value_or(defaults.timeout_s);
      if (options.model.empty()) throw ipt::ConfigError("--model is required (or evaluate.model in --config)");
      const auto summary = ipt::cmd_evaluate(options);
      std::cerr << "inferred " << summary.inferred << ", skipped " << summary.skipped << ", failed " << summary.failed
                << '\n';
    } else if (*report) {
      ipt::ReportOptions options;
      for (const auto& r : records) options.records.emplace_back(r);
      options.mode = ipt::parse_report_mode(mode);
      options.out = out;
      if (!config_path.empty()) options.settings = ipt::load_config(config_path).report;
      if (window) options.settings.smoothing_window = *window;
      if (tau_lo) options.settings.thresholds.lo = *tau_lo;
      if (tau_hi) options.settings.thresholds.hi = *tau_hi;
      if (options.settings.smoothing_window % 2 == 0) throw ipt::ConfigError("--window must be odd");
      if (!(options.settings.thresholds.lo < options.settings.thresholds.hi)) {
        throw ipt::ConfigError("regime thresholds need lo < hi");
      }
      ipt::cmd_report(options);
    } else if (*mock) {
      ipt::MockOptions options;
      options.mode = ipt::parse_mock_mode(mock_mode);
      options.seed = seed;
      options.labels = ipt::parse_label_list(labels);
      options.tcp_port = tcp_port;
      if (options.labels.empty()) throw ipt::ConfigError("--labels: no labels given");
      return ipt::cmd_mock(options) ? 0 : ipt::exit_code_for(ipt::ErrorKind::endpoint);
    }
  } catch (const ipt::Error& e) {
    std::cerr << "ipt-probe: " << e.what() << '\n';
    return ipt::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "ipt-probe: " << e.what() << '\n';
    return ipt::exit_code_for(ipt::ErrorKind::data);
  }
  return 0;
}
