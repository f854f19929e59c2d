#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ipt/config.hpp"
#include "ipt/mock_model.hpp"

namespace ipt {

struct GenerateOptions {
  std::filesystem::path config;
  std::filesystem::path out;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

struct GenerateSummary {
  std::size_t videos = 0;
};

/// Renders every (clip x appearance x sweep value) combination into a
/// dataset with ground-truth masks.
GenerateSummary cmd_generate(const GenerateOptions& options);
GenerateSummary generate_dataset(const Config& config, const std::filesystem::path& out, std::uint64_t seed,
                                 std::size_t jobs);

struct TransformOptions {
  std::filesystem::path in;
  std::filesystem::path out;
  /// "semantic", "suite", a kind name, or a JSON spec {"kind":..,"params":..}.
  std::string transform;
  std::uint64_t seed = 0;
  double drop_threshold = 0.2;
  std::size_t jobs = 1;
  std::optional<std::filesystem::path> config;  // "suite" uses its transforms list when given
};

struct TransformSummary {
  std::vector<std::filesystem::path> datasets;
  std::size_t dropped_videos = 0;
};

TransformSummary cmd_transform(const TransformOptions& options);

struct EvaluateOptions {
  std::filesystem::path dataset;
  std::string model;
  std::vector<std::string> features;
  std::filesystem::path out;
  std::size_t jobs = 1;
  double timeout_s = 120.0;
};

struct EvaluateSummary {
  std::size_t inferred = 0;  // new inference calls made
  std::size_t skipped = 0;   // already present in the output
  std::size_t failed = 0;
};

EvaluateSummary cmd_evaluate(const EvaluateOptions& options);

enum class ReportMode { image, semantic, sweep };
ReportMode parse_report_mode(const std::string& name);

struct ReportOptions {
  std::vector<std::filesystem::path> records;
  ReportMode mode = ReportMode::image;
  std::filesystem::path out;
  ReportConfig settings;
};

/// Writes report.json plus mode-specific CSV and SVG files into `out`.
/// Returns the JSON summary.
nlohmann::json cmd_report(const ReportOptions& options);

struct MockOptions {
  MockMode mode = MockMode::uniform;
  std::uint64_t seed = 0;
  std::vector<std::string> labels;
  std::optional<std::uint16_t> tcp_port;
};

/// Serves the mock model on stdio (or TCP). Returns false on a protocol error.
bool cmd_mock(const MockOptions& options);

/// Labels from "a,b,c", a manifest.json, or a text file with one per line.
std::vector<std::string> parse_label_list(const std::string& text);

}  // namespace ipt
