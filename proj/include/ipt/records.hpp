#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ipt/protocol.hpp"
#include "ipt/types.hpp"

namespace ipt {

/// One model evaluation of one video. Persisted one JSON object per line.
struct PredictionRecord {
  std::string video_id;
  int true_label = 0;
  std::string label_name;
  ScoreVector scores;
  Condition condition;
  std::optional<FactorVector> factors;
  std::map<std::string, FeatureTensor> features;
  std::string model;
  std::string error;  // non-empty when inference failed; scores are empty then

  bool ok() const { return error.empty(); }

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

void to_json(nlohmann::json& j, const PredictionRecord& r);
void from_json(const nlohmann::json& j, PredictionRecord& r);

std::vector<PredictionRecord> read_records(const std::filesystem::path& path);
/// Writes `records` sorted by video_id.
void write_records(const std::filesystem::path& path, std::vector<PredictionRecord> records);
std::string record_line(const PredictionRecord& r);

void sort_by_video_id(std::vector<PredictionRecord>& records);

}  // namespace ipt
