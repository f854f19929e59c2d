#include "ipt/records.hpp"

#include <algorithm>
#include <fstream>

namespace ipt {

void to_json(nlohmann::json& j, const PredictionRecord& r) {
  j = nlohmann::json{{"id", r.video_id},
                     {"label", r.true_label},
                     {"label_name", r.label_name},
                     {"scores", r.scores},
                     {"condition", r.condition}};
  if (r.factors) j["factors"] = *r.factors;
  if (!r.features.empty()) {
    nlohmann::json features = nlohmann::json::object();
    for (const auto& [tag, t] : r.features) features[tag] = {{"shape", t.shape}, {"values", t.values}};
    j["features"] = std::move(features);
  }
  if (!r.model.empty()) j["model"] = r.model;
  if (!r.error.empty()) j["error"] = r.error;
}

void from_json(const nlohmann::json& j, PredictionRecord& r) {
  r = PredictionRecord{};
  r.video_id = j.at("id").get<std::string>();
  r.true_label = j.at("label").get<int>();
  r.label_name = j.value("label_name", std::string{});
  r.scores = j.at("scores").get<ScoreVector>();
  r.condition = j.at("condition").get<Condition>();
  if (j.contains("factors") && !j.at("factors").is_null()) r.factors = j.at("factors").get<FactorVector>();
  if (j.contains("features")) {
    for (const auto& [tag, t] : j.at("features").items()) {
      r.features[tag] = FeatureTensor{t.at("shape").get<std::vector<std::int64_t>>(), t.at("values").get<std::vector<float>>()};
    }
  }
  r.model = j.value("model", std::string{});
  r.error = j.value("error", std::string{});
}

std::string record_line(const PredictionRecord& r) { return nlohmann::json(r).dump(); }

std::vector<PredictionRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open record file '" + path.string() + "'");
  std::vector<PredictionRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    try {
      records.push_back(nlohmann::json::parse(line).get<PredictionRecord>());
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": bad record: " + e.what());
    }
  }
  return records;
}

void sort_by_video_id(std::vector<PredictionRecord>& records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const PredictionRecord& a, const PredictionRecord& b) { return a.video_id < b.video_id; });
}

void write_records(const std::filesystem::path& path, std::vector<PredictionRecord> records) {
  sort_by_video_id(records);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + tmp + "'");
    for (const auto& r : records) out << record_line(r) << '\n';
    if (!out) throw DataError("I/O failure writing '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw DataError("cannot move '" + tmp + "' to '" + path.string() + "': " + ec.message());
}

}  // namespace ipt
