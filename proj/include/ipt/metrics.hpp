#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ipt/records.hpp"

namespace ipt {

/// True if `label` ranks among the k highest scores; equal scores rank the
/// lower class id first.
bool in_top_k(const ScoreVector& scores, int label, std::size_t k);

/// Index of the highest score, lowest id on ties.
int top1(const ScoreVector& scores);

/// Fraction of records whose true label is in the top k. Throws DataError on
/// an empty list or k == 0.
double topk_accuracy(const std::vector<PredictionRecord>& records, std::size_t k);

struct ChangeRates {
  double cr_f = 0.0;
  double cr_b = 0.0;
};

/// cr_x = (acc_o - acc_x) / acc_o. Undefined (nullopt) when acc_o == 0.
std::optional<ChangeRates> changing_rates(double acc_o, double acc_f, double acc_b);

enum class Regime { foreground_reliant, background_reliant, mixed };

const char* regime_name(Regime r);

struct RegimeThresholds {
  double lo = 0.25;
  double hi = 0.75;
};

Regime classify_regime(double cr_f, double cr_b, RegimeThresholds t = {});

struct ClassMetrics {
  int class_id = 0;
  std::string label_name;
  double acc_o = 0.0;
  double acc_f = 0.0;
  double acc_b = 0.0;
  double cr_f = 0.0;
  double cr_b = 0.0;
  std::size_t n_videos = 0;  // original-condition videos

  friend bool operator==(const ClassMetrics&, const ClassMetrics&) = default;
};

struct PerClassMetrics {
  std::vector<ClassMetrics> classes;  // ascending cr_f, then class id
  std::vector<int> excluded;          // acc_o == 0, ascending id
};

/// Top-1 accuracies per class under original/foreground/background, and the
/// derived change rates. Sweep records count as original; failed records are
/// ignored. Throws DataError naming the class and condition when a class lacks
/// one of the three conditions.
PerClassMetrics per_class_metrics(std::vector<PredictionRecord> records);

}  // namespace ipt
