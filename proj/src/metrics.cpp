#include "ipt/metrics.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "ipt/errors.hpp"

namespace ipt {

bool in_top_k(const ScoreVector& scores, int label, std::size_t k) {
  if (label < 0 || static_cast<std::size_t>(label) >= scores.size()) return false;
  const double own = scores[static_cast<std::size_t>(label)];
  std::size_t rank = 0;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (scores[j] > own || (scores[j] == own && static_cast<int>(j) < label)) ++rank;
  }
  return rank < k;
}

int top1(const ScoreVector& scores) {
  int best = 0;
  for (std::size_t j = 1; j < scores.size(); ++j) {
    if (scores[j] > scores[static_cast<std::size_t>(best)]) best = static_cast<int>(j);
  }
  return best;
}

double topk_accuracy(const std::vector<PredictionRecord>& records, std::size_t k) {
  if (records.empty()) throw DataError("top-k accuracy of an empty record list");
  if (k == 0) throw ConfigError("k must be >= 1");
  std::size_t hits = 0;
  for (const auto& r : records) hits += in_top_k(r.scores, r.true_label, k) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(records.size());
}

std::optional<ChangeRates> changing_rates(double acc_o, double acc_f, double acc_b) {
  for (double a : {acc_o, acc_f, acc_b}) {
    if (!(a >= 0.0 && a <= 1.0)) throw DataError("accuracies must lie in [0,1]");
  }
  if (acc_o == 0.0) return std::nullopt;
  return ChangeRates{(acc_o - acc_f) / acc_o, (acc_o - acc_b) / acc_o};
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::foreground_reliant:
      return "foreground_reliant";
    case Regime::background_reliant:
      return "background_reliant";
    case Regime::mixed:
      return "mixed";
  }
  return "?";
}

Regime classify_regime(double cr_f, double cr_b, RegimeThresholds t) {
  if (cr_f <= t.lo && cr_b >= t.hi) return Regime::foreground_reliant;
  if (cr_f >= t.hi && cr_b <= t.lo) return Regime::background_reliant;
  return Regime::mixed;
}

PerClassMetrics per_class_metrics(std::vector<PredictionRecord> records) {
  sort_by_video_id(records);
  struct Tally {
    std::size_t n = 0;
    std::size_t hits = 0;
  };
  // class id -> condition kind -> tally
  std::map<int, std::map<Condition::Kind, Tally>> tallies;
  std::map<int, std::string> names;
  for (const auto& r : records) {
    if (!r.ok()) continue;
    // A rendered sweep point is an untransformed original.
    const auto kind = r.condition.kind == Condition::Kind::sweep ? Condition::Kind::original : r.condition.kind;
    if (kind != Condition::Kind::original && kind != Condition::Kind::foreground &&
        kind != Condition::Kind::background) {
      throw DataError("record '" + r.video_id + "' has condition '" + r.condition.label() +
                      "', expected original/foreground/background");
    }
    auto& t = tallies[r.true_label][kind];
    ++t.n;
    if (top1(r.scores) == r.true_label) ++t.hits;
    if (!r.label_name.empty()) names[r.true_label] = r.label_name;
  }

  PerClassMetrics out;
  for (const auto& [cls, by_kind] : tallies) {
    for (auto [kind, name] : {std::pair{Condition::Kind::original, "original"},
                              std::pair{Condition::Kind::foreground, "foreground"},
                              std::pair{Condition::Kind::background, "background"}}) {
      if (!by_kind.contains(kind)) {
        const std::string label = names.contains(cls) ? " (" + names[cls] + ")" : "";
        throw DataError("class " + std::to_string(cls) + label + " has no records for condition '" + name + "'");
      }
    }
    auto acc = [&](Condition::Kind k) {
      const auto& t = by_kind.at(k);
      return static_cast<double>(t.hits) / static_cast<double>(t.n);
    };
    ClassMetrics m;
    m.class_id = cls;
    m.label_name = names.contains(cls) ? names[cls] : std::string{};
    m.acc_o = acc(Condition::Kind::original);
    m.acc_f = acc(Condition::Kind::foreground);
    m.acc_b = acc(Condition::Kind::background);
    m.n_videos = by_kind.at(Condition::Kind::original).n;
    const auto cr = changing_rates(m.acc_o, m.acc_f, m.acc_b);
    if (!cr) {
      out.excluded.push_back(cls);
      continue;
    }
    m.cr_f = cr->cr_f;
    m.cr_b = cr->cr_b;
    out.classes.push_back(m);
  }
  std::stable_sort(out.classes.begin(), out.classes.end(), [](const ClassMetrics& a, const ClassMetrics& b) {
    return a.cr_f != b.cr_f ? a.cr_f < b.cr_f : a.class_id < b.class_id;
  });
  return out;
}

}  // namespace ipt
