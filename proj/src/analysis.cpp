#include "ipt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/SVD>

#include "ipt/errors.hpp"

namespace ipt {

void SweepCurve::validate() const {
  if (xs.size() != ys.size()) throw DataError("curve xs and ys differ in length");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) throw DataError("curve xs must be strictly increasing");
  }
  for (double y : ys) {
    if (!std::isfinite(y)) throw DataError("curve ys must be finite");
  }
}

SweepCurve build_curve(const std::vector<PredictionRecord>& records, int class_id) {
  SweepCurve curve;
  curve.class_id = class_id;
  std::vector<std::pair<double, double>> points;
  bool first = true;
  for (const auto& r : records) {
    if (r.condition.kind != Condition::Kind::sweep) {
      throw DataError("record '" + r.video_id + "' is not a sweep record");
    }
    if (first) {
      curve.factor_name = r.condition.factor;
      curve.series = r.condition.series;
      first = false;
    } else if (r.condition.factor != curve.factor_name) {
      throw DataError("records mix sweep factors '" + curve.factor_name + "' and '" + r.condition.factor + "'");
    }
    if (!r.ok()) continue;
    if (class_id < 0 || static_cast<std::size_t>(class_id) >= r.scores.size()) {
      throw DataError("class " + std::to_string(class_id) + " outside the score vector of '" + r.video_id + "'");
    }
    if (r.true_label == class_id && !r.label_name.empty()) curve.label_name = r.label_name;
    if (r.factors && curve.appearance_id.empty()) curve.appearance_id = r.factors->appearance_id;
    if (!r.model.empty() && curve.model.empty()) curve.model = r.model;
    points.emplace_back(r.condition.value, r.scores[static_cast<std::size_t>(class_id)]);
  }
  std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i > 0 && points[i].first == points[i - 1].first) {
      throw DataError("duplicate " + curve.factor_name + " value " + std::to_string(points[i].first) + " in curve");
    }
    curve.xs.push_back(points[i].first);
    curve.ys.push_back(points[i].second);
  }
  curve.validate();
  return curve;
}

std::vector<double> moving_average(const std::vector<double>& ys, std::size_t window, bool circular) {
  if (window == 0 || window % 2 == 0) throw ConfigError("smoothing window must be odd");
  if (window > ys.size()) throw ConfigError("smoothing window larger than the curve");
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(ys.size());
  const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(window / 2);
  std::vector<double> out(ys.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::ptrdiff_t k = -half; k <= half; ++k) {
      std::ptrdiff_t j = i + k;
      if (circular) {
        j = ((j % n) + n) % n;
      } else if (j < 0 || j >= n) {
        continue;
      }
      sum += ys[static_cast<std::size_t>(j)];
      ++count;
    }
    out[static_cast<std::size_t>(i)] = sum / static_cast<double>(count);
  }
  return out;
}

CurveStats curve_stats(const SweepCurve& curve, std::size_t smoothing_window) {
  curve.validate();
  if (curve.ys.empty()) throw DataError("curve has no points");
  const bool circular = curve.factor_name == "azimuth";
  const auto s = moving_average(curve.ys, smoothing_window, circular);
  const std::size_t n = s.size();

  CurveStats stats;
  const auto [lo, hi] = std::minmax_element(curve.ys.begin(), curve.ys.end());
  stats.min = *lo;
  stats.max = *hi;
  stats.mean = std::accumulate(curve.ys.begin(), curve.ys.end(), 0.0) / static_cast<double>(n);
  if (n < 2) return stats;

  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> neighbours;
    if (circular) {
      neighbours = {s[(i + n - 1) % n], s[(i + 1) % n]};
    } else {
      if (i > 0) neighbours.push_back(s[i - 1]);
      if (i + 1 < n) neighbours.push_back(s[i + 1]);
    }
    const bool peak = std::all_of(neighbours.begin(), neighbours.end(), [&](double v) { return s[i] > v; });
    const bool valley = std::all_of(neighbours.begin(), neighbours.end(), [&](double v) { return s[i] < v; });
    if (peak) stats.peaks.push_back(curve.xs[i]);
    if (valley) stats.valleys.push_back(curve.xs[i]);
  }
  return stats;
}

PcaEmbedding pca(const Eigen::MatrixXd& samples, std::size_t d) {
  const auto n = static_cast<std::size_t>(samples.rows());
  const auto m = static_cast<std::size_t>(samples.cols());
  if (n < 2) throw DataError("PCA needs at least two samples");
  if (d < 1 || d > std::min(n - 1, m)) {
    throw ConfigError("PCA dimension " + std::to_string(d) + " must lie in [1, min(n-1, m)] = [1, " +
                      std::to_string(std::min(n - 1, m)) + "]");
  }
  if (!samples.allFinite()) throw DataError("PCA input contains non-finite values");

  PcaEmbedding out;
  out.mean = samples.colwise().mean().transpose();
  const Eigen::MatrixXd centered = samples.rowwise() - out.mean.transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();

  const double tol = static_cast<double>(std::max(n, m)) * std::numeric_limits<double>::epsilon() *
                     (sv.size() > 0 ? sv(0) : 0.0);
  std::size_t rank = 0;
  while (rank < static_cast<std::size_t>(sv.size()) && sv(static_cast<Eigen::Index>(rank)) > tol) ++rank;
  const std::size_t kept = std::min(d, rank);
  out.rank_deficient = kept < d;

  const auto k = static_cast<Eigen::Index>(kept);
  out.components = svd.matrixV().leftCols(k).transpose();
  for (Eigen::Index c = 0; c < k; ++c) {
    Eigen::Index arg = 0;
    out.components.row(c).cwiseAbs().maxCoeff(&arg);
    if (out.components(c, arg) < 0.0) out.components.row(c) *= -1.0;
  }
  out.explained_variance = sv.head(k).array().square() / static_cast<double>(n - 1);
  out.coords = centered * out.components.transpose();
  return out;
}

double loop_closure(const Eigen::MatrixXd& coords) {
  const auto n = coords.rows();
  if (n < 3) throw DataError("loop closure needs at least three samples");
  double steps = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) steps += (coords.row(i + 1) - coords.row(i)).norm();
  const double mean_step = steps / static_cast<double>(n - 1);
  if (!(mean_step > 0.0)) throw DataError("embedding does not move; loop closure undefined");
  return (coords.row(0) - coords.row(n - 1)).norm() / mean_step;
}

double loop_closure(const PcaEmbedding& embedding) { return loop_closure(embedding.coords); }

}  // namespace ipt
