#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ipt/records.hpp"

namespace ipt {

/// Classification score of one class against a swept factor value.
struct SweepCurve {
  std::string factor_name;
  std::vector<double> xs;  // strictly increasing
  std::vector<double> ys;
  int class_id = 0;
  std::string label_name;
  std::string appearance_id;
  std::string model;
  std::string series;

  /// Throws DataError unless xs is strictly increasing, |xs| == |ys| and ys is
  /// finite.
  void validate() const;
};

/// Builds the curve of `class_id` from sweep records sharing one factor.
/// Failed records leave a gap; a repeated factor value is a DataError.
SweepCurve build_curve(const std::vector<PredictionRecord>& records, int class_id);

struct CurveStats {
  std::vector<double> peaks;
  std::vector<double> valleys;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

/// Centred moving average; wraps around when `circular`, otherwise the window
/// is truncated at the ends.
std::vector<double> moving_average(const std::vector<double>& ys, std::size_t window, bool circular);

/// Strict local extrema of the smoothed curve. Curves over azimuth wrap
/// around; on other factors an end point counts when it beats its single
/// neighbour. Range and mean are of the raw ys.
CurveStats curve_stats(const SweepCurve& curve, std::size_t smoothing_window = 5);

inline constexpr std::size_t kDefaultSmoothingWindow = 5;

struct PcaEmbedding {
  Eigen::MatrixXd components;  // d x m, rows orthonormal
  Eigen::VectorXd explained_variance;
  Eigen::MatrixXd coords;  // n x d
  Eigen::VectorXd mean;
  bool rank_deficient = false;  // fewer than the requested d components returned
};

/// Principal components via SVD of the mean-centred n x m sample matrix.
/// Each component's largest-magnitude entry is made non-negative.
/// Requires n >= 2 and 1 <= d <= min(n - 1, m).
PcaEmbedding pca(const Eigen::MatrixXd& samples, std::size_t d = 3);

/// Distance from the last embedded sample back to the first, relative to the
/// mean step between consecutive samples. About 1 for a closed loop.
double loop_closure(const PcaEmbedding& embedding);
double loop_closure(const Eigen::MatrixXd& coords);

}  // namespace ipt
