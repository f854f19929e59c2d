#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance run.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "ipt/metrics.hpp"

namespace oracle {

using ipt::ClassMetrics;
using ipt::Condition;
using ipt::PerClassMetrics;
using ipt::PredictionRecord;
using ipt::ScoreVector;

// Plain 4x4 homogeneous matrices, independent of the library's Eigen path.
using M4 = std::array<std::array<double, 4>, 4>;

inline M4 identity() {
  M4 m{};
  for (int i = 0; i < 4; ++i) m[i][i] = 1;
  return m;
}

inline M4 mul(const M4& a, const M4& b) {
  M4 c{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline M4 translate(double x, double y, double z) {
  M4 m = identity();
  m[0][3] = x;
  m[1][3] = y;
  m[2][3] = z;
  return m;
}

inline M4 rot(char axis, double deg) {
  const double r = deg * std::numbers::pi / 180.0;
  const double c = std::cos(r), s = std::sin(r);
  M4 m = identity();
  int a = 0, b = 0;
  if (axis == 'X') a = 1, b = 2;
  if (axis == 'Y') a = 2, b = 0;
  if (axis == 'Z') a = 0, b = 1;
  m[a][a] = c;
  m[a][b] = -s;
  m[b][a] = s;
  m[b][b] = c;
  return m;
}

// The five_joint.bvh literals.
struct OracleJoint {
  const char* name;
  int parent;
  std::array<double, 3> offset;
  const char* channels;  // e.g. "pXYZ rZXY": position axes then rotation axes
};

inline const std::array<OracleJoint, 7> kFive = {{
    {"Root", -1, {1.0, 2.0, 3.0}, "pXYZ rZXY"},
    {"Spine", 0, {0.0, 5.0, 0.5}, "rXYZ"},
    {"Arm", 1, {3.0, 1.0, -0.25}, "rYZX"},
    {"Hand", 2, {2.5, 0.0, 0.0}, "pXYZ rZYX"},
    {"Hand_end", 3, {0.75, 0.0, 0.0}, ""},
    {"Leg", 0, {-1.0, -4.0, 0.0}, "rZYX"},
    {"Leg_end", 5, {0.0, -4.0, 0.5}, ""},
}};

inline const std::array<std::array<double, 21>, 3> kRows = {{
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {0.5, -1.25, 2, 30, -15, 45, 10, 20, -30, -60, 15, 5, 0.1, 0.2, -0.3, 12, -7, 33, 25, -40, 8},
    {-3, 4, 0.75, -170, 89, 181, -45, 60, 75, 120, -10, -95, -0.5, 0, 1, 270, -135, 15, -5, 10, -20},
}};

inline std::vector<std::array<double, 3>> oracle_positions(std::size_t frame) {
  std::vector<M4> world(kFive.size());
  std::vector<std::array<double, 3>> out;
  std::size_t col = 0;
  for (std::size_t j = 0; j < kFive.size(); ++j) {
    const auto& oj = kFive[j];
    std::array<double, 3> t = oj.offset;
    std::vector<std::pair<char, double>> rots;
    const std::string ch = oj.channels;
    bool pos = false;
    for (char c : ch) {
      if (c == 'p') pos = true;
      else if (c == 'r') pos = false;
      else if (c == 'X' || c == 'Y' || c == 'Z') {
        const double v = kRows[frame][col++];
        if (pos) t[static_cast<std::size_t>(c - 'X')] += v;
        else rots.emplace_back(c, v);
      }
    }
    M4 local = translate(t[0], t[1], t[2]);
    for (auto [axis, deg] : rots) local = mul(local, rot(axis, deg));
    world[j] = oj.parent < 0 ? local : mul(world[static_cast<std::size_t>(oj.parent)], local);
    out.push_back({world[j][0][3], world[j][1][3], world[j][2][3]});
  }
  return out;
}

// Cyclic Jacobi eigendecomposition of a symmetric matrix, plain loops.
inline void jacobi_eigen(std::vector<std::vector<double>> a, std::vector<double>& values,
                  std::vector<std::vector<double>>& vectors) {
  const std::size_t n = a.size();
  vectors.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) vectors[i][i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        const double t = (theta >= 0 ? 1 : -1) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = vectors[k][p], vkq = vectors[k][q];
          vectors[k][p] = c * vkp - s * vkq;
          vectors[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  values.resize(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = a[i][i];
}

inline PredictionRecord make_record(std::string id, int label, ScoreVector scores, Condition c) {
  PredictionRecord r;
  r.video_id = std::move(id);
  r.true_label = label;
  r.scores = std::move(scores);
  r.condition = std::move(c);
  return r;
}

// Scores drawn from a few levels so ties are common.
inline ScoreVector random_scores(std::mt19937_64& rng, std::size_t n) {
  ScoreVector s(n);
  for (auto& x : s) x = static_cast<double>(rng() % 5) / 4.0;
  return s;
}

inline std::vector<PredictionRecord> random_semantic_records(std::mt19937_64& rng, std::size_t n, int classes) {
  std::vector<PredictionRecord> out;
  const Condition conds[] = {Condition::original(), Condition::foreground(), Condition::background(),
                             Condition::sweep("azimuth", 90, "s")};
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(rng() % static_cast<std::uint64_t>(classes));
    auto r = make_record("v" + std::to_string(rng() % 100000) + "_" + std::to_string(i), label,
                 random_scores(rng, static_cast<std::size_t>(classes)), conds[rng() % 4]);
    r.label_name = "class" + std::to_string(label);
    if (rng() % 25 == 0) {
      r.error = "timeout";
      r.scores.clear();
    }
    out.push_back(std::move(r));
  }
  // Every class needs all three conditions.
  for (int c = 0; c < classes; ++c) {
    for (int k = 0; k < 3; ++k) {
      auto r = make_record("pad" + std::to_string(c) + std::to_string(k), c, random_scores(rng, static_cast<std::size_t>(classes)), conds[k]);
      r.label_name = "class" + std::to_string(c);
      out.push_back(std::move(r));
    }
  }
  return out;
}

inline PerClassMetrics brute_force(const std::vector<PredictionRecord>& records, int classes) {
  PerClassMetrics out;
  for (int c = 0; c < classes; ++c) {
    double hits[3] = {0, 0, 0}, n[3] = {0, 0, 0};
    for (const auto& r : records) {
      if (r.true_label != c || !r.error.empty()) continue;
      int k = 0;
      if (r.condition.kind == Condition::Kind::foreground) k = 1;
      if (r.condition.kind == Condition::Kind::background) k = 2;
      n[k] += 1;
      const auto best = std::max_element(r.scores.begin(), r.scores.end()) - r.scores.begin();
      if (best == c) hits[k] += 1;
    }
    ClassMetrics m;
    m.class_id = c;
    m.label_name = "class" + std::to_string(c);
    m.acc_o = hits[0] / n[0];
    m.acc_f = hits[1] / n[1];
    m.acc_b = hits[2] / n[2];
    m.n_videos = static_cast<std::size_t>(n[0]);
    if (m.acc_o == 0) {
      out.excluded.push_back(c);
      continue;
    }
    m.cr_f = (m.acc_o - m.acc_f) / m.acc_o;
    m.cr_b = (m.acc_o - m.acc_b) / m.acc_o;
    out.classes.push_back(m);
  }
  std::sort(out.classes.begin(), out.classes.end(), [](const auto& a, const auto& b) {
    return a.cr_f != b.cr_f ? a.cr_f < b.cr_f : a.class_id < b.class_id;
  });
  return out;
}

}  // namespace oracle
