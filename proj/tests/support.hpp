// SPDX-FileCopyrightText: 2026 The pcxai Authors
// SPDX-License-Identifier: Apache-2.0

// Brute-force oracles and test doubles shared by the unit tests and the
// acceptance binary. Nothing here calls the code paths it checks.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "pcxai/classifier.hpp"
#include "pcxai/clustering.hpp"
#include "pcxai/perturb.hpp"
#include "pcxai/point_cloud.hpp"
#include "pcxai/random.hpp"
#include "pcxai/saliency.hpp"

namespace pcxai::test {

inline std::vector<Point3> random_points(Rng& rng, std::size_t n, double spread = 1.0) {
  std::vector<Point3> pts(n);
  for (auto& p : pts) {
    p = {uniform(rng, -spread, spread), uniform(rng, -spread, spread), uniform(rng, -spread, spread)};
  }
  return pts;
}

// Gaussian blobs so DBSCAN instances have real structure, plus a few outliers.
inline std::vector<Point3> blob_points(Rng& rng, std::size_t n) {
  const int blobs = 1 + static_cast<int>(uniform_index(rng, 4));
  std::vector<Point3> centers;
  for (int b = 0; b < blobs; ++b) {
    centers.push_back({uniform(rng, -3, 3), uniform(rng, -3, 3), uniform(rng, -3, 3)});
  }
  std::vector<Point3> pts(n);
  for (auto& p : pts) {
    if (uniform01(rng) < 0.1) {
      p = {uniform(rng, -4, 4), uniform(rng, -4, 4), uniform(rng, -4, 4)};
      continue;
    }
    const auto& c = centers[uniform_index(rng, centers.size())];
    const double s = 0.3;
    p = {c.x + s * standard_normal(rng), c.y + s * standard_normal(rng),
         c.z + s * standard_normal(rng)};
  }
  return pts;
}

// O(n^2) density reachability: core points joined by union-find, clusters
// ranked by their smallest core index, border points attached to the
// earliest-ranked cluster among their core neighbors.
inline std::vector<int> dbscan_oracle(const std::vector<Point3>& pts, double eps, int min_pts) {
  const std::size_t n = pts.size();
  auto near = [&](std::size_t i, std::size_t j) {
    const double dx = pts[i].x - pts[j].x, dy = pts[i].y - pts[j].y, dz = pts[i].z - pts[j].z;
    return dx * dx + dy * dy + dz * dz <= eps * eps;
  };
  std::vector<bool> core(n);
  for (std::size_t i = 0; i < n; ++i) {
    int count = 0;
    for (std::size_t j = 0; j < n; ++j) count += near(i, j) ? 1 : 0;
    core[i] = count >= min_pts;
  }
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (core[i] && core[j] && near(i, j)) parent[find(i)] = find(j);
    }
  }
  std::map<std::size_t, std::size_t> min_core;  // root -> smallest core index
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i]) continue;
    auto [it, fresh] = min_core.try_emplace(find(i), i);
    if (!fresh) it->second = std::min(it->second, i);
  }
  std::vector<std::size_t> order;
  for (auto& [root, first] : min_core) order.push_back(first);
  std::sort(order.begin(), order.end());
  std::map<std::size_t, int> rank;
  for (std::size_t r = 0; r < order.size(); ++r) rank[find(order[r])] = static_cast<int>(r);

  std::vector<int> ids(n, kNoise);
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) {
      ids[i] = rank[find(i)];
      continue;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (core[j] && near(i, j)) {
        const int r = rank[find(j)];
        if (ids[i] == kNoise || r < ids[i]) ids[i] = r;
      }
    }
  }
  return ids;
}

// Equal up to a bijective renaming of non-noise ids; noise must match exactly.
inline bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::map<int, int> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] == kNoise) != (b[i] == kNoise)) return false;
    if (a[i] == kNoise) continue;
    auto [x, fx] = ab.try_emplace(a[i], b[i]);
    auto [y, fy] = ba.try_emplace(b[i], a[i]);
    if (x->second != b[i] || y->second != a[i]) return false;
  }
  return true;
}

// Smallest inertia over every split of the points into two non-empty groups.
struct TwoPartition {
  std::vector<int> ids;
  double inertia;
};

inline TwoPartition best_two_partition(const std::vector<Point3>& pts) {
  const std::size_t n = pts.size();
  TwoPartition best{{}, INFINITY};
  for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << n); ++mask) {
    double sum[2][3] = {};
    int count[2] = {};
    for (std::size_t i = 0; i < n; ++i) {
      const int g = (mask >> i) & 1;
      sum[g][0] += pts[i].x;
      sum[g][1] += pts[i].y;
      sum[g][2] += pts[i].z;
      ++count[g];
    }
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const int g = (mask >> i) & 1;
      const double dx = pts[i].x - sum[g][0] / count[g];
      const double dy = pts[i].y - sum[g][1] / count[g];
      const double dz = pts[i].z - sum[g][2] / count[g];
      total += dx * dx + dy * dy + dz * dz;
    }
    if (total < best.inertia) {
      best.inertia = total;
      best.ids.assign(n, 0);
      for (std::size_t i = 0; i < n; ++i) best.ids[i] = static_cast<int>((mask >> i) & 1);
    }
  }
  return best;
}

// Deterministic classifier whose scores depend on every coordinate, so any
// change in where points land changes the output.
class WavyClassifier : public Classifier {
 public:
  explicit WavyClassifier(int classes) : classes_(classes) {}

  ScoreVector predict(const PointCloud& cloud) const override {
    calls_.fetch_add(1);
    std::vector<double> logits(static_cast<std::size_t>(classes_), 0.0);
    for (const auto& p : cloud) {
      for (int c = 0; c < classes_; ++c) {
        logits[static_cast<std::size_t>(c)] +=
            std::sin((c + 1) * (0.7 * p.x + 1.3 * p.y + 2.1 * p.z) + c);
      }
    }
    for (auto& l : logits) l = 3.0 * l / static_cast<double>(cloud.size());
    return softmax(logits);
  }
  int class_count() const override { return classes_; }
  int calls() const { return calls_.load(); }

 private:
  int classes_;
  mutable std::atomic<int> calls_{0};
};

// Returns a fixed score for the target class 0 depending on which segment of
// a reference labeling has moved: `original` when nothing moved,
// `removed[id]` when exactly segment id moved.
class ScriptedClassifier : public Classifier {
 public:
  ScriptedClassifier(PointCloud reference, SegmentLabeling labeling, double original,
                     std::map<int, double> removed)
      : reference_(std::move(reference)),
        labeling_(std::move(labeling)),
        original_(original),
        removed_(std::move(removed)) {}

  ScoreVector predict(const PointCloud& cloud) const override {
    calls_.fetch_add(1);
    std::set<int> moved;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      if (!(cloud[i] == reference_[i])) moved.insert(labeling_.labels()[i]);
    }
    double p = original_;
    if (moved.size() == 1) p = removed_.at(*moved.begin());
    return ScoreVector({p, 1.0 - p});
  }
  int class_count() const override { return 2; }
  int calls() const { return calls_.load(); }

 private:
  PointCloud reference_;
  SegmentLabeling labeling_;
  double original_;
  std::map<int, double> removed_;
  mutable std::atomic<int> calls_{0};
};

// Loop + formula: one explicit perturbation per segment, destination drawn
// with the documented per-segment seed.
struct OracleMap {
  int target = 0;
  std::map<int, double> values;
  std::set<int> errors;
};

inline OracleMap explain_oracle(const PointCloud& cloud, const std::vector<int>& labels,
                                Mechanism mechanism, const Classifier& classifier,
                                std::uint64_t seed) {
  OracleMap out;
  const ScoreVector base = classifier.predict(cloud);
  out.target = 0;
  for (std::size_t c = 1; c < base.size(); ++c) {
    if (base[c] > base[static_cast<std::size_t>(out.target)]) out.target = static_cast<int>(c);
  }
  const double p0 = base[static_cast<std::size_t>(out.target)];
  const std::set<int> ids(labels.begin(), labels.end());
  for (int id : ids) {
    std::vector<std::size_t> inside, outside;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      (labels[i] == id ? inside : outside).push_back(i);
    }
    const bool absence = mechanism == Mechanism::Absence;
    const auto& retained = absence ? outside : inside;
    const auto& moved = absence ? inside : outside;
    if (retained.empty()) {
      out.errors.insert(id);
      continue;
    }
    const Point3 dest = select_destination(cloud, retained, DestinationPolicy::RandomRetained,
                                           segment_seed(seed, id));
    std::vector<Point3> pts(cloud.begin(), cloud.end());
    for (std::size_t i : moved) pts[i] = dest;
    const double p = classifier.predict(PointCloud(std::move(pts)))[static_cast<std::size_t>(out.target)];
    out.values[id] = absence ? std::fabs(p0 - p) : -std::fabs(p0 - p);
  }
  return out;
}

// Plain binary logistic regression by gradient descent, used to confirm a
// dataset is linearly separable independently of the trainer under test.
inline double logistic_regression_accuracy(const std::vector<std::vector<double>>& x,
                                           const std::vector<int>& y, int epochs, double lr) {
  const std::size_t d = x.front().size();
  std::vector<double> w(d, 0.0);
  double b = 0.0;
  for (int e = 0; e < epochs; ++e) {
    std::vector<double> gw(d, 0.0);
    double gb = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double z = b;
      for (std::size_t j = 0; j < d; ++j) z += w[j] * x[i][j];
      const double g = 1.0 / (1.0 + std::exp(-z)) - y[i];
      for (std::size_t j = 0; j < d; ++j) gw[j] += g * x[i][j];
      gb += g;
    }
    for (std::size_t j = 0; j < d; ++j) w[j] -= lr * gw[j] / static_cast<double>(x.size());
    b -= lr * gb / static_cast<double>(x.size());
  }
  int correct = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double z = b;
    for (std::size_t j = 0; j < d; ++j) z += w[j] * x[i][j];
    correct += ((z > 0) == (y[i] == 1)) ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(x.size());
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("pcxai_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace pcxai::test
