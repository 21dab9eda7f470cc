// SPDX-FileCopyrightText: 2026 The pcxai Authors
// SPDX-License-Identifier: Apache-2.0

#include "pcxai/point_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "pcxai/error.hpp"

namespace pcxai {

double squared_distance(const Point3& a, const Point3& b) noexcept {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return dx * dx + dy * dy + dz * dz;
}

PointCloud::PointCloud(std::vector<Point3> points) : points_(std::move(points)) {
  if (points_.empty()) throw ValidationError("point cloud must hold at least one point");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
      throw ValidationError("point " + std::to_string(i) + " has a non-finite coordinate");
    }
  }
}

double PointCloud::bounding_diagonal() const noexcept { return pcxai::bounding_diagonal(points_); }

Point3 PointCloud::centroid() const noexcept {
  Point3 sum;
  for (const auto& p : points_) {
    sum.x += p.x;
    sum.y += p.y;
    sum.z += p.z;
  }
  const double n = static_cast<double>(points_.size());
  return {sum.x / n, sum.y / n, sum.z / n};
}

double bounding_diagonal(std::span<const Point3> points) noexcept {
  if (points.empty()) return 0.0;
  Point3 lo = points.front();
  Point3 hi = points.front();
  for (const auto& p : points) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  return std::sqrt(squared_distance(lo, hi));
}

std::size_t count_distinct(std::span<const Point3> points) {
  std::vector<Point3> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end());
  return static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

SegmentLabeling::SegmentLabeling(std::vector<int> labels, std::map<int, std::string> names)
    : labels_(std::move(labels)), names_(std::move(names)) {
  if (labels_.empty()) throw ValidationError("labeling must hold at least one label");
  std::set<int> ids;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] < 0) {
      throw ValidationError("label " + std::to_string(i) + " is negative (" +
                            std::to_string(labels_[i]) + ")");
    }
    ids.insert(labels_[i]);
  }
  ids_.assign(ids.begin(), ids.end());
}

SegmentLabeling::SegmentLabeling(const PointCloud& cloud, std::vector<int> labels,
                                 std::map<int, std::string> names)
    : SegmentLabeling(std::move(labels), std::move(names)) {
  check_matches(cloud);
}

bool SegmentLabeling::contains(int id) const {
  return std::binary_search(ids_.begin(), ids_.end(), id);
}

std::vector<std::size_t> SegmentLabeling::indices_of(int id) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == id) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> SegmentLabeling::indices_not_of(int id) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] != id) out.push_back(i);
  }
  return out;
}

std::string SegmentLabeling::part_name(int id) const {
  if (auto it = names_.find(id); it != names_.end() && !it->second.empty()) return it->second;
  return "segment_" + std::to_string(id);
}

void SegmentLabeling::check_matches(const PointCloud& cloud) const {
  if (labels_.size() != cloud.size()) {
    throw ValidationError("labeling has " + std::to_string(labels_.size()) +
                          " labels but the cloud has " + std::to_string(cloud.size()) + " points");
  }
}

CategoryMetadata::CategoryMetadata(std::string name_, int class_index_, int part_count_)
    : name(std::move(name_)), class_index(class_index_), part_count(part_count_) {
  if (part_count < 2 || part_count > 6) {
    throw ValidationError("category " + name + ": part count " + std::to_string(part_count) +
                          " outside [2, 6]");
  }
}

const std::vector<CategoryMetadata>& part_categories() {
  static const std::vector<CategoryMetadata> categories = {
      {"Airplane", 0, 4},  {"Bag", 1, 2},        {"Cap", 2, 2},      {"Car", 3, 4},
      {"Chair", 4, 4},     {"Earphone", 5, 3},   {"Guitar", 6, 3},   {"Knife", 7, 2},
      {"Lamp", 8, 4},      {"Laptop", 9, 2},     {"Motorbike", 10, 6}, {"Mug", 11, 2},
      {"Pistol", 12, 3},   {"Rocket", 13, 3},    {"Skateboard", 14, 3}, {"Table", 15, 3},
  };
  return categories;
}

std::string_view to_string(Mechanism m) noexcept {
  return m == Mechanism::Absence ? "absence" : "presence";
}

std::optional<Mechanism> parse_mechanism(std::string_view text) noexcept {
  if (text == "absence") return Mechanism::Absence;
  if (text == "presence") return Mechanism::Presence;
  return std::nullopt;
}

}  // namespace pcxai
