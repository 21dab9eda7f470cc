// SPDX-FileCopyrightText: 2026 The pcxai Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pcxai {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Point3&, const Point3&) = default;
  friend auto operator<=>(const Point3&, const Point3&) = default;
};

double squared_distance(const Point3& a, const Point3& b) noexcept;

// Ordered, non-empty list of finite points. Immutable after construction;
// operations that perturb a cloud return a new one with the same order.
class PointCloud {
 public:
  explicit PointCloud(std::vector<Point3> points);

  std::size_t size() const noexcept { return points_.size(); }
  const Point3& operator[](std::size_t i) const { return points_[i]; }
  std::span<const Point3> points() const noexcept { return points_; }
  auto begin() const noexcept { return points_.begin(); }
  auto end() const noexcept { return points_.end(); }

  // Axis-aligned bounding-box diagonal length.
  double bounding_diagonal() const noexcept;
  Point3 centroid() const noexcept;

  friend bool operator==(const PointCloud&, const PointCloud&) = default;

 private:
  std::vector<Point3> points_;
};

double bounding_diagonal(std::span<const Point3> points) noexcept;
std::size_t count_distinct(std::span<const Point3> points);

// Per-point segment ids plus an optional part-name table.
// Segment x is the index set {i : labels[i] == x}.
class SegmentLabeling {
 public:
  SegmentLabeling(std::vector<int> labels, std::map<int, std::string> names = {});

  // Also checks that the labeling annotates `cloud` (same length).
  SegmentLabeling(const PointCloud& cloud, std::vector<int> labels,
                  std::map<int, std::string> names = {});

  std::size_t size() const noexcept { return labels_.size(); }
  int operator[](std::size_t i) const { return labels_[i]; }
  std::span<const int> labels() const noexcept { return labels_; }
  const std::map<int, std::string>& names() const noexcept { return names_; }

  // Distinct ids, ascending.
  const std::vector<int>& segment_ids() const noexcept { return ids_; }
  bool contains(int id) const;
  std::vector<std::size_t> indices_of(int id) const;
  std::vector<std::size_t> indices_not_of(int id) const;

  // Registered name, or "segment_<id>".
  std::string part_name(int id) const;

  void check_matches(const PointCloud& cloud) const;

  friend bool operator==(const SegmentLabeling& a, const SegmentLabeling& b) {
    return a.labels_ == b.labels_ && a.names_ == b.names_;
  }

 private:
  std::vector<int> labels_;
  std::map<int, std::string> names_;
  std::vector<int> ids_;
};

struct CategoryMetadata {
  CategoryMetadata(std::string name, int class_index, int part_count);

  std::string name;
  int class_index;
  int part_count;
};

// The 16 part-annotated object categories (2 to 6 parts each).
const std::vector<CategoryMetadata>& part_categories();

enum class Mechanism { Absence, Presence };

std::string_view to_string(Mechanism m) noexcept;
std::optional<Mechanism> parse_mechanism(std::string_view text) noexcept;

}  // namespace pcxai
