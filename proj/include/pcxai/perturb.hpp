// SPDX-FileCopyrightText: 2026 The pcxai Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "pcxai/point_cloud.hpp"

namespace pcxai {

enum class DestinationPolicy {
  RandomRetained,  // a uniformly chosen point of the retained structure
  Centroid,        // mean of the whole cloud
};

std::string_view to_string(DestinationPolicy policy) noexcept;
std::optional<DestinationPolicy> parse_destination(std::string_view text) noexcept;

struct PerturbationSpec {
  Mechanism mechanism = Mechanism::Absence;
  int segment = 0;
  DestinationPolicy destination = DestinationPolicy::RandomRetained;
  std::uint64_t seed = 0;
};

struct NoiseSpec {
  double percent = 5.0;  // (0, 100]
  std::uint64_t seed = 0;
};

// Throws EmptyRetainedSet for RandomRetained with no retained points.
Point3 select_destination(const PointCloud& cloud, std::span<const std::size_t> retained,
                          DestinationPolicy policy, std::uint64_t seed);

// Absence moves the segment onto a retained point; Presence keeps the
// segment and moves everything else onto one of its points. Count and
// order of points are preserved.
PointCloud shift_segment(const PointCloud& cloud, const SegmentLabeling& labeling,
                         const PerturbationSpec& spec);

// Largest per-coordinate displacement add_noise may apply.
double noise_bound(const PointCloud& cloud, double percent);

// Uniform per-coordinate displacement in [-p d / 2, p d / 2] with
// p = percent / 100 and d the bounding-box diagonal.
PointCloud add_noise(const PointCloud& cloud, const NoiseSpec& spec);

}  // namespace pcxai
