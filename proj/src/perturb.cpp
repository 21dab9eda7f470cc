// SPDX-FileCopyrightText: 2026 The pcxai Authors
// SPDX-License-Identifier: Apache-2.0

#include "pcxai/perturb.hpp"

#include <cmath>
#include <vector>

#include "pcxai/error.hpp"
#include "pcxai/random.hpp"

namespace pcxai {

std::string_view to_string(DestinationPolicy policy) noexcept {
  return policy == DestinationPolicy::RandomRetained ? "random" : "centroid";
}

std::optional<DestinationPolicy> parse_destination(std::string_view text) noexcept {
  if (text == "random") return DestinationPolicy::RandomRetained;
  if (text == "centroid") return DestinationPolicy::Centroid;
  return std::nullopt;
}

Point3 select_destination(const PointCloud& cloud, std::span<const std::size_t> retained,
                          DestinationPolicy policy, std::uint64_t seed) {
  if (policy == DestinationPolicy::Centroid) return cloud.centroid();
  if (retained.empty()) throw EmptyRetainedSet("no retained points to shift onto");
  Rng rng(seed);
  const std::size_t pick = retained[uniform_index(rng, retained.size())];
  if (pick >= cloud.size()) throw ValidationError("retained index out of range");
  return cloud[pick];
}

PointCloud shift_segment(const PointCloud& cloud, const SegmentLabeling& labeling,
                         const PerturbationSpec& spec) {
  labeling.check_matches(cloud);
  const auto members = labeling.indices_of(spec.segment);
  if (members.empty()) {
    throw EmptySegment("segment " + std::to_string(spec.segment) + " has no points");
  }
  auto others = labeling.indices_not_of(spec.segment);

  const bool absence = spec.mechanism == Mechanism::Absence;
  if (absence && others.empty()) {
    throw EmptyRetainedSet("segment " + std::to_string(spec.segment) +
                           " covers the whole cloud; nothing is retained");
  }
  const auto& moved = absence ? members : others;
  const auto& retained = absence ? others : members;
  if (moved.empty()) return cloud;

  const Point3 dest = select_destination(cloud, retained, spec.destination, spec.seed);
  std::vector<Point3> points(cloud.begin(), cloud.end());
  for (auto i : moved) points[i] = dest;
  return PointCloud(std::move(points));
}

double noise_bound(const PointCloud& cloud, double percent) {
  return percent / 100.0 * cloud.bounding_diagonal() / 2.0;
}

PointCloud add_noise(const PointCloud& cloud, const NoiseSpec& spec) {
  if (!(spec.percent > 0.0 && spec.percent <= 100.0)) {
    throw ValidationError("noise percent must lie in (0, 100]");
  }
  const double bound = noise_bound(cloud, spec.percent);
  Rng rng(spec.seed);
  // Rounding in x + u can overshoot the bound by an ulp; step back toward x.
  const auto displace = [&](double x) {
    double y = x + uniform(rng, -bound, bound);
    while (std::abs(y - x) > bound) y = std::nextafter(y, x);
    return y;
  };
  std::vector<Point3> points;
  points.reserve(cloud.size());
  for (const auto& p : cloud) {
    const double x = displace(p.x);
    const double y = displace(p.y);
    const double z = displace(p.z);
    points.push_back({x, y, z});
  }
  return PointCloud(std::move(points));
}

}  // namespace pcxai
