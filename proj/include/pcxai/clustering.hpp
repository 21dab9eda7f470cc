// SPDX-FileCopyrightText: 2026 The pcxai Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pcxai/point_cloud.hpp"

namespace pcxai {

inline constexpr int kNoise = -1;

// Cluster id per point. DBSCAN marks outliers with kNoise; every other id
// lies in [0, cluster_count).
struct ClusterAssignment {
  std::vector<int> ids;
  int cluster_count = 0;
};

struct DbscanParams {
  double eps = 0.0;  // neighborhood radius, inclusive
  int min_pts = 4;   // neighbor count (self included) that makes a core point
};

struct KmeansParams {
  int k = 1;
  int max_iters = 100;
  double tol = 1e-9;  // max centroid movement that counts as converged
  std::uint64_t seed = 0;
};

struct KmeansResult {
  ClusterAssignment assignment;
  std::vector<Point3> centroids;
  // Inertia after each assignment step, in iteration order.
  std::vector<double> inertia_history;
  int iterations = 0;
  bool converged = false;
};

// Clusters are numbered in discovery order while scanning points by index.
ClusterAssignment dbscan(std::span<const Point3> points, const DbscanParams& params);
ClusterAssignment dbscan(const PointCloud& cloud, const DbscanParams& params);

// Distinct non-noise clusters; 1 when everything is noise.
int estimate_cluster_count(const ClusterAssignment& assignment);

// Lloyd iterations from kmeans++ seeding. Cluster ids are renumbered by first
// occurrence in point order. Requires k <= number of distinct points.
KmeansResult kmeans(std::span<const Point3> points, const KmeansParams& params);
KmeansResult kmeans(const PointCloud& cloud, const KmeansParams& params);

double inertia(std::span<const Point3> points, std::span<const int> ids,
               std::span<const Point3> centroids);

struct RefineParams {
  double eps_frac = 0.15;
  int min_pts = 4;
  std::uint64_t seed = 0;
};

// Splits every segment into spatial instances: DBSCAN estimates the instance
// count, KMeans produces exactly that many clusters. New ids are assigned in
// (original id, sub-cluster) order; split parts are named "<part>_<j>".
SegmentLabeling refine_segments(const PointCloud& cloud, const SegmentLabeling& labeling,
                                const RefineParams& params = {});

// One whole-cloud KMeans labeling per requested cluster count.
std::vector<SegmentLabeling> baseline_clusters(const PointCloud& cloud,
                                               std::span<const int> k_list, std::uint64_t seed);
SegmentLabeling kmeans_labeling(const PointCloud& cloud, int k, std::uint64_t seed);

}  // namespace pcxai
