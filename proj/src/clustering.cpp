// SPDX-FileCopyrightText: 2026 The pcxai Authors
// SPDX-License-Identifier: Apache-2.0

#include "pcxai/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "pcxai/error.hpp"
#include "pcxai/random.hpp"

namespace pcxai {
namespace {

constexpr int kUnvisited = -2;

std::vector<std::size_t> region_query(std::span<const Point3> points, std::size_t i,
                                      double eps_sq) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < points.size(); ++j) {
    if (squared_distance(points[i], points[j]) <= eps_sq) out.push_back(j);
  }
  return out;
}

std::size_t nearest_centroid(const Point3& p, std::span<const Point3> centroids) {
  std::size_t best = 0;
  double best_d = squared_distance(p, centroids[0]);
  for (std::size_t c = 1; c < centroids.size(); ++c) {
    const double d = squared_distance(p, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

std::vector<Point3> kmeanspp_seeds(std::span<const Point3> points, int k, Rng& rng) {
  const std::size_t n = points.size();
  std::vector<Point3> seeds;
  seeds.reserve(static_cast<std::size_t>(k));
  seeds.push_back(points[uniform_index(rng, n)]);

  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(points[i], seeds[0]);

  while (seeds.size() < static_cast<std::size_t>(k)) {
    double total = 0.0;
    for (double d : d2) total += d;
    const double r = uniform01(rng) * total;
    std::size_t pick = n;
    double cumulative = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (d2[i] <= 0.0) continue;
      cumulative += d2[i];
      pick = i;
      if (cumulative > r) break;
    }
    seeds.push_back(points[pick]);
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(points[i], seeds.back()));
    }
  }
  return seeds;
}

// Returns true when any id changed.
bool assign(std::span<const Point3> points, std::span<const Point3> centroids,
            std::vector<int>& ids) {
  bool changed = false;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int c = static_cast<int>(nearest_centroid(points[i], centroids));
    if (c != ids[i]) {
      ids[i] = c;
      changed = true;
    }
  }
  return changed;
}

// Moves the farthest point (from its own centroid) of a multi-point cluster
// into each empty cluster.
void repair_empty(std::span<const Point3> points, std::vector<Point3>& centroids,
                  std::vector<int>& ids) {
  const std::size_t k = centroids.size();
  std::vector<std::size_t> counts(k, 0);
  for (int id : ids) ++counts[static_cast<std::size_t>(id)];
  for (std::size_t j = 0; j < k; ++j) {
    if (counts[j] != 0) continue;
    std::size_t far = points.size();
    double far_d = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto c = static_cast<std::size_t>(ids[i]);
      if (counts[c] < 2) continue;
      const double d = squared_distance(points[i], centroids[c]);
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    --counts[static_cast<std::size_t>(ids[far])];
    ids[far] = static_cast<int>(j);
    counts[j] = 1;
    centroids[j] = points[far];
  }
}

// Recomputes centroids as cluster means; returns the largest movement.
double update_centroids(std::span<const Point3> points, std::span<const int> ids,
                        std::vector<Point3>& centroids) {
  std::vector<Point3> sums(centroids.size());
  std::vector<std::size_t> counts(centroids.size(), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto& s = sums[static_cast<std::size_t>(ids[i])];
    s.x += points[i].x;
    s.y += points[i].y;
    s.z += points[i].z;
    ++counts[static_cast<std::size_t>(ids[i])];
  }
  double movement = 0.0;
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    if (counts[c] == 0) continue;
    const double n = static_cast<double>(counts[c]);
    const Point3 next{sums[c].x / n, sums[c].y / n, sums[c].z / n};
    movement = std::max(movement, std::sqrt(squared_distance(next, centroids[c])));
    centroids[c] = next;
  }
  return movement;
}

void renumber_by_first_occurrence(KmeansResult& result) {
  const std::size_t k = result.centroids.size();
  std::vector<int> remap(k, -1);
  int next = 0;
  for (int& id : result.assignment.ids) {
    auto& slot = remap[static_cast<std::size_t>(id)];
    if (slot < 0) slot = next++;
    id = slot;
  }
  std::vector<Point3> centroids(k);
  for (std::size_t c = 0; c < k; ++c) centroids[static_cast<std::size_t>(remap[c])] = result.centroids[c];
  result.centroids = std::move(centroids);
}

}  // namespace

ClusterAssignment dbscan(std::span<const Point3> points, const DbscanParams& params) {
  if (points.empty()) throw ValidationError("dbscan: empty point set");
  if (!(params.eps >= 0.0)) throw ValidationError("dbscan: eps must be >= 0");
  if (params.min_pts < 1) throw ValidationError("dbscan: min_pts must be >= 1");

  const double eps_sq = params.eps * params.eps;
  const auto min_pts = static_cast<std::size_t>(params.min_pts);
  ClusterAssignment out;
  out.ids.assign(points.size(), kUnvisited);

  for (std::size_t i = 0; i < points.size(); ++i) {
    if (out.ids[i] != kUnvisited) continue;
    auto seeds = region_query(points, i, eps_sq);
    if (seeds.size() < min_pts) {
      out.ids[i] = kNoise;
      continue;
    }
    const int cluster = out.cluster_count++;
    out.ids[i] = cluster;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const std::size_t q = seeds[s];
      if (out.ids[q] == kNoise) out.ids[q] = cluster;  // border point
      if (out.ids[q] != kUnvisited) continue;
      out.ids[q] = cluster;
      const auto neighbors = region_query(points, q, eps_sq);
      if (neighbors.size() >= min_pts) seeds.insert(seeds.end(), neighbors.begin(), neighbors.end());
    }
  }
  return out;
}

ClusterAssignment dbscan(const PointCloud& cloud, const DbscanParams& params) {
  return dbscan(cloud.points(), params);
}

int estimate_cluster_count(const ClusterAssignment& assignment) {
  std::set<int> ids;
  for (int id : assignment.ids) {
    if (id != kNoise) ids.insert(id);
  }
  return ids.empty() ? 1 : static_cast<int>(ids.size());
}

double inertia(std::span<const Point3> points, std::span<const int> ids,
               std::span<const Point3> centroids) {
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    total += squared_distance(points[i], centroids[static_cast<std::size_t>(ids[i])]);
  }
  return total;
}

KmeansResult kmeans(std::span<const Point3> points, const KmeansParams& params) {
  if (points.empty()) throw ValidationError("kmeans: empty point set");
  if (params.k < 1) throw ValidationError("kmeans: k must be >= 1");
  if (params.max_iters < 1) throw ValidationError("kmeans: max_iters must be >= 1");
  if (!(params.tol >= 0.0)) throw ValidationError("kmeans: tol must be >= 0");
  const std::size_t distinct = count_distinct(points);
  if (static_cast<std::size_t>(params.k) > distinct) {
    throw ValidationError("kmeans: k = " + std::to_string(params.k) + " exceeds the " +
                          std::to_string(distinct) + " distinct points");
  }

  Rng rng(params.seed);
  KmeansResult result;
  result.centroids = kmeanspp_seeds(points, params.k, rng);
  auto& ids = result.assignment.ids;
  ids.assign(points.size(), -1);
  assign(points, result.centroids, ids);
  result.inertia_history.push_back(inertia(points, ids, result.centroids));

  while (result.iterations < params.max_iters) {
    repair_empty(points, result.centroids, ids);
    const double movement = update_centroids(points, ids, result.centroids);
    ++result.iterations;
    const bool changed = assign(points, result.centroids, ids);
    result.inertia_history.push_back(inertia(points, ids, result.centroids));
    // A stable assignment means the centroids are already its means.
    if (!changed || movement <= params.tol) {
      if (changed) update_centroids(points, ids, result.centroids);
      result.converged = true;
      break;
    }
  }
  result.assignment.cluster_count = params.k;
  renumber_by_first_occurrence(result);
  return result;
}

KmeansResult kmeans(const PointCloud& cloud, const KmeansParams& params) {
  return kmeans(cloud.points(), params);
}

SegmentLabeling refine_segments(const PointCloud& cloud, const SegmentLabeling& labeling,
                                const RefineParams& params) {
  labeling.check_matches(cloud);
  if (!(params.eps_frac > 0.0)) throw ValidationError("refine: eps_frac must be > 0");
  if (params.min_pts < 1) throw ValidationError("refine: min_pts must be >= 1");

  std::vector<int> out(cloud.size(), -1);
  std::map<int, std::string> names;
  int next_id = 0;
  for (const int id : labeling.segment_ids()) {
    const auto members = labeling.indices_of(id);
    std::vector<Point3> pts;
    pts.reserve(members.size());
    for (auto i : members) pts.push_back(cloud[i]);

    const double diag = bounding_diagonal(pts);
    int clusters = 1;
    if (diag > 0.0) {
      clusters = estimate_cluster_count(dbscan(pts, {params.eps_frac * diag, params.min_pts}));
    }

    const bool named = labeling.names().contains(id);
    if (clusters == 1) {
      for (auto i : members) out[i] = next_id;
      if (named) names[next_id] = labeling.names().at(id);
      ++next_id;
      continue;
    }
    const auto result = kmeans(pts, {.k = clusters, .seed = derive_seed(params.seed,
                                                          static_cast<std::uint64_t>(id))});
    for (std::size_t m = 0; m < members.size(); ++m) {
      out[members[m]] = next_id + result.assignment.ids[m];
    }
    for (int j = 0; j < clusters; ++j) {
      names[next_id + j] = labeling.part_name(id) + "_" + std::to_string(j);
    }
    next_id += clusters;
  }
  return SegmentLabeling(cloud, std::move(out), std::move(names));
}

SegmentLabeling kmeans_labeling(const PointCloud& cloud, int k, std::uint64_t seed) {
  const auto result = kmeans(cloud, {.k = k, .seed = derive_seed(seed, static_cast<std::uint64_t>(k))});
  std::map<int, std::string> names;
  for (int j = 0; j < k; ++j) names[j] = "cluster_" + std::to_string(j);
  return SegmentLabeling(cloud, result.assignment.ids, std::move(names));
}

std::vector<SegmentLabeling> baseline_clusters(const PointCloud& cloud,
                                               std::span<const int> k_list, std::uint64_t seed) {
  std::vector<SegmentLabeling> out;
  out.reserve(k_list.size());
  for (int k : k_list) out.push_back(kmeans_labeling(cloud, k, seed));
  return out;
}

}  // namespace pcxai
