// SPDX-FileCopyrightText: 2026 The pcxai Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pcxai/classifier.hpp"
#include "pcxai/perturb.hpp"
#include "pcxai/point_cloud.hpp"
#include "pcxai/saliency_map.hpp"

namespace pcxai {

// |P(a) - P(a')|: score drop when the segment is shifted away.
double attribution_absence(double p_original, double p_perturbed);
// -|P(a) - P(a'')|: closest to 0 for the segment that alone best
// reproduces the full score.
double attribution_presence(double p_original, double p_retained_only);
double attribution(Mechanism mechanism, double p_original, double p_perturbed);

struct LabelFile {
  SegmentLabeling labeling;
};
struct Refined {
  SegmentLabeling base;
  double eps_frac = 0.15;
  int min_pts = 4;
};
struct BaselineKmeans {
  int k = 3;
};
using LabelingSource = std::variant<LabelFile, Refined, BaselineKmeans>;

SegmentLabeling resolve_labeling(const PointCloud& cloud, const LabelingSource& source,
                                 std::uint64_t seed);

// Seed of the destination draw for one segment of an explanation.
std::uint64_t segment_seed(std::uint64_t seed, int segment);

struct ExplainRequest {
  PointCloud cloud;
  LabelingSource source;
  Mechanism mechanism = Mechanism::Absence;
  DestinationPolicy destination = DestinationPolicy::RandomRetained;
  std::optional<int> target;  // default: argmax on the unperturbed cloud
  ClassifierHandle classifier;
  std::uint64_t seed = 0;
  int jobs = 1;  // worker cap; only used when the classifier allows concurrency
};

struct Explanation {
  SaliencyMap map;
  SegmentLabeling labeling;
  ScoreVector original_scores;
};

// One classifier call for the original cloud plus one per segment.
// A segment whose perturbation has no retained points is recorded in
// map.errors() instead of aborting.
Explanation explain(const ExplainRequest& request);

// Spearman rank correlation with average ranks for ties. When a side is
// all-tied (including a single element) the result is 1 if both are, else 0.
double spearman(std::span<const double> a, std::span<const double> b);

struct SweepEntry {
  std::string config;
  PointCloud cloud;  // the cloud that was explained
  Explanation explanation;
};

struct SweepComparison {
  std::size_t first = 0;
  std::size_t second = 0;
  // Same labeling and the same attributed segments in both maps.
  bool matched = false;
  std::optional<double> rank_correlation;  // matched only
  std::optional<double> max_abs_delta;     // matched only
  // Matched: same top segment id. Otherwise: the two top segments overlap
  // with point-set IoU >= 0.5.
  bool top1_agree = false;
};

struct SweepReport {
  std::vector<SweepEntry> entries;
  std::vector<SweepComparison> comparisons;

  // Rows `config,segment_id,attribution`.
  std::string to_csv() const;
  std::string summary() const;
};

SweepComparison compare_explanations(const Explanation& a, const Explanation& b);

struct SweepOptions {
  DestinationPolicy destination = DestinationPolicy::RandomRetained;
  std::optional<int> target;
  int jobs = 1;
};

// Whole-cloud KMeans labelings, one explanation per cluster count, all pairs compared.
SweepReport sweep_baseline(const PointCloud& cloud, std::span<const int> k_list,
                           Mechanism mechanism, const ClassifierHandle& classifier,
                           std::uint64_t seed, const SweepOptions& options = {});

// Clean cloud first, then one noisy variant per percent, each compared with
// the clean explanation. The target class is fixed from the clean cloud.
SweepReport sweep_noise(const PointCloud& cloud, const SegmentLabeling& labeling,
                        std::span<const double> percents, Mechanism mechanism,
                        const ClassifierHandle& classifier, std::uint64_t seed,
                        const SweepOptions& options = {});

struct InvarianceResult {
  bool equal = true;
  double max_deviation = 0.0;
  int trials = 0;
};

// Shifts one segment onto `trials` random retained destinations and compares
// every full score vector pairwise.
InvarianceResult destination_invariance_check(const PointCloud& cloud,
                                              const SegmentLabeling& labeling, int segment,
                                              const Classifier& classifier, int trials,
                                              std::uint64_t seed,
                                              Mechanism mechanism = Mechanism::Absence);

// Largest per-class score difference between the centroid destination and a
// random retained destination for the same segment.
double centroid_deviation(const PointCloud& cloud, const SegmentLabeling& labeling, int segment,
                          const Classifier& classifier, std::uint64_t seed,
                          Mechanism mechanism = Mechanism::Absence);

}  // namespace pcxai
