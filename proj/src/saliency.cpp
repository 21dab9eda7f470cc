// SPDX-FileCopyrightText: 2026 The pcxai Authors
// SPDX-License-Identifier: Apache-2.0

#include "pcxai/saliency.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <mutex>
#include <numeric>
#include <ranges>
#include <set>
#include <thread>

#include "pcxai/clustering.hpp"
#include "pcxai/error.hpp"
#include "pcxai/io.hpp"
#include "pcxai/random.hpp"

namespace pcxai {

double attribution_absence(double p_original, double p_perturbed) {
  return std::abs(p_original - p_perturbed);
}

double attribution_presence(double p_original, double p_retained_only) {
  return -std::abs(p_original - p_retained_only);
}

double attribution(Mechanism mechanism, double p_original, double p_perturbed) {
  return mechanism == Mechanism::Absence ? attribution_absence(p_original, p_perturbed)
                                         : attribution_presence(p_original, p_perturbed);
}

SegmentLabeling resolve_labeling(const PointCloud& cloud, const LabelingSource& source,
                                 std::uint64_t seed) {
  struct Visitor {
    const PointCloud& cloud;
    std::uint64_t seed;
    SegmentLabeling operator()(const LabelFile& s) const {
      s.labeling.check_matches(cloud);
      return s.labeling;
    }
    SegmentLabeling operator()(const Refined& s) const {
      return refine_segments(cloud, s.base, {s.eps_frac, s.min_pts, seed});
    }
    SegmentLabeling operator()(const BaselineKmeans& s) const {
      return kmeans_labeling(cloud, s.k, seed);
    }
  };
  return std::visit(Visitor{cloud, seed}, source);
}

std::uint64_t segment_seed(std::uint64_t seed, int segment) {
  return derive_seed(seed, static_cast<std::uint64_t>(segment));
}

namespace {

struct SegmentOutcome {
  std::optional<double> value;
  std::string error;
};

// Runs fn(i) for i in [0, n) on up to `jobs` threads.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(std::clamp(jobs, 1, 64));
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, n); ++w) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

Explanation explain(const ExplainRequest& request) {
  if (!request.classifier) throw ValidationError("explain: no classifier");
  const Classifier& classifier = *request.classifier;
  const PointCloud& cloud = request.cloud;

  const ScoreVector original = classifier.predict(cloud);
  const int target = request.target.value_or(original.argmax());
  const double p_original = target_score(original, target);

  SegmentLabeling labeling = resolve_labeling(cloud, request.source, request.seed);
  const auto& ids = labeling.segment_ids();

  std::vector<SegmentOutcome> outcomes(ids.size());
  const int jobs = classifier.concurrent() ? request.jobs : 1;
  parallel_for(ids.size(), jobs, [&](std::size_t s) {
    const PerturbationSpec spec{request.mechanism, ids[s], request.destination,
                                segment_seed(request.seed, ids[s])};
    try {
      const PointCloud perturbed = shift_segment(cloud, labeling, spec);
      const double p = target_score(classifier.predict(perturbed), target);
      outcomes[s].value = attribution(request.mechanism, p_original, p);
    } catch (const EmptyRetainedSet& e) {
      outcomes[s].error = std::string("EmptyRetainedSet: ") + e.what();
    }
  });

  std::map<int, double> per_segment;
  std::map<int, std::string> errors;
  for (std::size_t s = 0; s < ids.size(); ++s) {
    if (outcomes[s].value) {
      per_segment[ids[s]] = *outcomes[s].value;
    } else {
      errors[ids[s]] = outcomes[s].error;
    }
  }
  SaliencyMap map(request.mechanism, target, std::move(per_segment), labeling, std::move(errors));
  return {std::move(map), std::move(labeling), original};
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("spearman: length mismatch");
  if (a.size() < 2) return 1.0;
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double mean = (n + 1.0) / 2.0;
  double cov = 0.0;
  double va = 0.0;
  double vb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - mean) * (rb[i] - mean);
    va += (ra[i] - mean) * (ra[i] - mean);
    vb += (rb[i] - mean) * (rb[i] - mean);
  }
  if (va == 0.0 || vb == 0.0) return va == vb ? 1.0 : 0.0;
  return std::clamp(cov / std::sqrt(va * vb), -1.0, 1.0);
}

SweepComparison compare_explanations(const Explanation& a, const Explanation& b) {
  SweepComparison cmp;
  const auto& ma = a.map.per_segment();
  const auto& mb = b.map.per_segment();
  cmp.matched = a.labeling.labels().size() == b.labeling.labels().size() &&
                std::ranges::equal(a.labeling.labels(), b.labeling.labels()) &&
                std::ranges::equal(ma | std::views::keys, mb | std::views::keys);
  const auto top_a = a.map.top_segment();
  const auto top_b = b.map.top_segment();
  if (cmp.matched) {
    std::vector<double> va;
    std::vector<double> vb;
    double delta = 0.0;
    for (const auto& [id, value] : ma) {
      va.push_back(value);
      vb.push_back(mb.at(id));
      delta = std::max(delta, std::abs(value - mb.at(id)));
    }
    cmp.rank_correlation = spearman(va, vb);
    cmp.max_abs_delta = delta;
    cmp.top1_agree = top_a && top_b && *top_a == *top_b;
    return cmp;
  }
  if (top_a && top_b && a.labeling.size() == b.labeling.size()) {
    std::size_t inter = 0;
    std::size_t uni = 0;
    for (std::size_t i = 0; i < a.labeling.size(); ++i) {
      const bool in_a = a.labeling[i] == *top_a;
      const bool in_b = b.labeling[i] == *top_b;
      inter += in_a && in_b;
      uni += in_a || in_b;
    }
    cmp.top1_agree = uni > 0 && 2 * inter >= uni;
  }
  return cmp;
}

std::string SweepReport::to_csv() const {
  std::string out = "config,segment_id,attribution\n";
  for (const auto& entry : entries) {
    for (const auto& [id, value] : entry.explanation.map.per_segment()) {
      out += entry.config + ',' + std::to_string(id) + ',' + format_double(value) + '\n';
    }
  }
  return out;
}

std::string SweepReport::summary() const {
  std::string out;
  for (const auto& entry : entries) {
    const auto& map = entry.explanation.map;
    out += entry.config + ": " + std::to_string(entry.explanation.labeling.segment_ids().size()) +
           " segments, target " + std::to_string(map.target_class());
    if (const auto top = map.top_segment()) out += ", top segment " + std::to_string(*top);
    out += '\n';
    for (const auto& [id, message] : map.errors()) {
      out += "  segment " + std::to_string(id) + " error: " + message + '\n';
    }
  }
  for (const auto& cmp : comparisons) {
    out += entries[cmp.first].config + " vs " + entries[cmp.second].config + ": ";
    if (cmp.rank_correlation) {
      out += "spearman " + format_double(*cmp.rank_correlation) + ", max |delta| " +
             format_double(*cmp.max_abs_delta) + ", ";
    } else {
      out += "segment sets differ, ";
    }
    out += std::string("top-1 ") + (cmp.top1_agree ? "agree" : "disagree") + '\n';
  }
  return out;
}

SweepReport sweep_baseline(const PointCloud& cloud, std::span<const int> k_list,
                           Mechanism mechanism, const ClassifierHandle& classifier,
                           std::uint64_t seed, const SweepOptions& options) {
  SweepReport report;
  for (int k : k_list) {
    ExplainRequest request{cloud, BaselineKmeans{k}, mechanism, options.destination,
                           options.target, classifier, seed, options.jobs};
    report.entries.push_back({"k=" + std::to_string(k), cloud, explain(request)});
  }
  for (std::size_t i = 0; i < report.entries.size(); ++i) {
    for (std::size_t j = i + 1; j < report.entries.size(); ++j) {
      auto cmp = compare_explanations(report.entries[i].explanation, report.entries[j].explanation);
      cmp.first = i;
      cmp.second = j;
      report.comparisons.push_back(cmp);
    }
  }
  return report;
}

SweepReport sweep_noise(const PointCloud& cloud, const SegmentLabeling& labeling,
                        std::span<const double> percents, Mechanism mechanism,
                        const ClassifierHandle& classifier, std::uint64_t seed,
                        const SweepOptions& options) {
  SweepReport report;
  ExplainRequest clean{cloud, LabelFile{labeling}, mechanism, options.destination,
                       options.target, classifier, seed, options.jobs};
  report.entries.push_back({"clean", cloud, explain(clean)});
  const int target = report.entries.front().explanation.map.target_class();

  for (double percent : percents) {
    const auto noise_seed = derive_seed(seed, std::bit_cast<std::uint64_t>(percent));
    PointCloud noisy_cloud = add_noise(cloud, {percent, noise_seed});
    ExplainRequest noisy{noisy_cloud, LabelFile{labeling}, mechanism, options.destination,
                         target, classifier, seed, options.jobs};
    report.entries.push_back({"noise=" + format_double(percent), std::move(noisy_cloud), explain(noisy)});
    auto cmp = compare_explanations(report.entries.front().explanation,
                                    report.entries.back().explanation);
    cmp.first = 0;
    cmp.second = report.entries.size() - 1;
    report.comparisons.push_back(cmp);
  }
  return report;
}

namespace {

double max_deviation(const ScoreVector& a, const ScoreVector& b) {
  double dev = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) dev = std::max(dev, std::abs(a[c] - b[c]));
  return dev;
}

}  // namespace

InvarianceResult destination_invariance_check(const PointCloud& cloud,
                                              const SegmentLabeling& labeling, int segment,
                                              const Classifier& classifier, int trials,
                                              std::uint64_t seed, Mechanism mechanism) {
  if (trials < 1) throw ValidationError("invariance check needs at least one trial");
  std::vector<ScoreVector> scores;
  scores.reserve(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    const PerturbationSpec spec{mechanism, segment, DestinationPolicy::RandomRetained,
                                derive_seed(seed, static_cast<std::uint64_t>(t))};
    scores.push_back(classifier.predict(shift_segment(cloud, labeling, spec)));
  }
  InvarianceResult result;
  result.trials = trials;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    for (std::size_t j = i + 1; j < scores.size(); ++j) {
      result.equal = result.equal && scores[i] == scores[j];
      result.max_deviation = std::max(result.max_deviation, max_deviation(scores[i], scores[j]));
    }
  }
  return result;
}

double centroid_deviation(const PointCloud& cloud, const SegmentLabeling& labeling, int segment,
                          const Classifier& classifier, std::uint64_t seed, Mechanism mechanism) {
  const auto random = classifier.predict(
      shift_segment(cloud, labeling, {mechanism, segment, DestinationPolicy::RandomRetained, seed}));
  const auto centroid = classifier.predict(
      shift_segment(cloud, labeling, {mechanism, segment, DestinationPolicy::Centroid, seed}));
  return max_deviation(random, centroid);
}

}  // namespace pcxai
