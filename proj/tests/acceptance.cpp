// SPDX-FileCopyrightText: 2026 The pcxai Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion, then reported-only
// scenario lines. Exit status is non-zero when any criterion fails.
//
//   pcxai_acceptance [--workdir DIR]

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "pcxai/classifier.hpp"
#include "pcxai/cli.hpp"
#include "pcxai/clustering.hpp"
#include "pcxai/io.hpp"
#include "pcxai/perturb.hpp"
#include "pcxai/saliency.hpp"
#include "pcxai/synthetic.hpp"
#include "support.hpp"

using namespace pcxai;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(const std::string& name, double time_limit_s, const std::function<Verdict()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Verdict v{false, ""};
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (time_limit_s > 0 && secs >= time_limit_s) {
    v.pass = false;
    v.detail += " (over the " + format_double(time_limit_s) + " s limit)";
  }
  if (!v.pass) ++failures;
  char timing[32];
  std::snprintf(timing, sizeof timing, "%.2fs", secs);
  std::cout << (v.pass ? "PASS " : "FAIL ") << name << " [" << timing << "] " << v.detail << std::endl;
}

void report(const std::string& name, const std::string& text) {
  std::cout << "INFO " << name << ": " << text << std::endl;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

ClassifierHandle shape_classifier() {
  static ClassifierHandle h = [] {
    auto suite = synthetic::shape_suite(50, 256, 0);
    return std::make_shared<BuiltinClassifier>(train_builtin(suite, TrainConfig{}).model);
  }();
  return h;
}

// Three object classes built from the labeled synthetic scenes, used only by
// the reported-only scenarios.
ClassifierHandle scene_classifier() {
  static ClassifierHandle h = [] {
    std::vector<TrainSample> samples;
    for (std::uint64_t s = 0; s < 20; ++s) {
      samples.push_back({synthetic::make_chair(384, 100 + s).cloud, 0});
      samples.push_back({synthetic::make_airplane(384, 200 + s, s % 2 ? 4 : 2).cloud, 1});
      samples.push_back({synthetic::make_motorbike(384, 300 + s).cloud, 2});
    }
    TrainConfig cfg;
    cfg.class_names = {"chair", "airplane", "motorbike"};
    return std::make_shared<BuiltinClassifier>(train_builtin(samples, cfg).model);
  }();
  return h;
}

std::vector<int> ranking(const SaliencyMap& map) {
  std::vector<std::pair<double, int>> v;
  for (auto [id, a] : map.per_segment()) v.push_back({-a, id});
  std::sort(v.begin(), v.end());
  std::vector<int> out;
  for (auto& [a, id] : v) out.push_back(id);
  return out;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string describe(const SaliencyMap& map, const SegmentLabeling& labeling) {
  std::string s;
  for (auto [id, a] : map.per_segment()) {
    if (!s.empty()) s += ' ';
    s += labeling.part_name(id) + "=" + fmt(a);
  }
  return s;
}

int cli_run(std::vector<std::string> args) {
  args.insert(args.begin(), "pcxai");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (code != 0) std::cerr << err.str();
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  fs::path workdir = fs::temp_directory_path() / "pcxai_acceptance";
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--workdir") workdir = argv[i + 1];
  }
  fs::remove_all(workdir);
  fs::create_directories(workdir);

  criterion("attribution-oracle-equivalence", 10, [] {
    Rng rng(20260101);
    int instances = 0;
    for (; instances < 200; ++instances) {
      const std::size_t n = 1 + uniform_index(rng, 2048);
      PointCloud cloud(test::random_points(rng, n, uniform(rng, 0.1, 5)));
      std::vector<int> ids;
      for (int s = 0; s < 6; ++s) ids.push_back(static_cast<int>(uniform_index(rng, 1000)));
      const std::size_t used = 1 + uniform_index(rng, 6);
      std::vector<int> labels(n);
      for (auto& v : labels) v = ids[uniform_index(rng, used)];
      const auto mech = instances % 2 ? Mechanism::Presence : Mechanism::Absence;
      const std::uint64_t seed = rng();
      auto mock = std::make_shared<test::WavyClassifier>(2 + static_cast<int>(uniform_index(rng, 15)));

      ExplainRequest req{.cloud = cloud,
                         .source = LabelFile{SegmentLabeling(labels)},
                         .mechanism = mech,
                         .target = std::nullopt,
                         .classifier = mock,
                         .seed = seed,
                         .jobs = 1 + static_cast<int>(uniform_index(rng, 4))};
      const auto got = explain(req);
      const auto want = test::explain_oracle(cloud, labels, mech, *mock, seed);
      std::set<int> errs;
      for (auto& [id, msg] : got.map.errors()) errs.insert(id);
      if (got.map.target_class() != want.target || got.map.per_segment() != want.values ||
          errs != want.errors) {
        return Verdict{false, "mismatch on instance " + std::to_string(instances)};
      }
    }
    return Verdict{true, std::to_string(instances) + " instances, exact agreement"};
  });

  criterion("destination-invariance", 30, [] {
    auto model = shape_classifier();
    Rng rng(777);
    double worst = 0;
    bool all_equal = true;
    for (int draw = 0; draw < 50; ++draw) {
      const std::size_t n = 16 + uniform_index(rng, 1024);
      PointCloud cloud(test::random_points(rng, n));
      std::vector<int> labels(n);
      const std::size_t segs = 2 + uniform_index(rng, 5);
      for (auto& v : labels) v = static_cast<int>(uniform_index(rng, segs));
      SegmentLabeling l(labels);
      const int seg = l.segment_ids()[uniform_index(rng, l.segment_ids().size())];
      const auto mech = draw % 2 ? Mechanism::Presence : Mechanism::Absence;
      auto r = destination_invariance_check(cloud, l, seg, *model, 10, rng(), mech);
      all_equal = all_equal && r.equal && r.trials == 10;
      worst = std::max(worst, r.max_deviation);
    }
    return Verdict{all_equal && worst == 0.0, "50 draws x 10 destinations, max deviation " + fmt(worst)};
  });

  criterion("classifier-symmetry-and-gradient", 0, [] {
    Rng rng(4);
    auto model = std::dynamic_pointer_cast<const BuiltinClassifier>(shape_classifier())->model();
    for (int i = 0; i < 100; ++i) {
      auto pts = test::random_points(rng, 1 + uniform_index(rng, 1000), uniform(rng, 0.1, 3));
      const auto base = model.predict(PointCloud(pts));
      std::shuffle(pts.begin(), pts.end(), rng);
      if (!(model.predict(PointCloud(pts)) == base)) return Verdict{false, "permutation changed scores"};
      pts.push_back(pts[uniform_index(rng, pts.size())]);
      if (!(model.predict(PointCloud(pts)) == base)) return Verdict{false, "duplicate changed scores"};
    }
    double worst = 0;
    for (int draw = 0; draw < 20; ++draw) {
      const int c = 2 + static_cast<int>(uniform_index(rng, 5));
      const int d = 12;
      std::vector<double> w(static_cast<std::size_t>(c * d)), b(static_cast<std::size_t>(c));
      for (auto& v : w) v = standard_normal(rng);
      for (auto& v : b) v = standard_normal(rng);
      BuiltinModel m(c, d, rng(), w, b);
      std::vector<std::vector<double>> pooled;
      std::vector<int> y;
      for (int i = 0; i < 8; ++i) {
        pooled.push_back(m.features().pool(PointCloud(test::random_points(rng, 40))));
        y.push_back(static_cast<int>(uniform_index(rng, static_cast<std::size_t>(c))));
      }
      const auto g = head_gradient(m, pooled, y);
      const double h = 1e-6;
      for (std::size_t k = 0; k < w.size() + b.size(); ++k) {
        auto loss = [&](double delta) {
          auto w2 = w;
          auto b2 = b;
          if (k < w.size()) w2[k] += delta; else b2[k - w.size()] += delta;
          return head_gradient(BuiltinModel(c, d, m.feature_seed(), w2, b2), pooled, y).loss;
        };
        const double numeric = (loss(h) - loss(-h)) / (2 * h);
        const double analytic = k < w.size() ? g.d_weights[k] : g.d_bias[k - w.size()];
        worst = std::max(worst, std::fabs(analytic - numeric) / std::max(1.0, std::fabs(numeric)));
      }
    }
    return Verdict{worst <= 1e-5, "100 clouds invariant; gradient max relative error " + fmt(worst)};
  });

  criterion("clustering-oracles", 0, [] {
    Rng rng(99);
    for (int i = 0; i < 100; ++i) {
      const auto pts = test::blob_points(rng, 1 + uniform_index(rng, 200));
      const double eps = uniform(rng, 0.05, 1.0);
      const int min_pts = 1 + static_cast<int>(uniform_index(rng, 8));
      if (!test::same_partition(dbscan(pts, {eps, min_pts}).ids, test::dbscan_oracle(pts, eps, min_pts))) {
        return Verdict{false, "dbscan differs from oracle on instance " + std::to_string(i)};
      }
    }
    for (int i = 0; i < 100; ++i) {
      const auto pts = test::blob_points(rng, 10 + uniform_index(rng, 300));
      const int k = 1 + static_cast<int>(uniform_index(rng, 10));
      const auto r = kmeans(pts, {.k = k, .max_iters = 1000, .seed = rng()});
      for (std::size_t t = 1; t < r.inertia_history.size(); ++t) {
        if (r.inertia_history[t] > r.inertia_history[t - 1] + 1e-12) {
          return Verdict{false, "kmeans inertia increased"};
        }
      }
      if (!r.converged) return Verdict{false, "kmeans did not reach a fixed point"};
      // One more assignment step must not move any point.
      for (std::size_t p = 0; p < pts.size(); ++p) {
        const int own = r.assignment.ids[p];
        const double d = squared_distance(pts[p], r.centroids[static_cast<std::size_t>(own)]);
        for (int j = 0; j < k; ++j) {
          const double dj = squared_distance(pts[p], r.centroids[static_cast<std::size_t>(j)]);
          if (dj < d) return Verdict{false, "kmeans final state is not a fixed point"};
        }
      }
    }
    return Verdict{true, "dbscan 100/100 match; kmeans 100 runs monotone and stable"};
  });

  criterion("segment-refinement", 0, [] {
    const auto wheels = synthetic::make_two_wheels(256, 42);
    const auto refined = refine_segments(wheels.cloud, wheels.labeling, {.eps_frac = 0.15, .min_pts = 4, .seed = 1});
    const std::size_t parts = refined.segment_ids().size();
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
      const std::size_t n = 20 + uniform_index(rng, 400);
      const auto pts = test::blob_points(rng, n);
      std::vector<int> labels(n);
      const std::size_t segs = 1 + uniform_index(rng, 6);
      for (auto& v : labels) v = static_cast<int>(uniform_index(rng, segs));
      const auto r = refine_segments(PointCloud(pts), SegmentLabeling(labels), {.seed = rng()});
      std::map<int, int> origin;
      for (std::size_t p = 0; p < n; ++p) {
        auto [it, fresh] = origin.try_emplace(r.labels()[p], labels[p]);
        if (it->second != labels[p]) return Verdict{false, "refined segment spans two input segments"};
      }
    }
    return Verdict{parts == 2, "wheels -> " + std::to_string(parts) + " sub-segments; 100 labelings never merged"};
  });

  criterion("noise-bound-and-sweep", 30, [] {
    auto model = shape_classifier();
    auto split = synthetic::split_by_class(synthetic::shape_suite(50, 256, 1), 0.7);
    const std::vector<double> percents = {5, 10};
    int agree5 = 0, agree10 = 0, clouds = 0;
    double worst_ratio = 0;
    for (std::size_t i = 0; i < split.test.size(); i += 3, ++clouds) {
      const auto& cloud = split.test[i].cloud;
      const auto labeling = kmeans_labeling(cloud, 4, i);
      const auto r = sweep_noise(cloud, labeling, percents, Mechanism::Absence, model, i);
      for (std::size_t e = 1; e < r.entries.size(); ++e) {
        const double bound = noise_bound(cloud, percents[e - 1]);
        for (std::size_t p = 0; p < cloud.size(); ++p) {
          const auto& a = cloud[p];
          const auto& b = r.entries[e].cloud[p];
          const double d = std::max({std::fabs(a.x - b.x), std::fabs(a.y - b.y), std::fabs(a.z - b.z)});
          worst_ratio = std::max(worst_ratio, d / bound);
          if (d > bound) return Verdict{false, "displacement above p*d/2"};
        }
      }
      agree5 += r.comparisons[0].top1_agree ? 1 : 0;
      agree10 += r.comparisons[1].top1_agree ? 1 : 0;
    }
    // Direct check of the 5% case on every suite cloud.
    for (const auto& s : split.train) {
      const double bound = noise_bound(s.cloud, 5);
      const auto noisy = add_noise(s.cloud, {5, 3});
      for (std::size_t p = 0; p < s.cloud.size(); ++p) {
        const auto& a = s.cloud[p];
        const auto& b = noisy[p];
        if (std::max({std::fabs(a.x - b.x), std::fabs(a.y - b.y), std::fabs(a.z - b.z)}) > bound) {
          return Verdict{false, "5% noise above bound"};
        }
      }
    }
    return Verdict{true, "max displacement/bound " + fmt(worst_ratio) + "; top-1 agreement 5%: " +
                             std::to_string(agree5) + "/" + std::to_string(clouds) + ", 10%: " +
                             std::to_string(agree10) + "/" + std::to_string(clouds)};
  });

  criterion("baseline-sweep-determinism", 0, [&] {
    const auto chair = synthetic::make_chair(1024, 2024);
    const std::vector<int> ks = {3, 5, 8, 12};
    auto render = [&] {
      const auto r = sweep_baseline(chair.cloud, ks, Mechanism::Absence, shape_classifier(), 11);
      std::ostringstream bytes;
      bytes << r.to_csv();
      for (const auto& e : r.entries) write_colored_ply(e.cloud, e.explanation.map, bytes);
      return std::pair{bytes.str(), r};
    };
    const auto [a, ra] = render();
    const auto [b, rb] = render();
    bool sizes = ra.entries.size() == 4;
    for (std::size_t i = 0; sizes && i < 4; ++i) {
      sizes = ra.entries[i].explanation.labeling.segment_ids().size() == static_cast<std::size_t>(ks[i]);
    }
    return Verdict{sizes && a == b, "4 maps with 3/5/8/12 segments, " + std::to_string(a.size()) +
                                        " bytes identical across runs"};
  });

  criterion("builtin-training-accuracy", 60, [] {
    const auto split = synthetic::split_by_class(synthetic::shape_suite(50, 256, 0), 0.7);
    const auto r = train_builtin(split.train, TrainConfig{});
    const double held_out = accuracy(r.model, split.test);
    return Verdict{held_out >= 0.9, "train " + fmt(r.accuracy) + ", held-out " + fmt(held_out) + " on " +
                                        std::to_string(split.test.size()) + " clouds"};
  });

  criterion("cli-explain-determinism", 0, [&] {
    const auto chair = synthetic::make_chair(512, 9);
    const auto pts = (workdir / "a.pts").string();
    const auto seg = (workdir / "a.seg").string();
    const auto model = (workdir / "model.txt").string();
    write_points(chair.cloud, pts);
    write_labels(chair.labeling, seg);
    if (cli_run({"train", "--synthetic", "20", "--cloud-points", "128", "--out-model", model, "--seed", "3"}) != 0) {
      return Verdict{false, "train failed"};
    }
    std::string outputs[2][2];
    for (int run = 0; run < 2; ++run) {
      const auto csv = (workdir / ("s" + std::to_string(run) + ".csv")).string();
      const auto ply = (workdir / ("s" + std::to_string(run) + ".ply")).string();
      if (cli_run({"explain", "--points", pts, "--labels", seg, "--mechanism", "absence", "--classifier",
                   "builtin:" + model, "--out-csv", csv, "--out-ply", ply, "--seed", "7"}) != 0) {
        return Verdict{false, "explain failed"};
      }
      outputs[run][0] = read_text_file(csv);
      outputs[run][1] = read_text_file(ply);
    }
    const bool same = outputs[0][0] == outputs[1][0] && outputs[0][1] == outputs[1][1];
    return Verdict{same, "CSV " + std::to_string(outputs[0][0].size()) + " B, PLY " +
                             std::to_string(outputs[0][1].size()) + " B, identical across runs"};
  });

  // Reported-only scenarios: the outcomes depend on the classifier, so
  // nothing below is asserted.
  try {
    const auto clf = scene_classifier();
    const auto plane = synthetic::make_airplane(1024, 77);
    const auto noisy_labels = synthetic::perturb_labels(plane, 0.3, 0.15, 5);
    ExplainRequest gt{.cloud = plane.cloud, .source = LabelFile{plane.labeling}, .mechanism = Mechanism::Absence,
                      .target = std::nullopt, .classifier = clf, .seed = 1};
    ExplainRequest model_labels = gt;
    model_labels.source = LabelFile{noisy_labels};
    const auto eg = explain(gt);
    const auto em = explain(model_labels);
    report("airplane ground-truth vs model labels",
           "ranking " + join(ranking(eg.map)) + " vs " + join(ranking(em.map)) +
               (ranking(eg.map) == ranking(em.map) ? " (equal)" : " (differ)") + "; " +
               describe(eg.map, eg.labeling));

    for (int engines : {2, 4}) {
      const auto p = synthetic::make_airplane(1024, 78, engines);
      ExplainRequest r{.cloud = p.cloud, .source = LabelFile{p.labeling}, .mechanism = Mechanism::Absence,
                       .target = std::nullopt, .classifier = clf, .seed = 2};
      const auto e = explain(r);
      report("airplane with " + std::to_string(engines) + " engines", describe(e.map, e.labeling));
    }

    const auto bike = synthetic::make_motorbike(1024, 79);
    ExplainRequest br{.cloud = bike.cloud,
                      .source = Refined{bike.labeling, 0.15, 4},
                      .mechanism = Mechanism::Absence,
                      .target = std::nullopt,
                      .classifier = clf,
                      .seed = 3};
    const auto eb = explain(br);
    report("motorbike with refined wheels", describe(eb.map, eb.labeling));

    const auto wheels = synthetic::make_two_wheels(256, 4);
    std::vector<int> halves(wheels.cloud.size());
    for (std::size_t i = 0; i < halves.size(); ++i) halves[i] = wheels.cloud[i].x < 0 ? 0 : 1;
    report("centroid vs random destination deviation (hollow cloud)",
           fmt(centroid_deviation(wheels.cloud, SegmentLabeling(halves), 0, *shape_classifier(), 1)));
  } catch (const std::exception& e) {
    report("scenarios", std::string("error: ") + e.what());
  }

  std::cout << (failures == 0 ? "ALL CRITERIA PASSED" : std::to_string(failures) + " CRITERIA FAILED")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
