// SPDX-FileCopyrightText: 2026 The pcxai Authors
// SPDX-License-Identifier: Apache-2.0

#include "pcxai/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>

#include "pcxai/classifier.hpp"
#include "pcxai/clustering.hpp"
#include "pcxai/error.hpp"
#include "pcxai/io.hpp"
#include "pcxai/perturb.hpp"
#include "pcxai/saliency.hpp"
#include "pcxai/synthetic.hpp"

namespace pcxai::cli {
namespace {

namespace fs = std::filesystem;

struct Config {
  std::string points;
  std::string labels;
  std::string mechanism = "absence";
  std::string destination = "random";
  std::string classifier;
  int classes = 0;
  std::optional<int> target;
  bool refine = false;
  double eps_frac = 0.15;
  int min_pts = 4;
  std::vector<int> clusters;
  std::vector<double> percents;
  int trials = 10;
  std::optional<int> segment;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out_csv;
  std::string out_ply;
  std::string out_labels;
  // train
  std::string manifest;
  std::optional<int> synthetic;
  int cloud_points = 256;
  std::string out_model;
  int epochs = 1000;
  double lr = 0.5;
  int features = BuiltinModel::kDefaultFeatureDim;
};

void add_points(CLI::App* sub, Config& c) {
  sub->add_option("--points", c.points, "Points file (x y z per line)")->required()->check(CLI::ExistingFile);
}

CLI::Option* add_labels(CLI::App* sub, Config& c) {
  return sub->add_option("--labels", c.labels, "Per-point segment labels file")->check(CLI::ExistingFile);
}

void add_mechanism(CLI::App* sub, Config& c) {
  sub->add_option("--mechanism", c.mechanism, "Attribution mechanism")
      ->check(CLI::IsMember({"absence", "presence"}))
      ->capture_default_str();
}

void add_classifier(CLI::App* sub, Config& c) {
  sub->add_option("--classifier", c.classifier, "builtin:<model file> or extern:<command>")->required();
  sub->add_option("--classes", c.classes, "Expected class count (0 accepts the declared count)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
}

void add_scoring(CLI::App* sub, Config& c) {
  add_mechanism(sub, c);
  sub->add_option("--destination", c.destination, "Where shifted points go")
      ->check(CLI::IsMember({"random", "centroid"}))
      ->capture_default_str();
  add_classifier(sub, c);
  sub->add_option("--target", c.target, "Target class (default: predicted class)")
      ->check(CLI::NonNegativeNumber);
}

void add_refine(CLI::App* sub, Config& c, bool with_flag) {
  if (with_flag) sub->add_flag("--refine", c.refine, "Split label segments into spatial instances");
  sub->add_option("--eps-frac", c.eps_frac, "DBSCAN radius as a fraction of the segment diagonal")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--min-pts", c.min_pts, "DBSCAN core-point neighbor count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

void add_run_controls(CLI::App* sub, Config& c) {
  sub->add_option("--seed", c.seed, "Seed for every random choice")->capture_default_str();
  sub->add_option("--jobs", c.jobs, "Worker thread cap")->check(CLI::PositiveNumber)->capture_default_str();
}

Mechanism mechanism_of(const Config& c) { return *parse_mechanism(c.mechanism); }
DestinationPolicy destination_of(const Config& c) { return *parse_destination(c.destination); }

std::string sanitize(std::string config) {
  std::erase_if(config, [](char ch) { return ch == '='; });
  return config;
}

// Reads "<points path> <class index>" lines; paths are relative to the manifest.
std::vector<TrainSample> read_manifest(const fs::path& path) {
  const std::string text = read_text_file(path);
  std::vector<TrainSample> samples;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string file;
    if (!(fields >> file)) continue;
    int label = -1;
    std::string extra;
    if (!(fields >> label) || label < 0 || (fields >> extra)) {
      throw ParseError(path.string(), line_no, "expected '<points file> <class index>'");
    }
    fs::path points = file;
    if (points.is_relative()) points = path.parent_path() / points;
    samples.push_back({read_points(points), label});
  }
  if (samples.empty()) throw ValidationError(path.string() + ": manifest lists no samples");
  return samples;
}

void print_map(std::ostream& out, const Explanation& e) {
  out << "target " << e.map.target_class() << " score "
      << format_double(e.original_scores[static_cast<std::size_t>(e.map.target_class())]) << '\n';
  for (const auto& [id, value] : e.map.per_segment()) {
    out << "segment " << id << ' ' << e.labeling.part_name(id) << ' ' << format_double(value) << '\n';
  }
  for (const auto& [id, message] : e.map.errors()) {
    out << "segment " << id << ' ' << e.labeling.part_name(id) << " error: " << message << '\n';
  }
}

int cmd_explain(const Config& c, std::ostream& out) {
  const PointCloud cloud = read_points(c.points);
  LabelingSource source = BaselineKmeans{};
  if (!c.labels.empty()) {
    auto labeling = read_labels(c.labels, cloud);
    if (c.refine) {
      source = Refined{std::move(labeling), c.eps_frac, c.min_pts};
    } else {
      source = LabelFile{std::move(labeling)};
    }
  } else {
    source = BaselineKmeans{c.clusters.front()};
  }
  const ExplainRequest request{cloud, std::move(source), mechanism_of(c), destination_of(c),
                               c.target, open_classifier(c.classifier, c.classes), c.seed, c.jobs};
  const auto explanation = explain(request);
  print_map(out, explanation);
  if (!c.out_csv.empty()) write_saliency_csv(explanation.map, explanation.labeling, fs::path(c.out_csv));
  if (!c.out_ply.empty()) write_colored_ply(cloud, explanation.map, fs::path(c.out_ply));
  return kExitOk;
}

int cmd_refine(const Config& c, std::ostream& out) {
  const PointCloud cloud = read_points(c.points);
  const auto labeling = read_labels(c.labels, cloud);
  const auto refined = refine_segments(cloud, labeling, {c.eps_frac, c.min_pts, c.seed});
  out << labeling.segment_ids().size() << " segments -> " << refined.segment_ids().size() << " segments\n";
  for (int id : refined.segment_ids()) {
    out << "segment " << id << ' ' << refined.part_name(id) << ' ' << refined.indices_of(id).size() << '\n';
  }
  if (!c.out_labels.empty()) write_labels(refined, c.out_labels);
  return kExitOk;
}

void write_sweep(const Config& c, const SweepReport& report, std::ostream& out) {
  out << report.summary();
  if (!c.out_csv.empty()) write_text_file(c.out_csv, report.to_csv());
  if (!c.out_ply.empty()) {
    for (const auto& entry : report.entries) {
      write_colored_ply(entry.cloud, entry.explanation.map,
                        fs::path(c.out_ply + "_" + sanitize(entry.config) + ".ply"));
    }
  }
}

int cmd_baseline(const Config& c, std::ostream& out) {
  const PointCloud cloud = read_points(c.points);
  const auto report = sweep_baseline(cloud, c.clusters, mechanism_of(c), open_classifier(c.classifier, c.classes),
                                     c.seed, {destination_of(c), c.target, c.jobs});
  write_sweep(c, report, out);
  return kExitOk;
}

int cmd_noise_sweep(const Config& c, std::ostream& out) {
  const PointCloud cloud = read_points(c.points);
  auto labeling = read_labels(c.labels, cloud);
  if (c.refine) labeling = refine_segments(cloud, labeling, {c.eps_frac, c.min_pts, c.seed});
  const auto report = sweep_noise(cloud, labeling, c.percents, mechanism_of(c),
                                  open_classifier(c.classifier, c.classes), c.seed,
                                  {destination_of(c), c.target, c.jobs});
  write_sweep(c, report, out);
  return kExitOk;
}

int cmd_invariance(const Config& c, std::ostream& out) {
  const PointCloud cloud = read_points(c.points);
  const auto labeling = read_labels(c.labels, cloud);
  const auto classifier = open_classifier(c.classifier, c.classes);
  std::vector<int> segments = labeling.segment_ids();
  if (c.segment) {
    if (!labeling.contains(*c.segment)) {
      throw EmptySegment("segment " + std::to_string(*c.segment) + " is not in the labeling");
    }
    segments = {*c.segment};
  }
  std::string csv = "segment_id,trials,equal,max_deviation,centroid_deviation\n";
  for (int id : segments) {
    try {
      const auto r = destination_invariance_check(cloud, labeling, id, *classifier, c.trials, c.seed,
                                                  mechanism_of(c));
      const double centroid = centroid_deviation(cloud, labeling, id, *classifier, c.seed, mechanism_of(c));
      out << "segment " << id << ' ' << labeling.part_name(id) << ": equal " << (r.equal ? "true" : "false")
          << ", max deviation " << format_double(r.max_deviation) << ", centroid deviation "
          << format_double(centroid) << '\n';
      csv += std::to_string(id) + ',' + std::to_string(r.trials) + ',' + (r.equal ? "true" : "false") + ',' +
             format_double(r.max_deviation) + ',' + format_double(centroid) + '\n';
    } catch (const EmptyRetainedSet& e) {
      out << "segment " << id << ' ' << labeling.part_name(id) << " error: " << e.what() << '\n';
    }
  }
  if (!c.out_csv.empty()) write_text_file(c.out_csv, csv);
  return kExitOk;
}

int cmd_train(const Config& c, std::ostream& out) {
  std::vector<TrainSample> samples;
  std::vector<std::string> names;
  if (c.synthetic) {
    samples = synthetic::shape_suite(*c.synthetic, c.cloud_points, c.seed);
    for (int k = 0; k < synthetic::kShapeKinds; ++k) {
      names.emplace_back(synthetic::shape_name(static_cast<synthetic::ShapeKind>(k)));
    }
  } else {
    samples = read_manifest(c.manifest);
  }
  TrainConfig config{.learning_rate = c.lr, .epochs = c.epochs, .seed = c.seed, .feature_dim = c.features, .class_names = names};
  const auto result = train_builtin(samples, config);
  result.model.save(c.out_model);
  out << "trained " << result.model.class_count() << " classes on " << samples.size()
      << " samples, accuracy " << format_double(result.accuracy) << '\n';
  return kExitOk;
}

int cmd_predict(const Config& c, std::ostream& out) {
  const PointCloud cloud = read_points(c.points);
  const auto scores = open_classifier(c.classifier, c.classes)->predict(cloud);
  out << "scores";
  for (double s : scores.values()) out << ' ' << format_double(s);
  out << "\npredicted " << scores.argmax() << '\n';
  return kExitOk;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Segment-level saliency maps for point-cloud classifiers", "pcxai"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Print help for every subcommand");

  auto* explain_cmd = app.add_subcommand("explain", "Explain one cloud with per-segment attributions");
  add_points(explain_cmd, c);
  auto* labels_opt = add_labels(explain_cmd, c);
  auto* clusters_opt = explain_cmd->add_option("--clusters", c.clusters, "Use a whole-cloud KMeans labeling with this k")
                           ->expected(1)
                           ->check(CLI::PositiveNumber);
  labels_opt->excludes(clusters_opt);
  add_refine(explain_cmd, c, true);
  add_scoring(explain_cmd, c);
  add_run_controls(explain_cmd, c);
  explain_cmd->add_option("--out-csv", c.out_csv, "Write per-segment attributions as CSV");
  explain_cmd->add_option("--out-ply", c.out_ply, "Write the colored cloud as ASCII PLY");

  auto* refine_cmd = app.add_subcommand("refine", "Split label segments into spatial instances");
  add_points(refine_cmd, c);
  add_labels(refine_cmd, c)->required();
  add_refine(refine_cmd, c, false);
  refine_cmd->add_option("--seed", c.seed, "Seed for every random choice")->capture_default_str();
  refine_cmd->add_option("--out-labels", c.out_labels, "Write the refined labels file");

  auto* baseline_cmd = app.add_subcommand("baseline", "Explain with whole-cloud KMeans segments for several k");
  add_points(baseline_cmd, c);
  baseline_cmd->add_option("--clusters", c.clusters, "Comma-separated cluster counts")
      ->delimiter(',')
      ->check(CLI::PositiveNumber)
      ->default_str("3,5,8,12");
  add_scoring(baseline_cmd, c);
  add_run_controls(baseline_cmd, c);
  baseline_cmd->add_option("--out-csv", c.out_csv, "Write the report as CSV");
  baseline_cmd->add_option("--out-ply", c.out_ply, "Path stem for one colored PLY per configuration");

  auto* noise_cmd = app.add_subcommand("noise-sweep", "Compare attributions on noisy copies of a cloud");
  add_points(noise_cmd, c);
  add_labels(noise_cmd, c)->required();
  add_refine(noise_cmd, c, true);
  noise_cmd->add_option("--percents", c.percents, "Comma-separated noise levels in percent")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 100.0))
      ->default_str("5,10");
  add_scoring(noise_cmd, c);
  add_run_controls(noise_cmd, c);
  noise_cmd->add_option("--out-csv", c.out_csv, "Write the report as CSV");
  noise_cmd->add_option("--out-ply", c.out_ply, "Path stem for one colored PLY per configuration");

  auto* inv_cmd = app.add_subcommand("invariance", "Check that the destination point does not change scores");
  add_points(inv_cmd, c);
  add_labels(inv_cmd, c)->required();
  inv_cmd->add_option("--segment", c.segment, "Segment to shift (default: every segment)");
  inv_cmd->add_option("--trials", c.trials, "Random destinations per segment")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_mechanism(inv_cmd, c);
  add_classifier(inv_cmd, c);
  inv_cmd->add_option("--seed", c.seed, "Seed for every random choice")->capture_default_str();
  inv_cmd->add_option("--out-csv", c.out_csv, "Write per-segment results as CSV");

  auto* train_cmd = app.add_subcommand("train", "Train the builtin classifier head");
  auto* manifest_opt = train_cmd->add_option("--manifest", c.manifest, "Lines of '<points file> <class index>'")
                           ->check(CLI::ExistingFile);
  auto* synthetic_opt = train_cmd->add_option("--synthetic", c.synthetic, "Train on the synthetic shape suite with N samples per class")
                            ->check(CLI::PositiveNumber);
  manifest_opt->excludes(synthetic_opt);
  train_cmd->add_option("--cloud-points", c.cloud_points, "Points per synthetic cloud")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--out-model", c.out_model, "Model file to write")->required();
  train_cmd->add_option("--epochs", c.epochs, "Gradient steps")->check(CLI::NonNegativeNumber)->capture_default_str();
  train_cmd->add_option("--lr", c.lr, "Learning rate")->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--features", c.features, "Random feature count")->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--seed", c.seed, "Feature seed (and synthetic data seed)")->capture_default_str();

  auto* predict_cmd = app.add_subcommand("predict", "Print the class scores of one cloud");
  add_points(predict_cmd, c);
  add_classifier(predict_cmd, c);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (explain_cmd->parsed()) {
      if (c.labels.empty() && c.clusters.empty()) {
        throw CLI::RequiredError("explain needs --labels or --clusters");
      }
      if (c.refine && c.labels.empty()) throw CLI::RequiredError("--refine requires --labels");
    }
    if (train_cmd->parsed() && c.manifest.empty() && !c.synthetic) {
      throw CLI::RequiredError("train needs --manifest or --synthetic");
    }
    if (baseline_cmd->parsed() && c.clusters.empty()) c.clusters = {3, 5, 8, 12};
    if (noise_cmd->parsed() && noise_cmd->count("--percents") == 0) c.percents = {5, 10};
    for (double p : c.percents) {
      if (!(p > 0.0)) throw CLI::ValidationError("--percents", "noise levels must be > 0");
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (explain_cmd->parsed()) return cmd_explain(c, out);
    if (refine_cmd->parsed()) return cmd_refine(c, out);
    if (baseline_cmd->parsed()) return cmd_baseline(c, out);
    if (noise_cmd->parsed()) return cmd_noise_sweep(c, out);
    if (inv_cmd->parsed()) return cmd_invariance(c, out);
    if (train_cmd->parsed()) return cmd_train(c, out);
    if (predict_cmd->parsed()) return cmd_predict(c, out);
  } catch (const std::exception& e) {
    err << "pcxai: error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace pcxai::cli
