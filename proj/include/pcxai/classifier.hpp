// SPDX-FileCopyrightText: 2026 The pcxai Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcxai/point_cloud.hpp"

namespace pcxai {

// One probability per class; every entry in [0, 1], sum within 1e-6 of 1.
class ScoreVector {
 public:
  static constexpr double kSumTolerance = 1e-6;

  explicit ScoreVector(std::vector<double> scores);

  std::size_t size() const noexcept { return scores_.size(); }
  double operator[](std::size_t i) const { return scores_[i]; }
  std::span<const double> values() const noexcept { return scores_; }
  // Lowest index among the maxima.
  int argmax() const noexcept;

  friend bool operator==(const ScoreVector&, const ScoreVector&) = default;

 private:
  std::vector<double> scores_;
};

ScoreVector softmax(std::span<const double> logits);

// Score of the target class; throws ValidationError when out of range.
double target_score(const ScoreVector& scores, int target);

// The classifier contract P(s). Implementations must be deterministic.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual ScoreVector predict(const PointCloud& cloud) const = 0;
  virtual int class_count() const = 0;
  // True when predict may be called from several threads at once.
  virtual bool concurrent() const { return true; }
};

using ClassifierHandle = std::shared_ptr<const Classifier>;

// Frozen random per-point features h_j(p) = tanh(w_j . p + b_j).
// Parameters of feature j depend only on (seed, j): eight SplitMix64 draws
// u_0..u_7 give w_j = three Box-Muller normals from (u_0,u_1), (u_2,u_3),
// (u_4,u_5) and b_j = 2 u_6 - 1.
class FeatureMap {
 public:
  FeatureMap(int dim, std::uint64_t seed);

  int dim() const noexcept { return static_cast<int>(biases_.size()); }
  std::uint64_t seed() const noexcept { return seed_; }
  const std::array<double, 3>& weight(int j) const { return weights_[static_cast<std::size_t>(j)]; }
  double bias(int j) const { return biases_[static_cast<std::size_t>(j)]; }

  // Elementwise max of the per-point features over the whole cloud.
  std::vector<double> pool(const PointCloud& cloud) const;

 private:
  std::uint64_t seed_;
  std::vector<std::array<double, 3>> weights_;
  std::vector<double> biases_;
};

// Max-pooled random features followed by a linear head and softmax.
class BuiltinModel {
 public:
  static constexpr int kDefaultFeatureDim = 256;

  // head_weights is row-major C x D.
  BuiltinModel(int class_count, int feature_dim, std::uint64_t feature_seed,
               std::vector<double> head_weights, std::vector<double> head_bias,
               std::vector<std::string> class_names = {});

  static BuiltinModel untrained(int class_count, int feature_dim, std::uint64_t feature_seed);

  int class_count() const noexcept { return static_cast<int>(bias_.size()); }
  int feature_dim() const noexcept { return features_.dim(); }
  std::uint64_t feature_seed() const noexcept { return features_.seed(); }
  const FeatureMap& features() const noexcept { return features_; }
  std::span<const double> head_weights() const noexcept { return weights_; }
  std::span<const double> head_bias() const noexcept { return bias_; }
  const std::vector<std::string>& class_names() const noexcept { return names_; }

  std::vector<double> logits(std::span<const double> pooled) const;
  ScoreVector predict_pooled(std::span<const double> pooled) const;
  ScoreVector predict(const PointCloud& cloud) const;

  // Text format: "pcxc 1", "classes C feat D seed S", then C rows of D
  // weights followed by the bias.
  std::string serialize() const;
  static BuiltinModel parse(std::string_view text, const std::string& source = "<model>");
  void save(const std::filesystem::path& path) const;
  static BuiltinModel load(const std::filesystem::path& path);

 private:
  FeatureMap features_;
  std::vector<double> weights_;
  std::vector<double> bias_;
  std::vector<std::string> names_;
};

class BuiltinClassifier final : public Classifier {
 public:
  explicit BuiltinClassifier(BuiltinModel model) : model_(std::move(model)) {}
  ScoreVector predict(const PointCloud& cloud) const override { return model_.predict(cloud); }
  int class_count() const override { return model_.class_count(); }
  const BuiltinModel& model() const noexcept { return model_; }

 private:
  BuiltinModel model_;
};

struct TrainSample {
  PointCloud cloud;
  int label;
};

struct TrainConfig {
  double learning_rate = 0.5;
  int epochs = 1000;
  std::uint64_t seed = 0;  // feature seed
  int feature_dim = BuiltinModel::kDefaultFeatureDim;
  int class_count = 0;  // 0: one more than the largest label
  std::vector<std::string> class_names;
};

struct TrainResult {
  BuiltinModel model;
  double accuracy;  // on the training samples
};

// Mean cross-entropy of the head over pooled features, and its gradient.
struct HeadGradient {
  double loss = 0.0;
  std::vector<double> d_weights;  // row-major C x D
  std::vector<double> d_bias;
};

HeadGradient head_gradient(const BuiltinModel& model,
                           std::span<const std::vector<double>> pooled,
                           std::span<const int> labels);

// Full-batch gradient descent on the head from a zero start; features stay frozen.
TrainResult train_builtin(std::span<const TrainSample> samples, const TrainConfig& config);

double accuracy(const BuiltinModel& model, std::span<const TrainSample> samples);

// "builtin:<model path>" or "extern:<command line>". expected_classes = 0
// accepts whatever class count the classifier declares.
ClassifierHandle open_classifier(std::string_view spec, int expected_classes = 0);

}  // namespace pcxai
