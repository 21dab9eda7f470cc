// SPDX-FileCopyrightText: 2026 The pcxai Authors
// SPDX-License-Identifier: Apache-2.0

#include "pcxai/classifier.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "pcxai/error.hpp"
#include "pcxai/io.hpp"
#include "pcxai/random.hpp"

namespace pcxai {

namespace {

void head_logits(std::span<const double> weights, std::span<const double> bias,
                 std::span<const double> pooled, std::vector<double>& out) {
  const std::size_t d = pooled.size();
  out.assign(bias.begin(), bias.end());
  for (std::size_t c = 0; c < out.size(); ++c) {
    const double* row = weights.data() + c * d;
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) acc += row[j] * pooled[j];
    out[c] += acc;
  }
}

}  // namespace

ScoreVector::ScoreVector(std::vector<double> scores) : scores_(std::move(scores)) {
  if (scores_.size() < 2) throw ValidationError("score vector needs at least 2 classes");
  double sum = 0.0;
  for (double s : scores_) {
    if (!(s >= 0.0 && s <= 1.0)) {
      throw ValidationError("score " + format_double(s) + " outside [0, 1]");
    }
    sum += s;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw ValidationError("scores sum to " + format_double(sum) + ", expected 1");
  }
}

int ScoreVector::argmax() const noexcept {
  return static_cast<int>(std::max_element(scores_.begin(), scores_.end()) - scores_.begin());
}

ScoreVector softmax(std::span<const double> logits) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t c = 0; c < logits.size(); ++c) {
    out[c] = std::exp(logits[c] - peak);
    sum += out[c];
  }
  for (double& v : out) v /= sum;
  return ScoreVector(std::move(out));
}

double target_score(const ScoreVector& scores, int target) {
  if (target < 0 || static_cast<std::size_t>(target) >= scores.size()) {
    throw ValidationError("target class " + std::to_string(target) + " out of range for " +
                          std::to_string(scores.size()) + " classes");
  }
  return scores[static_cast<std::size_t>(target)];
}

FeatureMap::FeatureMap(int dim, std::uint64_t seed) : seed_(seed) {
  if (dim < 1) throw ValidationError("feature dimension must be >= 1");
  weights_.resize(static_cast<std::size_t>(dim));
  biases_.resize(static_cast<std::size_t>(dim));
  const std::uint64_t base = splitmix64(seed);
  for (std::size_t j = 0; j < weights_.size(); ++j) {
    double u[8];
    for (std::uint64_t k = 0; k < 8; ++k) u[k] = unit_from_bits(splitmix64(base + 8 * j + k));
    weights_[j] = {box_muller(u[0], u[1]), box_muller(u[2], u[3]), box_muller(u[4], u[5])};
    biases_[j] = 2.0 * u[6] - 1.0;
  }
}

std::vector<double> FeatureMap::pool(const PointCloud& cloud) const {
  std::vector<double> pooled(biases_.size(), -INFINITY);
  for (const auto& p : cloud) {
    for (std::size_t j = 0; j < biases_.size(); ++j) {
      const auto& w = weights_[j];
      const double h = std::tanh(w[0] * p.x + w[1] * p.y + w[2] * p.z + biases_[j]);
      pooled[j] = std::max(pooled[j], h);
    }
  }
  return pooled;
}

BuiltinModel::BuiltinModel(int class_count, int feature_dim, std::uint64_t feature_seed,
                           std::vector<double> head_weights, std::vector<double> head_bias,
                           std::vector<std::string> class_names)
    : features_(feature_dim, feature_seed),
      weights_(std::move(head_weights)),
      bias_(std::move(head_bias)),
      names_(std::move(class_names)) {
  if (class_count < 2) throw ValidationError("builtin model needs at least 2 classes");
  const auto c = static_cast<std::size_t>(class_count);
  const auto d = static_cast<std::size_t>(feature_dim);
  if (weights_.size() != c * d) throw ValidationError("head weights must be classes x features");
  if (bias_.size() != c) throw ValidationError("head bias must hold one value per class");
  for (double v : weights_) {
    if (!std::isfinite(v)) throw ValidationError("non-finite head weight");
  }
  for (double v : bias_) {
    if (!std::isfinite(v)) throw ValidationError("non-finite head bias");
  }
  if (names_.empty()) {
    for (std::size_t k = 0; k < c; ++k) names_.push_back("class_" + std::to_string(k));
  }
  if (names_.size() != c) throw ValidationError("class name count must equal class count");
}

BuiltinModel BuiltinModel::untrained(int class_count, int feature_dim, std::uint64_t feature_seed) {
  const auto c = static_cast<std::size_t>(std::max(class_count, 0));
  const auto d = static_cast<std::size_t>(std::max(feature_dim, 0));
  return BuiltinModel(class_count, feature_dim, feature_seed, std::vector<double>(c * d, 0.0),
                      std::vector<double>(c, 0.0));
}

std::vector<double> BuiltinModel::logits(std::span<const double> pooled) const {
  if (pooled.size() != static_cast<std::size_t>(feature_dim())) {
    throw ValidationError("pooled feature size does not match the model");
  }
  std::vector<double> out;
  head_logits(weights_, bias_, pooled, out);
  return out;
}

ScoreVector BuiltinModel::predict_pooled(std::span<const double> pooled) const {
  return softmax(logits(pooled));
}

ScoreVector BuiltinModel::predict(const PointCloud& cloud) const {
  return predict_pooled(features_.pool(cloud));
}

std::string BuiltinModel::serialize() const {
  const auto d = static_cast<std::size_t>(feature_dim());
  std::string text = "pcxc 1\nclasses " + std::to_string(class_count()) + " feat " +
                     std::to_string(d) + " seed " + std::to_string(feature_seed()) + "\n";
  for (std::size_t c = 0; c < bias_.size(); ++c) {
    for (std::size_t j = 0; j < d; ++j) {
      text += format_double_17(weights_[c * d + j]);
      text += ' ';
    }
    text += format_double_17(bias_[c]);
    text += '\n';
  }
  return text;
}

BuiltinModel BuiltinModel::parse(std::string_view text, const std::string& source) {
  std::vector<std::vector<std::string>> lines;
  {
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
      std::istringstream fields(line);
      std::vector<std::string> tokens;
      for (std::string tok; fields >> tok;) tokens.push_back(tok);
      lines.push_back(std::move(tokens));
    }
  }
  if (lines.size() < 2 || lines[0] != std::vector<std::string>{"pcxc", "1"}) {
    throw ParseError(source, 1, "expected header 'pcxc 1'");
  }
  const auto& shape = lines[1];
  if (shape.size() != 6 || shape[0] != "classes" || shape[2] != "feat" || shape[4] != "seed") {
    throw ParseError(source, 2, "expected 'classes C feat D seed S'");
  }
  const auto to_int = [&](const std::string& s, auto& out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw ParseError(source, 2, "invalid integer '" + s + "'");
    }
  };
  int classes = 0;
  int dim = 0;
  std::uint64_t seed = 0;
  to_int(shape[1], classes);
  to_int(shape[3], dim);
  to_int(shape[5], seed);
  if (classes < 2 || dim < 1) throw ParseError(source, 2, "class count must be >= 2 and features >= 1");

  const auto c = static_cast<std::size_t>(classes);
  const auto d = static_cast<std::size_t>(dim);
  std::vector<double> weights;
  std::vector<double> bias;
  weights.reserve(c * d);
  std::size_t row = 0;
  for (std::size_t l = 2; l < lines.size(); ++l) {
    if (lines[l].empty()) continue;
    if (row == c) throw ParseError(source, l + 1, "more head rows than classes");
    if (lines[l].size() != d + 1) {
      throw ParseError(source, l + 1, "expected " + std::to_string(d + 1) + " values");
    }
    for (std::size_t j = 0; j <= d; ++j) {
      const auto& tok = lines[l][j];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
        throw ParseError(source, l + 1, "invalid number '" + tok + "'");
      }
      (j < d ? weights : bias).push_back(v);
    }
    ++row;
  }
  if (row != c) throw ParseError(source, lines.size(), "expected " + std::to_string(c) + " head rows");
  return BuiltinModel(classes, dim, seed, std::move(weights), std::move(bias));
}

void BuiltinModel::save(const std::filesystem::path& path) const { write_text_file(path, serialize()); }

BuiltinModel BuiltinModel::load(const std::filesystem::path& path) {
  return parse(read_text_file(path), path.string());
}

namespace {

HeadGradient head_gradient_impl(std::span<const double> weights, std::span<const double> bias,
                                std::span<const std::vector<double>> pooled,
                                std::span<const int> labels) {
  const std::size_t c_count = bias.size();
  const std::size_t d = weights.size() / c_count;
  HeadGradient g;
  g.d_weights.assign(c_count * d, 0.0);
  g.d_bias.assign(c_count, 0.0);
  const double inv_n = 1.0 / static_cast<double>(pooled.size());
  std::vector<double> logits;
  for (std::size_t n = 0; n < pooled.size(); ++n) {
    head_logits(weights, bias, pooled[n], logits);
    const double peak = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double z : logits) sum += std::exp(z - peak);
    const double log_norm = peak + std::log(sum);
    const auto y = static_cast<std::size_t>(labels[n]);
    g.loss += (log_norm - logits[y]) * inv_n;
    for (std::size_t c = 0; c < c_count; ++c) {
      const double residual = (std::exp(logits[c] - log_norm) - (c == y ? 1.0 : 0.0)) * inv_n;
      g.d_bias[c] += residual;
      double* row = g.d_weights.data() + c * d;
      for (std::size_t j = 0; j < d; ++j) row[j] += residual * pooled[n][j];
    }
  }
  return g;
}

}  // namespace

HeadGradient head_gradient(const BuiltinModel& model, std::span<const std::vector<double>> pooled,
                           std::span<const int> labels) {
  return head_gradient_impl(model.head_weights(), model.head_bias(), pooled, labels);
}

TrainResult train_builtin(std::span<const TrainSample> samples, const TrainConfig& config) {
  if (samples.empty()) throw ValidationError("training set is empty");
  if (config.epochs < 0) throw ValidationError("epochs must be >= 0");
  if (!(config.learning_rate > 0.0)) throw ValidationError("learning rate must be > 0");

  int max_label = -1;
  std::vector<int> labels;
  labels.reserve(samples.size());
  for (const auto& s : samples) {
    if (s.label < 0) throw ValidationError("negative class index in training set");
    max_label = std::max(max_label, s.label);
    labels.push_back(s.label);
  }
  const int classes = config.class_count > 0 ? config.class_count : max_label + 1;
  if (max_label >= classes) {
    throw ValidationError("class index " + std::to_string(max_label) + " >= class count " +
                          std::to_string(classes));
  }
  if (std::all_of(labels.begin(), labels.end(), [&](int l) { return l == labels.front(); })) {
    throw ValidationError("degenerate training set: only one class present");
  }

  BuiltinModel model = BuiltinModel::untrained(classes, config.feature_dim, config.seed);
  std::vector<std::vector<double>> pooled;
  pooled.reserve(samples.size());
  for (const auto& s : samples) pooled.push_back(model.features().pool(s.cloud));

  std::vector<double> weights(model.head_weights().begin(), model.head_weights().end());
  std::vector<double> bias(model.head_bias().begin(), model.head_bias().end());
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto g = head_gradient_impl(weights, bias, pooled, labels);
    for (std::size_t i = 0; i < weights.size(); ++i) weights[i] -= config.learning_rate * g.d_weights[i];
    for (std::size_t i = 0; i < bias.size(); ++i) bias[i] -= config.learning_rate * g.d_bias[i];
  }
  model = BuiltinModel(classes, config.feature_dim, config.seed, std::move(weights), std::move(bias),
                       config.class_names);

  std::size_t correct = 0;
  for (std::size_t n = 0; n < pooled.size(); ++n) {
    if (model.predict_pooled(pooled[n]).argmax() == labels[n]) ++correct;
  }
  return {std::move(model), static_cast<double>(correct) / static_cast<double>(samples.size())};
}

double accuracy(const BuiltinModel& model, std::span<const TrainSample> samples) {
  if (samples.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& s : samples) {
    if (model.predict(s.cloud).argmax() == s.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(samples.size());
}

}  // namespace pcxai
