// SPDX-FileCopyrightText: 2026 The pcxai Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "pcxai/classifier.hpp"
#include "pcxai/point_cloud.hpp"
#include "pcxai/random.hpp"

namespace pcxai::synthetic {

enum class ShapeKind { Sphere = 0, Box = 1, Plane = 2, Line = 3 };
inline constexpr int kShapeKinds = 4;
std::string_view shape_name(ShapeKind kind) noexcept;

// Surface samples of a randomly scaled, rotated and offset primitive.
PointCloud make_shape(ShapeKind kind, int points, Rng& rng);

// `per_class` samples of every shape kind, labels = ShapeKind index,
// interleaved by class.
std::vector<TrainSample> shape_suite(int per_class, int points, std::uint64_t seed);

struct Split {
  std::vector<TrainSample> train;
  std::vector<TrainSample> test;
};
// First `train_fraction` of each class goes to train, the rest to test.
Split split_by_class(const std::vector<TrainSample>& samples, double train_fraction);

struct LabeledCloud {
  PointCloud cloud;
  SegmentLabeling labeling;
};

// Seat (0), back (1), four legs (2).
LabeledCloud make_chair(int points, std::uint64_t seed);
// Two separated wheel rings sharing segment 0 ("wheels").
LabeledCloud make_two_wheels(int points_per_wheel, std::uint64_t seed);
// Fuselage (0), wings (1), tail (2), engines (3); engines split evenly over both wings.
LabeledCloud make_airplane(int points, std::uint64_t seed, int engines = 2);
// Wheels (0), body (1), handlebar (2).
LabeledCloud make_motorbike(int points, std::uint64_t seed);

// Imitates an imperfect segmentation model: each point takes, with
// probability `rate`, the label of its nearest point from another segment
// when that point lies within `radius`.
SegmentLabeling perturb_labels(const LabeledCloud& scene, double rate, double radius,
                               std::uint64_t seed);

}  // namespace pcxai::synthetic
