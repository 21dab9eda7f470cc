// SPDX-FileCopyrightText: 2026 The pcxai Authors
// SPDX-License-Identifier: Apache-2.0

#include "pcxai/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>

#include "pcxai/error.hpp"

namespace pcxai::synthetic {
namespace {

using Sampler = std::function<Point3(Rng&)>;

struct Part {
  int label;
  double weight;
  Sampler sample;
};

Point3 box_surface(Rng& rng, Point3 c, Point3 h) {
  const std::array<double, 3> area{h.y * h.z, h.x * h.z, h.x * h.y};
  double r = uniform01(rng) * (area[0] + area[1] + area[2]);
  int axis = 0;
  while (axis < 2 && r >= area[static_cast<std::size_t>(axis)]) r -= area[static_cast<std::size_t>(axis++)];
  const double side = uniform01(rng) < 0.5 ? -1.0 : 1.0;
  Point3 p{uniform(rng, -h.x, h.x), uniform(rng, -h.y, h.y), uniform(rng, -h.z, h.z)};
  if (axis == 0) p.x = side * h.x;
  if (axis == 1) p.y = side * h.y;
  if (axis == 2) p.z = side * h.z;
  return {c.x + p.x, c.y + p.y, c.z + p.z};
}

// Axis 0 = x, 1 = y, 2 = z.
Point3 cylinder_surface(Rng& rng, Point3 c, int axis, double radius, double half_length) {
  const double t = uniform(rng, -half_length, half_length);
  const double a = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  const double u = radius * std::cos(a);
  const double v = radius * std::sin(a);
  if (axis == 0) return {c.x + t, c.y + u, c.z + v};
  if (axis == 1) return {c.x + u, c.y + t, c.z + v};
  return {c.x + u, c.y + v, c.z + t};
}

// Torus in the xy plane (axle along z).
Point3 ring_surface(Rng& rng, Point3 c, double major, double minor) {
  const double theta = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  const double phi = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  const double r = major + minor * std::cos(phi);
  return {c.x + r * std::cos(theta), c.y + r * std::sin(theta), c.z + minor * std::sin(phi)};
}

LabeledCloud sample_parts(const std::vector<Part>& parts, int points, std::uint64_t seed,
                          std::map<int, std::string> names) {
  if (points < static_cast<int>(parts.size())) throw ValidationError("too few points for the scene");
  double total = 0.0;
  for (const auto& p : parts) total += p.weight;
  std::vector<int> counts;
  int assigned = 0;
  for (const auto& p : parts) {
    const int n = std::max(1, static_cast<int>(std::floor(points * p.weight / total)));
    counts.push_back(n);
    assigned += n;
  }
  for (std::size_t i = 0; assigned < points; i = (i + 1) % counts.size(), ++assigned) ++counts[i];
  for (std::size_t i = counts.size(); assigned > points;) {
    i = (i + counts.size() - 1) % counts.size();
    if (counts[i] > 1) {
      --counts[i];
      --assigned;
    }
  }

  Rng rng(seed);
  std::vector<Point3> pts;
  std::vector<int> labels;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    for (int n = 0; n < counts[i]; ++n) {
      pts.push_back(parts[i].sample(rng));
      labels.push_back(parts[i].label);
    }
  }
  PointCloud cloud(std::move(pts));
  SegmentLabeling labeling(cloud, std::move(labels), std::move(names));
  return {std::move(cloud), std::move(labeling)};
}

// Rotation by a random axis and an angle of at most `max_angle` radians.
std::array<double, 9> random_rotation(Rng& rng, double max_angle) {
  Point3 axis{standard_normal(rng), standard_normal(rng), standard_normal(rng)};
  const double len = std::sqrt(axis.x * axis.x + axis.y * axis.y + axis.z * axis.z);
  const double half = 0.5 * uniform(rng, -max_angle, max_angle);
  const double s = len > 0 ? std::sin(half) / len : 0.0;
  const double w = std::cos(half), x = axis.x * s, y = axis.y * s, z = axis.z * s;
  return {1 - 2 * (y * y + z * z), 2 * (x * y - z * w),     2 * (x * z + y * w),
          2 * (x * y + z * w),     1 - 2 * (x * x + z * z), 2 * (y * z - x * w),
          2 * (x * z - y * w),     2 * (y * z + x * w),     1 - 2 * (x * x + y * y)};
}

// Shapes keep a dominant orientation; a linear head on max-pooled features
// cannot separate fully randomly rotated primitives.
constexpr double kMaxTilt = 0.35;

}  // namespace

std::string_view shape_name(ShapeKind kind) noexcept {
  switch (kind) {
    case ShapeKind::Sphere: return "sphere";
    case ShapeKind::Box: return "box";
    case ShapeKind::Plane: return "plane";
    case ShapeKind::Line: return "line";
  }
  return "unknown";
}

PointCloud make_shape(ShapeKind kind, int points, Rng& rng) {
  if (points < 1) throw ValidationError("make_shape: need at least one point");
  const double radius = uniform(rng, 0.5, 0.9);
  const Point3 half{uniform(rng, 0.3, 0.6), uniform(rng, 0.3, 0.6), uniform(rng, 0.3, 0.6)};
  const double plane_a = uniform(rng, 0.5, 0.9);
  const double plane_b = uniform(rng, 0.5, 0.9);
  const double length = uniform(rng, 0.6, 0.9);
  const auto rot = random_rotation(rng, kMaxTilt);
  const Point3 offset{uniform(rng, -0.1, 0.1), uniform(rng, -0.1, 0.1), uniform(rng, -0.1, 0.1)};

  std::vector<Point3> pts;
  pts.reserve(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    Point3 p;
    switch (kind) {
      case ShapeKind::Sphere: {
        Point3 g{standard_normal(rng), standard_normal(rng), standard_normal(rng)};
        const double n = std::sqrt(g.x * g.x + g.y * g.y + g.z * g.z);
        p = n > 0 ? Point3{radius * g.x / n, radius * g.y / n, radius * g.z / n} : Point3{radius, 0, 0};
        break;
      }
      case ShapeKind::Box:
        p = box_surface(rng, {}, half);
        break;
      case ShapeKind::Plane:
        p = {uniform(rng, -plane_a, plane_a), uniform(rng, -plane_b, plane_b), uniform(rng, -0.01, 0.01)};
        break;
      case ShapeKind::Line:
        p = {uniform(rng, -length, length), uniform(rng, -0.01, 0.01), uniform(rng, -0.01, 0.01)};
        break;
    }
    pts.push_back({rot[0] * p.x + rot[1] * p.y + rot[2] * p.z + offset.x,
                   rot[3] * p.x + rot[4] * p.y + rot[5] * p.z + offset.y,
                   rot[6] * p.x + rot[7] * p.y + rot[8] * p.z + offset.z});
  }
  return PointCloud(std::move(pts));
}

std::vector<TrainSample> shape_suite(int per_class, int points, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<TrainSample> out;
  out.reserve(static_cast<std::size_t>(per_class * kShapeKinds));
  for (int i = 0; i < per_class; ++i) {
    for (int k = 0; k < kShapeKinds; ++k) {
      out.push_back({make_shape(static_cast<ShapeKind>(k), points, rng), k});
    }
  }
  return out;
}

Split split_by_class(const std::vector<TrainSample>& samples, double train_fraction) {
  std::map<int, std::size_t> totals;
  for (const auto& s : samples) ++totals[s.label];
  std::map<int, std::size_t> seen;
  Split split;
  for (const auto& s : samples) {
    const auto quota = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(totals[s.label])));
    (seen[s.label]++ < quota ? split.train : split.test).push_back(s);
  }
  return split;
}

LabeledCloud make_chair(int points, std::uint64_t seed) {
  std::vector<Part> parts;
  parts.push_back({0, 1.0 * 1.0, [](Rng& r) { return box_surface(r, {0, 0, 0}, {0.5, 0.04, 0.5}); }});
  parts.push_back({1, 1.0 * 0.9, [](Rng& r) { return box_surface(r, {0, 0.5, -0.46}, {0.5, 0.45, 0.04}); }});
  parts.push_back({2, 4 * 0.2 * 0.9, [](Rng& r) {
                     const int leg = static_cast<int>(uniform_index(r, 4));
                     const double x = (leg & 1) ? 0.42 : -0.42;
                     const double z = (leg & 2) ? 0.42 : -0.42;
                     return box_surface(r, {x, -0.47, z}, {0.04, 0.45, 0.04});
                   }});
  return sample_parts(parts, points, seed, {{0, "seat"}, {1, "back"}, {2, "legs"}});
}

LabeledCloud make_two_wheels(int points_per_wheel, std::uint64_t seed) {
  std::vector<Part> parts;
  parts.push_back({0, 1.0, [](Rng& r) { return ring_surface(r, {-0.75, 0, 0}, 0.35, 0.06); }});
  parts.push_back({0, 1.0, [](Rng& r) { return ring_surface(r, {0.75, 0, 0}, 0.35, 0.06); }});
  return sample_parts(parts, 2 * points_per_wheel, seed, {{0, "wheels"}});
}

LabeledCloud make_airplane(int points, std::uint64_t seed, int engines) {
  if (engines < 0 || engines % 2 != 0) throw ValidationError("engine count must be even");
  std::vector<Part> parts;
  parts.push_back({0, 2.0, [](Rng& r) { return cylinder_surface(r, {0, 0, 0}, 0, 0.12, 1.0); }});
  parts.push_back({1, 2.0, [](Rng& r) {
                     const double side = uniform01(r) < 0.5 ? -1.0 : 1.0;
                     return box_surface(r, {0.05, 0, side * 0.58}, {0.18, 0.015, 0.45});
                   }});
  parts.push_back({2, 0.6, [](Rng& r) {
                     if (uniform01(r) < 0.5) return box_surface(r, {-0.9, 0.2, 0}, {0.1, 0.2, 0.015});
                     return box_surface(r, {-0.9, 0.02, 0}, {0.08, 0.015, 0.3});
                   }});
  if (engines > 0) {
    parts.push_back({3, 0.3 * engines, [engines](Rng& r) {
                       const int e = static_cast<int>(uniform_index(r, static_cast<std::size_t>(engines)));
                       const int per_side = engines / 2;
                       const double side = e % 2 ? 1.0 : -1.0;
                       const double z = side * (0.35 + 0.5 * (e / 2 + 1) / (per_side + 1));
                       return cylinder_surface(r, {0.15, -0.08, z}, 0, 0.05, 0.15);
                     }});
  }
  std::map<int, std::string> names{{0, "fuselage"}, {1, "wings"}, {2, "tail"}};
  if (engines > 0) names[3] = "engines";
  return sample_parts(parts, points, seed, std::move(names));
}

LabeledCloud make_motorbike(int points, std::uint64_t seed) {
  std::vector<Part> parts;
  parts.push_back({0, 2.0, [](Rng& r) {
                     const double x = uniform01(r) < 0.5 ? -0.75 : 0.75;
                     return ring_surface(r, {x, 0, 0}, 0.35, 0.06);
                   }});
  parts.push_back({1, 1.5, [](Rng& r) { return box_surface(r, {0, 0.4, 0}, {0.5, 0.15, 0.12}); }});
  parts.push_back({2, 0.4, [](Rng& r) { return cylinder_surface(r, {0.6, 0.75, 0}, 2, 0.03, 0.3); }});
  return sample_parts(parts, points, seed, {{0, "wheels"}, {1, "body"}, {2, "handlebar"}});
}

SegmentLabeling perturb_labels(const LabeledCloud& scene, double rate, double radius,
                               std::uint64_t seed) {
  Rng rng(seed);
  const auto& cloud = scene.cloud;
  std::vector<int> labels(scene.labeling.labels().begin(), scene.labeling.labels().end());
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (uniform01(rng) >= rate) continue;
    double best = r2;
    int best_label = -1;
    for (std::size_t j = 0; j < cloud.size(); ++j) {
      if (scene.labeling[j] == scene.labeling[i]) continue;
      const double d = squared_distance(cloud[i], cloud[j]);
      if (d <= best) {
        best = d;
        best_label = scene.labeling[j];
      }
    }
    if (best_label >= 0) labels[i] = best_label;
  }
  return SegmentLabeling(cloud, std::move(labels), scene.labeling.names());
}

}  // namespace pcxai::synthetic
