// SPDX-FileCopyrightText: 2026 The pcxai Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "pcxai/error.hpp"
#include "pcxai/perturb.hpp"
#include "support.hpp"

using namespace pcxai;

TEST_CASE("destination policies") {
  PointCloud cloud({{0, 0, 0}, {2, 0, 0}, {9, 9, 9}});
  const std::vector<std::size_t> retained = {0, 1};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Point3 d = select_destination(cloud, retained, DestinationPolicy::RandomRetained, seed);
    CHECK((d == cloud[0] || d == cloud[1]));
  }
  CHECK_THROWS_AS(select_destination(cloud, {}, DestinationPolicy::RandomRetained, 1),
                  EmptyRetainedSet);
  PointCloud pair({{0, 0, 0}, {2, 0, 0}});
  CHECK(select_destination(pair, retained, DestinationPolicy::Centroid, 1) == Point3{1, 0, 0});
  CHECK(parse_destination("random") == DestinationPolicy::RandomRetained);
  CHECK(parse_destination("centroid") == DestinationPolicy::Centroid);
  CHECK_FALSE(parse_destination("nearest").has_value());
}

TEST_CASE("random destinations cover the retained set") {
  PointCloud cloud({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}});
  const std::vector<std::size_t> retained = {1, 2, 3};
  std::set<double> seen;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    seen.insert(select_destination(cloud, retained, DestinationPolicy::RandomRetained, seed).x);
  }
  CHECK(seen == std::set<double>{1, 2, 3});
}

TEST_CASE("shift examples") {
  PointCloud cloud({{0, 0, 0}, {1, 1, 1}, {2, 2, 2}, {3, 3, 3}});
  SegmentLabeling l({0, 0, 1, 1});

  SUBCASE("absence moves the segment onto a retained point") {
    // Find a seed whose draw lands on point 0, as the example prescribes.
    std::uint64_t seed = 0;
    const std::vector<std::size_t> retained = {0, 1};
    while (!(select_destination(cloud, retained, DestinationPolicy::RandomRetained, seed) == cloud[0])) ++seed;
    auto out = shift_segment(cloud, l, {Mechanism::Absence, 1, DestinationPolicy::RandomRetained, seed});
    CHECK(out[0] == cloud[0]);
    CHECK(out[1] == cloud[1]);
    CHECK(out[2] == cloud[0]);
    CHECK(out[3] == cloud[0]);
  }
  SUBCASE("presence of the whole cloud changes nothing") {
    SegmentLabeling all({4, 4, 4, 4});
    CHECK(shift_segment(cloud, all, {Mechanism::Presence, 4, DestinationPolicy::RandomRetained, 3}) == cloud);
  }
  SUBCASE("absence of the whole cloud has nowhere to go") {
    SegmentLabeling all({4, 4, 4, 4});
    CHECK_THROWS_AS(shift_segment(cloud, all, {Mechanism::Absence, 4, DestinationPolicy::RandomRetained, 3}),
                    EmptyRetainedSet);
  }
  SUBCASE("unknown segment") {
    CHECK_THROWS_AS(shift_segment(cloud, l, {Mechanism::Absence, 7, DestinationPolicy::RandomRetained, 3}),
                    EmptySegment);
  }
  SUBCASE("presence moves everything else onto the segment") {
    auto out = shift_segment(cloud, l, {Mechanism::Presence, 1, DestinationPolicy::RandomRetained, 5});
    CHECK(out[2] == cloud[2]);
    CHECK(out[3] == cloud[3]);
    CHECK(out[0] == out[1]);
    CHECK((out[0] == cloud[2] || out[0] == cloud[3]));
  }
}

TEST_CASE("shift preserves count, order and untouched points") {
  Rng rng(10);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + uniform_index(rng, 300);
    PointCloud cloud(test::random_points(rng, n));
    std::vector<int> labels(n);
    for (auto& v : labels) v = static_cast<int>(uniform_index(rng, 4));
    SegmentLabeling l(labels);
    const int seg = l.segment_ids()[uniform_index(rng, l.segment_ids().size())];
    const auto mech = uniform01(rng) < 0.5 ? Mechanism::Absence : Mechanism::Presence;
    const auto moved_ids = mech == Mechanism::Absence ? l.indices_of(seg) : l.indices_not_of(seg);
    const auto kept_ids = mech == Mechanism::Absence ? l.indices_not_of(seg) : l.indices_of(seg);
    if (kept_ids.empty()) continue;
    const PerturbationSpec spec{mech, seg, DestinationPolicy::RandomRetained, rng()};
    auto out = shift_segment(cloud, l, spec);
    REQUIRE(out.size() == n);
    for (std::size_t i : kept_ids) REQUIRE(out[i] == cloud[i]);
    // Moved points collapse onto a single retained coordinate.
    std::set<Point3> dest;
    for (std::size_t i : moved_ids) dest.insert(out[i]);
    REQUIRE(dest.size() <= 1);
    if (!dest.empty()) {
      bool found = false;
      for (std::size_t i : kept_ids) found = found || cloud[i] == *dest.begin();
      REQUIRE(found);
    }
    REQUIRE(shift_segment(cloud, l, spec) == out);
  }
}

TEST_CASE("noise bound") {
  // Diagonal 2: the box spans sqrt(4/3) on each axis.
  const double e = 2.0 / std::sqrt(3.0);
  Rng rng(3);
  std::vector<Point3> pts = {{0, 0, 0}, {e, e, e}};
  for (int i = 0; i < 500; ++i) pts.push_back({uniform(rng, 0, e), uniform(rng, 0, e), uniform(rng, 0, e)});
  PointCloud cloud(pts);
  CHECK(cloud.bounding_diagonal() == doctest::Approx(2.0).epsilon(1e-15));
  const double bound = noise_bound(cloud, 5);
  CHECK(bound == doctest::Approx(0.05).epsilon(1e-15));

  auto noisy = add_noise(cloud, {5, 11});
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    REQUIRE(std::fabs(noisy[i].x - cloud[i].x) <= bound);
    REQUIRE(std::fabs(noisy[i].y - cloud[i].y) <= bound);
    REQUIRE(std::fabs(noisy[i].z - cloud[i].z) <= bound);
  }
  CHECK(add_noise(cloud, {5, 11}) == noisy);
  CHECK_FALSE(add_noise(cloud, {5, 12}) == noisy);
  CHECK(noise_bound(cloud, 1e-9) < 1e-10);
  CHECK_THROWS_AS(add_noise(cloud, {0, 1}), ValidationError);
  CHECK_THROWS_AS(add_noise(cloud, {101, 1}), ValidationError);
}

TEST_CASE("noise stays within the bound on random clouds") {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    PointCloud cloud(test::random_points(rng, 1 + uniform_index(rng, 400), uniform(rng, 0.01, 100)));
    const double pct = uniform(rng, 0.1, 100);
    const double bound = noise_bound(cloud, pct);
    auto noisy = add_noise(cloud, {pct, rng()});
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      REQUIRE(std::fabs(noisy[i].x - cloud[i].x) <= bound);
      REQUIRE(std::fabs(noisy[i].y - cloud[i].y) <= bound);
      REQUIRE(std::fabs(noisy[i].z - cloud[i].z) <= bound);
    }
  }
}
