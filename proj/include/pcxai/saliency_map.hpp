// SPDX-FileCopyrightText: 2026 The pcxai Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pcxai/point_cloud.hpp"

namespace pcxai {

// Per-segment attributions for one target class plus the derived per-point
// field. Segments whose perturbation failed carry an error message instead
// of an attribution; their points hold NaN in the per-point field.
class SaliencyMap {
 public:
  SaliencyMap(Mechanism mechanism, int target_class, std::map<int, double> per_segment,
              const SegmentLabeling& labeling, std::map<int, std::string> errors = {});

  Mechanism mechanism() const noexcept { return mechanism_; }
  int target_class() const noexcept { return target_class_; }
  const std::map<int, double>& per_segment() const noexcept { return per_segment_; }
  const std::vector<double>& per_point() const noexcept { return per_point_; }
  const std::map<int, std::string>& errors() const noexcept { return errors_; }

  // Segment with the largest attribution (lowest id on ties), if any.
  std::optional<int> top_segment() const;

 private:
  Mechanism mechanism_;
  int target_class_;
  std::map<int, double> per_segment_;
  std::map<int, std::string> errors_;
  std::vector<double> per_point_;
};

}  // namespace pcxai
