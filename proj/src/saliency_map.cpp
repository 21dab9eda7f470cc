// SPDX-FileCopyrightText: 2026 The pcxai Authors
// SPDX-License-Identifier: Apache-2.0

#include "pcxai/saliency_map.hpp"

#include <limits>

#include "pcxai/error.hpp"

namespace pcxai {

SaliencyMap::SaliencyMap(Mechanism mechanism, int target_class, std::map<int, double> per_segment,
                         const SegmentLabeling& labeling, std::map<int, std::string> errors)
    : mechanism_(mechanism),
      target_class_(target_class),
      per_segment_(std::move(per_segment)),
      errors_(std::move(errors)) {
  for (const auto& [id, value] : per_segment_) {
    if (!labeling.contains(id)) {
      throw ValidationError("saliency map references unknown segment " + std::to_string(id));
    }
    if (mechanism_ == Mechanism::Absence ? !(value >= 0.0) : !(value <= 0.0)) {
      throw ValidationError("attribution " + std::to_string(value) + " of segment " +
                            std::to_string(id) + " has the wrong sign for the " +
                            std::string(to_string(mechanism_)) + " mechanism");
    }
  }
  per_point_.resize(labeling.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < labeling.size(); ++i) {
    if (auto it = per_segment_.find(labeling[i]); it != per_segment_.end()) {
      per_point_[i] = it->second;
    }
  }
}

std::optional<int> SaliencyMap::top_segment() const {
  std::optional<int> best;
  double best_value = 0.0;
  for (const auto& [id, value] : per_segment_) {
    if (!best || value > best_value) {
      best = id;
      best_value = value;
    }
  }
  return best;
}

}  // namespace pcxai
