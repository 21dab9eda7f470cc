// SPDX-FileCopyrightText: 2026 The pcxai Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include "pcxai/point_cloud.hpp"
#include "pcxai/saliency_map.hpp"

namespace pcxai {

// Points file: one "x y z" per non-empty line; extra columns are ignored.
PointCloud read_points(const std::filesystem::path& path);
PointCloud parse_points(std::string_view text, const std::string& source = "<points>");

// Writes 17 significant digits so a read reproduces every coordinate exactly.
void write_points(const PointCloud& cloud, const std::filesystem::path& path);

// Labels file: one non-negative integer per non-empty line.
SegmentLabeling read_labels(const std::filesystem::path& path, const PointCloud& cloud);
SegmentLabeling parse_labels(std::string_view text, const PointCloud& cloud,
                             const std::string& source = "<labels>");
void write_labels(const SegmentLabeling& labeling, const std::filesystem::path& path);

using Rgb = std::array<std::uint8_t, 3>;

// Linear blue (lo) to red (hi) colormap, channels rounded half-up.
// Non-finite values and a degenerate range map to mid gray.
Rgb saliency_color(double value, double lo, double hi) noexcept;

void write_colored_ply(const PointCloud& cloud, const SaliencyMap& map, std::ostream& out);
void write_colored_ply(const PointCloud& cloud, const SaliencyMap& map,
                       const std::filesystem::path& path);

// Header `segment_id,part_name,mechanism,attribution`; rows by ascending id.
void write_saliency_csv(const SaliencyMap& map, const SegmentLabeling& labeling,
                        std::ostream& out);
void write_saliency_csv(const SaliencyMap& map, const SegmentLabeling& labeling,
                        const std::filesystem::path& path);

// Locale-independent number formatting.
std::string format_double(double v);             // shortest round-trip form
std::string format_double_17(double v);          // 17 significant digits

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace pcxai
