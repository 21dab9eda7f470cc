// SPDX-FileCopyrightText: 2026 The pcxai Authors
// SPDX-License-Identifier: Apache-2.0

#include "pcxai/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <vector>

#include "pcxai/error.hpp"

namespace pcxai {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

// Splits `text` into lines and each line into whitespace-separated fields.
// Calls fn(line_number, fields) for every non-empty line.
template <typename Fn>
void for_each_record(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::vector<std::string_view> fields;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    fields.clear();
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && is_space(line[i])) ++i;
      std::size_t j = i;
      while (j < line.size() && !is_space(line[j])) ++j;
      if (j > i) fields.push_back(line.substr(i, j - i));
      i = j;
    }
    if (!fields.empty()) fn(line_no, std::span<const std::string_view>(fields));
  }
}

template <typename T>
bool parse_number(std::string_view field, T& out) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_double_17(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading " + path.string());
  return std::move(ss).str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  auto out = open_for_write(path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  finish_write(out, path);
}

PointCloud parse_points(std::string_view text, const std::string& source) {
  std::vector<Point3> points;
  for_each_record(text, [&](std::size_t line, std::span<const std::string_view> fields) {
    if (fields.size() < 3) {
      throw ParseError(source, line, "expected at least 3 coordinates, found " +
                                         std::to_string(fields.size()));
    }
    double xyz[3];
    for (int k = 0; k < 3; ++k) {
      if (!parse_number(fields[k], xyz[k])) {
        throw ParseError(source, line, "invalid number '" + std::string(fields[k]) + "'");
      }
      if (!std::isfinite(xyz[k])) {
        throw ParseError(source, line, "non-finite coordinate '" + std::string(fields[k]) + "'");
      }
    }
    points.push_back({xyz[0], xyz[1], xyz[2]});
  });
  if (points.empty()) throw ValidationError(source + ": no points found");
  return PointCloud(std::move(points));
}

PointCloud read_points(const std::filesystem::path& path) {
  return parse_points(read_text_file(path), path.string());
}

void write_points(const PointCloud& cloud, const std::filesystem::path& path) {
  std::string text;
  for (const auto& p : cloud) {
    text += format_double_17(p.x);
    text += ' ';
    text += format_double_17(p.y);
    text += ' ';
    text += format_double_17(p.z);
    text += '\n';
  }
  write_text_file(path, text);
}

SegmentLabeling parse_labels(std::string_view text, const PointCloud& cloud,
                             const std::string& source) {
  std::vector<int> labels;
  for_each_record(text, [&](std::size_t line, std::span<const std::string_view> fields) {
    if (fields.size() != 1) {
      throw ParseError(source, line, "expected one integer label per line");
    }
    int value = 0;
    if (!parse_number(fields[0], value)) {
      throw ParseError(source, line, "invalid label '" + std::string(fields[0]) + "'");
    }
    if (value < 0) throw ParseError(source, line, "negative label " + std::to_string(value));
    labels.push_back(value);
  });
  if (labels.size() != cloud.size()) {
    throw ValidationError(source + ": " + std::to_string(labels.size()) +
                          " labels for a cloud of " + std::to_string(cloud.size()) + " points");
  }
  return SegmentLabeling(cloud, std::move(labels));
}

SegmentLabeling read_labels(const std::filesystem::path& path, const PointCloud& cloud) {
  return parse_labels(read_text_file(path), cloud, path.string());
}

void write_labels(const SegmentLabeling& labeling, const std::filesystem::path& path) {
  std::string text;
  for (int id : labeling.labels()) {
    text += std::to_string(id);
    text += '\n';
  }
  write_text_file(path, text);
}

Rgb saliency_color(double value, double lo, double hi) noexcept {
  if (!std::isfinite(value) || !(hi > lo)) return {128, 128, 128};
  const double t = std::clamp((value - lo) / (hi - lo), 0.0, 1.0);
  const auto channel = [](double x) {
    return static_cast<std::uint8_t>(std::floor(255.0 * x + 0.5));
  };
  return {channel(t), 0, channel(1.0 - t)};
}

void write_colored_ply(const PointCloud& cloud, const SaliencyMap& map, std::ostream& out) {
  const auto& field = map.per_point();
  if (field.size() != cloud.size()) {
    throw ValidationError("saliency field has " + std::to_string(field.size()) +
                          " values for a cloud of " + std::to_string(cloud.size()) + " points");
  }
  double lo = INFINITY;
  double hi = -INFINITY;
  for (double v : field) {
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }

  std::string text;
  text += "ply\nformat ascii 1.0\nelement vertex " + std::to_string(cloud.size()) + "\n";
  text += "property float x\nproperty float y\nproperty float z\n";
  text += "property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n";
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud[i];
    const Rgb c = saliency_color(field[i], lo, hi);
    char buf[32];
    for (double coord : {p.x, p.y, p.z}) {
      const auto res = std::to_chars(buf, buf + sizeof buf, static_cast<float>(coord));
      text.append(buf, res.ptr);
      text += ' ';
    }
    text += std::to_string(c[0]) + ' ' + std::to_string(c[1]) + ' ' + std::to_string(c[2]) + '\n';
  }
  out << text;
}

void write_colored_ply(const PointCloud& cloud, const SaliencyMap& map,
                       const std::filesystem::path& path) {
  std::ostringstream ss;
  write_colored_ply(cloud, map, ss);
  write_text_file(path, ss.str());
}

void write_saliency_csv(const SaliencyMap& map, const SegmentLabeling& labeling,
                        std::ostream& out) {
  std::string text = "segment_id,part_name,mechanism,attribution\n";
  const std::string mechanism(to_string(map.mechanism()));
  for (const auto& [id, value] : map.per_segment()) {
    if (!labeling.contains(id)) {
      throw ValidationError("saliency map segment " + std::to_string(id) +
                            " is not present in the labeling");
    }
    text += std::to_string(id) + ',' + csv_field(labeling.part_name(id)) + ',' + mechanism + ',' +
            format_double(value) + '\n';
  }
  out << text;
}

void write_saliency_csv(const SaliencyMap& map, const SegmentLabeling& labeling,
                        const std::filesystem::path& path) {
  std::ostringstream ss;
  write_saliency_csv(map, labeling, ss);
  write_text_file(path, ss.str());
}

}  // namespace pcxai
