// SPDX-FileCopyrightText: 2026 The pcxai Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "pcxai/classifier.hpp"

namespace pcxai {

// Line-delimited JSON protocol spoken with an adapter process over its
// standard streams:
//   adapter -> {"protocol":"pcxai-classify","version":1,"classes":C}
//   client  -> {"id":N,"points":[[x,y,z],...]}
//   adapter -> {"id":N,"scores":[s_0,...,s_{C-1}]}
namespace protocol {

inline constexpr std::string_view kName = "pcxai-classify";
inline constexpr int kVersion = 1;

std::string encode_handshake(int classes);
// Returns the declared class count.
int decode_handshake(std::string_view line);

std::string encode_request(std::uint64_t id, const PointCloud& cloud);
std::string encode_response(std::uint64_t id, std::span<const double> scores);
ScoreVector decode_response(std::string_view line, std::uint64_t expected_id, int classes);

}  // namespace protocol

// Splits a command line on whitespace, honoring single and double quotes
// and backslash escapes outside single quotes.
std::vector<std::string> split_command_line(std::string_view command);

// Client for an adapter process. Requests are serialized: one in flight.
class ExternalClassifier final : public Classifier {
 public:
  // expected_classes = 0 accepts the declared count.
  static std::shared_ptr<ExternalClassifier> open(std::string_view command_line,
                                                  int expected_classes);
  ~ExternalClassifier() override;

  ExternalClassifier(const ExternalClassifier&) = delete;
  ExternalClassifier& operator=(const ExternalClassifier&) = delete;

  ScoreVector predict(const PointCloud& cloud) const override;
  int class_count() const override { return classes_; }
  bool concurrent() const override { return false; }

 private:
  ExternalClassifier(int pid, int fd, int classes);

  std::string read_line() const;
  void write_all(std::string_view data) const;
  void fail(const std::string& message) const;

  int pid_;
  int fd_;
  int classes_ = 0;
  mutable std::mutex mutex_;
  mutable std::string buffer_;
  mutable std::uint64_t next_id_ = 0;
  mutable bool broken_ = false;
};

}  // namespace pcxai
