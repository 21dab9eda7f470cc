// SPDX-FileCopyrightText: 2026 The pcxai Authors
// SPDX-License-Identifier: Apache-2.0

#include "pcxai/external_classifier.hpp"

#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <thread>

#include <json.hpp>

#include "pcxai/error.hpp"
#include "pcxai/io.hpp"

extern char** environ;

namespace pcxai {
namespace protocol {

using nlohmann::json;

std::string encode_handshake(int classes) {
  return R"({"protocol":"pcxai-classify","version":1,"classes":)" + std::to_string(classes) + "}";
}

int decode_handshake(std::string_view line) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed handshake: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("protocol") || doc["protocol"] != kName) {
    throw ProtocolError("handshake does not announce protocol 'pcxai-classify'");
  }
  if (!doc.contains("version") || !doc["version"].is_number_integer() || doc["version"] != kVersion) {
    throw ProtocolError("unsupported protocol version in handshake");
  }
  if (!doc.contains("classes") || !doc["classes"].is_number_integer() || doc["classes"].get<long long>() < 2) {
    throw ProtocolError("handshake must declare an integer class count >= 2");
  }
  return doc["classes"].get<int>();
}

std::string encode_request(std::uint64_t id, const PointCloud& cloud) {
  std::string out = R"({"id":)" + std::to_string(id) + R"(,"points":[)";
  bool first = true;
  for (const auto& p : cloud) {
    if (!first) out += ',';
    first = false;
    out += '[';
    out += format_double(p.x);
    out += ',';
    out += format_double(p.y);
    out += ',';
    out += format_double(p.z);
    out += ']';
  }
  out += "]}";
  return out;
}

std::string encode_response(std::uint64_t id, std::span<const double> scores) {
  std::string out = R"({"id":)" + std::to_string(id) + R"(,"scores":[)";
  for (std::size_t c = 0; c < scores.size(); ++c) {
    if (c) out += ',';
    out += format_double(scores[c]);
  }
  return out + "]}";
}

ScoreVector decode_response(std::string_view line, std::uint64_t expected_id, int classes) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed response: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("id") || !doc["id"].is_number_unsigned()) {
    throw ProtocolError("response lacks an unsigned integer id");
  }
  if (doc["id"].get<std::uint64_t>() != expected_id) {
    throw ProtocolError("response id " + doc["id"].dump() + " does not match request id " +
                        std::to_string(expected_id));
  }
  if (doc.contains("error")) {
    throw ProtocolError("adapter reported an error: " + doc["error"].dump());
  }
  if (!doc.contains("scores") || !doc["scores"].is_array()) {
    throw ProtocolError("response lacks a scores array");
  }
  const auto& arr = doc["scores"];
  if (arr.size() != static_cast<std::size_t>(classes)) {
    throw ProtocolError("response has " + std::to_string(arr.size()) + " scores, expected " +
                        std::to_string(classes));
  }
  std::vector<double> scores;
  scores.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_number()) throw ProtocolError("non-numeric score in response");
    scores.push_back(v.get<double>());
  }
  try {
    return ScoreVector(std::move(scores));
  } catch (const ValidationError& e) {
    throw ProtocolError(std::string("invalid scores: ") + e.what());
  }
}

}  // namespace protocol

std::vector<std::string> split_command_line(std::string_view command) {
  std::vector<std::string> args;
  std::string current;
  bool in_token = false;
  char quote = 0;
  for (std::size_t i = 0; i < command.size(); ++i) {
    const char c = command[i];
    if (quote == '\'') {
      if (c == '\'') quote = 0;
      else current += c;
    } else if (c == '\\' && i + 1 < command.size()) {
      current += command[++i];
      in_token = true;
    } else if (quote == '"') {
      if (c == '"') quote = 0;
      else current += c;
    } else if (c == '\'' || c == '"') {
      quote = c;
      in_token = true;
    } else if (c == ' ' || c == '\t' || c == '\n') {
      if (in_token) args.push_back(std::move(current));
      current.clear();
      in_token = false;
    } else {
      current += c;
      in_token = true;
    }
  }
  if (quote) throw ValidationError("unterminated quote in command line");
  if (in_token) args.push_back(std::move(current));
  return args;
}

namespace {

constexpr int kReplyTimeoutMs = 120'000;

}  // namespace

std::shared_ptr<ExternalClassifier> ExternalClassifier::open(std::string_view command_line,
                                                             int expected_classes) {
  const auto args = split_command_line(command_line);
  if (args.empty()) throw SpawnError("empty adapter command line");

  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0) {
    throw SpawnError(std::string("socketpair failed: ") + std::strerror(errno));
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, fds[1], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);

  std::vector<char*> argv;
  for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);

  pid_t pid = 0;
  const int rc = ::posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(fds[1]);
  if (rc != 0) {
    ::close(fds[0]);
    throw SpawnError("cannot spawn '" + args[0] + "': " + std::strerror(rc));
  }

  std::shared_ptr<ExternalClassifier> handle(new ExternalClassifier(pid, fds[0], 0));
  const std::string hello = handle->read_line();
  const int declared = protocol::decode_handshake(hello);
  if (expected_classes > 0 && declared != expected_classes) {
    throw ProtocolError("adapter declares " + std::to_string(declared) + " classes, expected " +
                        std::to_string(expected_classes));
  }
  handle->classes_ = declared;
  return handle;
}

ExternalClassifier::ExternalClassifier(int pid, int fd, int classes)
    : pid_(pid), fd_(fd), classes_(classes) {}

ExternalClassifier::~ExternalClassifier() {
  ::shutdown(fd_, SHUT_RDWR);
  ::close(fd_);
  int status = 0;
  for (int i = 0; i < 200; ++i) {
    if (::waitpid(pid_, &status, WNOHANG) != 0) return;
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  ::kill(pid_, SIGKILL);
  ::waitpid(pid_, &status, 0);
}

void ExternalClassifier::fail(const std::string& message) const {
  broken_ = true;
  throw ProtocolError(message);
}

std::string ExternalClassifier::read_line() const {
  for (;;) {
    if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    pollfd pfd{fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, kReplyTimeoutMs);
    if (ready == 0) fail("timed out waiting for the adapter");
    if (ready < 0) {
      if (errno == EINTR) continue;
      fail(std::string("poll failed: ") + std::strerror(errno));
    }
    char chunk[65536];
    const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
    if (n == 0) fail("adapter closed its output");
    if (n < 0) {
      if (errno == EINTR) continue;
      fail(std::string("read from adapter failed: ") + std::strerror(errno));
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

void ExternalClassifier::write_all(std::string_view data) const {
  while (!data.empty()) {
    const ssize_t n = ::send(fd_, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail(std::string("write to adapter failed: ") + std::strerror(errno));
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

ScoreVector ExternalClassifier::predict(const PointCloud& cloud) const {
  std::lock_guard lock(mutex_);
  if (broken_) throw ProtocolError("adapter session already terminated by a protocol error");
  const std::uint64_t id = next_id_++;
  write_all(protocol::encode_request(id, cloud) + "\n");
  const std::string reply = read_line();
  try {
    return protocol::decode_response(reply, id, classes_);
  } catch (const ProtocolError&) {
    broken_ = true;
    throw;
  }
}

ClassifierHandle open_classifier(std::string_view spec, int expected_classes) {
  if (spec.starts_with("builtin:")) {
    auto model = BuiltinModel::load(std::string(spec.substr(8)));
    if (expected_classes > 0 && model.class_count() != expected_classes) {
      throw ValidationError("model has " + std::to_string(model.class_count()) +
                            " classes, expected " + std::to_string(expected_classes));
    }
    return std::make_shared<BuiltinClassifier>(std::move(model));
  }
  if (spec.starts_with("extern:")) return ExternalClassifier::open(spec.substr(7), expected_classes);
  throw ValidationError("classifier must be 'builtin:<path>' or 'extern:<command>'");
}

}  // namespace pcxai
