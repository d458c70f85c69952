// Copyright 2026 The TWE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <unistd.h>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "twe/error.hpp"

namespace twe::io {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) fail(ErrorCode::kIo, "read failed on '" + path.string() + "'");
  return std::move(buf).str();
}

// Shortest representation that parses back to the same double.
inline std::string format_double(double value) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return std::to_string(value);
  return std::string(buf, end);
}

inline bool parse_double(std::string_view text, double& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

template <class Int>
bool parse_integer(std::string_view text, Int& out) {
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

/// Splits on runs of ASCII blanks (space, tab, CR). Empty fields are dropped.
inline std::vector<std::string_view> split_blanks(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::string_view chomp(std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
  return line;
}

/// Calls `fn(line_number, line)` for every line of `text`, 1-based.
template <class Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    fn(++line_no, chomp(text.substr(start, end - start)));
    start = end + 1;
  }
}

/// Writes a group of files all-or-nothing. Content goes to sibling temp
/// files first; `commit()` renames them into place. Anything not committed
/// is removed on destruction.
class OutputTransaction {
 public:
  OutputTransaction() = default;
  OutputTransaction(const OutputTransaction&) = delete;
  OutputTransaction& operator=(const OutputTransaction&) = delete;

  ~OutputTransaction() {
    std::error_code ec;
    for (auto& [final_path, temp_path] : staged_) std::filesystem::remove(temp_path, ec);
  }

  void stage(const std::filesystem::path& path, std::string_view content) {
    auto temp = path;
    temp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(staged_.size());
    {
      std::ofstream out(temp, std::ios::binary | std::ios::trunc);
      if (!out) fail(ErrorCode::kIo, "cannot open '" + path.string() + "' for writing");
      out.write(content.data(), static_cast<std::streamsize>(content.size()));
      out.flush();
      if (!out) {
        std::error_code ec;
        std::filesystem::remove(temp, ec);
        fail(ErrorCode::kIo, "write failed on '" + path.string() + "'");
      }
    }
    staged_.emplace_back(path, temp);
  }

  void commit() {
    for (auto& [final_path, temp_path] : staged_) {
      std::error_code ec;
      std::filesystem::rename(temp_path, final_path, ec);
      if (ec) fail(ErrorCode::kIo, "cannot move output into '" + final_path.string() + "': " + ec.message());
    }
    staged_.clear();
  }

 private:
  std::vector<std::pair<std::filesystem::path, std::filesystem::path>> staged_;
};

inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  OutputTransaction tx;
  tx.stage(path, content);
  tx.commit();
}

}  // namespace twe::io
