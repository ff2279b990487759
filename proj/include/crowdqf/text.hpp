// Copyright 2026 The crowdqf Authors
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

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "crowdqf/errors.hpp"

namespace crowdqf::text {

/// Shortest decimal form that parses back to the identical double.
[[nodiscard]] inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw InvalidArgument("cannot format number");
  return std::string(buf.data(), ptr);
}

[[nodiscard]] inline std::string format_fixed(double v, int decimals) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, decimals);
  if (ec != std::errc{}) throw InvalidArgument("cannot format number");
  return std::string(buf.data(), ptr);
}

[[nodiscard]] inline std::string_view trim(std::string_view s) noexcept {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[nodiscard]] inline std::optional<double> parse_double(std::string_view s) noexcept {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

[[nodiscard]] inline std::optional<long long> parse_int(std::string_view s) noexcept {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

[[nodiscard]] inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

/// Ordered `key = value` lines. Blank lines and `#` comments are skipped.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

[[nodiscard]] inline KeyValues parse_key_values(std::istream& in) {
  KeyValues out;
  std::map<std::string, std::size_t> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw MalformedInput("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key(trim(view.substr(0, eq)));
    std::string value(trim(view.substr(eq + 1)));
    if (key.empty()) throw MalformedInput("line " + std::to_string(line_no) + ": empty key");
    if (!seen.emplace(key, line_no).second) {
      throw MalformedInput("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

[[nodiscard]] inline KeyValues load_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedInput("cannot open " + path);
  return parse_key_values(in);
}

[[nodiscard]] inline double require_double(const std::string& key, const std::string& value) {
  const auto v = parse_double(value);
  if (!v || !std::isfinite(*v)) throw MalformedInput("key '" + key + "': not a finite number: '" + value + "'");
  return *v;
}

inline void write_key_values(std::ostream& out, const KeyValues& kv) {
  for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
}

inline void save_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << content;
  if (!out) throw InvalidArgument("failed writing " + path);
}

}  // namespace crowdqf::text
