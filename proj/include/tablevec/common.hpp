// Copyright 2026 The tablevec Authors.
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

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace tablevec {

// Base for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable or unwritable files.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed file content. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string &what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A caller violated an operation's precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Lines starting with this prefix are configuration comments; every reader in
// the library skips them.
inline constexpr std::string_view kCommentPrefix = "#%";

inline bool IsCommentLine(std::string_view line) {
  return line.substr(0, kCommentPrefix.size()) == kCommentPrefix;
}

inline std::string StripCr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

inline std::vector<std::string> SplitTabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      return out;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::vector<std::string> SplitWhitespace(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::ifstream OpenInput(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path + " for reading");
  return in;
}

inline std::ofstream OpenOutput(const std::string &path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

// Shortest decimal form that reads back to the same double.
inline std::string FormatNumber(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

// TREC files are whitespace-delimited, so ids carrying whitespace (column
// headings) are written with '%', ' ', '\t', '\n' and '\r' percent-encoded.
inline std::string EscapeTrecId(std::string_view id) {
  std::string out;
  out.reserve(id.size());
  for (char c : id) {
    switch (c) {
      case '%': out += "%25"; break;
      case ' ': out += "%20"; break;
      case '\t': out += "%09"; break;
      case '\n': out += "%0A"; break;
      case '\r': out += "%0D"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

inline std::string UnescapeTrecId(std::string_view id) {
  std::string out;
  out.reserve(id.size());
  for (std::size_t i = 0; i < id.size(); ++i) {
    if (id[i] == '%' && i + 2 < id.size()) {
      const std::string_view hex = id.substr(i + 1, 2);
      unsigned value = 0;
      auto res = std::from_chars(hex.data(), hex.data() + 2, value, 16);
      if (res.ec == std::errc() && res.ptr == hex.data() + 2) {
        out.push_back(static_cast<char>(value));
        i += 2;
        continue;
      }
    }
    out.push_back(id[i]);
  }
  return out;
}

// Ordered (item, score) pairs. Scores are non-increasing, ties are broken by
// lexicographic item order and items are unique.
class RankedList {
 public:
  struct Entry {
    std::string item;
    double score;
    bool operator==(const Entry &) const = default;
  };

  RankedList() = default;

  // Sorts the entries; keeps the first occurrence of a duplicated item.
  explicit RankedList(std::vector<Entry> entries) {
    std::unordered_set<std::string> seen;
    std::vector<Entry> unique;
    unique.reserve(entries.size());
    for (auto &e : entries) {
      if (seen.insert(e.item).second) unique.push_back(std::move(e));
    }
    std::sort(unique.begin(), unique.end(), Before);
    entries_ = std::move(unique);
  }

  static bool Before(const Entry &a, const Entry &b) {
    if (a.score != b.score) return a.score > b.score;
    return a.item < b.item;
  }

  const std::vector<Entry> &entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const Entry &operator[](std::size_t i) const { return entries_[i]; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  std::vector<std::string> items() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto &e : entries_) out.push_back(e.item);
    return out;
  }

  bool operator==(const RankedList &) const = default;

 private:
  std::vector<Entry> entries_;
};

// splitmix64, used to derive independent child seeds from a master seed.
inline std::uint64_t MixSeed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace tablevec
