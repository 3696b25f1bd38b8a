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

// Table corpus ingest and per-variant term sequence extraction.
//
// The input is JSON lines, one table object per line, using the field names of
// the public WikiTables dump:
//
//   _id | id          -> table_id   (defaults to "line-<n>")
//   pgTitle           -> page_title
//   secondTitle       -> section_title
//   caption           -> caption
//   title | headings  -> headings   (mandatory)
//   data  | rows      -> rows       (mandatory)
//   coreColumn        -> core_column (optional)
//
// A cell is either an object {"text": ..., "entities": [...]} or a string in
// which links are written as "[Target|anchor text]"; each Target becomes an
// entity id and the anchor text replaces the markup in raw_text.

#pragma once

#include <cctype>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tablevec/common.hpp"
#include "tablevec/stopwords.hpp"

namespace tablevec {

using EntityId = std::string;

struct Cell {
  std::string raw_text;
  std::vector<EntityId> entities;

  bool operator==(const Cell &) const = default;
};

struct TableRecord {
  std::string table_id;
  std::string page_title;
  std::string section_title;
  std::string caption;
  std::vector<std::string> headings;
  std::vector<std::vector<Cell>> rows;
  std::optional<std::size_t> core_column;

  std::size_t num_columns() const { return headings.size(); }
  std::size_t num_rows() const { return rows.size(); }

  bool operator==(const TableRecord &) const = default;
};

// The four sequence flavours: all words, headings, all entities, core-column
// entities.
enum class Variant { kWords, kHeadings, kEntities, kCoreEntities };

inline constexpr Variant kAllVariants[] = {Variant::kWords, Variant::kHeadings,
                                           Variant::kEntities,
                                           Variant::kCoreEntities};

inline std::string_view VariantName(Variant v) {
  switch (v) {
    case Variant::kWords: return "W";
    case Variant::kHeadings: return "H";
    case Variant::kEntities: return "E";
    case Variant::kCoreEntities: return "E*";
  }
  return "?";
}

// File-system friendly name ("E*" -> "Estar").
inline std::string_view VariantFileStem(Variant v) {
  return v == Variant::kCoreEntities ? "Estar" : VariantName(v);
}

inline Variant ParseVariant(std::string_view s) {
  if (s == "W" || s == "w") return Variant::kWords;
  if (s == "H" || s == "h") return Variant::kHeadings;
  if (s == "E" || s == "e") return Variant::kEntities;
  if (s == "E*" || s == "e*" || s == "Estar" || s == "estar")
    return Variant::kCoreEntities;
  throw PreconditionError("unknown variant '" + std::string(s) + "'");
}

struct TermSequence {
  Variant variant;
  std::string table_id;
  std::vector<std::string> tokens;
};

// ---------------------------------------------------------------------------
// JSON mapping

namespace detail {

inline void AddUnique(std::vector<EntityId> &ids, std::string id) {
  if (id.empty()) return;
  for (const auto &e : ids)
    if (e == id) return;
  ids.push_back(std::move(id));
}

inline Cell ParseMarkupCell(std::string_view s) {
  Cell cell;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '[') {
      std::size_t close = s.find(']', i + 1);
      std::size_t bar = s.find('|', i + 1);
      std::size_t reopen = s.find('[', i + 1);
      if (close != std::string_view::npos && bar != std::string_view::npos &&
          bar < close && (reopen == std::string_view::npos || reopen > close)) {
        AddUnique(cell.entities, std::string(s.substr(i + 1, bar - i - 1)));
        cell.raw_text.append(s.substr(bar + 1, close - bar - 1));
        i = close + 1;
        continue;
      }
    }
    cell.raw_text.push_back(s[i]);
    ++i;
  }
  return cell;
}

inline std::string JsonText(const nlohmann::json &j) {
  if (j.is_null()) return {};
  if (j.is_string()) return j.get<std::string>();
  return j.dump();
}

inline Cell ParseCell(const nlohmann::json &j) {
  if (j.is_object()) {
    Cell cell;
    if (auto it = j.find("text"); it != j.end()) cell.raw_text = JsonText(*it);
    if (auto it = j.find("entities"); it != j.end() && it->is_array()) {
      for (const auto &e : *it)
        if (e.is_string()) AddUnique(cell.entities, e.get<std::string>());
    }
    return cell;
  }
  if (j.is_string()) return ParseMarkupCell(j.get_ref<const std::string &>());
  return Cell{JsonText(j), {}};
}

inline const nlohmann::json *FindEither(const nlohmann::json &obj,
                                        const char *a, const char *b) {
  if (auto it = obj.find(a); it != obj.end()) return &*it;
  if (auto it = obj.find(b); it != obj.end()) return &*it;
  return nullptr;
}

}  // namespace detail

// Maps one parsed JSON object onto a TableRecord. Returns nullopt when the
// mandatory fields are missing or have the wrong shape.
inline std::optional<TableRecord> TableFromJson(const nlohmann::json &obj,
                                                std::size_t line_no) {
  if (!obj.is_object()) return std::nullopt;
  const auto *headings = detail::FindEither(obj, "title", "headings");
  const auto *rows = detail::FindEither(obj, "data", "rows");
  if (headings == nullptr || rows == nullptr || !headings->is_array() ||
      !rows->is_array())
    return std::nullopt;

  TableRecord t;
  if (const auto *id = detail::FindEither(obj, "_id", "id"))
    t.table_id = detail::JsonText(*id);
  if (t.table_id.empty()) t.table_id = "line-" + std::to_string(line_no);
  if (auto it = obj.find("pgTitle"); it != obj.end())
    t.page_title = detail::JsonText(*it);
  if (auto it = obj.find("secondTitle"); it != obj.end())
    t.section_title = detail::JsonText(*it);
  if (auto it = obj.find("caption"); it != obj.end())
    t.caption = detail::JsonText(*it);
  for (const auto &h : *headings) t.headings.push_back(detail::JsonText(h));

  for (const auto &row : *rows) {
    if (!row.is_array()) return std::nullopt;
    std::vector<Cell> cells;
    for (const auto &c : row) cells.push_back(detail::ParseCell(c));
    // Ragged rows: short rows are padded, cells beyond the header dropped.
    cells.resize(t.headings.size());
    t.rows.push_back(std::move(cells));
  }

  if (auto it = obj.find("coreColumn");
      it != obj.end() && it->is_number_unsigned() &&
      it->get<std::size_t>() < t.headings.size())
    t.core_column = it->get<std::size_t>();
  return t;
}

// Canonical serialization; TableFromJson(TableToJson(t)) == t.
inline nlohmann::json TableToJson(const TableRecord &t) {
  nlohmann::json j;
  j["_id"] = t.table_id;
  j["pgTitle"] = t.page_title;
  j["secondTitle"] = t.section_title;
  j["caption"] = t.caption;
  j["title"] = t.headings;
  auto rows = nlohmann::json::array();
  for (const auto &row : t.rows) {
    auto cells = nlohmann::json::array();
    for (const auto &c : row)
      cells.push_back({{"text", c.raw_text}, {"entities", c.entities}});
    rows.push_back(std::move(cells));
  }
  j["data"] = std::move(rows);
  if (t.core_column) j["coreColumn"] = *t.core_column;
  return j;
}

// Streams TableRecords out of a JSON-lines file in file order. Malformed lines
// (bad JSON, missing headings/rows, repeated table_id) are skipped and counted.
class CorpusReader {
 public:
  explicit CorpusReader(const std::string &path) : in_(OpenInput(path)) {}
  explicit CorpusReader(std::istream &in) : external_(&in) {}

  bool Next(TableRecord &out) {
    std::istream &in = external_ != nullptr ? *external_ : in_;
    std::string line;
    while (std::getline(in, line)) {
      ++line_no_;
      line = StripCr(line);
      if (line.empty() || IsCommentLine(line)) continue;
      auto parsed = nlohmann::json::parse(line, nullptr, false);
      std::optional<TableRecord> t;
      if (!parsed.is_discarded()) t = TableFromJson(parsed, line_no_);
      if (!t || !ids_.insert(t->table_id).second) {
        ++skipped_;
        continue;
      }
      out = std::move(*t);
      return true;
    }
    if (in.bad()) throw IoError("read error in corpus stream");
    return false;
  }

  std::size_t skipped_count() const { return skipped_; }
  std::size_t line_count() const { return line_no_; }

 private:
  std::ifstream in_;
  std::istream *external_ = nullptr;
  std::size_t line_no_ = 0;
  std::size_t skipped_ = 0;
  std::set<std::string> ids_;
};

inline std::vector<TableRecord> ReadCorpus(const std::string &path,
                                           std::size_t *skipped = nullptr) {
  CorpusReader reader(path);
  std::vector<TableRecord> out;
  TableRecord t;
  while (reader.Next(t)) out.push_back(std::move(t));
  if (skipped != nullptr) *skipped = reader.skipped_count();
  return out;
}

inline void WriteCorpus(const std::vector<TableRecord> &tables,
                        std::ostream &out) {
  for (const auto &t : tables) out << TableToJson(t).dump() << '\n';
}

// ---------------------------------------------------------------------------
// Core column

// Column with the highest fraction of entity-bearing cells, leftmost on ties.
// Stores the result in t.core_column. A table without links yields column 0.
inline std::size_t DetectCoreColumn(TableRecord &t) {
  if (t.num_columns() == 0)
    throw PreconditionError("table " + t.table_id + " has no columns");
  std::vector<std::size_t> linked(t.num_columns(), 0);
  for (const auto &row : t.rows)
    for (std::size_t c = 0; c < row.size() && c < linked.size(); ++c)
      if (!row[c].entities.empty()) ++linked[c];
  // Every column has the same denominator, so comparing counts is exact.
  std::size_t best = 0;
  for (std::size_t c = 1; c < linked.size(); ++c)
    if (linked[c] > linked[best]) best = c;
  t.core_column = best;
  return best;
}

// ---------------------------------------------------------------------------
// Word tokenization

namespace detail {

inline bool IsWordByte(unsigned char ch) {
  return std::isalnum(ch) != 0 || ch >= 0x80;
}

inline bool AllDigits(std::string_view s) {
  for (unsigned char ch : s)
    if (std::isdigit(ch) == 0) return false;
  return true;
}

}  // namespace detail

// Removes <...> spans (each replaced by a space).
inline std::string StripHtmlTags(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '<') {
      std::size_t close = s.find('>', i + 1);
      if (close != std::string_view::npos) {
        out.push_back(' ');
        i = close + 1;
        continue;
      }
    }
    out.push_back(s[i++]);
  }
  return out;
}

// Lowercases, strips HTML tags and splits on non-alphanumeric runs. Pure
// numbers and stopwords are dropped. Bytes >= 0x80 count as word characters so
// UTF-8 text is kept intact.
inline std::vector<std::string> TokenizeWords(std::string_view s,
                                              const StopwordSet &stopwords) {
  std::vector<std::string> out;
  const std::string text = StripHtmlTags(s);
  std::string cur;
  auto flush = [&] {
    if (!cur.empty() && !detail::AllDigits(cur) && !stopwords.contains(cur))
      out.push_back(cur);
    cur.clear();
  };
  for (unsigned char ch : text) {
    if (detail::IsWordByte(ch)) {
      cur.push_back(static_cast<char>(ch < 0x80 ? std::tolower(ch) : ch));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

// ---------------------------------------------------------------------------
// Sequence extraction

// Words of the table in the order: page title, section title, caption,
// headings left to right, cells row-major.
inline std::vector<std::string> TableWords(const TableRecord &t,
                                           const StopwordSet &stopwords) {
  std::vector<std::string> out;
  auto append = [&](std::string_view s) {
    auto toks = TokenizeWords(s, stopwords);
    out.insert(out.end(), std::make_move_iterator(toks.begin()),
               std::make_move_iterator(toks.end()));
  };
  append(t.page_title);
  append(t.section_title);
  append(t.caption);
  for (const auto &h : t.headings) append(h);
  for (const auto &row : t.rows)
    for (const auto &c : row) append(c.raw_text);
  return out;
}

// Entity ids of all cells, row-major.
inline std::vector<EntityId> TableEntities(const TableRecord &t) {
  std::vector<EntityId> out;
  for (const auto &row : t.rows)
    for (const auto &c : row) out.insert(out.end(), c.entities.begin(), c.entities.end());
  return out;
}

// Entity ids of the core column, top-down.
inline std::vector<EntityId> CoreEntities(const TableRecord &t) {
  if (!t.core_column)
    throw PreconditionError("table " + t.table_id + " has no core column");
  std::vector<EntityId> out;
  for (const auto &row : t.rows) {
    const auto &c = row[*t.core_column];
    out.insert(out.end(), c.entities.begin(), c.entities.end());
  }
  return out;
}

// Returns nullopt when the variant yields no tokens for this table.
inline std::optional<TermSequence> ExtractSequence(const TableRecord &t,
                                                   Variant variant,
                                                   const StopwordSet &stopwords) {
  TermSequence seq{variant, t.table_id, {}};
  switch (variant) {
    case Variant::kWords: seq.tokens = TableWords(t, stopwords); break;
    case Variant::kHeadings: seq.tokens = t.headings; break;
    case Variant::kEntities: seq.tokens = TableEntities(t); break;
    case Variant::kCoreEntities: seq.tokens = CoreEntities(t); break;
  }
  if (seq.tokens.empty()) return std::nullopt;
  return seq;
}

inline std::optional<TermSequence> ExtractSequence(const TableRecord &t,
                                                   Variant variant) {
  return ExtractSequence(t, variant, DefaultStopwords());
}

// Sequence files: one sequence per line, tokens separated by TAB.
inline void WriteSequence(const TermSequence &seq, std::ostream &out) {
  for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
    if (i > 0) out << '\t';
    out << seq.tokens[i];
  }
  out << '\n';
}

inline std::vector<std::vector<std::string>> ReadSequences(std::istream &in) {
  std::vector<std::vector<std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    line = StripCr(line);
    if (line.empty() || IsCommentLine(line)) continue;
    auto toks = SplitTabs(line);
    std::erase_if(toks, [](const std::string &s) { return s.empty(); });
    if (!toks.empty()) out.push_back(std::move(toks));
  }
  return out;
}

inline std::vector<std::vector<std::string>> ReadSequences(
    const std::string &path) {
  auto in = OpenInput(path);
  return ReadSequences(in);
}

// ---------------------------------------------------------------------------
// Corpus index

// What the population tasks need to know about one corpus table.
struct TableSummary {
  std::string table_id;
  std::vector<std::string> headings;
  std::vector<EntityId> core_entities;  // unique, first-seen order
  std::size_t num_rows = 0;
  std::size_t num_entities = 0;

  bool operator==(const TableSummary &) const = default;
};

inline TableSummary Summarize(const TableRecord &t) {
  TableSummary s;
  s.table_id = t.table_id;
  s.headings = t.headings;
  s.num_rows = t.num_rows();
  s.num_entities = TableEntities(t).size();
  if (t.core_column) {
    for (auto &e : CoreEntities(t)) detail::AddUnique(s.core_entities, e);
  }
  return s;
}

// Inverted views over table summaries: entity -> tables whose core column holds
// it, heading -> tables that carry it.
class CorpusIndex {
 public:
  CorpusIndex() = default;
  explicit CorpusIndex(std::vector<TableSummary> tables)
      : tables_(std::move(tables)) {
    for (std::size_t i = 0; i < tables_.size(); ++i) {
      for (const auto &e : tables_[i].core_entities) entity_tables_[e].push_back(i);
      std::set<std::string_view> seen;
      for (const auto &h : tables_[i].headings)
        if (seen.insert(h).second) heading_tables_[h].push_back(i);
    }
  }

  static CorpusIndex FromTables(const std::vector<TableRecord> &tables) {
    std::vector<TableSummary> s;
    s.reserve(tables.size());
    for (const auto &t : tables) s.push_back(Summarize(t));
    return CorpusIndex(std::move(s));
  }

  const std::vector<TableSummary> &tables() const { return tables_; }
  std::size_t size() const { return tables_.size(); }

  // Tables whose core column contains `e`.
  const std::vector<std::size_t> &TablesWithEntity(const EntityId &e) const {
    auto it = entity_tables_.find(e);
    return it == entity_tables_.end() ? empty_ : it->second;
  }

  const std::vector<std::size_t> &TablesWithHeading(const std::string &h) const {
    auto it = heading_tables_.find(h);
    return it == heading_tables_.end() ? empty_ : it->second;
  }

  // Number of core columns containing `e`.
  std::size_t EntityFrequency(const EntityId &e) const {
    return TablesWithEntity(e).size();
  }

  std::size_t HeadingFrequency(const std::string &h) const {
    return TablesWithHeading(h).size();
  }

  void Save(std::ostream &out) const {
    for (const auto &t : tables_) {
      nlohmann::json j{{"table_id", t.table_id},
                       {"headings", t.headings},
                       {"core_entities", t.core_entities},
                       {"num_rows", t.num_rows},
                       {"num_entities", t.num_entities}};
      out << j.dump() << '\n';
    }
  }

  static CorpusIndex Load(const std::string &path) {
    auto in = OpenInput(path);
    std::vector<TableSummary> tables;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      line = StripCr(line);
      if (line.empty() || IsCommentLine(line)) continue;
      auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object())
        throw ParseError("malformed index entry in " + path, line_no);
      try {
        TableSummary s;
        s.table_id = j.at("table_id").get<std::string>();
        s.headings = j.at("headings").get<std::vector<std::string>>();
        s.core_entities = j.at("core_entities").get<std::vector<std::string>>();
        s.num_rows = j.value("num_rows", std::size_t{0});
        s.num_entities = j.value("num_entities", std::size_t{0});
        tables.push_back(std::move(s));
      } catch (const nlohmann::json::exception &e) {
        throw ParseError(std::string("bad index entry: ") + e.what(), line_no);
      }
    }
    return CorpusIndex(std::move(tables));
  }

 private:
  std::vector<TableSummary> tables_;
  std::unordered_map<std::string, std::vector<std::size_t>> entity_tables_;
  std::map<std::string, std::vector<std::size_t>, std::less<>> heading_tables_;
  std::vector<std::size_t> empty_;
};

}  // namespace tablevec
