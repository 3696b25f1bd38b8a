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

// Knowledge-base entity similarity: relation overlap, Wikipedia Link-based
// Measure and Jaccard over outgoing links, plus candidate selection for row
// population.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "tablevec/common.hpp"
#include "tablevec/corpus.hpp"

namespace tablevec {

using EntitySet = std::set<EntityId>;

class KnowledgeBase {
 public:
  KnowledgeBase() = default;

  void AddLink(const EntityId &from, const EntityId &to) {
    outlinks_[from].insert(to);
    Touch(from);
    Touch(to);
  }

  void AddRelation(const EntityId &e, const std::string &key) {
    relations_[e].insert(key);
    Touch(e);
  }

  // Adds both "predicate" and "predicate|object" keys for one triple.
  void AddTriple(const EntityId &subject, const std::string &predicate,
                 const std::string &object) {
    AddRelation(subject, predicate);
    AddRelation(subject, predicate + "|" + object);
  }

  const EntitySet &Outlinks(const EntityId &e) const {
    auto it = outlinks_.find(e);
    return it == outlinks_.end() ? empty_ : it->second;
  }

  const std::set<std::string> &Relations(const EntityId &e) const {
    auto it = relations_.find(e);
    return it == relations_.end() ? empty_keys_ : it->second;
  }

  // Total number of distinct entities seen anywhere in the KB.
  std::size_t num_entities() const { return entities_.size(); }
  const std::unordered_set<EntityId> &entities() const { return entities_; }
  const std::unordered_map<EntityId, EntitySet> &outlinks() const { return outlinks_; }

  // Entities that link to `target`.
  std::vector<EntityId> Inlinks(const EntityId &target) const {
    std::vector<EntityId> out;
    auto it = inlinks_.find(target);
    if (it != inlinks_.end()) out.assign(it->second.begin(), it->second.end());
    return out;
  }

  // Builds the reverse link map; call once loading is complete.
  void Finalize() {
    inlinks_.clear();
    for (const auto &[from, targets] : outlinks_)
      for (const auto &to : targets) inlinks_[to].insert(from);
  }

 private:
  void Touch(const EntityId &e) { entities_.insert(e); }

  std::unordered_map<EntityId, EntitySet> outlinks_;
  std::unordered_map<EntityId, EntitySet> inlinks_;
  std::unordered_map<EntityId, std::set<std::string>> relations_;
  std::unordered_set<EntityId> entities_;
  EntitySet empty_;
  std::set<std::string> empty_keys_;
};

namespace detail {

template <class Fn>
void ReadPairs(const std::string &path, Fn &&fn) {
  auto in = OpenInput(path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = StripCr(line);
    if (line.empty() || IsCommentLine(line)) continue;
    auto f = SplitTabs(line);
    if (f.size() != 2 || f[0].empty() || f[1].empty())
      throw ParseError("expected two TAB-separated fields in " + path, line_no);
    fn(f[0], f[1]);
  }
}

}  // namespace detail

// outlinks: "entity<TAB>target" rows; relations: "entity<TAB>relation_key"
// rows. Either path may be empty to skip that file.
inline KnowledgeBase LoadKnowledgeBase(const std::string &outlinks_path,
                                       const std::string &relations_path) {
  KnowledgeBase kb;
  if (!outlinks_path.empty())
    detail::ReadPairs(outlinks_path,
                      [&](const std::string &a, const std::string &b) { kb.AddLink(a, b); });
  if (!relations_path.empty())
    detail::ReadPairs(relations_path, [&](const std::string &a, const std::string &b) {
      kb.AddRelation(a, b);
    });
  kb.Finalize();
  return kb;
}

template <class Set>
std::size_t IntersectionSize(const Set &a, const Set &b) {
  const Set &small = a.size() <= b.size() ? a : b;
  const Set &large = a.size() <= b.size() ? b : a;
  std::size_t n = 0;
  for (const auto &x : small)
    if (large.contains(x)) ++n;
  return n;
}

template <class Set>
double Jaccard(const Set &a, const Set &b) {
  if (a.empty() && b.empty()) return 0.0;
  const std::size_t inter = IntersectionSize(a, b);
  return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

// Wikipedia Link-based Measure over outgoing links, clamped to [0, 1]. Empty
// link sets, an empty intersection and N <= min(|A|,|B|) all give 0.
inline double LinkRelatedness(std::size_t size_a, std::size_t size_b,
                              std::size_t common, std::size_t n) {
  if (size_a == 0 || size_b == 0 || common == 0) return 0.0;
  const double lo = static_cast<double>(std::min(size_a, size_b));
  const double hi = static_cast<double>(std::max(size_a, size_b));
  const double denom = std::log(static_cast<double>(n)) - std::log(lo);
  if (!(denom > 0.0)) return 0.0;
  const double r = 1.0 - (std::log(hi) - std::log(static_cast<double>(common))) / denom;
  return std::clamp(r, 0.0, 1.0);
}

inline double Wlm(const EntityId &a, const EntityId &b, const KnowledgeBase &kb) {
  const auto &la = kb.Outlinks(a);
  const auto &lb = kb.Outlinks(b);
  return LinkRelatedness(la.size(), lb.size(), IntersectionSize(la, lb),
                         kb.num_entities());
}

inline double JaccardOutlinks(const EntityId &a, const EntityId &b,
                              const KnowledgeBase &kb) {
  return Jaccard(kb.Outlinks(a), kb.Outlinks(b));
}

// Mean over seeds of the Jaccard overlap of relation keys.
template <class Seeds>
double RelationSimilarity(const EntityId &e, const Seeds &seeds, const KnowledgeBase &kb) {
  if (std::empty(seeds)) return 0.0;
  const auto &re = kb.Relations(e);
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto &s : seeds) {
    sum += Jaccard(re, kb.Relations(s));
    ++n;
  }
  return sum / static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// Candidate selection

enum class CandidateSource { kTableCooccurrence, kKbFallback };

struct CandidateSet {
  std::vector<EntityId> entities;  // descending corpus frequency, then id
  std::map<EntityId, CandidateSource> provenance;

  bool contains(const EntityId &e) const { return provenance.contains(e); }
  std::size_t size() const { return entities.size(); }
};

inline constexpr std::size_t kDefaultCandidateLimit = 10000;

// Core-column entities of every corpus table whose core column holds a seed.
// When that is empty, falls back to entities sharing an outgoing link with a
// seed. Seeds never appear; the result is truncated to `limit` by descending
// corpus frequency. Tables named in `excluded_tables` are ignored.
template <class Seeds>
CandidateSet SelectCandidates(const Seeds &seeds, const CorpusIndex &index,
                              const KnowledgeBase &kb,
                              std::size_t limit = kDefaultCandidateLimit,
                              const std::set<std::string> &excluded_tables = {}) {
  if (std::empty(seeds)) throw PreconditionError("candidate selection needs >= 1 seed");
  const std::set<EntityId> seed_set(std::begin(seeds), std::end(seeds));
  std::set<EntityId> found;
  for (const auto &s : seed_set) {
    for (std::size_t t : index.TablesWithEntity(s)) {
      const auto &table = index.tables()[t];
      if (excluded_tables.contains(table.table_id)) continue;
      for (const auto &e : table.core_entities)
        if (!seed_set.contains(e)) found.insert(e);
    }
  }
  CandidateSource source = CandidateSource::kTableCooccurrence;
  if (found.empty()) {
    source = CandidateSource::kKbFallback;
    for (const auto &s : seed_set)
      for (const auto &target : kb.Outlinks(s))
        for (const auto &e : kb.Inlinks(target))
          if (!seed_set.contains(e)) found.insert(e);
  }

  std::vector<std::pair<std::size_t, EntityId>> ranked;
  ranked.reserve(found.size());
  for (const auto &e : found) ranked.emplace_back(index.EntityFrequency(e), e);
  std::sort(ranked.begin(), ranked.end(), [](const auto &a, const auto &b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  if (ranked.size() > limit) ranked.resize(limit);

  CandidateSet out;
  for (auto &[freq, e] : ranked) {
    out.provenance.emplace(e, source);
    out.entities.push_back(std::move(e));
  }
  return out;
}

}  // namespace tablevec
