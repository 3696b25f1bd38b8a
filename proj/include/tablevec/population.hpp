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

// Row and column population. Each candidate gets a baseline score (knowledge
// base for rows, corpus heading statistics for columns) and an embedding
// score; both are min-max normalized over the candidate set and mixed as
//
//   P = alpha * P_baseline + (1 - alpha) * P_emb.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tablevec/common.hpp"
#include "tablevec/corpus.hpp"
#include "tablevec/embedding.hpp"
#include "tablevec/eval.hpp"
#include "tablevec/kb.hpp"

namespace tablevec {

struct SeedTable {
  std::vector<EntityId> entities;
  std::vector<std::string> headings;
};

// Mixture weight of the baseline component; must lie in [0, 1].
class MixtureParams {
 public:
  explicit MixtureParams(double alpha) : alpha_(alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
      throw PreconditionError("alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
  double alpha() const { return alpha_; }

 private:
  double alpha_;
};

enum class KbMethod { kRelations, kWlm, kJaccard };

inline KbMethod ParseKbMethod(std::string_view s) {
  if (s == "BL1" || s == "bl1" || s == "relations") return KbMethod::kRelations;
  if (s == "BL2" || s == "bl2" || s == "wlm") return KbMethod::kWlm;
  if (s == "BL3" || s == "bl3" || s == "jaccard") return KbMethod::kJaccard;
  throw PreconditionError("unknown KB method '" + std::string(s) + "'");
}

inline std::string_view KbMethodName(KbMethod m) {
  switch (m) {
    case KbMethod::kRelations: return "BL1";
    case KbMethod::kWlm: return "BL2";
    case KbMethod::kJaccard: return "BL3";
  }
  return "?";
}

// KB similarity of `e` to the seeds: BL1 relation overlap, BL2 mean WLM,
// BL3 mean outlink Jaccard.
inline double KbSimilarity(const EntityId &e, std::span<const EntityId> seeds,
                           const KnowledgeBase &kb, KbMethod method) {
  if (seeds.empty()) return 0.0;
  if (method == KbMethod::kRelations) return RelationSimilarity(e, seeds, kb);
  double sum = 0.0;
  for (const auto &s : seeds)
    sum += method == KbMethod::kWlm ? Wlm(e, s, kb) : JaccardOutlinks(e, s, kb);
  return sum / static_cast<double>(seeds.size());
}

// Mean cosine between `term` and each seed; out-of-vocabulary terms on either
// side contribute 0.
template <class Real>
double MeanCosine(std::string_view term, std::span<const std::string> seeds,
                  const EmbeddingMatrix<Real> &m) {
  if (seeds.empty()) return 0.0;
  auto v = m.Lookup(term);
  if (!v) return 0.0;
  double sum = 0.0;
  for (const auto &s : seeds)
    if (auto u = m.Lookup(s)) sum += Cosine(*v, *u);
  return sum / static_cast<double>(seeds.size());
}

template <class Real>
double EntitySimilarity(const EntityId &e, std::span<const EntityId> seeds,
                        const EmbeddingMatrix<Real> &m) {
  return MeanCosine(e, seeds, m);
}

template <class Real>
double HeadingSimilarity(const std::string &l, std::span<const std::string> seeds,
                         const EmbeddingMatrix<Real> &m) {
  return MeanCosine(l, seeds, m);
}

// ---------------------------------------------------------------------------
// Mixing

// Raw per-candidate components, aligned by index.
struct ComponentScores {
  std::vector<std::string> items;
  std::vector<double> baseline;
  std::vector<double> embedding;

  void Add(std::string item, double b, double e) {
    items.push_back(std::move(item));
    baseline.push_back(b);
    embedding.push_back(e);
  }
  std::size_t size() const { return items.size(); }
};

// (x - min) / (max - min); a constant component maps to all zeros.
inline std::vector<double> MinMaxNormalize(const std::vector<double> &x) {
  std::vector<double> out(x.size(), 0.0);
  if (x.empty()) return out;
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) return out;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - *lo) / range;
  return out;
}

inline RankedList Mix(const ComponentScores &c, MixtureParams params) {
  const auto b = MinMaxNormalize(c.baseline);
  const auto e = MinMaxNormalize(c.embedding);
  const double a = params.alpha();
  std::vector<RankedList::Entry> entries;
  entries.reserve(c.size());
  for (std::size_t i = 0; i < c.size(); ++i)
    entries.push_back({c.items[i], a * b[i] + (1.0 - a) * e[i]});
  return RankedList(std::move(entries));
}

inline RankedList Mix(const ComponentScores &c, double alpha) {
  return Mix(c, MixtureParams(alpha));
}

// ---------------------------------------------------------------------------
// Row population

// Baseline = chosen KB similarity; embedding = mean cosine rescaled to [0, 1]
// via (x + 1) / 2.
template <class Real>
ComponentScores RowComponents(std::span<const EntityId> candidates,
                              std::span<const EntityId> seeds, const KnowledgeBase &kb,
                              KbMethod method, const EmbeddingMatrix<Real> &m) {
  ComponentScores c;
  for (const auto &e : candidates)
    c.Add(e, KbSimilarity(e, seeds, kb, method), (EntitySimilarity(e, seeds, m) + 1.0) / 2.0);
  return c;
}

template <class Real>
RankedList ScoreRows(std::span<const EntityId> candidates, std::span<const EntityId> seeds,
                     const KnowledgeBase &kb, KbMethod method,
                     const EmbeddingMatrix<Real> &m, double alpha) {
  const MixtureParams params(alpha);
  if (candidates.empty()) throw PreconditionError("row scoring needs candidates");
  return Mix(RowComponents(candidates, seeds, kb, method, m), params);
}

// ---------------------------------------------------------------------------
// Column population

inline constexpr std::size_t kDefaultRelevantTables = 256;
inline constexpr std::size_t kHeadingNeighbors = 100;

// P(l|L) over every heading of the top-K corpus tables (by number of seed
// headings they carry) except the seeds. Each table contributes its match
// count to every heading it holds; the result is normalized to sum to 1, or
// empty when no table matches.
inline std::map<std::string, double> BaselineHeadingDistribution(
    std::span<const std::string> seeds, const CorpusIndex &index,
    std::size_t k = kDefaultRelevantTables,
    const std::set<std::string> &excluded_tables = {}) {
  if (seeds.empty()) throw PreconditionError("heading baseline needs >= 1 seed heading");
  const std::set<std::string> seed_set(seeds.begin(), seeds.end());

  struct Match {
    std::size_t table;
    std::size_t count = 0;
    std::size_t rarest = static_cast<std::size_t>(-1);  // min df of matched labels
  };
  std::map<std::size_t, Match> matches;
  for (const auto &l : seed_set) {
    const auto &tables = index.TablesWithHeading(l);
    for (std::size_t t : tables) {
      if (excluded_tables.contains(index.tables()[t].table_id)) continue;
      auto &m = matches.try_emplace(t, Match{t}).first->second;
      ++m.count;
      m.rarest = std::min(m.rarest, tables.size());
    }
  }
  std::vector<Match> ranked;
  ranked.reserve(matches.size());
  for (const auto &[_, m] : matches) ranked.push_back(m);
  std::sort(ranked.begin(), ranked.end(), [&](const Match &a, const Match &b) {
    if (a.count != b.count) return a.count > b.count;
    if (a.rarest != b.rarest) return a.rarest < b.rarest;
    return index.tables()[a.table].table_id < index.tables()[b.table].table_id;
  });
  if (ranked.size() > k) ranked.resize(k);

  std::map<std::string, double> mass;
  double total = 0.0;
  for (const auto &m : ranked) {
    std::set<std::string_view> seen;
    for (const auto &h : index.tables()[m.table].headings) {
      if (seed_set.contains(h) || !seen.insert(h).second) continue;
      mass[h] += static_cast<double>(m.count);
      total += static_cast<double>(m.count);
    }
  }
  if (total > 0.0)
    for (auto &[_, v] : mass) v /= total;
  return mass;
}

inline double BaselineHeadingProb(const std::string &l, std::span<const std::string> seeds,
                                  const CorpusIndex &index,
                                  std::size_t k = kDefaultRelevantTables) {
  const auto dist = BaselineHeadingDistribution(seeds, index, k);
  auto it = dist.find(l);
  return it == dist.end() ? 0.0 : it->second;
}

// Normalized centroid of the in-vocabulary seed vectors; empty when no seed is
// in vocabulary.
template <class Real>
std::vector<double> SeedCentroid(std::span<const std::string> seeds,
                                 const EmbeddingMatrix<Real> &m) {
  std::vector<double> c;
  for (const auto &s : seeds) {
    auto v = m.Lookup(s);
    if (!v) continue;
    double norm = 0.0;
    for (Real x : *v) norm += static_cast<double>(x) * x;
    if (norm == 0.0) continue;
    norm = std::sqrt(norm);
    if (c.empty()) c.assign(m.dim(), 0.0);
    for (std::size_t d = 0; d < m.dim(); ++d) c[d] += (*v)[d] / norm;
  }
  return c;
}

// Candidates are the baseline headings plus the `neighbors` vocabulary
// headings nearest to the seed centroid. Baseline = P(l|L), embedding = mean
// cosine rescaled to [0, 1].
template <class Real>
ComponentScores ColumnComponents(std::span<const std::string> seeds,
                                 const CorpusIndex &index, const EmbeddingMatrix<Real> &m,
                                 std::size_t k = kDefaultRelevantTables,
                                 std::size_t neighbors = kHeadingNeighbors,
                                 const std::set<std::string> &excluded_tables = {}) {
  const auto dist = BaselineHeadingDistribution(seeds, index, k, excluded_tables);
  std::set<std::string> pool;
  for (const auto &[h, _] : dist) pool.insert(h);
  std::set<std::string> exclude(seeds.begin(), seeds.end());
  exclude.insert(std::string());
  const auto centroid = SeedCentroid(seeds, m);
  if (!centroid.empty())
    for (auto &[term, _] :
         NearestTerms(m, std::span<const double>(centroid), neighbors, exclude))
      pool.insert(term);
  pool.erase(std::string());

  ComponentScores c;
  for (const auto &l : pool) {
    auto it = dist.find(l);
    c.Add(l, it == dist.end() ? 0.0 : it->second,
          (HeadingSimilarity(l, seeds, m) + 1.0) / 2.0);
  }
  return c;
}

template <class Real>
RankedList ScoreColumns(std::span<const std::string> seeds, const CorpusIndex &index,
                        const EmbeddingMatrix<Real> &m, double alpha,
                        std::size_t k = kDefaultRelevantTables) {
  const MixtureParams params(alpha);
  return Mix(ColumnComponents(seeds, index, m, k), params);
}

// ---------------------------------------------------------------------------
// Alpha grid search

struct GridCase {
  std::string case_id;
  ComponentScores components;
  std::map<std::string, int> grades;
};

struct AlphaCurve {
  std::vector<std::pair<double, double>> points;  // (alpha, mean metric)
  double best_alpha = 0.0;
  double best_value = 0.0;
};

// Mean metric at alpha = 0, step, ..., 1; best is the argmax, lowest alpha on
// ties. Cases that cannot be scored are left out of the mean.
inline AlphaCurve GridSearchAlpha(std::span<const GridCase> cases, Metric metric,
                                  double step = 0.1) {
  if (!(step > 0.0 && step <= 1.0)) throw PreconditionError("grid step must be in (0, 1]");
  const auto n = static_cast<std::size_t>(std::llround(1.0 / step));
  AlphaCurve curve;
  bool first = true;
  for (std::size_t i = 0; i <= n; ++i) {
    const double alpha = std::min(1.0, std::round(static_cast<double>(i) * step * 1e12) / 1e12);
    double sum = 0.0;
    std::size_t scored = 0;
    for (const auto &c : cases) {
      if (auto v = ScoreCase(metric, Mix(c.components, alpha).items(), c.grades)) {
        sum += *v;
        ++scored;
      }
    }
    const double mean = scored > 0 ? sum / static_cast<double>(scored) : 0.0;
    curve.points.emplace_back(alpha, mean);
    if (first || mean > curve.best_value) {
      curve.best_alpha = alpha;
      curve.best_value = mean;
      first = false;
    }
  }
  return curve;
}

}  // namespace tablevec
