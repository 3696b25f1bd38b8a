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

// Benchmark plumbing shared by the command-line tool and the acceptance
// suite: per-case component scores for the population tasks and the feature
// matrix for table retrieval.

#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tablevec/corpus.hpp"
#include "tablevec/embedding.hpp"
#include "tablevec/eval.hpp"
#include "tablevec/kb.hpp"
#include "tablevec/population.hpp"
#include "tablevec/retrieval.hpp"

namespace tablevec {

inline std::map<std::string, int> BinaryGrades(const PopulationCase &c) {
  std::map<std::string, int> g;
  for (const auto &x : c.relevant) g[x] = 1;
  return g;
}

// One GridCase per row-population case. Candidates come from the corpus
// index with the case's own table left out. An empty matrix gives a constant
// embedding component, i.e. the pure KB ranking at every alpha.
template <class Real>
std::vector<GridCase> RowPopulationComponents(const std::vector<PopulationCase> &cases,
                                              const CorpusIndex &index,
                                              const KnowledgeBase &kb, KbMethod method,
                                              const EmbeddingMatrix<Real> &m,
                                              std::size_t candidate_limit = kDefaultCandidateLimit) {
  std::vector<GridCase> out;
  out.reserve(cases.size());
  for (const auto &c : cases) {
    if (c.mode != PopulationMode::kRow) throw PreconditionError("expected row cases");
    GridCase g;
    g.case_id = c.case_id;
    g.grades = BinaryGrades(c);
    const auto cand = SelectCandidates(c.seeds, index, kb, candidate_limit, {c.table_id});
    const std::span<const EntityId> seeds(c.seeds);
    g.components = RowComponents(std::span<const EntityId>(cand.entities), seeds, kb, method, m);
    out.push_back(std::move(g));
  }
  return out;
}

template <class Real>
std::vector<GridCase> ColumnPopulationComponents(const std::vector<PopulationCase> &cases,
                                                 const CorpusIndex &index,
                                                 const EmbeddingMatrix<Real> &m,
                                                 std::size_t k = kDefaultRelevantTables) {
  std::vector<GridCase> out;
  out.reserve(cases.size());
  for (const auto &c : cases) {
    if (c.mode != PopulationMode::kColumn) throw PreconditionError("expected column cases");
    GridCase g;
    g.case_id = c.case_id;
    g.grades = BinaryGrades(c);
    g.components = ColumnComponents(std::span<const std::string>(c.seeds), index, m, k,
                                    kHeadingNeighbors, {c.table_id});
    out.push_back(std::move(g));
  }
  return out;
}

inline Run MixRun(std::span<const GridCase> cases, double alpha) {
  const MixtureParams params(alpha);
  Run run;
  for (const auto &c : cases) run.emplace(c.case_id, Mix(c.components, params));
  return run;
}

// Features for every judged (query, table) pair; pairs whose table is not in
// `tables` are skipped.
template <class Real>
std::vector<LabeledPair> JudgedPairs(const std::vector<Query> &queries, const Qrels &qrels,
                                     const std::vector<TableRecord> &tables,
                                     const FeatureExtractor<Real> &fx) {
  std::map<std::string, const TableRecord *> by_id;
  for (const auto &t : tables) by_id.emplace(t.table_id, &t);
  std::vector<LabeledPair> pairs;
  for (const auto &q : queries) {
    for (const auto &[table_id, grade] : qrels.Grades(q.query_id)) {
      auto it = by_id.find(table_id);
      if (it == by_id.end()) continue;
      LabeledPair p;
      p.query_id = q.query_id;
      p.table_id = table_id;
      const auto f = fx.Extract(q, *it->second);
      p.features.assign(f.values.begin(), f.values.end());
      p.grade = grade;
      pairs.push_back(std::move(p));
    }
  }
  return pairs;
}

// Keeps only the given feature columns.
inline std::vector<LabeledPair> SelectFeatures(std::vector<LabeledPair> pairs,
                                               const std::vector<std::size_t> &columns) {
  for (auto &p : pairs) {
    std::vector<double> kept;
    kept.reserve(columns.size());
    for (std::size_t c : columns) kept.push_back(p.features.at(c));
    p.features = std::move(kept);
  }
  return pairs;
}

}  // namespace tablevec
