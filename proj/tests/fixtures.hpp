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

// Synthetic corpora shared by the unit, acceptance and CLI tests.

#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tablevec/corpus.hpp"
#include "tablevec/embedding.hpp"
#include "tablevec/eval.hpp"
#include "tablevec/kb.hpp"

namespace tablevec::testing {

// Terms a1..a10 only co-occur with each other, likewise b1..b10.
inline std::vector<std::vector<std::string>> TwoClusterCorpus(std::size_t sequences,
                                                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::string>> out;
  for (std::size_t s = 0; s < sequences; ++s) {
    const char cluster = s % 2 == 0 ? 'a' : 'b';
    std::vector<std::string> seq;
    for (std::size_t i = 0; i < 10; ++i)
      seq.push_back(std::string(1, cluster) + std::to_string(1 + rng() % 10));
    out.push_back(std::move(seq));
  }
  return out;
}

// (mean intra-cluster cosine, mean inter-cluster cosine) over distinct pairs
// of a1..a10, b1..b10.
template <class Real>
std::pair<double, double> ClusterCosines(const EmbeddingMatrix<Real> &m) {
  double intra = 0.0, inter = 0.0;
  std::size_t n_intra = 0, n_inter = 0;
  std::vector<std::string> terms;
  for (char c : {'a', 'b'})
    for (int i = 1; i <= 10; ++i) terms.push_back(std::string(1, c) + std::to_string(i));
  for (std::size_t i = 0; i < terms.size(); ++i)
    for (std::size_t j = i + 1; j < terms.size(); ++j) {
      const double c = Cosine(*m.Lookup(terms[i]), *m.Lookup(terms[j]));
      if (terms[i][0] == terms[j][0]) {
        intra += c;
        ++n_intra;
      } else {
        inter += c;
        ++n_inter;
      }
    }
  return {intra / static_cast<double>(n_intra), inter / static_cast<double>(n_inter)};
}

// ---------------------------------------------------------------------------
// Toy benchmark with planted co-occurrence structure.
//
// 20 topics with 10 entities each. Every corpus table lists 7 entities of one
// topic plus one entity of another topic in its core column. The knowledge
// base only weakly reflects the topics: each entity links to random pages and,
// with probability 1/2, to its topic hub. Held-out test tables list all 10
// entities of a single topic in random order.

struct ToyBenchmark {
  std::vector<TableRecord> corpus;
  std::vector<TableRecord> test_tables;
  KnowledgeBase kb;
  std::vector<std::pair<std::string, std::string>> outlink_rows;
  std::vector<std::pair<std::string, std::string>> relation_rows;
  std::vector<std::pair<std::string, std::string>> queries;  // (id, text)
  Qrels retrieval_qrels;
};

inline constexpr std::size_t kToyTopics = 20;
inline constexpr std::size_t kToyEntitiesPerTopic = 10;

inline std::string ToyEntity(std::size_t topic, std::size_t i) {
  return "T" + std::to_string(topic) + "_E" + std::to_string(i);
}

inline const std::vector<std::string> &ToyTopicWords() {
  static const std::vector<std::string> words = {
      "astronomy", "botany",   "cycling",  "diving",   "economics", "fencing",  "geology",
      "hockey",    "ichthyo",  "jazz",     "karate",   "linguist",  "medicine", "nautical",
      "opera",     "painting", "quilting", "rowing",   "sculpture", "tennis"};
  return words;
}

inline ToyBenchmark MakeToyBenchmark(std::uint64_t seed = 2019, std::size_t corpus_tables = 200) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  ToyBenchmark b;
  const auto &words = ToyTopicWords();

  auto headings_for = [&](std::size_t topic) {
    return std::vector<std::string>{words[topic] + " name", words[topic] + " rank",
                                    "Year", words[topic] + " venue"};
  };
  auto make_table = [&](const std::string &id, std::size_t topic,
                        const std::vector<std::string> &core) {
    TableRecord t;
    t.table_id = id;
    t.page_title = "List of " + words[topic] + " records";
    t.section_title = words[topic] + " results";
    t.caption = words[topic] + " table";
    t.headings = headings_for(topic);
    for (std::size_t r = 0; r < core.size(); ++r) {
      std::vector<Cell> row;
      row.push_back({core[r], {core[r]}});
      row.push_back({std::to_string(r + 1), {}});
      row.push_back({std::to_string(1990 + pick(30)), {}});
      const std::string place = "Place_" + std::to_string(pick(40));
      row.push_back({place, {place}});
      t.rows.push_back(std::move(row));
    }
    t.core_column = 0;
    return t;
  };

  for (std::size_t i = 0; i < corpus_tables; ++i) {
    const std::size_t topic = i % kToyTopics;
    std::vector<std::size_t> members(kToyEntitiesPerTopic);
    for (std::size_t k = 0; k < members.size(); ++k) members[k] = k;
    std::shuffle(members.begin(), members.end(), rng);
    std::vector<std::string> core;
    for (std::size_t k = 0; k < 7; ++k) core.push_back(ToyEntity(topic, members[k]));
    const std::size_t other = (topic + 1 + pick(kToyTopics - 1)) % kToyTopics;
    core.insert(core.begin() + static_cast<std::ptrdiff_t>(pick(8)),
                ToyEntity(other, pick(kToyEntitiesPerTopic)));
    b.corpus.push_back(make_table("corpus-" + std::to_string(i), topic, core));
  }
  for (std::size_t topic = 0; topic < kToyTopics; ++topic) {
    std::vector<std::size_t> members(kToyEntitiesPerTopic);
    for (std::size_t k = 0; k < members.size(); ++k) members[k] = k;
    std::shuffle(members.begin(), members.end(), rng);
    std::vector<std::string> core;
    for (std::size_t k = 0; k < 10; ++k) core.push_back(ToyEntity(topic, members[k]));
    b.test_tables.push_back(make_table("test-" + std::to_string(topic), topic, core));
  }

  for (std::size_t topic = 0; topic < kToyTopics; ++topic)
    for (std::size_t i = 0; i < kToyEntitiesPerTopic; ++i) {
      const std::string e = ToyEntity(topic, i);
      std::set<std::string> links;
      while (links.size() < 6) links.insert("Page_" + std::to_string(pick(120)));
      if (pick(2) == 0) links.insert("Hub_" + std::to_string(topic));
      for (const auto &l : links) b.outlink_rows.emplace_back(e, l);
      const std::string type = "type|Class_" + std::to_string(pick(5));
      b.relation_rows.emplace_back(e, "type");
      b.relation_rows.emplace_back(e, type);
      if (pick(3) == 0) {
        b.relation_rows.emplace_back(e, "field");
        b.relation_rows.emplace_back(e, "field|Hub_" + std::to_string(topic));
      }
    }
  for (const auto &[a, c] : b.outlink_rows) b.kb.AddLink(a, c);
  for (const auto &[a, c] : b.relation_rows) b.kb.AddRelation(a, c);
  b.kb.Finalize();

  // Retrieval: one query per topic; tables of the topic are grade 2, others 0.
  for (std::size_t topic = 0; topic < kToyTopics; ++topic) {
    const std::string qid = "q" + std::to_string(topic);
    b.queries.emplace_back(qid, words[topic] + " " + ToyEntity(topic, 0));
    for (std::size_t i = 0; i < b.corpus.size(); ++i)
      if (i % kToyTopics == topic || pick(4) == 0)
        b.retrieval_qrels.Add(qid, b.corpus[i].table_id, i % kToyTopics == topic ? 2 : 0);
  }
  return b;
}

}  // namespace tablevec::testing
