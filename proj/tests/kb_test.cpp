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

#include "tablevec/kb.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>

namespace tablevec {
namespace {

std::string WriteFile(const std::string &name, const std::string &content) {
  const std::string path = ::testing::TempDir() + "/" + name;
  std::ofstream(path) << content;
  return path;
}

TEST(LoadKnowledgeBase, BuildsOutlinksAndCountsEntities) {
  auto links = WriteFile("links.tsv", "a\tb\n\na\tc\na\tb\n");
  auto rels = WriteFile("rels.tsv", "a\tbirthPlace\nd\tbirthPlace|Oslo\n");
  auto kb = LoadKnowledgeBase(links, rels);
  EXPECT_EQ(kb.Outlinks("a"), (EntitySet{"b", "c"}));
  EXPECT_EQ(kb.num_entities(), 4u);  // a, b, c, d
  EXPECT_EQ(kb.Relations("d").size(), 1u);
  EXPECT_EQ(kb.Inlinks("b"), (std::vector<EntityId>{"a"}));
}

TEST(LoadKnowledgeBase, Errors) {
  EXPECT_THROW(LoadKnowledgeBase("/nonexistent/links.tsv", ""), IoError);
  auto bad = WriteFile("bad.tsv", "a\tb\tc\n");
  EXPECT_THROW(LoadKnowledgeBase(bad, ""), ParseError);
}

TEST(KnowledgeBase, TripleAddsPredicateKeys) {
  KnowledgeBase kb;
  kb.AddTriple("e", "genre", "Jazz");
  EXPECT_EQ(kb.Relations("e"), (std::set<std::string>{"genre", "genre|Jazz"}));
}

KnowledgeBase LinkKb(const EntitySet &a, const EntitySet &b, std::size_t n) {
  KnowledgeBase kb;
  for (const auto &x : a) kb.AddLink("A", x);
  for (const auto &x : b) kb.AddLink("B", x);
  for (std::size_t i = 0; kb.num_entities() < n; ++i) kb.AddRelation("pad" + std::to_string(i), "r");
  return kb;
}

TEST(Wlm, HandEvaluated) {
  // |A|=4, |B|=2, |A n B|=2, N=16: 1 - (log4 - log2)/(log16 - log2) = 2/3.
  auto kb = LinkKb({"x1", "x2", "x3", "x4"}, {"x1", "x2"}, 16);
  ASSERT_EQ(kb.num_entities(), 16u);
  EXPECT_NEAR(Wlm("A", "B", kb), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(LinkRelatedness(4, 2, 2, 16), 2.0 / 3.0, 1e-12);
}

TEST(Wlm, IdenticalAndDisjoint) {
  auto kb = LinkKb({"x1", "x2"}, {"x1", "x2"}, 10);
  EXPECT_DOUBLE_EQ(Wlm("A", "B", kb), 1.0);
  EXPECT_DOUBLE_EQ(Wlm("A", "A", kb), 1.0);
  auto disjoint = LinkKb({"x1"}, {"x2"}, 10);
  EXPECT_EQ(Wlm("A", "B", disjoint), 0.0);
  EXPECT_EQ(Wlm("A", "missing", disjoint), 0.0);
}

TEST(Wlm, DegenerateCollectionSize) { EXPECT_EQ(LinkRelatedness(3, 3, 2, 3), 0.0); }

TEST(JaccardOutlinks, Examples) {
  auto kb = LinkKb({"a", "b", "c"}, {"b", "c", "d"}, 0);
  EXPECT_EQ(JaccardOutlinks("A", "B", kb), 0.5);
  EXPECT_EQ(JaccardOutlinks("A", "A", kb), 1.0);
  EXPECT_EQ(JaccardOutlinks("A", "nobody", kb), 0.0);
  EXPECT_EQ(JaccardOutlinks("nobody", "none", kb), 0.0);
}

TEST(RelationSimilarity, Examples) {
  KnowledgeBase kb;
  for (auto r : {"p", "q"}) {
    kb.AddRelation("e", r);
    kb.AddRelation("s1", r);
  }
  EXPECT_EQ(RelationSimilarity("e", std::vector<EntityId>{"s1"}, kb), 1.0);
  kb.AddRelation("s2", "z");
  EXPECT_EQ(RelationSimilarity("e", std::vector<EntityId>{"s2"}, kb), 0.0);
  // Jaccards 0.5 ({p,q} vs {p,q,r,s}... built below) and 0.25.
  KnowledgeBase kb2;
  for (auto r : {"1", "2"}) kb2.AddRelation("e", r);
  for (auto r : {"1", "2", "3", "4"}) kb2.AddRelation("s1", r);  // 2/4
  for (auto r : {"1", "5", "6"}) kb2.AddRelation("s2", r);       // 1/4
  EXPECT_DOUBLE_EQ(RelationSimilarity("e", std::vector<EntityId>{"s1", "s2"}, kb2), 0.375);
  EXPECT_EQ(RelationSimilarity("e", std::vector<EntityId>{"unknown"}, kb2), 0.0);
}

// Symmetry, self-similarity and range on random link graphs.
TEST(Scorers, RandomizedProperties) {
  std::mt19937 rng(123);
  KnowledgeBase kb;
  for (int e = 0; e < 200; ++e)
    for (int k = 0, n = static_cast<int>(rng() % 8); k < n; ++k) {
      kb.AddLink("e" + std::to_string(e), "p" + std::to_string(rng() % 40));
      kb.AddRelation("e" + std::to_string(e), "r" + std::to_string(rng() % 10));
    }
  kb.Finalize();
  for (int trial = 0; trial < 10000; ++trial) {
    const std::string a = "e" + std::to_string(rng() % 210);
    const std::string b = "e" + std::to_string(rng() % 210);
    const double w = Wlm(a, b, kb), j = JaccardOutlinks(a, b, kb);
    const double r = RelationSimilarity(a, std::vector<EntityId>{b}, kb);
    EXPECT_EQ(w, Wlm(b, a, kb));
    EXPECT_EQ(j, JaccardOutlinks(b, a, kb));
    for (double v : {w, j, r}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    if (!kb.Outlinks(a).empty()) {
      EXPECT_DOUBLE_EQ(Wlm(a, a, kb), 1.0);
    }
  }
}

TableSummary Core(std::string id, std::vector<EntityId> entities) {
  TableSummary s;
  s.table_id = std::move(id);
  s.core_entities = std::move(entities);
  return s;
}

TEST(SelectCandidates, TableCooccurrence) {
  CorpusIndex index({Core("t1", {"e1", "e2", "e3"}), Core("t2", {"e7"})});
  auto c = SelectCandidates(std::vector<EntityId>{"e1"}, index, KnowledgeBase{});
  EXPECT_EQ(c.entities, (std::vector<EntityId>{"e2", "e3"}));
  EXPECT_EQ(c.provenance.at("e2"), CandidateSource::kTableCooccurrence);
}

TEST(SelectCandidates, KnowledgeBaseFallback) {
  CorpusIndex index({Core("t1", {"e1", "e2"})});
  KnowledgeBase kb;
  kb.AddLink("seed", "x");
  kb.AddLink("e9", "x");
  kb.AddLink("e8", "y");
  kb.Finalize();
  auto c = SelectCandidates(std::vector<EntityId>{"seed"}, index, kb);
  EXPECT_EQ(c.entities, (std::vector<EntityId>{"e9"}));
  EXPECT_EQ(c.provenance.at("e9"), CandidateSource::kKbFallback);
}

TEST(SelectCandidates, RanksByFrequencyAndTruncates) {
  CorpusIndex index({Core("t1", {"s", "a", "b"}), Core("t2", {"s", "b"}), Core("t3", {"b", "c"})});
  auto c = SelectCandidates(std::vector<EntityId>{"s"}, index, KnowledgeBase{}, 1);
  EXPECT_EQ(c.entities, (std::vector<EntityId>{"b"}));
}

TEST(SelectCandidates, ExcludedTablesAreIgnored) {
  CorpusIndex index({Core("self", {"s", "a"}), Core("t2", {"s", "b"})});
  auto c = SelectCandidates(std::vector<EntityId>{"s"}, index, KnowledgeBase{}, 100, {"self"});
  EXPECT_EQ(c.entities, (std::vector<EntityId>{"b"}));
}

TEST(SelectCandidates, NeedsSeed) {
  EXPECT_THROW(SelectCandidates(std::vector<EntityId>{}, CorpusIndex{}, KnowledgeBase{}),
               PreconditionError);
}

// Exhaustive scan over a random 50-table corpus; seeds never leak in.
TEST(SelectCandidates, MatchesBruteForceScan) {
  std::mt19937 rng(77);
  std::vector<TableSummary> tables;
  for (int t = 0; t < 50; ++t) {
    std::vector<EntityId> core;
    for (int k = 0, n = 1 + static_cast<int>(rng() % 6); k < n; ++k) {
      EntityId e = "e" + std::to_string(rng() % 60);
      if (std::find(core.begin(), core.end(), e) == core.end()) core.push_back(e);
    }
    tables.push_back(Core("t" + std::to_string(t), core));
  }
  CorpusIndex index(tables);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<EntityId> seeds;
    for (int k = 0, n = 1 + static_cast<int>(rng() % 3); k < n; ++k)
      seeds.push_back("e" + std::to_string(rng() % 60));
    std::set<EntityId> expected;
    for (const auto &t : tables) {
      bool hit = false;
      for (const auto &e : t.core_entities)
        hit = hit || std::find(seeds.begin(), seeds.end(), e) != seeds.end();
      if (!hit) continue;
      for (const auto &e : t.core_entities)
        if (std::find(seeds.begin(), seeds.end(), e) == seeds.end()) expected.insert(e);
    }
    auto c = SelectCandidates(seeds, index, KnowledgeBase{});
    EXPECT_EQ(std::set<EntityId>(c.entities.begin(), c.entities.end()), expected);
    for (const auto &s : seeds) EXPECT_FALSE(c.contains(s));
  }
}

}  // namespace
}  // namespace tablevec
