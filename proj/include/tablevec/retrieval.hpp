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

// Keyword table retrieval: lexical baseline features, early/late fusion
// semantic features, and a pointwise random-forest ranker evaluated with
// query-partitioned cross-validation.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tablevec/common.hpp"
#include "tablevec/corpus.hpp"
#include "tablevec/embedding.hpp"
#include "tablevec/stopwords.hpp"

namespace tablevec {

struct Query {
  std::string query_id;
  std::string text;
  std::vector<std::string> words;
  std::vector<EntityId> entities;
};

// Exact-match linker: query n-grams (up to 5 words, longest first, left to
// right) looked up against entity labels. An entity's label is its id with
// '_' read as a space, tokenized like corpus words without stopword removal.
class EntityLinker {
 public:
  static constexpr std::size_t kMaxNgram = 5;

  static std::string LabelOf(std::string_view id) {
    std::string s(id);
    std::replace(s.begin(), s.end(), '_', ' ');
    const auto toks = TokenizeWords(s, StopwordSet{});
    std::string out;
    for (const auto &t : toks) {
      if (!out.empty()) out.push_back(' ');
      out += t;
    }
    return out;
  }

  void AddEntity(const EntityId &id) { AddLabel(LabelOf(id), id); }

  // First registration of a label wins.
  void AddLabel(const std::string &label, const EntityId &id) {
    if (!label.empty()) labels_.try_emplace(label, id);
  }

  std::size_t size() const { return labels_.size(); }

  std::vector<EntityId> Link(std::string_view text) const {
    const auto toks = TokenizeWords(text, StopwordSet{});
    std::vector<EntityId> out;
    std::size_t i = 0;
    while (i < toks.size()) {
      bool matched = false;
      for (std::size_t n = std::min(kMaxNgram, toks.size() - i); n >= 1; --n) {
        std::string key = toks[i];
        for (std::size_t j = 1; j < n; ++j) key += " " + toks[i + j];
        if (auto it = labels_.find(key); it != labels_.end()) {
          if (std::find(out.begin(), out.end(), it->second) == out.end())
            out.push_back(it->second);
          i += n;
          matched = true;
          break;
        }
      }
      if (!matched) ++i;
    }
    return out;
  }

 private:
  std::unordered_map<std::string, EntityId> labels_;
};

inline Query MakeQuery(std::string id, std::string text, const StopwordSet &stopwords,
                       const EntityLinker *linker) {
  Query q;
  q.query_id = std::move(id);
  q.text = std::move(text);
  q.words = TokenizeWords(q.text, stopwords);
  if (linker != nullptr) q.entities = linker->Link(q.text);
  return q;
}

// "query_id<TAB>text" lines.
inline std::vector<std::pair<std::string, std::string>> ReadQueries(const std::string &path) {
  auto in = OpenInput(path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = StripCr(line);
    if (line.empty() || IsCommentLine(line)) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      throw ParseError("query line needs query_id<TAB>text", line_no);
    out.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fusion similarities

enum class Aggregator { kMax, kSum, kAvg };

inline Aggregator ParseAggregator(std::string_view s) {
  if (s == "max") return Aggregator::kMax;
  if (s == "sum") return Aggregator::kSum;
  if (s == "avg") return Aggregator::kAvg;
  throw PreconditionError("unknown aggregator '" + std::string(s) + "'");
}

template <class Real>
using VectorRefs = std::vector<std::span<const Real>>;

// In-vocabulary vectors of `terms`, in order.
template <class Real>
VectorRefs<Real> VectorsOf(std::span<const std::string> terms, const EmbeddingMatrix<Real> &m) {
  VectorRefs<Real> out;
  for (const auto &t : terms)
    if (auto v = m.Lookup(t)) out.push_back(*v);
  return out;
}

template <class Real>
std::vector<double> Centroid(const VectorRefs<Real> &vs) {
  std::vector<double> c(vs.front().size(), 0.0);
  for (const auto &v : vs)
    for (std::size_t d = 0; d < c.size(); ++d) c[d] += v[d];
  for (auto &x : c) x /= static_cast<double>(vs.size());
  return c;
}

// Cosine between the query centroid and the table centroid; 0 when either
// side is empty.
template <class Real>
double EarlyFusion(const VectorRefs<Real> &query, const VectorRefs<Real> &table) {
  if (query.empty() || table.empty()) return 0.0;
  return Cosine(Centroid(query), Centroid(table));
}

// Max, sum or average of all |q| x |t| pairwise cosines; 0 when there is no
// pair.
template <class Real>
double LateFusion(const VectorRefs<Real> &query, const VectorRefs<Real> &table,
                  Aggregator agg) {
  if (query.empty() || table.empty()) return 0.0;
  double sum = 0.0;
  double best = -1.0;
  for (const auto &q : query)
    for (const auto &t : table) {
      const double c = Cosine(q, t);
      sum += c;
      best = std::max(best, c);
    }
  switch (agg) {
    case Aggregator::kMax: return best;
    case Aggregator::kSum: return sum;
    case Aggregator::kAvg: return sum / static_cast<double>(query.size() * table.size());
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Features

enum Feature : std::size_t {
  kQueryLength,
  kNumRows,
  kNumColumns,
  kNumEntities,
  kLmCaption,
  kLmPageTitle,
  kLmHeadings,
  kLmBody,
  kWordEarly,
  kWordLateMax,
  kWordLateSum,
  kWordLateAvg,
  kEntityEarly,
  kEntityLateMax,
  kEntityLateSum,
  kEntityLateAvg,
  kNumFeatures
};

inline constexpr std::size_t kNumBaselineFeatures = kWordEarly;

inline constexpr std::array<std::string_view, kNumFeatures> kFeatureNames = {
    "query_length", "num_rows",      "num_columns",   "num_entities",
    "lm_caption",   "lm_page_title", "lm_headings",   "lm_body",
    "w_early",      "w_late_max",    "w_late_sum",    "w_late_avg",
    "e_early",      "e_late_max",    "e_late_sum",    "e_late_avg"};

struct FeatureVector {
  std::array<double, kNumFeatures> values{};

  double &operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
};

// Named column subsets used to train the ranker.
inline std::vector<std::size_t> FeatureColumns(bool words, bool entities) {
  std::vector<std::size_t> cols(kNumBaselineFeatures);
  std::iota(cols.begin(), cols.end(), std::size_t{0});
  if (words)
    for (std::size_t f = kWordEarly; f <= kWordLateAvg; ++f) cols.push_back(f);
  if (entities)
    for (std::size_t f = kEntityEarly; f <= kEntityLateAvg; ++f) cols.push_back(f);
  return cols;
}

enum class TableField { kCaption, kPageTitle, kHeadings, kBody };
inline constexpr std::size_t kNumFields = 4;

// Per-field term statistics for Dirichlet-smoothed query likelihood.
class FieldStatistics {
 public:
  static constexpr double kMu = 2000.0;

  FieldStatistics(const std::vector<TableRecord> &tables, const StopwordSet &stopwords)
      : stopwords_(stopwords) {
    for (const auto &t : tables) {
      const auto fields = Fields(t);
      for (std::size_t f = 0; f < kNumFields; ++f) {
        for (const auto &w : fields[f]) ++collection_[f][w];
        length_[f] += fields[f].size();
      }
    }
  }

  std::array<std::vector<std::string>, kNumFields> Fields(const TableRecord &t) const {
    std::array<std::vector<std::string>, kNumFields> out;
    out[0] = TokenizeWords(t.caption, stopwords_);
    out[1] = TokenizeWords(t.page_title, stopwords_);
    for (const auto &h : t.headings) {
      auto toks = TokenizeWords(h, stopwords_);
      out[2].insert(out[2].end(), toks.begin(), toks.end());
    }
    for (const auto &row : t.rows)
      for (const auto &c : row) {
        auto toks = TokenizeWords(c.raw_text, stopwords_);
        out[3].insert(out[3].end(), toks.begin(), toks.end());
      }
    return out;
  }

  // sum_q log((tf(q) + mu p(q|C)) / (|field| + mu)). Unseen collection terms
  // use p = 1 / (|C| + 1).
  double QueryLogLikelihood(std::span<const std::string> query,
                            const std::vector<std::string> &field_terms,
                            std::size_t field) const {
    std::unordered_map<std::string_view, std::size_t> tf;
    for (const auto &w : field_terms) ++tf[w];
    const double len = static_cast<double>(field_terms.size());
    const double total = static_cast<double>(length_[field]);
    double ll = 0.0;
    for (const auto &q : query) {
      auto it = collection_[field].find(q);
      const double p = it == collection_[field].end()
                           ? 1.0 / (total + 1.0)
                           : static_cast<double>(it->second) / total;
      auto f = tf.find(q);
      const double count = f == tf.end() ? 0.0 : static_cast<double>(f->second);
      ll += std::log((count + kMu * p) / (len + kMu));
    }
    return ll;
  }

  const StopwordSet &stopwords() const { return stopwords_; }

 private:
  StopwordSet stopwords_;
  std::array<std::unordered_map<std::string, std::size_t>, kNumFields> collection_;
  std::array<std::size_t, kNumFields> length_{};
};

// Fills the baseline slots from the table and query alone and the semantic
// slots from the word and entity embeddings (null matrices leave their four
// slots at 0). Table words follow the word-sequence extraction, table
// entities the entity-sequence extraction.
template <class Real>
class FeatureExtractor {
 public:
  FeatureExtractor(const FieldStatistics &stats, const EmbeddingMatrix<Real> *words,
                   const EmbeddingMatrix<Real> *entities)
      : stats_(stats), words_(words), entities_(entities) {}

  FeatureVector Extract(const Query &q, const TableRecord &t) const {
    FeatureVector f;
    f[kQueryLength] = static_cast<double>(q.words.size());
    f[kNumRows] = static_cast<double>(t.num_rows());
    f[kNumColumns] = static_cast<double>(t.num_columns());
    const auto table_entities = TableEntities(t);
    f[kNumEntities] = static_cast<double>(table_entities.size());
    const auto fields = stats_.Fields(t);
    for (std::size_t i = 0; i < kNumFields; ++i)
      f[kLmCaption + i] = stats_.QueryLogLikelihood(q.words, fields[i], i);

    if (words_ != nullptr) {
      const auto table_words = TableWords(t, stats_.stopwords());
      Semantic(VectorsOf<Real>(q.words, *words_), VectorsOf<Real>(table_words, *words_), f,
               kWordEarly);
    }
    if (entities_ != nullptr) {
      Semantic(VectorsOf<Real>(q.entities, *entities_),
               VectorsOf<Real>(table_entities, *entities_), f, kEntityEarly);
    }
    return f;
  }

 private:
  static void Semantic(const VectorRefs<Real> &q, const VectorRefs<Real> &t, FeatureVector &f,
                       std::size_t first) {
    f[first] = EarlyFusion(q, t);
    f[first + 1] = LateFusion(q, t, Aggregator::kMax);
    f[first + 2] = LateFusion(q, t, Aggregator::kSum);
    f[first + 3] = LateFusion(q, t, Aggregator::kAvg);
  }

  const FieldStatistics &stats_;
  const EmbeddingMatrix<Real> *words_;
  const EmbeddingMatrix<Real> *entities_;
};

// ---------------------------------------------------------------------------
// Random forest regressor

struct ForestConfig {
  std::size_t trees = 100;
  double feature_fraction = 1.0 / 3.0;
  std::size_t max_depth = 16;
  std::size_t min_leaf = 1;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
};

class RegressionTree {
 public:
  // CART fit on the given sample ids (duplicates allowed).
  void Fit(const std::vector<std::vector<double>> &x, const std::vector<double> &y,
           std::vector<std::size_t> samples, const ForestConfig &cfg, std::mt19937_64 &rng) {
    nodes_.clear();
    Grow(x, y, samples, 0, cfg, rng);
  }

  double Predict(std::span<const double> row) const {
    std::size_t n = 0;
    while (nodes_[n].feature >= 0)
      n = row[static_cast<std::size_t>(nodes_[n].feature)] <= nodes_[n].threshold
              ? nodes_[n].left
              : nodes_[n].right;
    return nodes_[n].value;
  }

  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    int feature = -1;
    double threshold = 0.0;
    std::size_t left = 0, right = 0;
    double value = 0.0;
  };

  std::size_t Grow(const std::vector<std::vector<double>> &x, const std::vector<double> &y,
                   std::vector<std::size_t> &samples, std::size_t depth,
                   const ForestConfig &cfg, std::mt19937_64 &rng) {
    const std::size_t id = nodes_.size();
    nodes_.emplace_back();
    double sum = 0.0;
    for (auto s : samples) sum += y[s];
    const double n = static_cast<double>(samples.size());
    nodes_[id].value = sum / n;
    if (depth >= cfg.max_depth || samples.size() < 2 * cfg.min_leaf) return id;

    const std::size_t nf = x[samples[0]].size();
    std::vector<std::size_t> features(nf);
    std::iota(features.begin(), features.end(), std::size_t{0});
    const auto mtry = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(cfg.feature_fraction * static_cast<double>(nf))));
    for (std::size_t i = 0; i < std::min(mtry, nf); ++i)
      std::swap(features[i], features[i + rng() % (nf - i)]);
    features.resize(std::min(mtry, nf));

    double parent_sse = 0.0;
    for (auto s : samples) parent_sse += (y[s] - nodes_[id].value) * (y[s] - nodes_[id].value);
    double best_gain = 1e-12;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::size_t> order = samples;
    for (std::size_t f : features) {
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return x[a][f] != x[b][f] ? x[a][f] < x[b][f] : a < b;
      });
      double left_sum = 0.0, left_sq = 0.0, total_sq = 0.0;
      for (auto s : order) total_sq += y[s] * y[s];
      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const double v = y[order[i]];
        left_sum += v;
        left_sq += v * v;
        const std::size_t nl = i + 1, nr = order.size() - nl;
        if (nl < cfg.min_leaf || nr < cfg.min_leaf) continue;
        const double a = x[order[i]][f], b = x[order[i + 1]][f];
        if (a == b) continue;
        const double right_sum = sum - left_sum;
        const double sse = (left_sq - left_sum * left_sum / static_cast<double>(nl)) +
                           (total_sq - left_sq - right_sum * right_sum / static_cast<double>(nr));
        const double gain = parent_sse - sse;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = static_cast<int>(f);
          best_threshold = a + (b - a) / 2.0;
        }
      }
    }
    if (best_feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (auto s : samples)
      (x[s][static_cast<std::size_t>(best_feature)] <= best_threshold ? left : right).push_back(s);
    if (left.empty() || right.empty()) return id;
    samples.clear();
    samples.shrink_to_fit();
    nodes_[id].feature = best_feature;
    nodes_[id].threshold = best_threshold;
    const std::size_t l = Grow(x, y, left, depth + 1, cfg, rng);
    const std::size_t r = Grow(x, y, right, depth + 1, cfg, rng);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  std::vector<Node> nodes_;
};

// Bagged regression trees with per-split feature subsampling. Tree t draws
// from a generator seeded by MixSeed(seed + t), so results do not depend on
// the number of workers.
class RandomForest {
 public:
  void Fit(const std::vector<std::vector<double>> &x, const std::vector<double> &y,
           const ForestConfig &cfg) {
    if (x.empty() || x.size() != y.size())
      throw PreconditionError("random forest needs aligned, non-empty training data");
    trees_.assign(cfg.trees, RegressionTree{});
    auto fit_tree = [&](std::size_t t) {
      std::mt19937_64 rng(MixSeed(cfg.seed + t));
      std::vector<std::size_t> sample(x.size());
      for (auto &s : sample) s = rng() % x.size();
      trees_[t].Fit(x, y, std::move(sample), cfg, rng);
    };
    const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.workers, cfg.trees));
    if (workers == 1) {
      for (std::size_t t = 0; t < cfg.trees; ++t) fit_tree(t);
      return;
    }
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w)
      threads.emplace_back([&, w] {
        for (std::size_t t = w; t < cfg.trees; t += workers) fit_tree(t);
      });
    for (auto &th : threads) th.join();
  }

  double Predict(std::span<const double> row) const {
    if (trees_.empty()) return 0.0;
    double s = 0.0;
    for (const auto &t : trees_) s += t.Predict(row);
    return s / static_cast<double>(trees_.size());
  }

  std::size_t size() const { return trees_.size(); }

 private:
  std::vector<RegressionTree> trees_;
};

// ---------------------------------------------------------------------------
// Cross-validated ranking

struct LabeledPair {
  std::string query_id;
  std::string table_id;
  std::vector<double> features;
  double grade = 0.0;
};

struct CrossValidatedRanking {
  std::map<std::string, RankedList> rankings;  // per query
  std::map<std::string, std::size_t> fold_of;  // query -> held-out fold
};

// Assigns queries to folds: sorted ids shuffled with `seed`, then dealt out
// round-robin.
inline std::map<std::string, std::size_t> AssignFolds(const std::set<std::string> &queries,
                                                      std::size_t folds, std::uint64_t seed) {
  std::vector<std::string> ids(queries.begin(), queries.end());
  std::mt19937_64 rng(MixSeed(seed));
  for (std::size_t i = ids.size(); i > 1; --i) std::swap(ids[i - 1], ids[rng() % i]);
  std::map<std::string, std::size_t> out;
  for (std::size_t i = 0; i < ids.size(); ++i) out[ids[i]] = i % folds;
  return out;
}

// k-fold cross-validation partitioned by query: each fold's pairs are scored
// by a forest trained on the other folds. Training pairs are put in canonical
// (query, table) order first, so the input order does not matter.
inline CrossValidatedRanking TrainAndRank(std::vector<LabeledPair> pairs, std::size_t folds,
                                          ForestConfig cfg) {
  if (folds < 2) throw PreconditionError("cross-validation needs >= 2 folds");
  if (pairs.empty()) throw PreconditionError("no labeled pairs");
  std::sort(pairs.begin(), pairs.end(), [](const LabeledPair &a, const LabeledPair &b) {
    return a.query_id != b.query_id ? a.query_id < b.query_id : a.table_id < b.table_id;
  });
  std::set<std::string> queries;
  for (const auto &p : pairs) queries.insert(p.query_id);
  folds = std::min(folds, queries.size());
  if (folds < 2) throw PreconditionError("cross-validation needs >= 2 distinct queries");

  CrossValidatedRanking out;
  out.fold_of = AssignFolds(queries, folds, cfg.seed);
  const std::uint64_t master = cfg.seed;
  std::map<std::string, std::vector<RankedList::Entry>> scored;
  for (std::size_t fold = 0; fold < folds; ++fold) {
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    std::set<std::string> train_queries;
    for (const auto &p : pairs) {
      if (out.fold_of.at(p.query_id) == fold) continue;
      x.push_back(p.features);
      y.push_back(p.grade);
      train_queries.insert(p.query_id);
    }
    cfg.seed = MixSeed(master + 7919 * (fold + 1));
    RandomForest forest;
    forest.Fit(x, y, cfg);
    for (const auto &p : pairs) {
      if (out.fold_of.at(p.query_id) != fold) continue;
      if (train_queries.contains(p.query_id))
        throw Error("internal: query " + p.query_id + " in both train and test of fold " +
                    std::to_string(fold));
      scored[p.query_id].push_back({p.table_id, forest.Predict(p.features)});
    }
  }
  for (auto &[q, entries] : scored) out.rankings.emplace(q, RankedList(std::move(entries)));
  return out;
}

}  // namespace tablevec
