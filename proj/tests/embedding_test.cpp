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

#include "tablevec/embedding.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "fixtures.hpp"

namespace tablevec {
namespace {

using Seqs = std::vector<std::vector<std::string>>;

TEST(Vocabulary, CountsTerms) {
  auto v = Vocabulary::Build(Seqs{{"a", "a", "b"}}, 1);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v.count(*v.Find("a")), 2u);
  EXPECT_EQ(v.total_terms(), 3u);
}

TEST(Vocabulary, MinCountThreshold) {
  auto v = Vocabulary::Build(Seqs{{"a", "a", "b"}}, 2);
  EXPECT_EQ(v.size(), 1u);
  EXPECT_FALSE(v.Find("b"));
  EXPECT_EQ(v.total_terms(), 2u);
}

TEST(Vocabulary, DeterministicIds) {
  auto v = Vocabulary::Build(Seqs{{"c", "b", "a", "b", "c"}, {"d"}}, 1);
  EXPECT_EQ(v.terms(), (std::vector<std::string>{"b", "c", "a", "d"}));
}

TEST(Vocabulary, EmptyStream) { EXPECT_TRUE(Vocabulary::Build(Seqs{}, 1).empty()); }

Vocabulary CountsVocab(const std::vector<std::uint64_t> &counts) {
  std::vector<std::string> terms;
  for (std::size_t i = 0; i < counts.size(); ++i) terms.push_back("t" + std::to_string(i));
  return Vocabulary(terms, counts, 1);
}

TEST(SamplerTable, Symmetric) {
  SamplerTable s(CountsVocab({1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(s.Probability(0), 0.5);
  EXPECT_DOUBLE_EQ(s.Probability(1), 0.5);
}

TEST(SamplerTable, PowerLaw) {
  SamplerTable s(CountsVocab({8, 1}), 0.75);
  const double w = std::pow(8.0, 0.75);
  EXPECT_NEAR(s.Probability(0), w / (w + 1.0), 1e-12);
  EXPECT_NEAR(s.Probability(0), 0.8262932434, 1e-9);
  EXPECT_NEAR(s.Probability(1), 0.1737067566, 1e-9);
}

TEST(SamplerTable, SingleTerm) {
  auto v = Vocabulary::Build(Seqs{{"x", "x", "x", "x", "y"}}, 2);
  SamplerTable s(v, 0.75);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s.Probability(0), 1.0);
  std::mt19937_64 rng(1);
  EXPECT_EQ(s.Draw(rng), 0u);
}

TEST(SamplerTable, ProbabilitiesSumToOne) {
  std::vector<std::uint64_t> counts;
  for (int i = 1; i <= 50; ++i) counts.push_back(static_cast<std::uint64_t>(i * i % 97 + 1));
  SamplerTable s(CountsVocab(counts), 0.75);
  double sum = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_GT(s.Probability(i), 0.0);
    sum += s.Probability(i);
  }
  EXPECT_NEAR(sum, 1.0, 1e-9);
}

TEST(SgnsStep, ZeroVectorsLoss) {
  EmbeddingMatrix<double> m(CountsVocab({1, 1, 1}), 4);
  const std::size_t negs[] = {2};
  EXPECT_NEAR(SgnsStep(0, 1, std::span<const std::size_t>(negs), m, 0.1), 2.0 * std::log(2.0),
              1e-12);
}

TEST(SgnsStep, SaturatedPositiveHasNoLoss) {
  EmbeddingMatrix<double> m(CountsVocab({1, 1}), 1);
  m.input(0)[0] = 100.0;
  m.output(1)[0] = 100.0;
  EXPECT_LT(SgnsStep(0, 1, {}, m, 0.1), 1e-300);
}

EmbeddingMatrix<double> RandomMatrix(std::size_t v, std::size_t dim, std::mt19937_64 &rng) {
  std::vector<std::uint64_t> counts(v, 1);
  EmbeddingMatrix<double> m(CountsVocab(counts), dim);
  std::normal_distribution<double> g(0.0, 0.5);
  for (auto &x : m.input_data()) x = g(rng);
  for (auto &x : m.output_data()) x = g(rng);
  return m;
}

double RelError(double a, double b) {
  return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-8});
}

// Analytic gradient against central finite differences of the loss.
TEST(SgnsStep, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto m = RandomMatrix(12, 10, rng);
    const std::size_t center = rng() % 12, context = rng() % 12;
    std::vector<std::size_t> negs;
    for (int k = 0; k < 5; ++k) negs.push_back(rng() % 12);
    negs.push_back(negs[0]);  // repeated negative
    const auto grad = SgnsGradients(center, context, std::span<const std::size_t>(negs), m);
    const double h = 1e-6;
    auto loss = [&] { return SgnsLoss(center, context, std::span<const std::size_t>(negs), m); };
    for (std::size_t d = 0; d < 10; ++d) {
      double &x = m.input(center)[d];
      const double saved = x;
      x = saved + h;
      const double up = loss();
      x = saved - h;
      const double down = loss();
      x = saved;
      EXPECT_LT(RelError(grad.center[d], (up - down) / (2 * h)), 1e-4);
    }
    for (const auto &[id, g] : grad.outputs)
      for (std::size_t d = 0; d < 10; ++d) {
        double &x = m.output(id)[d];
        const double saved = x;
        x = saved + h;
        const double up = loss();
        x = saved - h;
        const double down = loss();
        x = saved;
        EXPECT_LT(RelError(g[d], (up - down) / (2 * h)), 1e-4);
      }
  }
}

// The step moves exactly -lr * gradient and touches only the named rows.
TEST(SgnsStep, AppliesGradientToNamedRowsOnly) {
  std::mt19937_64 rng(5);
  auto m = RandomMatrix(8, 6, rng);
  const std::vector<std::size_t> negs = {3, 4, 3};
  const auto before = m;
  const auto grad = SgnsGradients(std::size_t{1}, std::size_t{2}, std::span(negs), m);
  const double lr = 0.05;
  const double loss = SgnsStep(1, 2, std::span<const std::size_t>(negs), m, lr);
  EXPECT_NEAR(loss, SgnsLoss(1, 2, std::span<const std::size_t>(negs), before), 1e-12);
  for (std::size_t id = 0; id < 8; ++id)
    for (std::size_t d = 0; d < 6; ++d) {
      const double expect_in = id == 1 ? before.input(id)[d] - lr * grad.center[d]
                                       : before.input(id)[d];
      EXPECT_NEAR(m.input(id)[d], expect_in, 1e-12);
      double expect_out = before.output(id)[d];
      for (const auto &[row, g] : grad.outputs)
        if (row == id) expect_out -= lr * g[d];
      EXPECT_NEAR(m.output(id)[d], expect_out, 1e-12);
    }
}

// The full softmax of the skip-gram model normalizes over the vocabulary.
TEST(SoftmaxOracle, SumsToOne) {
  std::mt19937_64 rng(9);
  auto m = RandomMatrix(50, 8, rng);
  for (std::size_t center = 0; center < 50; center += 7) {
    std::vector<double> logits;
    for (std::size_t t = 0; t < 50; ++t) {
      double s = 0.0;
      for (std::size_t d = 0; d < 8; ++d) s += m.output(t)[d] * m.input(center)[d];
      logits.push_back(s);
    }
    const double mx = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double l : logits) z += std::exp(l - mx);
    double total = 0.0;
    for (double l : logits) total += std::exp(l - mx) / z;
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(Train, EpochsZeroReturnsInitialization) {
  TrainingConfig cfg;
  cfg.dim = 8;
  cfg.epochs = 0;
  auto m = Train(Seqs{{"a", "b", "c"}}, cfg);
  const double half = 0.5 / 8;
  for (float x : m.input_data()) {
    EXPECT_GE(x, -half);
    EXPECT_LE(x, half);
  }
  for (float x : m.output_data()) EXPECT_EQ(x, 0.0f);
}

TEST(Train, EmptyVocabularyFails) {
  TrainingConfig cfg;
  cfg.min_count = 5;
  EXPECT_THROW(Train(Seqs{{"a"}}, cfg), PreconditionError);
  EXPECT_THROW(Train(Seqs{}, cfg), PreconditionError);
}

TEST(Train, InvalidConfig) {
  TrainingConfig cfg;
  cfg.window = 0;
  EXPECT_THROW(Train(Seqs{{"a", "b"}}, cfg), PreconditionError);
  cfg.window = 1;
  cfg.lr_initial = 0.0;
  EXPECT_THROW(Train(Seqs{{"a", "b"}}, cfg), PreconditionError);
}

TrainingConfig ClusterConfig() {
  TrainingConfig cfg;
  cfg.dim = 20;
  cfg.window = 5;
  cfg.negatives = 5;
  cfg.epochs = 5;
  cfg.rng_seed = 17;
  return cfg;
}

TEST(Train, SeparatesCoOccurrenceClusters) {
  const auto corpus = testing::TwoClusterCorpus(2000, 1);
  std::ostringstream progress;
  TrainingStats stats;
  auto m = Train(corpus, ClusterConfig(), &progress, &stats);
  EXPECT_TRUE(m.AllFinite());
  const auto [intra, inter] = testing::ClusterCosines(m);
  EXPECT_GE(intra - inter, 0.3) << intra << " vs " << inter;
  EXPECT_EQ(stats.epoch_mean_loss.size(), 5u);
  EXPECT_LT(stats.epoch_mean_loss.back(), stats.epoch_mean_loss.front());
  // One "epoch<TAB>tokens<TAB>loss" line per epoch.
  std::istringstream lines(progress.str());
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    EXPECT_EQ(SplitTabs(line).size(), 3u);
    ++n;
  }
  EXPECT_EQ(n, 5);
}

TEST(Train, SingleWorkerIsBitReproducible) {
  const auto corpus = testing::TwoClusterCorpus(300, 2);
  auto cfg = ClusterConfig();
  auto a = Train(corpus, cfg);
  auto b = Train(corpus, cfg);
  EXPECT_TRUE(a == b);
  cfg.rng_seed = 18;
  EXPECT_FALSE(a == Train(corpus, cfg));
}

TEST(Train, SharedUpdatersStayFiniteAndLearn) {
  const auto corpus = testing::TwoClusterCorpus(2000, 3);
  auto cfg = ClusterConfig();
  cfg.workers = 4;
  auto m = Train(corpus, cfg);
  EXPECT_TRUE(m.AllFinite());
  const auto [intra, inter] = testing::ClusterCosines(m);
  EXPECT_GE(intra - inter, 0.3);
}

TEST(Train, SubsamplingRunsAndStaysFinite) {
  const auto corpus = testing::TwoClusterCorpus(200, 4);
  auto cfg = ClusterConfig();
  cfg.subsample_t = 1e-3;
  auto m = Train(corpus, cfg);
  EXPECT_TRUE(m.AllFinite());
}

TEST(TrainingConfig, VariantDefaults) {
  EXPECT_EQ(TrainingConfig::ForVariant(Variant::kWords).window, 5u);
  EXPECT_EQ(TrainingConfig::ForVariant(Variant::kHeadings).window, 20u);
  EXPECT_EQ(TrainingConfig::ForVariant(Variant::kEntities).window, 50u);
  EXPECT_EQ(TrainingConfig::ForVariant(Variant::kCoreEntities).window, 50u);
  for (Variant v : kAllVariants) {
    EXPECT_EQ(TrainingConfig::ForVariant(v).negatives, 25u);
    EXPECT_EQ(TrainingConfig::ForVariant(v).dim, 200u);
  }
  EXPECT_EQ(TrainingConfig::ForVariant(Variant::kWords).min_count, 5u);
  EXPECT_EQ(TrainingConfig::ForVariant(Variant::kHeadings).subsample_t, 0.0);
}

TEST(Cosine, Examples) {
  const std::vector<double> x{0.3, -1.2, 4.0};
  EXPECT_NEAR(Cosine(x, x), 1.0, 1e-15);
  EXPECT_EQ(Cosine(std::vector<double>{1, 0}, std::vector<double>{0, 1}), 0.0);
  // 32 / (sqrt(14) * sqrt(77))
  EXPECT_NEAR(Cosine(std::vector<double>{1, 2, 3}, std::vector<double>{4, 5, 6}),
              32.0 / std::sqrt(14.0 * 77.0), 1e-15);
  EXPECT_NEAR(Cosine(std::vector<double>{1, 2, 3}, std::vector<double>{4, 5, 6}),
              0.9746318461970762, 1e-12);
  EXPECT_EQ(Cosine(std::vector<double>{0, 0}, std::vector<double>{1, 1}), 0.0);
}

TEST(Cosine, DimensionMismatch) {
  EXPECT_THROW(Cosine(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}),
               PreconditionError);
}

TEST(NearestTerms, OrdersByCosine) {
  EmbeddingMatrix<float> m(CountsVocab({1, 1, 1, 1}), 2);
  m.input(0)[0] = 1;                      // t0 = (1, 0)
  m.input(1)[0] = 1, m.input(1)[1] = 1;   // t1 = (1, 1)
  m.input(2)[1] = 1;                      // t2 = (0, 1)
  m.input(3)[0] = -1;                     // t3 = (-1, 0)
  const std::vector<double> q{1.0, 0.1};
  const auto nn = NearestTerms(m, std::span<const double>(q), 2, std::set<std::string>{"t0"});
  ASSERT_EQ(nn.size(), 2u);
  EXPECT_EQ(nn[0].first, "t1");
  EXPECT_EQ(nn[1].first, "t2");
}

TEST(VectorFile, RoundTrip) {
  auto corpus = Seqs{{"Year", "Club name", "b"}, {"b", "Year"}};
  TrainingConfig cfg;
  cfg.dim = 5;
  cfg.epochs = 2;
  auto m = Train(corpus, cfg);
  std::stringstream ss;
  SaveVectors(m, ss, {"variant=H dim=5"});
  auto back = LoadVectors(ss);
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(back.vocab().terms(), m.vocab().terms());
  for (std::size_t id = 0; id < 3; ++id)
    for (std::size_t d = 0; d < 5; ++d) EXPECT_NEAR(back.input(id)[d], m.input(id)[d], 1e-6);
  EXPECT_EQ(back.input_data(), m.input_data());  // shortest round-trip form is exact
}

TEST(VectorFile, RowCountMismatchReportsLine) {
  std::istringstream in("5\t2\na\t1\t2\nb\t1\t2\nc\t1\t2\nd\t1\t2\n");
  try {
    LoadVectors(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 6u);
  }
}

TEST(VectorFile, ArityMismatchReportsLine) {
  std::istringstream in("2\t2\na\t1\t2\nb\t1\n");
  try {
    LoadVectors(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(VectorFile, MalformedHeader) {
  std::istringstream in("hello\n");
  EXPECT_THROW(LoadVectors(in), ParseError);
  std::istringstream bad_value("1\t2\na\t1\tx\n");
  EXPECT_THROW(LoadVectors(bad_value), ParseError);
}

}  // namespace
}  // namespace tablevec
