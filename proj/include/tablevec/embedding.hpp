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

// Skip-gram with negative sampling over term sequences, plus vector storage
// and similarity primitives.

#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tablevec/common.hpp"
#include "tablevec/corpus.hpp"

namespace tablevec {

// ---------------------------------------------------------------------------
// Vocabulary

// Dense term ids in [0, V), ordered by descending count then term.
class Vocabulary {
 public:
  Vocabulary() = default;

  // Terms and counts in id order.
  Vocabulary(std::vector<std::string> terms, std::vector<std::uint64_t> counts,
             std::uint64_t min_count)
      : terms_(std::move(terms)), counts_(std::move(counts)), min_count_(min_count) {
    if (terms_.size() != counts_.size())
      throw PreconditionError("vocabulary terms/counts size mismatch");
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (!ids_.emplace(terms_[i], i).second)
        throw PreconditionError("duplicate vocabulary term '" + terms_[i] + "'");
      total_ += counts_[i];
    }
  }

  // Counts every token of every sequence and drops terms seen fewer than
  // min_count times.
  template <class Sequences>
  static Vocabulary Build(const Sequences &sequences, std::uint64_t min_count) {
    std::unordered_map<std::string, std::uint64_t> counts;
    for (const auto &seq : sequences)
      for (const auto &tok : seq) ++counts[std::string(tok)];
    std::vector<std::pair<std::string, std::uint64_t>> kept;
    for (auto &[term, n] : counts)
      if (n >= min_count) kept.emplace_back(term, n);
    std::sort(kept.begin(), kept.end(), [](const auto &a, const auto &b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    std::vector<std::string> terms;
    std::vector<std::uint64_t> cs;
    terms.reserve(kept.size());
    cs.reserve(kept.size());
    for (auto &[term, n] : kept) {
      terms.push_back(std::move(term));
      cs.push_back(n);
    }
    return Vocabulary(std::move(terms), std::move(cs), min_count);
  }

  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const std::string &term(std::size_t id) const { return terms_[id]; }
  std::uint64_t count(std::size_t id) const { return counts_[id]; }
  const std::vector<std::uint64_t> &counts() const { return counts_; }
  const std::vector<std::string> &terms() const { return terms_; }
  std::uint64_t total_terms() const { return total_; }
  std::uint64_t min_count() const { return min_count_; }

  std::optional<std::size_t> Find(std::string_view term) const {
    auto it = ids_.find(std::string(term));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::vector<std::string> terms_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, std::size_t> ids_;
  std::uint64_t total_ = 0;
  std::uint64_t min_count_ = 0;
};

// ---------------------------------------------------------------------------
// Training configuration

struct TrainingConfig {
  std::size_t dim = 200;
  std::size_t window = 5;
  std::size_t negatives = 25;
  std::size_t epochs = 5;
  double lr_initial = 0.025;
  double subsample_t = 0.0;  // 0 disables frequent-term subsampling
  std::uint64_t min_count = 1;
  std::uint64_t rng_seed = 1;
  std::size_t workers = 1;
  double sampler_power = 0.75;

  // Per-variant defaults: 25 negatives everywhere; window 5 for words, 20 for
  // headings, 50 for both entity variants.
  static TrainingConfig ForVariant(Variant v) {
    TrainingConfig c;
    switch (v) {
      case Variant::kWords:
        c.window = 5;
        c.min_count = 5;
        c.subsample_t = 1e-5;
        break;
      case Variant::kHeadings: c.window = 20; break;
      case Variant::kEntities:
      case Variant::kCoreEntities: c.window = 50; break;
    }
    return c;
  }

  void Validate() const {
    if (dim < 1) throw PreconditionError("dim must be >= 1");
    if (window < 1) throw PreconditionError("window must be >= 1");
    if (!(lr_initial > 0.0)) throw PreconditionError("lr_initial must be > 0");
    if (subsample_t < 0.0) throw PreconditionError("subsample_t must be >= 0");
    if (workers < 1) throw PreconditionError("workers must be >= 1");
  }

  std::string Describe() const {
    std::ostringstream os;
    os << "dim=" << dim << " window=" << window << " negatives=" << negatives
       << " epochs=" << epochs << " lr=" << lr_initial
       << " subsample=" << subsample_t << " min_count=" << min_count
       << " seed=" << rng_seed << " workers=" << workers
       << " sampler_power=" << sampler_power;
    return os.str();
  }
};

// ---------------------------------------------------------------------------
// Embedding matrix

// Paired input (v) and output (v') vectors, each V x dim, row-major.
template <std::floating_point Real>
class EmbeddingMatrix {
 public:
  using value_type = Real;

  EmbeddingMatrix() = default;
  EmbeddingMatrix(Vocabulary vocab, std::size_t dim)
      : vocab_(std::move(vocab)),
        dim_(dim),
        input_(vocab_.size() * dim, Real(0)),
        output_(vocab_.size() * dim, Real(0)) {}

  const Vocabulary &vocab() const { return vocab_; }
  std::size_t size() const { return vocab_.size(); }
  std::size_t dim() const { return dim_; }

  std::span<Real> input(std::size_t id) { return {input_.data() + id * dim_, dim_}; }
  std::span<const Real> input(std::size_t id) const {
    return {input_.data() + id * dim_, dim_};
  }
  std::span<Real> output(std::size_t id) { return {output_.data() + id * dim_, dim_}; }
  std::span<const Real> output(std::size_t id) const {
    return {output_.data() + id * dim_, dim_};
  }

  std::vector<Real> &input_data() { return input_; }
  const std::vector<Real> &input_data() const { return input_; }
  std::vector<Real> &output_data() { return output_; }
  const std::vector<Real> &output_data() const { return output_; }

  // Input vector of `term`, or nullopt when out of vocabulary.
  std::optional<std::span<const Real>> Lookup(std::string_view term) const {
    auto id = vocab_.Find(term);
    if (!id) return std::nullopt;
    return input(*id);
  }

  bool AllFinite() const {
    auto finite = [](Real x) { return std::isfinite(x); };
    return std::all_of(input_.begin(), input_.end(), finite) &&
           std::all_of(output_.begin(), output_.end(), finite);
  }

  bool operator==(const EmbeddingMatrix &o) const {
    return dim_ == o.dim_ && vocab_.terms() == o.vocab_.terms() &&
           input_ == o.input_ && output_ == o.output_;
  }

 private:
  Vocabulary vocab_;
  std::size_t dim_ = 0;
  std::vector<Real> input_;
  std::vector<Real> output_;
};

using Embeddings = EmbeddingMatrix<float>;

// ---------------------------------------------------------------------------
// Negative sampler

// Cumulative distribution over term ids with P(id) proportional to
// count(id)^power.
class SamplerTable {
 public:
  SamplerTable(const Vocabulary &vocab, double power) {
    if (vocab.empty()) throw PreconditionError("sampler needs a non-empty vocabulary");
    std::vector<double> w(vocab.size());
    double total = 0.0;
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      w[i] = std::pow(static_cast<double>(std::max<std::uint64_t>(vocab.count(i), 1)),
                      power);
      total += w[i];
    }
    cdf_.resize(w.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      acc += w[i] / total;
      cdf_[i] = acc;
    }
    cdf_.back() = 1.0;
  }

  std::size_t size() const { return cdf_.size(); }

  double Probability(std::size_t id) const {
    return id == 0 ? cdf_[0] : cdf_[id] - cdf_[id - 1];
  }

  // Inverse-CDF draw from a 64-bit generator.
  template <class Rng>
  std::size_t Draw(Rng &rng) const {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    return static_cast<std::size_t>(it - cdf_.begin());
  }

 private:
  std::vector<double> cdf_;
};

// ---------------------------------------------------------------------------
// SGNS objective

namespace detail {

// -log(sigmoid(x)) without overflow.
inline double NegLogSigmoid(double x) {
  return x > 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

inline double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Plain or relaxed-atomic element access. The shared form lets several
// trainers update the same rows without locks (lost updates are tolerated).
template <bool kShared, class Real>
inline Real Load(const Real &x) {
  if constexpr (kShared) {
    return std::atomic_ref<Real>(const_cast<Real &>(x)).load(std::memory_order_relaxed);
  } else {
    return x;
  }
}

template <bool kShared, class Real>
inline void Store(Real &x, Real v) {
  if constexpr (kShared) {
    std::atomic_ref<Real>(x).store(v, std::memory_order_relaxed);
  } else {
    x = v;
  }
}

template <bool kShared, class Real>
inline double Dot(std::span<const Real> a, std::span<const Real> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    s += static_cast<double>(Load<kShared>(a[k])) * static_cast<double>(Load<kShared>(b[k]));
  return s;
}

// Output rows touched by one step: the context (label 1) then the negatives
// (label 0), in argument order.
inline std::vector<std::pair<std::size_t, int>> OutputTargets(
    std::size_t context_id, std::span<const std::size_t> negative_ids) {
  std::vector<std::pair<std::size_t, int>> t;
  t.reserve(negative_ids.size() + 1);
  t.emplace_back(context_id, 1);
  for (auto n : negative_ids) t.emplace_back(n, 0);
  return t;
}

template <bool kShared, class Real>
double SgnsStepImpl(std::size_t center_id, std::size_t context_id,
                    std::span<const std::size_t> negative_ids,
                    EmbeddingMatrix<Real> &m, double lr,
                    std::vector<double> &center_grad, std::vector<double> &coef) {
  const std::size_t dim = m.dim();
  auto center = m.input(center_id);
  std::span<const Real> center_c(center.data(), dim);

  // Scores and loss from the pre-update parameters.
  const std::size_t n_out = negative_ids.size() + 1;
  coef.assign(n_out, 0.0);
  double loss = 0.0;
  for (std::size_t k = 0; k < n_out; ++k) {
    const std::size_t id = k == 0 ? context_id : negative_ids[k - 1];
    auto out = m.output(id);
    const double s = Dot<kShared, Real>(std::span<const Real>(out.data(), dim), center_c);
    if (k == 0) {
      loss += NegLogSigmoid(s);
      coef[k] = Sigmoid(s) - 1.0;  // dL/ds for the positive pair
    } else {
      loss += NegLogSigmoid(-s);
      coef[k] = Sigmoid(s);
    }
  }

  // dL/dv_c = sum_k coef_k v'_k, accumulated before any output row moves.
  center_grad.assign(dim, 0.0);
  for (std::size_t k = 0; k < n_out; ++k) {
    const std::size_t id = k == 0 ? context_id : negative_ids[k - 1];
    auto out = m.output(id);
    for (std::size_t d = 0; d < dim; ++d)
      center_grad[d] += coef[k] * static_cast<double>(Load<kShared>(out[d]));
  }
  // dL/dv'_k = coef_k v_c.
  for (std::size_t k = 0; k < n_out; ++k) {
    const std::size_t id = k == 0 ? context_id : negative_ids[k - 1];
    auto out = m.output(id);
    const double g = lr * coef[k];
    for (std::size_t d = 0; d < dim; ++d) {
      const double v = static_cast<double>(Load<kShared>(out[d])) -
                       g * static_cast<double>(Load<kShared>(center_c[d]));
      Store<kShared>(out[d], static_cast<Real>(v));
    }
  }
  for (std::size_t d = 0; d < dim; ++d) {
    const double v = static_cast<double>(Load<kShared>(center[d])) - lr * center_grad[d];
    Store<kShared>(center[d], static_cast<Real>(v));
  }
  return loss;
}

}  // namespace detail

// L = -log sigmoid(v'_ctx . v_c) - sum_neg log sigmoid(-v'_neg . v_c).
template <class Real>
double SgnsLoss(std::size_t center_id, std::size_t context_id,
                std::span<const std::size_t> negative_ids,
                const EmbeddingMatrix<Real> &m) {
  auto center = m.input(center_id);
  double loss = detail::NegLogSigmoid(detail::Dot<false, Real>(m.output(context_id), center));
  for (auto n : negative_ids)
    loss += detail::NegLogSigmoid(-detail::Dot<false, Real>(m.output(n), center));
  return loss;
}

// Exact gradient of SgnsLoss with respect to every parameter it reads.
struct SgnsGradient {
  std::vector<double> center;  // d/d v_center
  // d/d v'_id per distinct output row, ascending id. Repeated ids accumulate.
  std::vector<std::pair<std::size_t, std::vector<double>>> outputs;
};

template <class Real>
SgnsGradient SgnsGradients(std::size_t center_id, std::size_t context_id,
                           std::span<const std::size_t> negative_ids,
                           const EmbeddingMatrix<Real> &m) {
  const std::size_t dim = m.dim();
  auto center = m.input(center_id);
  SgnsGradient g;
  g.center.assign(dim, 0.0);
  std::vector<std::pair<std::size_t, std::vector<double>>> rows;
  for (auto [id, label] : detail::OutputTargets(context_id, negative_ids)) {
    auto out = m.output(id);
    const double s = detail::Dot<false, Real>(out, center);
    const double coef = label == 1 ? detail::Sigmoid(s) - 1.0 : detail::Sigmoid(s);
    for (std::size_t d = 0; d < dim; ++d) g.center[d] += coef * out[d];
    auto it = std::find_if(rows.begin(), rows.end(),
                           [id = id](const auto &r) { return r.first == id; });
    if (it == rows.end()) {
      rows.emplace_back(id, std::vector<double>(dim, 0.0));
      it = rows.end() - 1;
    }
    for (std::size_t d = 0; d < dim; ++d) it->second[d] += coef * center[d];
  }
  std::sort(rows.begin(), rows.end(),
            [](const auto &a, const auto &b) { return a.first < b.first; });
  g.outputs = std::move(rows);
  return g;
}

// One SGD step on the SGNS loss. Returns the loss before the update; only the
// named rows change.
template <class Real>
double SgnsStep(std::size_t center_id, std::size_t context_id,
                std::span<const std::size_t> negative_ids, EmbeddingMatrix<Real> &m,
                double lr) {
  std::vector<double> grad, coef;
  return detail::SgnsStepImpl<false>(center_id, context_id, negative_ids, m, lr, grad,
                                     coef);
}

// ---------------------------------------------------------------------------
// Training

struct TrainingStats {
  std::uint64_t tokens_seen = 0;
  std::vector<double> epoch_mean_loss;
};

namespace detail {

struct TrainShared {
  std::atomic<std::uint64_t> processed{0};
  std::uint64_t planned = 1;
};

template <bool kShared, class Real>
void TrainSlice(std::span<const std::vector<std::size_t>> seqs,
                EmbeddingMatrix<Real> &m, const TrainingConfig &cfg,
                const SamplerTable &sampler, const std::vector<double> &keep_prob,
                std::mt19937_64 &rng, TrainShared &shared, double &loss_sum,
                std::uint64_t &steps) {
  std::vector<std::size_t> kept;
  std::vector<std::size_t> negs;
  std::vector<double> grad, coef;
  const double floor_lr = cfg.lr_initial * 1e-4;
  for (const auto &seq : seqs) {
    kept.clear();
    for (auto id : seq) {
      if (keep_prob.empty() || keep_prob[id] >= 1.0 ||
          static_cast<double>(rng() >> 11) * 0x1.0p-53 < keep_prob[id])
        kept.push_back(id);
    }
    const std::uint64_t done =
        shared.processed.fetch_add(seq.size(), std::memory_order_relaxed);
    const double lr = std::max(
        floor_lr, cfg.lr_initial * (1.0 - static_cast<double>(done) /
                                              static_cast<double>(shared.planned)));
    const std::size_t n = kept.size();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t b = 1 + static_cast<std::size_t>(rng() % cfg.window);
      const std::size_t lo = i >= b ? i - b : 0;
      const std::size_t hi = std::min(n - 1, i + b);
      for (std::size_t j = lo; j <= hi; ++j) {
        if (j == i) continue;
        const std::size_t context = kept[j];
        negs.clear();
        for (std::size_t k = 0; k < cfg.negatives; ++k) {
          const std::size_t neg = sampler.Draw(rng);
          if (neg != context) negs.push_back(neg);
        }
        loss_sum += SgnsStepImpl<kShared>(kept[i], context, negs, m, lr, grad, coef);
        ++steps;
      }
    }
  }
}

}  // namespace detail

// Converts token sequences to id sequences, dropping out-of-vocabulary terms.
inline std::vector<std::vector<std::size_t>> ToIds(
    const std::vector<std::vector<std::string>> &sequences, const Vocabulary &vocab) {
  std::vector<std::vector<std::size_t>> out;
  out.reserve(sequences.size());
  for (const auto &seq : sequences) {
    std::vector<std::size_t> ids;
    ids.reserve(seq.size());
    for (const auto &tok : seq)
      if (auto id = vocab.Find(tok)) ids.push_back(*id);
    if (!ids.empty()) out.push_back(std::move(ids));
  }
  return out;
}

// Trains SGNS embeddings. Input vectors start uniform in [-0.5/dim, 0.5/dim],
// output vectors at zero; the learning rate decays linearly to lr/1e4. With
// one worker and a fixed seed the result is bit-reproducible. Progress lines
// "epoch<TAB>tokens_seen<TAB>mean_loss" go to `progress` when given.
template <std::floating_point Real = float>
EmbeddingMatrix<Real> Train(const std::vector<std::vector<std::string>> &sequences,
                            const TrainingConfig &cfg, std::ostream *progress = nullptr,
                            TrainingStats *stats = nullptr) {
  cfg.Validate();
  Vocabulary vocab = Vocabulary::Build(sequences, cfg.min_count);
  if (vocab.empty()) throw PreconditionError("nothing to train");
  const auto ids = ToIds(sequences, vocab);

  EmbeddingMatrix<Real> m(vocab, cfg.dim);
  std::mt19937_64 init_rng(cfg.rng_seed);
  const double half = 0.5 / static_cast<double>(cfg.dim);
  for (auto &x : m.input_data())
    x = static_cast<Real>((static_cast<double>(init_rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0) *
                          half);
  if (cfg.epochs == 0) return m;

  const SamplerTable sampler(m.vocab(), cfg.sampler_power);
  std::vector<double> keep_prob;
  if (cfg.subsample_t > 0.0) {
    keep_prob.resize(vocab.size());
    const double threshold = cfg.subsample_t * static_cast<double>(vocab.total_terms());
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      const double f = static_cast<double>(vocab.count(i));
      keep_prob[i] = (std::sqrt(f / threshold) + 1.0) * threshold / f;
    }
  }

  detail::TrainShared shared;
  std::uint64_t tokens = 0;
  for (const auto &s : ids) tokens += s.size();
  shared.planned = std::max<std::uint64_t>(1, tokens * cfg.epochs);

  const std::size_t workers = std::min(cfg.workers, std::max<std::size_t>(ids.size(), 1));
  std::vector<std::mt19937_64> rngs;
  for (std::size_t w = 0; w < workers; ++w)
    rngs.emplace_back(MixSeed(cfg.rng_seed * 0x100000001b3ULL + w + 1));

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    double loss_sum = 0.0;
    std::uint64_t steps = 0;
    if (workers == 1) {
      detail::TrainSlice<false>(std::span(ids), m, cfg, sampler, keep_prob, rngs[0],
                                shared, loss_sum, steps);
    } else {
      std::vector<double> losses(workers, 0.0);
      std::vector<std::uint64_t> counts(workers, 0);
      std::vector<std::thread> threads;
      const std::size_t chunk = (ids.size() + workers - 1) / workers;
      for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = std::min(ids.size(), w * chunk);
        const std::size_t end = std::min(ids.size(), begin + chunk);
        threads.emplace_back([&, w, begin, end] {
          detail::TrainSlice<true>(std::span(ids).subspan(begin, end - begin), m, cfg,
                                   sampler, keep_prob, rngs[w], shared, losses[w],
                                   counts[w]);
        });
      }
      for (auto &t : threads) t.join();
      for (std::size_t w = 0; w < workers; ++w) {
        loss_sum += losses[w];
        steps += counts[w];
      }
    }
    const double mean = steps > 0 ? loss_sum / static_cast<double>(steps) : 0.0;
    if (stats != nullptr) stats->epoch_mean_loss.push_back(mean);
    if (progress != nullptr)
      *progress << epoch + 1 << '\t' << shared.processed.load() << '\t' << mean << '\n';
  }
  if (stats != nullptr) stats->tokens_seen = shared.processed.load();
  return m;
}

// ---------------------------------------------------------------------------
// Similarity

// u.v / (|u||v|); 0 when either norm is 0.
template <class T, class U>
double Cosine(std::span<const T> u, std::span<const U> v) {
  if (u.size() != v.size())
    throw PreconditionError("cosine: dimension mismatch " + std::to_string(u.size()) +
                            " vs " + std::to_string(v.size()));
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = static_cast<double>(u[i]);
    const double b = static_cast<double>(v[i]);
    dot += a * b;
    nu += a * a;
    nv += b * b;
  }
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

template <class T, class U>
double Cosine(const std::vector<T> &u, const std::vector<U> &v) {
  return Cosine(std::span<const T>(u), std::span<const U>(v));
}

// Up to k vocabulary terms closest (by cosine) to `query`, best first, ties by
// term. Terms in `exclude` are skipped.
template <class Real, class Q, class Exclude>
std::vector<std::pair<std::string, double>> NearestTerms(const EmbeddingMatrix<Real> &m,
                                                         std::span<const Q> query,
                                                         std::size_t k,
                                                         const Exclude &exclude) {
  std::vector<std::pair<std::string, double>> all;
  all.reserve(m.size());
  for (std::size_t id = 0; id < m.size(); ++id) {
    const auto &term = m.vocab().term(id);
    if (exclude.contains(term)) continue;
    all.emplace_back(term, Cosine(query, m.input(id)));
  }
  auto better = [](const auto &a, const auto &b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  };
  if (all.size() > k) {
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(),
                      better);
    all.resize(k);
  } else {
    std::sort(all.begin(), all.end(), better);
  }
  return all;
}

// ---------------------------------------------------------------------------
// Vector files
//
// "V<TAB>dim" header, then one line per term: term<TAB>v1<TAB>...<TAB>v_dim.
// "#%" comment lines may precede the header. Numbers use the shortest form
// that round-trips exactly.

namespace detail {

template <class Real>
void AppendNumber(std::string &out, Real x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  out.append(buf, res.ptr);
}

template <class Real>
bool ParseNumber(std::string_view s, Real &x) {
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

inline bool ParseCount(std::string_view s, std::size_t &x) {
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace detail

template <class Real>
void SaveVectors(const EmbeddingMatrix<Real> &m, std::ostream &out,
                 const std::vector<std::string> &comments = {}) {
  for (const auto &c : comments) out << kCommentPrefix << ' ' << c << '\n';
  out << m.size() << '\t' << m.dim() << '\n';
  std::string line;
  for (std::size_t id = 0; id < m.size(); ++id) {
    line = m.vocab().term(id);
    for (Real x : m.input(id)) {
      line.push_back('\t');
      detail::AppendNumber(line, x);
    }
    line.push_back('\n');
    out << line;
  }
}

template <class Real>
void SaveVectors(const EmbeddingMatrix<Real> &m, const std::string &path,
                 const std::vector<std::string> &comments = {}) {
  auto out = OpenOutput(path);
  SaveVectors(m, out, comments);
  if (!out) throw IoError("write failed for " + path);
}

// Loads input vectors; output vectors are left at zero and counts at 0.
template <std::floating_point Real = float>
EmbeddingMatrix<Real> LoadVectors(std::istream &in) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t n = 0, dim = 0;
  bool have_header = false;
  while (!have_header && std::getline(in, line)) {
    ++line_no;
    line = StripCr(line);
    if (IsCommentLine(line)) continue;
    auto f = SplitTabs(line);
    if (f.size() != 2 || !detail::ParseCount(f[0], n) || !detail::ParseCount(f[1], dim) ||
        dim == 0)
      throw ParseError("malformed vector header, expected V<TAB>dim", line_no);
    have_header = true;
  }
  if (!have_header) throw ParseError("missing vector header", line_no + 1);

  std::vector<std::string> terms;
  std::vector<Real> values;
  terms.reserve(n);
  values.reserve(n * dim);
  while (terms.size() < n) {
    if (!std::getline(in, line))
      throw ParseError("expected " + std::to_string(n) + " vector rows, got " +
                           std::to_string(terms.size()),
                       line_no + 1);
    ++line_no;
    line = StripCr(line);
    auto f = SplitTabs(line);
    if (f.size() != dim + 1)
      throw ParseError("vector row has " + std::to_string(f.size() - 1) +
                           " values, expected " + std::to_string(dim),
                       line_no);
    for (std::size_t d = 0; d < dim; ++d) {
      Real x;
      if (!detail::ParseNumber(f[d + 1], x) || !std::isfinite(x))
        throw ParseError("bad vector value '" + f[d + 1] + "'", line_no);
      values.push_back(x);
    }
    terms.push_back(std::move(f[0]));
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!StripCr(line).empty())
      throw ParseError("trailing data after " + std::to_string(n) + " vector rows",
                       line_no);
  }
  Vocabulary vocab(std::move(terms), std::vector<std::uint64_t>(n, 0), 0);
  EmbeddingMatrix<Real> m(std::move(vocab), dim);
  m.input_data() = std::move(values);
  return m;
}

template <std::floating_point Real = float>
EmbeddingMatrix<Real> LoadVectors(const std::string &path) {
  auto in = OpenInput(path);
  return LoadVectors<Real>(in);
}

}  // namespace tablevec
