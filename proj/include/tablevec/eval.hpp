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

// Ranking metrics, TREC run/qrels I/O, paired significance testing and the
// population benchmark protocol.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "tablevec/common.hpp"
#include "tablevec/corpus.hpp"

namespace tablevec {

// case_id -> (item -> grade).
class Qrels {
 public:
  void Add(const std::string &case_id, const std::string &item, int grade) {
    if (grade < 0) throw PreconditionError("negative grade for " + case_id + "/" + item);
    judgments_[case_id][item] = grade;
  }

  bool contains(const std::string &case_id) const { return judgments_.contains(case_id); }

  const std::map<std::string, int> &Grades(const std::string &case_id) const {
    auto it = judgments_.find(case_id);
    return it == judgments_.end() ? empty_ : it->second;
  }

  std::set<std::string> Relevant(const std::string &case_id) const {
    std::set<std::string> out;
    for (const auto &[item, g] : Grades(case_id))
      if (g > 0) out.insert(item);
    return out;
  }

  std::vector<std::string> case_ids() const {
    std::vector<std::string> out;
    for (const auto &[id, _] : judgments_) out.push_back(id);
    return out;
  }

  const std::map<std::string, std::map<std::string, int>> &judgments() const {
    return judgments_;
  }

  // "case_id 0 item grade" lines.
  void Save(std::ostream &out) const {
    for (const auto &[id, items] : judgments_)
      for (const auto &[item, g] : items)
        out << EscapeTrecId(id) << " 0 " << EscapeTrecId(item) << ' ' << g << '\n';
  }

  static Qrels Load(std::istream &in) {
    Qrels q;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      line = StripCr(line);
      if (IsCommentLine(line)) continue;
      auto f = SplitWhitespace(line);
      if (f.empty()) continue;
      if (f.size() != 4) throw ParseError("qrels line needs 4 fields", line_no);
      int grade = 0;
      try {
        std::size_t used = 0;
        grade = std::stoi(f[3], &used);
        if (used != f[3].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception &) {
        throw ParseError("bad grade '" + f[3] + "'", line_no);
      }
      if (grade < 0) throw ParseError("negative grade", line_no);
      q.Add(UnescapeTrecId(f[0]), UnescapeTrecId(f[2]), grade);
    }
    return q;
  }

  static Qrels Load(const std::string &path) {
    auto in = OpenInput(path);
    return Load(in);
  }

 private:
  std::map<std::string, std::map<std::string, int>> judgments_;
  std::map<std::string, int> empty_;
};

// case_id -> ranking.
using Run = std::map<std::string, RankedList>;

// TREC run lines "case_id Q0 item rank score tag", ids escaped with
// EscapeTrecId and scores in shortest round-trip form.
inline void WriteRunCase(std::ostream &out, const std::string &case_id,
                         const RankedList &ranking, const std::string &tag,
                         std::size_t depth = 1000) {
  const std::string id = EscapeTrecId(case_id);
  std::size_t rank = 0;
  for (const auto &e : ranking) {
    if (++rank > depth) break;
    out << id << " Q0 " << EscapeTrecId(e.item) << ' ' << rank << ' ' << FormatNumber(e.score)
        << ' ' << tag << '\n';
  }
}

inline void WriteRun(std::ostream &out, const Run &run, const std::string &tag,
                     std::size_t depth = 1000) {
  for (const auto &[id, ranking] : run) WriteRunCase(out, id, ranking, tag, depth);
}

inline Run ReadRun(std::istream &in) {
  std::map<std::string, std::vector<RankedList::Entry>> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = StripCr(line);
    if (IsCommentLine(line)) continue;
    auto f = SplitWhitespace(line);
    if (f.empty()) continue;
    if (f.size() != 6) throw ParseError("run line needs 6 fields", line_no);
    double score = 0.0;
    try {
      score = std::stod(f[4]);
    } catch (const std::exception &) {
      throw ParseError("bad score '" + f[4] + "'", line_no);
    }
    entries[UnescapeTrecId(f[0])].push_back({UnescapeTrecId(f[2]), score});
  }
  Run run;
  for (auto &[id, list] : entries) run.emplace(id, RankedList(std::move(list)));
  return run;
}

inline Run ReadRun(const std::string &path) {
  auto in = OpenInput(path);
  return ReadRun(in);
}

// ---------------------------------------------------------------------------
// Metrics

inline constexpr std::size_t kDefaultRankCutoff = 1000;

// (1/|relevant|) * sum of precision@k over relevant items retrieved within the
// cutoff.
inline double AveragePrecision(const std::vector<std::string> &ranking,
                               const std::set<std::string> &relevant,
                               std::size_t cutoff = kDefaultRankCutoff) {
  if (relevant.empty()) return 0.0;
  double sum = 0.0;
  std::size_t hits = 0;
  const std::size_t n = std::min(ranking.size(), cutoff);
  for (std::size_t k = 0; k < n; ++k) {
    if (relevant.contains(ranking[k])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(k + 1);
    }
  }
  return sum / static_cast<double>(relevant.size());
}

inline double ReciprocalRank(const std::vector<std::string> &ranking,
                             const std::set<std::string> &relevant,
                             std::size_t cutoff = kDefaultRankCutoff) {
  const std::size_t n = std::min(ranking.size(), cutoff);
  for (std::size_t k = 0; k < n; ++k)
    if (relevant.contains(ranking[k])) return 1.0 / static_cast<double>(k + 1);
  return 0.0;
}

// DCG@k with linear gain and 1/log2(rank+1) discount over the ideal DCG@k.
// Returns 0 when the ideal DCG is 0.
inline double NdcgAtK(const std::vector<std::string> &ranking,
                      const std::map<std::string, int> &grades, std::size_t k) {
  auto grade_of = [&](const std::string &item) {
    auto it = grades.find(item);
    return it == grades.end() ? 0 : it->second;
  };
  double dcg = 0.0;
  for (std::size_t r = 0; r < std::min(k, ranking.size()); ++r)
    dcg += grade_of(ranking[r]) / std::log2(static_cast<double>(r) + 2.0);
  std::vector<int> ideal;
  for (const auto &[_, g] : grades)
    if (g > 0) ideal.push_back(g);
  std::sort(ideal.rbegin(), ideal.rend());
  double idcg = 0.0;
  for (std::size_t r = 0; r < std::min(k, ideal.size()); ++r)
    idcg += ideal[r] / std::log2(static_cast<double>(r) + 2.0);
  return idcg > 0.0 ? dcg / idcg : 0.0;
}

// Two-tailed paired t-test. Identical samples give 1; zero-variance non-zero
// differences give 0.
inline double PairedTTest(const std::vector<double> &a, const std::vector<double> &b) {
  if (a.size() != b.size())
    throw PreconditionError("paired t-test: length mismatch " + std::to_string(a.size()) +
                            " vs " + std::to_string(b.size()));
  if (a.size() < 2) throw PreconditionError("paired t-test needs at least 2 pairs");
  const std::size_t n = a.size();
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i] - mean;
    ss += d * d;
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (sd == 0.0) return mean == 0.0 ? 1.0 : 0.0;
  const double t = mean / (sd / std::sqrt(static_cast<double>(n)));
  boost::math::students_t dist(static_cast<double>(n - 1));
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))));
}

// "∘" not significant, "†" p < 0.05, "‡" p < 0.01.
inline std::string SignificanceMarker(double p) {
  if (p < 0.01) return "‡";
  if (p < 0.05) return "†";
  return "∘";
}

enum class Metric { kMap, kMrr, kNdcg10, kNdcg20 };

inline Metric ParseMetric(std::string_view s) {
  if (s == "map" || s == "MAP") return Metric::kMap;
  if (s == "mrr" || s == "MRR" || s == "recip_rank") return Metric::kMrr;
  if (s == "ndcg@10" || s == "NDCG@10" || s == "ndcg_cut_10") return Metric::kNdcg10;
  if (s == "ndcg@20" || s == "NDCG@20" || s == "ndcg_cut_20") return Metric::kNdcg20;
  throw PreconditionError("unknown metric '" + std::string(s) + "'");
}

inline std::string_view MetricName(Metric m) {
  switch (m) {
    case Metric::kMap: return "MAP";
    case Metric::kMrr: return "MRR";
    case Metric::kNdcg10: return "NDCG@10";
    case Metric::kNdcg20: return "NDCG@20";
  }
  return "?";
}

// Metric value for one case. nullopt when the case cannot be scored (no
// relevant item, or zero ideal DCG).
inline std::optional<double> ScoreCase(Metric metric, const std::vector<std::string> &ranking,
                                       const std::map<std::string, int> &grades) {
  std::set<std::string> relevant;
  for (const auto &[item, g] : grades)
    if (g > 0) relevant.insert(item);
  if (relevant.empty()) return std::nullopt;
  switch (metric) {
    case Metric::kMap: return AveragePrecision(ranking, relevant);
    case Metric::kMrr: return ReciprocalRank(ranking, relevant);
    case Metric::kNdcg10: return NdcgAtK(ranking, grades, 10);
    case Metric::kNdcg20: return NdcgAtK(ranking, grades, 20);
  }
  return std::nullopt;
}

struct MetricReport {
  Metric metric = Metric::kMap;
  std::map<std::string, double> per_case;
  double mean = 0.0;
  std::size_t skipped = 0;  // qrels cases without any relevant item

  // Mean over the per-case values.
  void Recompute() {
    double s = 0.0;
    for (const auto &[_, v] : per_case) s += v;
    mean = per_case.empty() ? 0.0 : s / static_cast<double>(per_case.size());
  }
};

// Scores every qrels case with a relevant item; cases absent from the run
// score as an empty ranking. Run cases unknown to the qrels are returned in
// `unknown_cases` when given.
inline MetricReport Evaluate(const Run &run, const Qrels &qrels, Metric metric,
                             std::vector<std::string> *unknown_cases = nullptr) {
  MetricReport report;
  report.metric = metric;
  if (unknown_cases != nullptr)
    for (const auto &[id, _] : run)
      if (!qrels.contains(id)) unknown_cases->push_back(id);
  for (const auto &[id, grades] : qrels.judgments()) {
    std::vector<std::string> items;
    if (auto it = run.find(id); it != run.end()) items = it->second.items();
    if (auto v = ScoreCase(metric, items, grades)) {
      report.per_case.emplace(id, *v);
    } else {
      ++report.skipped;
    }
  }
  report.Recompute();
  return report;
}

// p-value of `report` against `reference` over their common cases.
inline double CompareReports(const MetricReport &report, const MetricReport &reference) {
  std::vector<double> a, b;
  for (const auto &[id, v] : report.per_case) {
    if (auto it = reference.per_case.find(id); it != reference.per_case.end()) {
      a.push_back(v);
      b.push_back(it->second);
    }
  }
  if (a.size() < 2) return 1.0;
  return PairedTTest(a, b);
}

// ---------------------------------------------------------------------------
// Population benchmark protocol

enum class PopulationMode { kRow, kColumn };

struct PopulationCase {
  std::string case_id;
  std::string table_id;
  PopulationMode mode = PopulationMode::kRow;
  std::size_t seed_size = 0;
  std::vector<std::string> seeds;     // seed entities or seed headings
  std::vector<std::string> relevant;  // ground truth, disjoint from seeds
};

struct PopulationCases {
  std::vector<PopulationCase> cases;
  Qrels qrels;
  std::size_t excluded_tables = 0;  // below the size threshold
};

inline constexpr std::size_t kMinBenchmarkRows = 6;
inline constexpr std::size_t kMinBenchmarkColumns = 4;

// Row mode: seeds are the core-column entities of the first i rows, the
// remaining core-column entities are the ground truth. Column mode: seeds are
// the first j headings, the rest are the ground truth. One case per (table,
// seed size); cases with nothing left to find are dropped.
inline PopulationCases MakePopulationCases(const std::vector<TableRecord> &tables,
                                           PopulationMode mode,
                                           const std::vector<std::size_t> &seed_sizes) {
  PopulationCases out;
  for (const auto &t : tables) {
    if (t.num_rows() < kMinBenchmarkRows || t.num_columns() < kMinBenchmarkColumns) {
      ++out.excluded_tables;
      continue;
    }
    for (std::size_t size : seed_sizes) {
      PopulationCase c;
      c.table_id = t.table_id;
      c.mode = mode;
      c.seed_size = size;
      std::vector<std::string> rest;
      if (mode == PopulationMode::kRow) {
        TableRecord core = t;
        if (!core.core_column) DetectCoreColumn(core);
        const std::size_t col = *core.core_column;
        for (std::size_t r = 0; r < core.num_rows(); ++r)
          for (const auto &e : core.rows[r][col].entities)
            detail::AddUnique(r < size ? c.seeds : rest, e);
        c.case_id = t.table_id + "_r" + std::to_string(size);
      } else {
        for (std::size_t h = 0; h < t.num_columns(); ++h)
          detail::AddUnique(h < size ? c.seeds : rest, t.headings[h]);
        c.case_id = t.table_id + "_c" + std::to_string(size);
      }
      const std::set<std::string> seed_set(c.seeds.begin(), c.seeds.end());
      for (auto &x : rest)
        if (!seed_set.contains(x)) c.relevant.push_back(std::move(x));
      if (c.seeds.empty() || c.relevant.empty()) continue;
      for (const auto &x : c.relevant) out.qrels.Add(c.case_id, x, 1);
      out.cases.push_back(std::move(c));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Report output

inline void WriteReportTsv(std::ostream &out, const MetricReport &report) {
  out << "case_id\t" << MetricName(report.metric) << '\n';
  out << std::setprecision(10);
  for (const auto &[id, v] : report.per_case) out << id << '\t' << v << '\n';
  out << "all\t" << report.mean << '\n';
}

// One row per report: name and mean, plus the significance marker against
// rows[reference] for every other row when a reference is given.
inline void WriteReportTable(std::ostream &out,
                             const std::vector<std::pair<std::string, MetricReport>> &rows,
                             std::optional<std::size_t> reference = std::nullopt) {
  std::size_t width = 6;
  for (const auto &[name, _] : rows) width = std::max(width, name.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto &[name, r] = rows[i];
    out << std::left << std::setw(static_cast<int>(width)) << name << "  "
        << MetricName(r.metric) << ' ' << std::fixed << std::setprecision(4) << r.mean;
    if (reference && *reference != i && *reference < rows.size())
      out << ' ' << SignificanceMarker(CompareReports(r, rows[*reference].second));
    out << '\n';
  }
  out << std::defaultfloat << std::right;
}

}  // namespace tablevec
