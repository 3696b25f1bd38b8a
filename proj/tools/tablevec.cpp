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

// tablevec: corpus ingestion, embedding training, population, retrieval and
// evaluation from the command line.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <CLI11.hpp>

#include "tablevec/tablevec.hpp"

namespace fs = std::filesystem;
using namespace tablevec;

namespace {

// Relative inputs that do not exist under the working directory are looked up
// under $TABLEVEC_DATA.
std::string ResolveInput(const std::string &path) {
  if (path.empty() || fs::exists(path) || fs::path(path).is_absolute()) return path;
  if (const char *root = std::getenv("TABLEVEC_DATA"); root != nullptr && *root != '\0') {
    fs::path candidate = fs::path(root) / path;
    if (fs::exists(candidate)) return candidate.string();
  }
  return path;
}

void RequireInput(const std::string &path, const std::string &what) {
  if (!fs::exists(path)) throw IoError(what + " not found: " + path);
}

// "#% " header lines recording the resolved configuration.
class Header {
 public:
  explicit Header(std::string command) { lines_.push_back("tablevec " + std::move(command)); }

  template <class T>
  Header &Set(const std::string &key, const T &value) {
    std::ostringstream os;
    os << key << '=';
    if constexpr (std::is_floating_point_v<T>) {
      os << FormatNumber(value);
    } else {
      os << value;
    }
    lines_.push_back(os.str());
    return *this;
  }

  const std::vector<std::string> &lines() const { return lines_; }

  void Write(std::ostream &out) const {
    for (const auto &l : lines_) out << kCommentPrefix << ' ' << l << '\n';
  }

 private:
  std::vector<std::string> lines_;
};

template <class T>
std::string Join(const std::vector<T> &xs) {
  std::ostringstream os;
  for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? "," : "") << xs[i];
  return os.str();
}

// ---------------------------------------------------------------------------
// ingest

struct IngestOptions {
  std::string corpus;
  std::string out;
  std::string stopwords;
};

void CmdIngest(const IngestOptions &o) {
  const std::string corpus = ResolveInput(o.corpus);
  RequireInput(corpus, "corpus");
  const StopwordSet stopwords = o.stopwords.empty() ? DefaultStopwords()
                                                    : LoadStopwords(ResolveInput(o.stopwords));
  std::size_t skipped = 0;
  auto tables = ReadCorpus(corpus, &skipped);
  for (auto &t : tables)
    if (!t.core_column && t.num_columns() > 0) DetectCoreColumn(t);
  fs::create_directories(o.out);

  Header header("ingest");
  header.Set("corpus", o.corpus).Set("tables", tables.size()).Set("skipped", skipped);
  header.Set("stopwords", o.stopwords.empty() ? std::string(kStopwordsVersion) : o.stopwords);

  std::ostringstream stats;
  stats << "variant\tsequences\ttotal_terms\tdistinct_terms\n";
  for (Variant v : kAllVariants) {
    const std::string path = (fs::path(o.out) / (std::string(VariantFileStem(v)) + ".seq")).string();
    auto out = OpenOutput(path);
    Header h = header;
    h.Set("variant", VariantName(v));
    h.Write(out);
    std::size_t sequences = 0, total = 0;
    std::set<std::string> distinct;
    for (const auto &t : tables) {
      auto seq = ExtractSequence(t, v, stopwords);
      if (!seq) continue;
      WriteSequence(*seq, out);
      ++sequences;
      total += seq->tokens.size();
      distinct.insert(seq->tokens.begin(), seq->tokens.end());
    }
    if (!out) throw IoError("write failed for " + path);
    stats << VariantName(v) << '\t' << sequences << '\t' << total << '\t' << distinct.size()
          << '\n';
  }

  {
    auto out = OpenOutput((fs::path(o.out) / "index.jsonl").string());
    header.Write(out);
    CorpusIndex::FromTables(tables).Save(out);
  }
  {
    auto out = OpenOutput((fs::path(o.out) / "stats.tsv").string());
    header.Write(out);
    out << stats.str();
  }
  std::cout << "tables\t" << tables.size() << "\nskipped\t" << skipped << '\n' << stats.str();
}

// ---------------------------------------------------------------------------
// train

struct TrainOptions {
  std::string variant;
  std::string sequences;
  std::string out;
  std::optional<std::size_t> dim, window, negatives, epochs, min_count, workers;
  std::optional<double> lr, subsample;
  std::optional<std::uint64_t> rng_seed;
  bool progress = false;
};

void CmdTrain(const TrainOptions &o) {
  const Variant v = ParseVariant(o.variant);
  const std::string seq_path = ResolveInput(
      o.sequences.empty() ? std::string(VariantFileStem(v)) + ".seq" : o.sequences);
  RequireInput(seq_path, "sequence file");

  auto cfg = TrainingConfig::ForVariant(v);
  if (o.dim) cfg.dim = *o.dim;
  if (o.window) cfg.window = *o.window;
  if (o.negatives) cfg.negatives = *o.negatives;
  if (o.epochs) cfg.epochs = *o.epochs;
  if (o.min_count) cfg.min_count = *o.min_count;
  if (o.workers) cfg.workers = *o.workers;
  if (o.lr) cfg.lr_initial = *o.lr;
  if (o.subsample) cfg.subsample_t = *o.subsample;
  if (o.rng_seed) cfg.rng_seed = *o.rng_seed;
  cfg.Validate();

  const auto sequences = ReadSequences(seq_path);
  TrainingStats stats;
  auto m = Train<float>(sequences, cfg, o.progress ? &std::cerr : nullptr, &stats);

  Header header("train");
  header.Set("variant", VariantName(v)).Set("sequences", o.sequences.empty() ? seq_path : o.sequences);
  header.Set("config", cfg.Describe());
  SaveVectors(m, o.out, header.lines());

  std::cout << "variant\t" << VariantName(v) << "\nconfig\t" << cfg.Describe()
            << "\nsequences\t" << sequences.size() << "\nvocabulary\t" << m.size()
            << "\ncorpus_terms\t" << m.vocab().total_terms() << "\ntokens_seen\t"
            << stats.tokens_seen << '\n';
}

// ---------------------------------------------------------------------------
// populate / gridsearch

struct PopulateOptions {
  std::string mode = "row";
  std::string tables;
  std::string index;
  std::string kb_outlinks;
  std::string kb_relations;
  std::string method = "BL2";
  std::string vectors;
  std::vector<std::size_t> seed_sizes;
  std::size_t candidates = kDefaultCandidateLimit;
  std::size_t relevant_tables = kDefaultRelevantTables;
  std::string qrels_out;
};

struct PopulationInputs {
  PopulationCases cases;
  std::vector<GridCase> grid;
  Header header{"populate"};
};

PopulationInputs LoadPopulation(const PopulateOptions &o, const std::string &command) {
  PopulationInputs in;
  in.header = Header(command);
  const PopulationMode mode = o.mode == "row"      ? PopulationMode::kRow
                              : o.mode == "column" ? PopulationMode::kColumn
                                                   : throw PreconditionError("--mode must be row or column");
  std::vector<std::size_t> sizes = o.seed_sizes;
  if (sizes.empty())
    sizes = mode == PopulationMode::kRow ? std::vector<std::size_t>{1, 2, 3, 4, 5}
                                         : std::vector<std::size_t>{1, 2, 3};

  const std::string tables_path = ResolveInput(o.tables);
  const std::string index_path = ResolveInput(o.index);
  RequireInput(tables_path, "test tables");
  RequireInput(index_path, "corpus index");
  in.cases = MakePopulationCases(ReadCorpus(tables_path), mode, sizes);
  const auto index = CorpusIndex::Load(index_path);

  Embeddings m;
  if (!o.vectors.empty()) {
    const std::string p = ResolveInput(o.vectors);
    RequireInput(p, "vectors");
    m = LoadVectors<float>(p);
  }
  in.header.Set("mode", o.mode).Set("tables", o.tables).Set("index", o.index);
  in.header.Set("seed_sizes", Join(sizes)).Set("vectors", o.vectors.empty() ? "-" : o.vectors);

  if (mode == PopulationMode::kRow) {
    const KbMethod method = ParseKbMethod(o.method);
    const std::string links = ResolveInput(o.kb_outlinks), rels = ResolveInput(o.kb_relations);
    if (!links.empty()) RequireInput(links, "KB outlinks");
    if (!rels.empty()) RequireInput(rels, "KB relations");
    const auto kb = LoadKnowledgeBase(links, rels);
    in.header.Set("method", KbMethodName(method)).Set("candidates", o.candidates);
    in.header.Set("kb_outlinks", o.kb_outlinks.empty() ? "-" : o.kb_outlinks);
    in.header.Set("kb_relations", o.kb_relations.empty() ? "-" : o.kb_relations);
    in.grid = RowPopulationComponents(in.cases.cases, index, kb, method, m, o.candidates);
  } else {
    in.header.Set("relevant_tables", o.relevant_tables);
    in.grid = ColumnPopulationComponents(in.cases.cases, index, m, o.relevant_tables);
  }
  if (!o.qrels_out.empty()) {
    auto out = OpenOutput(o.qrels_out);
    in.header.Write(out);
    in.cases.qrels.Save(out);
  }
  return in;
}

void CmdPopulate(const PopulateOptions &o, double alpha, const std::string &out_path) {
  auto in = LoadPopulation(o, "populate");
  in.header.Set("alpha", alpha);
  const Run run = MixRun(in.grid, alpha);
  const std::string tag = "tablevec-" + o.mode + "-a" + FormatNumber(alpha);
  auto out = OpenOutput(out_path);
  in.header.Write(out);
  WriteRun(out, run, tag);
  std::cout << "cases\t" << in.cases.cases.size() << "\nexcluded_tables\t"
            << in.cases.excluded_tables << '\n';
}

void CmdGridSearch(const PopulateOptions &o, const std::string &metric_name, double step,
                   const std::string &out_path) {
  auto in = LoadPopulation(o, "gridsearch");
  const Metric metric = ParseMetric(metric_name);
  in.header.Set("metric", MetricName(metric)).Set("step", step);
  const auto curve = GridSearchAlpha(in.grid, metric, step);
  std::ostringstream body;
  in.header.Write(body);
  body << "alpha\t" << MetricName(metric) << '\n';
  for (const auto &[a, v] : curve.points) body << FormatNumber(a) << '\t' << FormatNumber(v) << '\n';
  body << "best\t" << FormatNumber(curve.best_alpha) << '\t' << FormatNumber(curve.best_value)
       << '\n';
  if (out_path.empty()) {
    std::cout << body.str();
  } else {
    auto out = OpenOutput(out_path);
    out << body.str();
    std::cout << "best_alpha\t" << curve.best_alpha << "\nbest_value\t" << curve.best_value
              << '\n';
  }
}

// ---------------------------------------------------------------------------
// retrieve

struct RetrieveOptions {
  std::string corpus;
  std::string queries;
  std::string qrels;
  std::string word_vectors;
  std::string entity_vectors;
  std::string features = "auto";
  std::size_t folds = 5;
  std::size_t trees = 100;
  std::uint64_t rng_seed = 1;
  std::size_t workers = 1;
  std::string out;
};

void CmdRetrieve(const RetrieveOptions &o) {
  const std::string corpus = ResolveInput(o.corpus), queries_path = ResolveInput(o.queries),
                    qrels_path = ResolveInput(o.qrels);
  RequireInput(corpus, "corpus");
  RequireInput(queries_path, "queries");
  RequireInput(qrels_path, "qrels");
  const auto tables = ReadCorpus(corpus);
  const auto qrels = Qrels::Load(qrels_path);

  std::optional<Embeddings> words, entities;
  if (!o.word_vectors.empty()) words = LoadVectors<float>(ResolveInput(o.word_vectors));
  if (!o.entity_vectors.empty()) entities = LoadVectors<float>(ResolveInput(o.entity_vectors));

  bool use_words = words.has_value(), use_entities = entities.has_value();
  if (o.features == "baseline") {
    use_words = use_entities = false;
  } else if (o.features == "words") {
    use_entities = false;
  } else if (o.features == "entities") {
    use_words = false;
  } else if (o.features != "all" && o.features != "auto") {
    throw PreconditionError("--features must be auto, baseline, words, entities or all");
  }
  if ((o.features == "words" || o.features == "all") && !words)
    throw PreconditionError("word features need --word-vectors");
  if ((o.features == "entities" || o.features == "all") && !entities)
    throw PreconditionError("entity features need --entity-vectors");

  EntityLinker linker;
  std::set<EntityId> known;
  for (const auto &t : tables)
    for (auto &e : TableEntities(t)) known.insert(std::move(e));
  if (entities)
    for (std::size_t i = 0; i < entities->size(); ++i) known.insert(entities->vocab().term(i));
  for (const auto &e : known) linker.AddEntity(e);

  const StopwordSet stopwords = DefaultStopwords();
  std::vector<Query> queries;
  for (auto &[id, text] : ReadQueries(queries_path))
    queries.push_back(MakeQuery(id, text, stopwords, &linker));

  const FieldStatistics stats(tables, stopwords);
  const FeatureExtractor<float> fx(stats, use_words ? &*words : nullptr,
                                   use_entities ? &*entities : nullptr);
  const auto columns = FeatureColumns(use_words, use_entities);
  auto pairs = SelectFeatures(JudgedPairs(queries, qrels, tables, fx), columns);

  ForestConfig cfg;
  cfg.trees = o.trees;
  cfg.seed = o.rng_seed;
  cfg.workers = o.workers;
  const auto ranked = TrainAndRank(std::move(pairs), o.folds, cfg);

  Header header("retrieve");
  header.Set("corpus", o.corpus).Set("queries", o.queries).Set("qrels", o.qrels);
  header.Set("word_vectors", o.word_vectors.empty() ? "-" : o.word_vectors);
  header.Set("entity_vectors", o.entity_vectors.empty() ? "-" : o.entity_vectors);
  std::vector<std::string_view> names;
  for (std::size_t c : columns) names.push_back(kFeatureNames[c]);
  header.Set("features", Join(names)).Set("folds", o.folds).Set("trees", o.trees);
  header.Set("rng_seed", o.rng_seed);
  auto out = OpenOutput(o.out);
  header.Write(out);
  WriteRun(out, ranked.rankings, use_words || use_entities ? "tablevec-ltr-sem" : "tablevec-ltr");
  std::cout << "queries\t" << ranked.rankings.size() << "\nfeatures\t" << columns.size() << '\n';
}

// ---------------------------------------------------------------------------
// eval

struct EvalOptions {
  std::string run;
  std::string qrels;
  std::vector<std::string> metrics;
  std::vector<std::string> reference;
  bool per_case = false;
};

int CmdEval(const EvalOptions &o) {
  const std::string run_path = ResolveInput(o.run), qrels_path = ResolveInput(o.qrels);
  RequireInput(run_path, "run");
  RequireInput(qrels_path, "qrels");
  const auto qrels = Qrels::Load(qrels_path);
  std::vector<std::pair<std::string, Run>> runs;
  for (const auto &r : o.reference) runs.emplace_back(r, ReadRun(ResolveInput(r)));
  runs.emplace_back(o.run, ReadRun(run_path));

  bool inconsistent = false;
  for (const auto &[name, run] : runs) {
    std::vector<std::string> unknown;
    for (const auto &[id, _] : run)
      if (!qrels.contains(id)) unknown.push_back(id);
    if (!unknown.empty()) {
      inconsistent = true;
      std::cerr << "tablevec: error: " << name << " has " << unknown.size()
                << " case ids missing from " << o.qrels << ":";
      for (const auto &id : unknown) std::cerr << ' ' << id;
      std::cerr << '\n';
    }
  }
  if (inconsistent) return 2;

  std::vector<std::string> metrics = o.metrics;
  if (metrics.empty()) metrics.push_back("map");
  for (const auto &name : metrics) {
    const Metric metric = ParseMetric(name);
    std::vector<std::pair<std::string, MetricReport>> rows;
    for (const auto &[label, run] : runs) rows.emplace_back(label, Evaluate(run, qrels, metric));
    WriteReportTable(std::cout, rows,
                     o.reference.empty() ? std::nullopt : std::optional<std::size_t>(0));
    if (o.per_case) WriteReportTsv(std::cout, rows.back().second);
  }
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Table embeddings: training, population, retrieval and evaluation"};
  app.require_subcommand(1);

  IngestOptions ingest;
  auto *ingest_cmd = app.add_subcommand("ingest", "Extract the four term sequences and the corpus index");
  ingest_cmd->add_option("--corpus", ingest.corpus, "Corpus JSONL")->required();
  ingest_cmd->add_option("--out", ingest.out, "Output directory")->required();
  ingest_cmd->add_option("--stopwords", ingest.stopwords, "Stopword file (one per line)");

  TrainOptions train;
  auto *train_cmd = app.add_subcommand("train", "Train skip-gram embeddings for one variant");
  train_cmd->add_option("--variant", train.variant, "W, H, E or E*")->required();
  train_cmd->add_option("--sequences", train.sequences, "Sequence file (default <variant>.seq)");
  train_cmd->add_option("--out", train.out, "Output vector TSV")->required();
  train_cmd->add_option("--dim", train.dim);
  train_cmd->add_option("--window", train.window);
  train_cmd->add_option("--negatives", train.negatives);
  train_cmd->add_option("--epochs", train.epochs);
  train_cmd->add_option("--min-count", train.min_count);
  train_cmd->add_option("--lr", train.lr);
  train_cmd->add_option("--subsample", train.subsample);
  train_cmd->add_option("--workers", train.workers);
  train_cmd->add_option("--rng-seed", train.rng_seed);
  train_cmd->add_flag("--progress", train.progress, "Per-epoch loss on stderr");

  PopulateOptions pop;
  double alpha = 0.5;
  std::string pop_out;
  std::string grid_metric = "map";
  double grid_step = 0.1;
  std::string grid_out;
  auto add_population_options = [&](CLI::App *cmd) {
    cmd->add_option("--mode", pop.mode, "row or column")->check(CLI::IsMember({"row", "column"}));
    cmd->add_option("--tables", pop.tables, "Test tables (corpus JSONL)")->required();
    cmd->add_option("--index", pop.index, "Corpus index written by ingest")->required();
    cmd->add_option("--kb-outlinks", pop.kb_outlinks, "entity<TAB>target TSV");
    cmd->add_option("--kb-relations", pop.kb_relations, "entity<TAB>relation TSV");
    cmd->add_option("--method", pop.method, "BL1, BL2 or BL3");
    cmd->add_option("--vectors", pop.vectors, "Embedding TSV (E* for rows, H for columns)");
    cmd->add_option("--seed-size", pop.seed_sizes, "Seed sizes (default 1-5 rows, 1-3 columns)")
        ->delimiter(',');
    cmd->add_option("--candidates", pop.candidates, "Row candidate limit");
    cmd->add_option("--relevant-tables", pop.relevant_tables, "Column baseline top-K tables");
    cmd->add_option("--qrels-out", pop.qrels_out, "Write the ground truth as qrels");
  };
  auto *pop_cmd = app.add_subcommand("populate", "Rank row or column candidates for seed tables");
  add_population_options(pop_cmd);
  pop_cmd->add_option("--alpha", alpha, "Baseline weight in [0, 1]");
  pop_cmd->add_option("--out", pop_out, "Output run file")->required();

  auto *grid_cmd = app.add_subcommand("gridsearch", "Metric as a function of alpha");
  add_population_options(grid_cmd);
  grid_cmd->add_option("--metric", grid_metric, "map, mrr, ndcg@10 or ndcg@20");
  grid_cmd->add_option("--step", grid_step, "Grid step");
  grid_cmd->add_option("--out", grid_out, "Output TSV (default stdout)");

  RetrieveOptions ret;
  auto *ret_cmd = app.add_subcommand("retrieve", "Rank judged tables for keyword queries");
  ret_cmd->add_option("--corpus", ret.corpus, "Corpus JSONL")->required();
  ret_cmd->add_option("--queries", ret.queries, "query_id<TAB>text")->required();
  ret_cmd->add_option("--qrels", ret.qrels, "Judged query-table pairs")->required();
  ret_cmd->add_option("--word-vectors", ret.word_vectors, "W embedding TSV");
  ret_cmd->add_option("--entity-vectors", ret.entity_vectors, "E embedding TSV");
  ret_cmd->add_option("--features", ret.features, "auto, baseline, words, entities or all");
  ret_cmd->add_option("--folds", ret.folds);
  ret_cmd->add_option("--trees", ret.trees);
  ret_cmd->add_option("--rng-seed", ret.rng_seed);
  ret_cmd->add_option("--workers", ret.workers);
  ret_cmd->add_option("--out", ret.out, "Output run file")->required();

  EvalOptions ev;
  auto *eval_cmd = app.add_subcommand("eval", "Score a run against qrels");
  eval_cmd->add_option("--run", ev.run, "Run file")->required();
  eval_cmd->add_option("--qrels", ev.qrels, "Qrels file")->required();
  eval_cmd->add_option("--metric", ev.metrics, "map, mrr, ndcg@10, ndcg@20")->delimiter(',');
  eval_cmd->add_option("--reference", ev.reference, "Reference run for significance markers");
  eval_cmd->add_flag("--per-case", ev.per_case, "Also print per-case values");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest_cmd) CmdIngest(ingest);
    if (*train_cmd) CmdTrain(train);
    if (*pop_cmd) CmdPopulate(pop, alpha, pop_out);
    if (*grid_cmd) CmdGridSearch(pop, grid_metric, grid_step, grid_out);
    if (*ret_cmd) CmdRetrieve(ret);
    if (*eval_cmd) return CmdEval(ev);
  } catch (const std::exception &e) {
    std::cerr << "tablevec: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
