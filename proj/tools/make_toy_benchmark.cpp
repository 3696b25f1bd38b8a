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

// Writes the synthetic toy benchmark to a directory:
//   make_toy_benchmark [out_dir] [seed]

#include <filesystem>
#include <iostream>
#include <string>

#include "fixtures.hpp"
#include "tablevec/tablevec.hpp"

int main(int argc, char **argv) {
  namespace fs = std::filesystem;
  using namespace tablevec;
  const fs::path dir = argc > 1 ? argv[1] : "toy";
  const std::uint64_t seed = argc > 2 ? std::stoull(argv[2]) : 2019;
  try {
    fs::create_directories(dir);
    const auto b = testing::MakeToyBenchmark(seed);
    const std::string header = std::string(kCommentPrefix) + " tablevec toy benchmark seed=" +
                               std::to_string(seed) + "\n";
    auto write = [&](const std::string &name, auto &&body) {
      auto out = OpenOutput((dir / name).string());
      out << header;
      body(out);
      if (!out) throw IoError("write failed for " + name);
    };
    write("corpus.jsonl", [&](std::ostream &o) { WriteCorpus(b.corpus, o); });
    write("test_tables.jsonl", [&](std::ostream &o) { WriteCorpus(b.test_tables, o); });
    write("kb_outlinks.tsv", [&](std::ostream &o) {
      for (const auto &[e, t] : b.outlink_rows) o << e << '\t' << t << '\n';
    });
    write("kb_relations.tsv", [&](std::ostream &o) {
      for (const auto &[e, r] : b.relation_rows) o << e << '\t' << r << '\n';
    });
    write("queries.tsv", [&](std::ostream &o) {
      for (const auto &[id, text] : b.queries) o << id << '\t' << text << '\n';
    });
    write("retrieval_qrels.txt", [&](std::ostream &o) { b.retrieval_qrels.Save(o); });
  } catch (const std::exception &e) {
    std::cerr << "make_toy_benchmark: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
