#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ugglan/fstdict.hpp"
#include "ugglan/kb.hpp"
#include "ugglan/mention.hpp"
#include "ugglan/ner.hpp"
#include "ugglan/postprocess.hpp"
#include "ugglan/rerank.hpp"

namespace ugglan::pipeline {

// Bad configuration (exit code 2) vs. bad input data (exit code 3).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string run_id = "run";
  mention::OverlapMode mode = mention::OverlapMode::DictOnly;
  text::TokenizeMode tokenize_mode = text::TokenizeMode::Alphabetic;
  std::string kb_path;
  std::string input_path;   // JSONL corpus
  std::string output_path;  // TSV
  std::optional<std::string> ner_model_path;
  std::optional<std::string> reranker_model_path;
  mention::Thresholds thresholds;
  double decode_threshold = 0.5;
  ner::DecodeStrategy decode_strategy = ner::DecodeStrategy::HighestProb;
  std::optional<double> alpha;  // overrides the reranker model's alpha
  double nil_threshold = 0.5;
  std::size_t window = 20;
  std::size_t step = 10;
  bool coref = true;
  bool nominals = true;
  std::size_t workers = 1;
  std::uint64_t seed = 1;
};

Config read_config(const std::string& path);

struct Report {
  std::size_t documents = 0;
  std::size_t dict_matches = 0;
  std::size_t ner_mentions = 0;
  std::size_t resolved_mentions = 0;
  std::size_t linked_mentions = 0;
  std::size_t nil_mentions = 0;
  std::size_t coref_additions = 0;
  std::size_t nominal_additions = 0;
  std::size_t emitted_mentions = 0;
  std::size_t dropped_no_class = 0;
  double elapsed_ms = 0.0;

  std::string to_string() const;
};

// Loaded artifacts shared by all documents of a run.
struct Artifacts {
  kb::KnowledgeBase kb;
  fstdict::Automaton automaton;
  std::optional<ner::NerModel> ner;
  std::optional<rerank::RerankModel> reranker;
};

Artifacts load_artifacts(const Config& cfg);

// One document through discovery, linking, reranking, and the per-document
// postprocess steps. NIL entities are left empty for the global pass.
std::vector<postprocess::LinkedMention> process_document(
    const kb::CorpusDocument& doc, const Config& cfg, const Artifacts& art,
    Report* report = nullptr);

// Full run: documents (in input order, parallel workers), NIL clustering,
// output writing. Returns the report.
Report run_pipeline(const Config& cfg);

// Builds a reranker from the gold anchors of a corpus: documents are linked
// with the dictionary pipeline, detected mentions matched against gold
// spans, and alpha picked by grid search on a held-out share of documents.
rerank::RerankModel train_reranker_from_corpus(
    const std::vector<kb::CorpusDocument>& corpus, const Artifacts& art,
    const Config& cfg, const rerank::RerankTrainOptions& opt);

}  // namespace ugglan::pipeline
