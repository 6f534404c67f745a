#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ugglan/kb.hpp"
#include "ugglan/neuro.hpp"

namespace ugglan::ner {

// Five TAC classes, named and nominal, plus NONE: 2N+1 outputs.
enum class NerClass : int {
  PER_NAM = 0,
  GPE_NAM,
  ORG_NAM,
  LOC_NAM,
  FAC_NAM,
  PER_NOM,
  GPE_NOM,
  ORG_NOM,
  LOC_NOM,
  FAC_NOM,
  NONE
};

constexpr std::size_t kClassCount = 11;

std::string to_string(NerClass c);
std::optional<NerClass> ner_class_from_string(const std::string& s);
kb::Klass klass_of(NerClass c);
bool is_nominal(NerClass c);

struct GoldSpan {
  std::size_t begin = 0, end = 0;  // token indices, half-open
  NerClass cls = NerClass::NONE;
};

struct SentenceData {
  std::vector<std::string> tokens;
  std::vector<GoldSpan> gold;
};

enum class SampleKind { Positive, Disjoint, Overlapping };

struct CandidateWindow {
  std::size_t sentence = 0;
  std::size_t begin = 0, end = 0;
  NerClass label = NerClass::NONE;
  SampleKind kind = SampleKind::Disjoint;
};

// All windows [i, i+k) with k in 1..max_width, ordered by (begin, end).
std::vector<std::pair<std::size_t, std::size_t>> generate_candidates(
    std::size_t token_count, std::size_t max_width = 7);

// Labels every candidate window of one sentence: exact gold match is
// POSITIVE, no annotated token is DISJOINT, anything else OVERLAPPING.
// Overlapping gold annotations are an input error.
std::vector<CandidateWindow> label_candidates(std::size_t sentence_index,
                                              std::size_t token_count,
                                              const std::vector<GoldSpan>& gold,
                                              std::size_t max_width = 7);

struct SampleRatios {
  double overlapping = 0.60;
  double disjoint = 0.30;
  double positive = 0.10;
};

// Epoch dataset: all positives plus freshly drawn negatives sized so that
// positives are the `positive` share of the epoch. Negatives are drawn
// without replacement. When a pool is short, both negative kinds shrink
// proportionally and `warned` is set. Returns indices into `windows`.
std::vector<std::size_t> sample_epoch(const std::vector<CandidateWindow>& windows,
                                      const SampleRatios& ratios,
                                      std::mt19937_64& rng, bool* warned = nullptr);

// Word vocabularies for the feature extractor: one case-sensitive, one
// lowercased, each with BOS/EOS padding; the raw side keeps distinct
// UNK/unk rows for unknown words.
struct Vocab {
  std::vector<std::string> raw_words;    // id order
  std::vector<std::string> lower_words;  // id order
  std::map<std::string, int> raw_index;
  std::map<std::string, int> lower_index;
  int bos_raw = 0, eos_raw = 0, unk_raw = 0, unk_raw_lower = 0;
  int bos_lower = 0, eos_lower = 0, unk_lower = 0;

  static Vocab build(const std::vector<SentenceData>& corpus);
  static Vocab from_word_lists(std::vector<std::string> raw,
                               std::vector<std::string> lower);

  int raw_dim() const { return static_cast<int>(raw_words.size()); }
  int lower_dim() const { return static_cast<int>(lower_words.size()); }
  int raw_id(const std::string& word) const;
  int lower_id(const std::string& word) const;
};

struct FeatureConfig {
  bool char_features = true;  // disabled in logographic mode
  double word_alpha = 0.5;
  double char_alpha = 0.8;
};

// 10 word vectors, plus 4 character vectors unless disabled.
neuro::Example extract_features(const Vocab& vocab, const FeatureConfig& fc,
                                const std::vector<std::string>& tokens,
                                std::size_t focus_begin, std::size_t focus_end);

struct NerModel {
  neuro::Net net;
  Vocab vocab;
  FeatureConfig features;
  std::size_t max_width = 7;
};

void save_ner_model(const NerModel& model, const std::string& path);
NerModel load_ner_model(const std::string& path);

struct TypedSpan {
  std::size_t begin = 0, end = 0;
  NerClass cls = NerClass::NONE;
  double prob = 0.0;
};

enum class DecodeStrategy { HighestProb, Longest };

// Overlap resolution over scored windows. HighestProb repeatedly takes the
// highest-probability remaining window (ties leftmost, then shortest);
// Longest takes the longest (ties rightmost).
std::vector<TypedSpan> select_nonoverlapping(std::vector<TypedSpan> scored,
                                             DecodeStrategy strategy);

// Classify every candidate window; keep argmax != NONE with prob >=
// threshold; then resolve overlaps. Output spans are pairwise disjoint.
std::vector<TypedSpan> decode(const std::vector<std::string>& tokens,
                              const NerModel& model, double threshold = 0.5,
                              DecodeStrategy strategy = DecodeStrategy::HighestProb);

struct TrainOptions {
  neuro::TrainConfig train;
  std::size_t word_proj = 256;
  std::size_t char_proj = 64;
  std::vector<std::size_t> hidden = {512, 512, 512};
  std::size_t max_width = 7;
  bool char_features = true;
  std::uint64_t init_seed = 1;
  SampleRatios ratios;
};

NerModel train_ner(const std::vector<SentenceData>& corpus, const TrainOptions& opt,
                   std::vector<double>* loss_trace = nullptr);

// Training file: one token per line; "#SPAN begin end CLASS" lines after the
// tokens of a sentence; a blank line ends the sentence.
std::vector<SentenceData> read_training_file(const std::string& path);

}  // namespace ugglan::ner
