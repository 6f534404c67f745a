#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ugglan/text.hpp"

namespace ugglan::kb {

// "Q" + digits for knowledge-base entities, "NIL-" + digits for clusters.
using EntityId = std::string;

bool valid_entity_id(const EntityId& id);

enum class Klass { PER, GPE, ORG, LOC, FAC, OTHER };

std::string to_string(Klass k);
std::optional<Klass> klass_from_string(const std::string& s);

struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
};

struct Anchor {
  std::size_t start = 0;  // byte offsets into the document text
  std::size_t end = 0;
  EntityId entity;
  bool induced = false;  // true for autolinked anchors
};

struct CorpusDocument {
  std::string doc_id;
  std::string text;
  std::vector<Anchor> anchors;  // gold anchors, non-overlapping, sorted
  std::optional<EntityId> page_entity;
  std::optional<Span> bold_first;
  std::vector<std::size_t> paragraph_breaks;  // sorted byte offsets
};

struct CandidateCount {
  EntityId entity;
  std::int64_t pair_count = 0;
};

struct MentionEntry {
  std::string surface;  // token-normalized, single-space joined
  std::vector<CandidateCount> candidates;  // pair_count desc, then entity asc
  std::int64_t anchor_count = 0;  // gold + induced anchors
  std::int64_t text_count = 0;    // unlinked exact dictionary matches
  std::int64_t link_count = 0;    // gold anchors only

  double link_density() const;
};

struct KnowledgeBase {
  std::map<std::string, MentionEntry> dictionary;
  std::map<std::pair<EntityId, EntityId>, std::int64_t> cooccur;  // smaller id first
  std::map<EntityId, std::set<EntityId>> inlinks;  // target -> linking pages
  std::map<EntityId, Klass> classes;
  std::map<EntityId, std::string> titles;  // normalized surface form
  std::map<EntityId, std::set<std::string>> nominals;
  std::map<std::string, std::vector<std::string>> folded_index;  // lower -> surfaces
  text::CaseStats case_stats;

  const MentionEntry* find(const std::string& surface) const;
  void rebuild_folded_index();
};

struct Diagnostics {
  std::int64_t skipped_redirects = 0;
  std::vector<std::string> messages;
};

// Tokenize-and-join normalization used for every surface key in the KB.
std::string normalize_surface(std::string_view s, text::TokenizeMode mode);

// Union of the five mention sources: page titles (with and without a
// parenthetical suffix), redirects, disambiguation records, anchor labels,
// and the first bold-faced span of a page.
std::map<std::string, std::set<EntityId>> collect_mentions(
    const std::vector<CorpusDocument>& docs,
    const std::map<std::string, std::string>& redirects,
    const std::map<std::string, std::set<EntityId>>& disambig,
    const std::map<EntityId, std::string>& titles, text::TokenizeMode mode,
    Diagnostics* diag = nullptr);

// Gold anchors plus induced anchors for every other exact token-sequence
// match of a gold surface. When one surface is linked to several entities,
// the nearest preceding gold anchor supplies the entity.
std::vector<Anchor> autolink(const CorpusDocument& doc,
                             const std::vector<text::Token>& tokens);

double compute_link_density(std::int64_t anchor_count, std::int64_t text_count);

// Unordered distinct-entity pairs per paragraph window, using at most the
// first window_limit linked mentions of each paragraph.
std::map<std::pair<EntityId, EntityId>, std::int64_t> count_cooccurrences(
    const CorpusDocument& doc, const std::vector<Anchor>& anchors,
    std::size_t window_limit = 20);

struct BuildInputs {
  std::vector<CorpusDocument> corpus;
  std::map<std::string, std::string> redirects;  // surface -> target id (raw)
  std::map<std::string, std::set<EntityId>> disambig;
  std::vector<std::pair<EntityId, Klass>> class_records;
  std::vector<std::pair<EntityId, std::string>> nominal_records;
  std::map<EntityId, std::string> titles;  // raw titles, underscores allowed
  std::set<std::string> nominal_seed;      // empty set keeps every phrase
  text::TokenizeMode mode = text::TokenizeMode::Alphabetic;
  std::size_t max_mention_tokens = 8;
};

KnowledgeBase build_kb(const BuildInputs& in, Diagnostics* diag = nullptr);

void save_kb(const KnowledgeBase& kb, const std::string& path);
KnowledgeBase load_kb(const std::string& path);

// File readers for the external formats (JSONL corpus, TSV records).
std::vector<CorpusDocument> read_corpus_jsonl(const std::string& path);
std::map<std::string, std::string> read_redirects_tsv(const std::string& path);
std::map<std::string, std::set<EntityId>> read_disambig_tsv(const std::string& path);
std::vector<std::pair<EntityId, Klass>> read_classes_tsv(const std::string& path);
std::vector<std::pair<EntityId, std::string>> read_nominals_tsv(const std::string& path);
std::map<EntityId, std::string> read_titles_tsv(const std::string& path);
std::set<std::string> read_seed_list(const std::string& path);

}  // namespace ugglan::kb
