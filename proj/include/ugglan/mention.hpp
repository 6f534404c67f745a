#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ugglan/ner.hpp"

namespace ugglan::mention {

enum class Source { Dict, Ner, Both };
enum class Bucket { Proper, Dubious };
enum class OverlapMode { NerOnly, DictOnly, Hybrid };

struct Mention {
  std::size_t begin = 0, end = 0;  // token indices
  std::string surface;
  Source source = Source::Dict;
  double ld = 0.0;
  std::int64_t lc = 0;
  std::optional<ner::NerClass> ner_class;
  Bucket bucket = Bucket::Dubious;
  bool linkable = true;  // NER-only mentions without a dictionary entry are not
};

struct Thresholds {
  double ld_min = 0.05;
  std::int64_t lc_min = 2;
};

// PROPER iff (ld > ld_min and lc > lc_min) or at least 75% of the mention's
// alphabetic tokens are title-cased; everything else is DUBIOUS.
struct Classified {
  std::vector<Mention> proper;
  std::vector<Mention> dubious;
};
Classified classify_mentions(std::vector<Mention> dict_matches,
                             const Thresholds& thresholds);

bool title_case_override(const std::vector<std::string>& tokens);

// Merges proper dictionary mentions with (already disjoint) NER mentions.
// Output spans are pairwise disjoint in every mode.
std::vector<Mention> resolve_overlaps(const std::vector<Mention>& proper_dict,
                                      const std::vector<Mention>& ner_mentions,
                                      OverlapMode mode);

}  // namespace ugglan::mention
