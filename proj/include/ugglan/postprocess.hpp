#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ugglan/kb.hpp"
#include "ugglan/ner.hpp"
#include "ugglan/text.hpp"

namespace ugglan::postprocess {

enum class MentionType { NAM, NOM };

std::string to_string(MentionType t);

struct LinkedMention {
  std::string doc_id;
  std::size_t start = 0, end = 0;          // byte offsets
  std::size_t tok_begin = 0, tok_end = 0;  // token indices
  std::string surface;                     // document text of the span
  kb::EntityId entity;                     // "Q..."; empty until NIL clustering
  kb::Klass klass = kb::Klass::OTHER;
  MentionType mention_type = MentionType::NAM;
  double confidence = 1.0;
};

// Additional mentions for bare repeats of the first or last word of each
// KB-linked mention. A token matching words of several mentions takes the
// nearest preceding one (nearest following when none precedes).
std::vector<LinkedMention> coref_by_string(const std::vector<LinkedMention>& linked,
                                           const std::vector<text::Token>& tokens,
                                           const std::string& doc_id);

// NOM mentions for token spans matching a nominal phrase of an entity that
// is already linked in the document, attached to the nearest preceding
// linked mention of that entity. Case-folded matching.
std::vector<LinkedMention> discover_nominals(const std::vector<text::Token>& tokens,
                                             const std::vector<LinkedMention>& linked,
                                             const kb::KnowledgeBase& kb,
                                             const std::string& doc_id);

// KB class first, NER class second; nullopt (drop the mention) when neither
// produces one of the five output classes.
std::optional<kb::Klass> assign_class(const kb::EntityId& entity,
                                      const kb::KnowledgeBase& kb,
                                      std::optional<ner::NerClass> ner_class);

// Entities left empty are NIL: grouped by case-folded surface, labeled
// NIL-1, NIL-2, ... in first-occurrence order.
void cluster_nils(std::vector<LinkedMention>& mentions);

// One mention per line: run_id, mention id, surface, doc:start-end, entity,
// class, NAM/NOM, confidence with four decimals.
void write_output(std::ostream& os, const std::string& run_id,
                  const std::vector<LinkedMention>& mentions);

}  // namespace ugglan::postprocess
