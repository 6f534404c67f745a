#include "ugglan/postprocess.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include "ugglan/fstdict.hpp"

namespace ugglan::postprocess {

std::string to_string(MentionType t) {
  return t == MentionType::NAM ? "NAM" : "NOM";
}

namespace {

std::vector<char> occupancy(const std::vector<LinkedMention>& mentions,
                            std::size_t token_count) {
  std::vector<char> occ(token_count, 0);
  for (const LinkedMention& m : mentions)
    for (std::size_t t = m.tok_begin; t < m.tok_end && t < token_count; ++t)
      occ[t] = 1;
  return occ;
}

bool kb_linked(const LinkedMention& m) {
  return !m.entity.empty() && m.entity[0] == 'Q';
}

}  // namespace

std::vector<LinkedMention> coref_by_string(const std::vector<LinkedMention>& linked,
                                           const std::vector<text::Token>& tokens,
                                           const std::string& doc_id) {
  std::vector<char> occ = occupancy(linked, tokens.size());

  // word -> indices of linked mentions having it as first or last word
  std::map<std::string, std::vector<std::size_t>> words;
  for (std::size_t i = 0; i < linked.size(); ++i) {
    const LinkedMention& m = linked[i];
    if (!kb_linked(m) || m.tok_end <= m.tok_begin || m.tok_end > tokens.size())
      continue;
    words[tokens[m.tok_begin].text].push_back(i);
    if (m.tok_end - m.tok_begin > 1) words[tokens[m.tok_end - 1].text].push_back(i);
  }

  std::vector<LinkedMention> added;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    if (occ[t]) continue;
    auto it = words.find(tokens[t].text);
    if (it == words.end()) continue;

    // Nearest preceding source mention; nearest following as fallback.
    const LinkedMention* src = nullptr;
    std::size_t best = 0;
    for (std::size_t i : it->second) {
      const LinkedMention& m = linked[i];
      if (m.tok_end <= t && (!src || m.tok_end > best)) {
        src = &m;
        best = m.tok_end;
      }
    }
    if (!src) {
      std::size_t next = tokens.size() + 1;
      for (std::size_t i : it->second) {
        const LinkedMention& m = linked[i];
        if (m.tok_begin > t && m.tok_begin < next) {
          src = &m;
          next = m.tok_begin;
        }
      }
    }
    if (!src) continue;

    LinkedMention add;
    add.doc_id = doc_id;
    add.tok_begin = t;
    add.tok_end = t + 1;
    add.start = tokens[t].start;
    add.end = tokens[t].end;
    add.surface = tokens[t].text;
    add.entity = src->entity;
    add.klass = src->klass;
    add.mention_type = MentionType::NAM;
    add.confidence = src->confidence * 0.9;
    added.push_back(std::move(add));
    occ[t] = 1;
  }
  return added;
}

std::vector<LinkedMention> discover_nominals(const std::vector<text::Token>& tokens,
                                             const std::vector<LinkedMention>& linked,
                                             const kb::KnowledgeBase& kb,
                                             const std::string& doc_id) {
  std::vector<char> occ = occupancy(linked, tokens.size());

  struct Phrase {
    kb::EntityId entity;
    std::vector<std::string> folded;
  };
  std::vector<Phrase> phrases;
  std::set<kb::EntityId> doc_entities;
  for (const LinkedMention& m : linked)
    if (kb_linked(m)) doc_entities.insert(m.entity);
  for (const kb::EntityId& e : doc_entities) {
    auto it = kb.nominals.find(e);
    if (it == kb.nominals.end()) continue;
    for (const std::string& p : it->second) {
      Phrase ph;
      ph.entity = e;
      for (const std::string& w : fstdict::split_surface(p))
        ph.folded.push_back(text::ascii_lower(w));
      if (!ph.folded.empty()) phrases.push_back(std::move(ph));
    }
  }
  if (phrases.empty()) return {};

  std::vector<std::string> folded_tokens;
  folded_tokens.reserve(tokens.size());
  for (const text::Token& t : tokens) folded_tokens.push_back(text::ascii_lower(t.text));

  auto nearest_preceding = [&](const kb::EntityId& e, std::size_t t) -> const LinkedMention* {
    const LinkedMention* best = nullptr;
    for (const LinkedMention& m : linked) {
      if (m.entity != e || m.tok_end > t) continue;
      if (!best || m.tok_end > best->tok_end) best = &m;
    }
    return best;
  };

  std::vector<LinkedMention> added;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    if (occ[t]) continue;

    // Longest matching phrase first; ties go to the nearest preceding
    // linked mention of the phrase's entity.
    const Phrase* pick = nullptr;
    const LinkedMention* src = nullptr;
    for (const Phrase& ph : phrases) {
      std::size_t len = ph.folded.size();
      if (t + len > tokens.size()) continue;
      bool ok = true;
      for (std::size_t k = 0; k < len; ++k) {
        if (occ[t + k] || folded_tokens[t + k] != ph.folded[k]) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      const LinkedMention* m = nearest_preceding(ph.entity, t);
      if (!m) continue;
      bool better = !pick || len > pick->folded.size() ||
                    (len == pick->folded.size() && m->tok_end > src->tok_end) ||
                    (len == pick->folded.size() && m->tok_end == src->tok_end &&
                     ph.entity < pick->entity);
      if (better) {
        pick = &ph;
        src = m;
      }
    }
    if (!pick) continue;

    std::size_t len = pick->folded.size();
    LinkedMention add;
    add.doc_id = doc_id;
    add.tok_begin = t;
    add.tok_end = t + len;
    add.start = tokens[t].start;
    add.end = tokens[t + len - 1].end;
    add.surface.clear();
    for (std::size_t k = 0; k < len; ++k) {
      if (k) add.surface += ' ';
      add.surface += tokens[t + k].text;
    }
    add.entity = pick->entity;
    auto cit = kb.classes.find(pick->entity);
    add.klass = cit != kb.classes.end() ? cit->second : src->klass;
    add.mention_type = MentionType::NOM;
    add.confidence = src->confidence * 0.9;
    added.push_back(std::move(add));
    for (std::size_t k = 0; k < len; ++k) occ[t + k] = 1;
    t += len - 1;
  }
  return added;
}

std::optional<kb::Klass> assign_class(const kb::EntityId& entity,
                                      const kb::KnowledgeBase& kb,
                                      std::optional<ner::NerClass> ner_class) {
  if (!entity.empty()) {
    auto it = kb.classes.find(entity);
    if (it != kb.classes.end() && it->second != kb::Klass::OTHER) return it->second;
  }
  if (ner_class && *ner_class != ner::NerClass::NONE) {
    kb::Klass k = ner::klass_of(*ner_class);
    if (k != kb::Klass::OTHER) return k;
  }
  return std::nullopt;
}

void cluster_nils(std::vector<LinkedMention>& mentions) {
  std::map<std::string, std::size_t> clusters;
  for (LinkedMention& m : mentions) {
    if (!m.entity.empty()) continue;
    std::string key = text::ascii_lower(m.surface);
    auto [it, inserted] = clusters.emplace(key, clusters.size() + 1);
    m.entity = "NIL-" + std::to_string(it->second);
  }
}

void write_output(std::ostream& os, const std::string& run_id,
                  const std::vector<LinkedMention>& mentions) {
  std::size_t next_id = 1;
  char conf[16];
  for (const LinkedMention& m : mentions) {
    std::snprintf(conf, sizeof(conf), "%.4f", m.confidence);
    os << run_id << '\t' << 'M' << next_id++ << '\t' << m.surface << '\t'
       << m.doc_id << ':' << m.start << '-' << m.end << '\t' << m.entity << '\t'
       << kb::to_string(m.klass) << '\t' << to_string(m.mention_type) << '\t'
       << conf << '\n';
  }
}

}  // namespace ugglan::postprocess
