#include "ugglan/kb.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ugglan/fstdict.hpp"

namespace ugglan::kb {

namespace {

using json = nlohmann::json;

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

// Maps a byte span to the token index range it exactly covers, or nullopt
// when the span does not align with token boundaries.
std::optional<std::pair<std::size_t, std::size_t>> span_to_token_range(
    const std::vector<text::Token>& tokens, std::size_t start, std::size_t end) {
  std::size_t begin = tokens.size();
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].start == start) {
      begin = i;
      break;
    }
    if (tokens[i].start > start) return std::nullopt;
  }
  if (begin == tokens.size()) return std::nullopt;
  for (std::size_t j = begin; j < tokens.size(); ++j) {
    if (tokens[j].end == end) return std::make_pair(begin, j + 1);
    if (tokens[j].end > end) return std::nullopt;
  }
  return std::nullopt;
}

std::string join_tokens(const std::vector<text::Token>& tokens,
                        std::size_t begin, std::size_t end) {
  std::string s;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) s += ' ';
    s += tokens[i].text;
  }
  return s;
}

// Title of a page, underscores replaced, without the trailing
// " (disambiguator)" suffix when present.
std::string strip_parenthetical(const std::string& title) {
  std::size_t open = title.rfind('(');
  if (open == std::string::npos || title.find(')', open) == std::string::npos) {
    return title;
  }
  std::string head = title.substr(0, open);
  while (!head.empty() && (head.back() == ' ' || head.back() == '_')) {
    head.pop_back();
  }
  return head;
}

std::string underscores_to_spaces(std::string s) {
  for (char& c : s) {
    if (c == '_') c = ' ';
  }
  return s;
}

}  // namespace

bool valid_entity_id(const EntityId& id) {
  if (id.size() >= 2 && id[0] == 'Q') return all_digits(std::string_view(id).substr(1));
  if (id.size() >= 5 && id.compare(0, 4, "NIL-") == 0) {
    return all_digits(std::string_view(id).substr(4));
  }
  return false;
}

std::string to_string(Klass k) {
  switch (k) {
    case Klass::PER: return "PER";
    case Klass::GPE: return "GPE";
    case Klass::ORG: return "ORG";
    case Klass::LOC: return "LOC";
    case Klass::FAC: return "FAC";
    case Klass::OTHER: return "OTHER";
  }
  return "OTHER";
}

std::optional<Klass> klass_from_string(const std::string& s) {
  if (s == "PER") return Klass::PER;
  if (s == "GPE") return Klass::GPE;
  if (s == "ORG") return Klass::ORG;
  if (s == "LOC") return Klass::LOC;
  if (s == "FAC") return Klass::FAC;
  if (s == "OTHER") return Klass::OTHER;
  return std::nullopt;
}

double MentionEntry::link_density() const {
  return compute_link_density(anchor_count, text_count);
}

double compute_link_density(std::int64_t anchor_count, std::int64_t text_count) {
  std::int64_t denom = anchor_count + text_count;
  if (denom <= 0) return 0.0;
  return static_cast<double>(anchor_count) / static_cast<double>(denom);
}

const MentionEntry* KnowledgeBase::find(const std::string& surface) const {
  auto it = dictionary.find(surface);
  return it == dictionary.end() ? nullptr : &it->second;
}

void KnowledgeBase::rebuild_folded_index() {
  folded_index.clear();
  for (const auto& [surface, entry] : dictionary) {
    folded_index[text::ascii_lower(surface)].push_back(surface);
  }
}

std::string normalize_surface(std::string_view s, text::TokenizeMode mode) {
  std::vector<text::Token> tokens = text::tokenize(s, mode);
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += tokens[i].text;
  }
  return out;
}

std::map<std::string, std::set<EntityId>> collect_mentions(
    const std::vector<CorpusDocument>& docs,
    const std::map<std::string, std::string>& redirects,
    const std::map<std::string, std::set<EntityId>>& disambig,
    const std::map<EntityId, std::string>& titles, text::TokenizeMode mode,
    Diagnostics* diag) {
  std::map<std::string, std::set<EntityId>> mentions;
  auto add = [&](std::string_view raw_surface, const EntityId& entity) {
    std::string key = normalize_surface(raw_surface, mode);
    if (!key.empty()) mentions[key].insert(entity);
  };

  // Source 1: page titles, with and without the parenthetical suffix.
  for (const auto& [entity, raw_title] : titles) {
    std::string title = underscores_to_spaces(raw_title);
    add(title, entity);
    add(underscores_to_spaces(strip_parenthetical(raw_title)), entity);
  }

  // Source 2: redirects.
  for (const auto& [surface, target] : redirects) {
    if (!valid_entity_id(target)) {
      if (diag) {
        ++diag->skipped_redirects;
        diag->messages.push_back("skipped redirect with malformed target: " +
                                 surface + " -> " + target);
      }
      continue;
    }
    add(underscores_to_spaces(surface), target);
  }

  // Source 3: disambiguation records.
  for (const auto& [surface, entities] : disambig) {
    for (const EntityId& e : entities) add(underscores_to_spaces(surface), e);
  }

  // Sources 4 and 5: anchor labels and the first bold-faced span.
  for (const CorpusDocument& doc : docs) {
    for (const Anchor& a : doc.anchors) {
      add(std::string_view(doc.text).substr(a.start, a.end - a.start), a.entity);
    }
    if (doc.bold_first && doc.page_entity) {
      const Span& s = *doc.bold_first;
      add(std::string_view(doc.text).substr(s.start, s.end - s.start),
          *doc.page_entity);
    }
  }
  return mentions;
}

std::vector<Anchor> autolink(const CorpusDocument& doc,
                             const std::vector<text::Token>& tokens) {
  struct GoldAnchor {
    std::size_t begin, end;  // token range
    EntityId entity;
    std::string surface;
  };
  std::vector<GoldAnchor> gold;
  std::vector<Anchor> out = doc.anchors;  // gold anchors always pass through
  for (const Anchor& a : doc.anchors) {
    auto range = span_to_token_range(tokens, a.start, a.end);
    if (!range) continue;  // unaligned anchors cannot seed induction
    gold.push_back({range->first, range->second, a.entity,
                    join_tokens(tokens, range->first, range->second)});
  }

  // Token positions already covered by gold anchors.
  std::vector<bool> covered(tokens.size(), false);
  for (const GoldAnchor& g : gold) {
    for (std::size_t i = g.begin; i < g.end; ++i) covered[i] = true;
  }

  struct InducedCandidate {
    std::size_t begin, end;
    EntityId entity;
  };
  std::vector<InducedCandidate> candidates;

  std::set<std::string> seen_surfaces;
  for (const GoldAnchor& g : gold) {
    if (!seen_surfaces.insert(g.surface).second) continue;
    std::vector<std::string> pattern = fstdict::split_surface(g.surface);
    std::size_t w = pattern.size();
    for (std::size_t begin = 0; begin + w <= tokens.size(); ++begin) {
      bool match = true;
      for (std::size_t k = 0; k < w; ++k) {
        if (tokens[begin + k].text != pattern[k]) {
          match = false;
          break;
        }
      }
      if (!match) continue;
      std::size_t end = begin + w;
      bool is_gold = false;
      bool overlaps_gold = false;
      for (const GoldAnchor& other : gold) {
        if (other.begin == begin && other.end == end) is_gold = true;
        if (begin < other.end && other.begin < end) overlaps_gold = true;
      }
      if (is_gold || overlaps_gold) continue;

      // Entity attribution: nearest preceding gold anchor with this
      // surface; the nearest following one when none precedes.
      const GoldAnchor* chosen = nullptr;
      for (const GoldAnchor& other : gold) {
        if (other.surface != g.surface) continue;
        if (other.begin <= begin) {
          if (!chosen || other.begin > chosen->begin) chosen = &other;
        }
      }
      if (!chosen) {
        for (const GoldAnchor& other : gold) {
          if (other.surface != g.surface) continue;
          if (other.begin > begin && (!chosen || other.begin < chosen->begin)) {
            chosen = &other;
          }
        }
      }
      if (chosen) candidates.push_back({begin, end, chosen->entity});
    }
  }

  // Longest-leftmost greedy acceptance keeps induced anchors disjoint.
  std::sort(candidates.begin(), candidates.end(),
            [](const InducedCandidate& a, const InducedCandidate& b) {
              if (a.begin != b.begin) return a.begin < b.begin;
              return a.end > b.end;
            });
  for (const InducedCandidate& c : candidates) {
    bool free = true;
    for (std::size_t i = c.begin; i < c.end; ++i) {
      if (covered[i]) {
        free = false;
        break;
      }
    }
    if (!free) continue;
    for (std::size_t i = c.begin; i < c.end; ++i) covered[i] = true;
    out.push_back({tokens[c.begin].start, tokens[c.end - 1].end, c.entity, true});
  }

  std::sort(out.begin(), out.end(), [](const Anchor& a, const Anchor& b) {
    return a.start < b.start;
  });
  return out;
}

std::map<std::pair<EntityId, EntityId>, std::int64_t> count_cooccurrences(
    const CorpusDocument& doc, const std::vector<Anchor>& anchors,
    std::size_t window_limit) {
  std::map<std::pair<EntityId, EntityId>, std::int64_t> counts;

  std::vector<std::size_t> bounds;
  bounds.push_back(0);
  for (std::size_t b : doc.paragraph_breaks) bounds.push_back(b);
  bounds.push_back(doc.text.size() + 1);

  std::vector<Anchor> sorted = anchors;
  std::sort(sorted.begin(), sorted.end(),
            [](const Anchor& a, const Anchor& b) { return a.start < b.start; });

  for (std::size_t p = 0; p + 1 < bounds.size(); ++p) {
    std::set<EntityId> entities;
    std::size_t taken = 0;
    for (const Anchor& a : sorted) {
      if (a.start < bounds[p] || a.start >= bounds[p + 1]) continue;
      if (taken == window_limit) break;
      ++taken;
      entities.insert(a.entity);
    }
    for (auto i = entities.begin(); i != entities.end(); ++i) {
      for (auto j = std::next(i); j != entities.end(); ++j) {
        ++counts[{*i, *j}];  // std::set iterates ascending: canonical order
      }
    }
  }
  return counts;
}

KnowledgeBase build_kb(const BuildInputs& in, Diagnostics* diag) {
  Diagnostics local;
  if (!diag) diag = &local;

  KnowledgeBase kb;
  kb.case_stats.min_frequency = 5;

  auto surface_sets = collect_mentions(in.corpus, in.redirects, in.disambig,
                                       in.titles, in.mode, diag);
  for (const auto& [surface, entities] : surface_sets) {
    MentionEntry& e = kb.dictionary[surface];
    e.surface = surface;
    for (const EntityId& id : entities) e.candidates.push_back({id, 0});
  }

  std::set<std::string> surfaces;
  for (const auto& [surface, entry] : kb.dictionary) surfaces.insert(surface);
  fstdict::Automaton automaton = fstdict::Automaton::build(surfaces);

  std::map<std::string, std::map<EntityId, std::int64_t>> pair_counts;

  for (const CorpusDocument& doc : in.corpus) {
    std::vector<text::Token> tokens = text::tokenize(doc.text, in.mode);
    for (const text::Token& t : tokens) kb.case_stats.add(t);

    std::vector<Anchor> anchors = autolink(doc, tokens);

    // Anchor token ranges, keyed for the unlinked-match subtraction below.
    std::set<std::pair<std::size_t, std::size_t>> anchor_ranges;
    for (const Anchor& a : anchors) {
      auto range = span_to_token_range(tokens, a.start, a.end);
      if (!range) continue;
      anchor_ranges.insert(*range);
      std::string surface = join_tokens(tokens, range->first, range->second);
      auto it = kb.dictionary.find(surface);
      if (it == kb.dictionary.end()) {
        // An anchor label always enters the dictionary via collect_mentions;
        // unaligned normalization differences land here.
        MentionEntry& e = kb.dictionary[surface];
        e.surface = surface;
        it = kb.dictionary.find(surface);
        surfaces.insert(surface);
      }
      it->second.anchor_count += 1;
      if (!a.induced) {
        it->second.link_count += 1;
        pair_counts[surface][a.entity] += 1;
      }
    }

    for (const auto& [pair, n] : count_cooccurrences(doc, anchors)) {
      kb.cooccur[pair] += n;
    }

    if (doc.page_entity) {
      for (const Anchor& a : doc.anchors) {
        if (a.entity != *doc.page_entity) {
          kb.inlinks[a.entity].insert(*doc.page_entity);
        }
      }
    }

    for (const fstdict::DictMatch& m :
         automaton.find_all(tokens, in.max_mention_tokens)) {
      if (anchor_ranges.count({m.begin, m.end})) continue;
      kb.dictionary[m.surface].text_count += 1;
    }
  }

  // Merge gold pair counts into the candidate lists.
  for (auto& [surface, entry] : kb.dictionary) {
    auto pc = pair_counts.find(surface);
    if (pc != pair_counts.end()) {
      for (auto& cand : entry.candidates) {
        auto it = pc->second.find(cand.entity);
        if (it != pc->second.end()) cand.pair_count = it->second;
      }
      for (const auto& [entity, n] : pc->second) {
        bool present = false;
        for (const auto& cand : entry.candidates) {
          if (cand.entity == entity) present = true;
        }
        if (!present) entry.candidates.push_back({entity, n});
      }
    }
    std::sort(entry.candidates.begin(), entry.candidates.end(),
              [](const CandidateCount& a, const CandidateCount& b) {
                if (a.pair_count != b.pair_count) return a.pair_count > b.pair_count;
                return a.entity < b.entity;
              });
  }

  // Class records; conflicting duplicates are a hard error.
  std::vector<std::string> conflicts;
  for (const auto& [entity, klass] : in.class_records) {
    auto it = kb.classes.find(entity);
    if (it != kb.classes.end() && it->second != klass) {
      conflicts.push_back(entity + ": " + to_string(it->second) + " vs " +
                          to_string(klass));
    } else {
      kb.classes[entity] = klass;
    }
  }
  if (!conflicts.empty()) {
    std::string msg = "conflicting class records:";
    for (const std::string& c : conflicts) msg += " " + c;
    throw std::runtime_error(msg);
  }

  for (const auto& [entity, raw_title] : in.titles) {
    kb.titles[entity] = normalize_surface(underscores_to_spaces(raw_title), in.mode);
  }
  // Every candidate entity must have a titles row.
  for (const auto& [surface, entry] : kb.dictionary) {
    for (const auto& cand : entry.candidates) {
      if (!kb.titles.count(cand.entity)) {
        kb.titles[cand.entity] = "";
        diag->messages.push_back("entity without title record: " + cand.entity);
      }
    }
  }

  std::set<std::string> seed;
  for (const std::string& s : in.nominal_seed) {
    seed.insert(normalize_surface(s, in.mode));
  }
  for (const auto& [entity, phrase] : in.nominal_records) {
    std::string norm = normalize_surface(phrase, in.mode);
    if (norm.empty()) continue;
    if (!seed.empty() && !seed.count(norm)) continue;
    kb.nominals[entity].insert(norm);
  }

  kb.case_stats.prune();
  kb.rebuild_folded_index();
  return kb;
}

// ---------------------------------------------------------------------------
// Serialization: "UGKB1" header, then seven length-prefixed sections.

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.append(b, 4);
}

void put_u64(std::string& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.append(b, 8);
}

void put_i64(std::string& out, std::int64_t v) {
  put_u64(out, static_cast<std::uint64_t>(v));
}

void put_str(std::string& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out += s;
}

struct Reader {
  const std::string& data;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > data.size()) throw std::runtime_error("kb file truncated");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data[pos + i]))
           << (8 * i);
    }
    pos += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data[pos + i]))
           << (8 * i);
    }
    pos += 8;
    return v;
  }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  std::string str() {
    std::uint32_t n = u32();
    need(n);
    std::string s = data.substr(pos, n);
    pos += n;
    return s;
  }
};

constexpr char kKbMagic[6] = {'U', 'G', 'K', 'B', '1', '\n'};

}  // namespace

void save_kb(const KnowledgeBase& kb, const std::string& path) {
  std::vector<std::string> sections(7);

  {  // titles
    std::string& s = sections[0];
    put_u64(s, kb.titles.size());
    for (const auto& [e, t] : kb.titles) {
      put_str(s, e);
      put_str(s, t);
    }
  }
  {  // dictionary
    std::string& s = sections[1];
    put_u64(s, kb.dictionary.size());
    for (const auto& [surface, e] : kb.dictionary) {
      put_str(s, surface);
      put_i64(s, e.anchor_count);
      put_i64(s, e.text_count);
      put_i64(s, e.link_count);
      put_u64(s, e.candidates.size());
      for (const auto& c : e.candidates) {
        put_str(s, c.entity);
        put_i64(s, c.pair_count);
      }
    }
  }
  {  // cooccurrences
    std::string& s = sections[2];
    put_u64(s, kb.cooccur.size());
    for (const auto& [pair, n] : kb.cooccur) {
      put_str(s, pair.first);
      put_str(s, pair.second);
      put_i64(s, n);
    }
  }
  {  // inlinks
    std::string& s = sections[3];
    put_u64(s, kb.inlinks.size());
    for (const auto& [e, sources] : kb.inlinks) {
      put_str(s, e);
      put_u64(s, sources.size());
      for (const auto& src : sources) put_str(s, src);
    }
  }
  {  // classes
    std::string& s = sections[4];
    put_u64(s, kb.classes.size());
    for (const auto& [e, k] : kb.classes) {
      put_str(s, e);
      s.push_back(static_cast<char>(k));
    }
  }
  {  // nominals
    std::string& s = sections[5];
    put_u64(s, kb.nominals.size());
    for (const auto& [e, phrases] : kb.nominals) {
      put_str(s, e);
      put_u64(s, phrases.size());
      for (const auto& p : phrases) put_str(s, p);
    }
  }
  {  // case statistics
    std::string& s = sections[6];
    put_u64(s, kb.case_stats.min_frequency);
    put_u64(s, kb.case_stats.counts.size());
    for (const auto& [key, c] : kb.case_stats.counts) {
      put_str(s, key);
      put_u64(s, c.upper);
      put_u64(s, c.lower);
      put_u64(s, c.title);
      put_u64(s, c.camel);
      put_u64(s, c.other);
    }
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write kb file: " + path);
  out.write(kKbMagic, sizeof(kKbMagic));
  for (const std::string& s : sections) {
    std::string len;
    put_u64(len, s.size());
    out.write(len.data(), static_cast<std::streamsize>(len.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

KnowledgeBase load_kb(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open kb file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string data = buf.str();
  if (data.size() < sizeof(kKbMagic) ||
      std::memcmp(data.data(), kKbMagic, sizeof(kKbMagic)) != 0) {
    throw std::runtime_error("not a UGKB1 file: " + path);
  }

  Reader r{data, sizeof(kKbMagic)};
  KnowledgeBase kb;
  std::vector<std::string> sections;
  for (int i = 0; i < 7; ++i) {
    std::uint64_t len = r.u64();
    r.need(len);
    sections.push_back(data.substr(r.pos, len));
    r.pos += len;
  }

  {
    Reader s{sections[0]};
    std::uint64_t n = s.u64();
    for (std::uint64_t i = 0; i < n; ++i) {
      std::string e = s.str();
      kb.titles[e] = s.str();
    }
  }
  {
    Reader s{sections[1]};
    std::uint64_t n = s.u64();
    for (std::uint64_t i = 0; i < n; ++i) {
      std::string surface = s.str();
      MentionEntry& e = kb.dictionary[surface];
      e.surface = surface;
      e.anchor_count = s.i64();
      e.text_count = s.i64();
      e.link_count = s.i64();
      std::uint64_t nc = s.u64();
      for (std::uint64_t j = 0; j < nc; ++j) {
        CandidateCount c;
        c.entity = s.str();
        c.pair_count = s.i64();
        e.candidates.push_back(std::move(c));
      }
    }
  }
  {
    Reader s{sections[2]};
    std::uint64_t n = s.u64();
    for (std::uint64_t i = 0; i < n; ++i) {
      std::string a = s.str();
      std::string b = s.str();
      kb.cooccur[{a, b}] = s.i64();
    }
  }
  {
    Reader s{sections[3]};
    std::uint64_t n = s.u64();
    for (std::uint64_t i = 0; i < n; ++i) {
      std::string e = s.str();
      std::uint64_t m = s.u64();
      for (std::uint64_t j = 0; j < m; ++j) kb.inlinks[e].insert(s.str());
    }
  }
  {
    Reader s{sections[4]};
    std::uint64_t n = s.u64();
    for (std::uint64_t i = 0; i < n; ++i) {
      std::string e = s.str();
      s.need(1);
      kb.classes[e] = static_cast<Klass>(s.data[s.pos++]);
    }
  }
  {
    Reader s{sections[5]};
    std::uint64_t n = s.u64();
    for (std::uint64_t i = 0; i < n; ++i) {
      std::string e = s.str();
      std::uint64_t m = s.u64();
      for (std::uint64_t j = 0; j < m; ++j) kb.nominals[e].insert(s.str());
    }
  }
  {
    Reader s{sections[6]};
    kb.case_stats.min_frequency = s.u64();
    std::uint64_t n = s.u64();
    for (std::uint64_t i = 0; i < n; ++i) {
      std::string key = s.str();
      text::CaseStats::Counts c;
      c.upper = s.u64();
      c.lower = s.u64();
      c.title = s.u64();
      c.camel = s.u64();
      c.other = s.u64();
      kb.case_stats.counts[key] = c;
    }
  }

  kb.rebuild_folded_index();
  return kb;
}

// ---------------------------------------------------------------------------
// External file formats.

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  return in;
}

}  // namespace

std::vector<CorpusDocument> read_corpus_jsonl(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::vector<CorpusDocument> docs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": bad json: " + e.what());
    }
    CorpusDocument doc;
    doc.doc_id = j.at("doc_id").get<std::string>();
    doc.text = j.at("text").get<std::string>();
    if (j.contains("anchors")) {
      for (const auto& a : j["anchors"]) {
        Anchor anchor;
        anchor.start = a.at("start").get<std::size_t>();
        anchor.end = a.at("end").get<std::size_t>();
        anchor.entity = a.at("entity").get<std::string>();
        doc.anchors.push_back(anchor);
      }
    }
    if (j.contains("page_entity")) {
      doc.page_entity = j["page_entity"].get<std::string>();
    }
    if (j.contains("bold_first")) {
      doc.bold_first = Span{j["bold_first"][0].get<std::size_t>(),
                            j["bold_first"][1].get<std::size_t>()};
    }
    if (j.contains("paragraph_breaks")) {
      for (const auto& b : j["paragraph_breaks"]) {
        doc.paragraph_breaks.push_back(b.get<std::size_t>());
      }
    }

    std::sort(doc.anchors.begin(), doc.anchors.end(),
              [](const Anchor& a, const Anchor& b) { return a.start < b.start; });
    for (std::size_t i = 0; i < doc.anchors.size(); ++i) {
      const Anchor& a = doc.anchors[i];
      if (a.start >= a.end || a.end > doc.text.size()) {
        throw std::runtime_error(doc.doc_id + ": anchor out of bounds");
      }
      if (i > 0 && doc.anchors[i - 1].end > a.start) {
        throw std::runtime_error(doc.doc_id + ": overlapping anchors");
      }
    }
    if (!std::is_sorted(doc.paragraph_breaks.begin(), doc.paragraph_breaks.end())) {
      throw std::runtime_error(doc.doc_id + ": paragraph breaks not sorted");
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::map<std::string, std::string> read_redirects_tsv(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_tabs(line);
    if (f.size() != 2) throw std::runtime_error(path + ": expected 2 fields: " + line);
    out[f[0]] = f[1];
  }
  return out;
}

std::map<std::string, std::set<EntityId>> read_disambig_tsv(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::map<std::string, std::set<EntityId>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_tabs(line);
    if (f.size() < 2) throw std::runtime_error(path + ": expected >= 2 fields: " + line);
    for (std::size_t i = 1; i < f.size(); ++i) out[f[0]].insert(f[i]);
  }
  return out;
}

std::vector<std::pair<EntityId, Klass>> read_classes_tsv(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::vector<std::pair<EntityId, Klass>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_tabs(line);
    if (f.size() != 2) throw std::runtime_error(path + ": expected 2 fields: " + line);
    auto k = klass_from_string(f[1]);
    if (!k) throw std::runtime_error(path + ": unknown class: " + f[1]);
    out.emplace_back(f[0], *k);
  }
  return out;
}

std::vector<std::pair<EntityId, std::string>> read_nominals_tsv(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::vector<std::pair<EntityId, std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_tabs(line);
    if (f.size() != 2) throw std::runtime_error(path + ": expected 2 fields: " + line);
    out.emplace_back(f[0], f[1]);
  }
  return out;
}

std::map<EntityId, std::string> read_titles_tsv(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::map<EntityId, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_tabs(line);
    if (f.size() != 2) throw std::runtime_error(path + ": expected 2 fields: " + line);
    out[f[0]] = f[1];
  }
  return out;
}

std::set<std::string> read_seed_list(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.insert(line);
  }
  return out;
}

}  // namespace ugglan::kb
