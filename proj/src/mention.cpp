#include "ugglan/mention.hpp"

#include <algorithm>

#include "ugglan/fstdict.hpp"
#include "ugglan/text.hpp"

namespace ugglan::mention {

bool title_case_override(const std::vector<std::string>& tokens) {
  std::size_t alpha = 0, titled = 0;
  for (const std::string& t : tokens) {
    bool has_letter = false;
    for (char c : t) {
      if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) {
        has_letter = true;
        break;
      }
    }
    if (!has_letter) continue;  // punctuation does not enter the denominator
    ++alpha;
    if (text::classify_case(t) == text::CaseClass::Title) ++titled;
  }
  if (alpha == 0) return false;
  return static_cast<double>(titled) >= 0.75 * static_cast<double>(alpha);
}

Classified classify_mentions(std::vector<Mention> dict_matches,
                             const Thresholds& thresholds) {
  Classified out;
  for (Mention& m : dict_matches) {
    bool proper = (m.ld > thresholds.ld_min && m.lc > thresholds.lc_min) ||
                  title_case_override(fstdict::split_surface(m.surface));
    m.bucket = proper ? Bucket::Proper : Bucket::Dubious;
    (proper ? out.proper : out.dubious).push_back(std::move(m));
  }
  return out;
}

namespace {

bool overlaps(const Mention& a, const Mention& b) {
  return a.begin < b.end && b.begin < a.end;
}

bool exact_span_match(const Mention& m, const std::vector<Mention>& dict) {
  for (const Mention& d : dict) {
    if (d.begin == m.begin && d.end == m.end) return true;
  }
  return false;
}

// Largest LD first; ties broken by longer span, then leftmost start. Keeps
// every candidate that overlaps nothing already in `out`.
void greedy_by_ld(std::vector<Mention> pool, std::vector<Mention>& out) {
  std::sort(pool.begin(), pool.end(), [](const Mention& a, const Mention& b) {
    if (a.ld != b.ld) return a.ld > b.ld;
    std::size_t la = a.end - a.begin, lb = b.end - b.begin;
    if (la != lb) return la > lb;
    return a.begin < b.begin;
  });
  for (const Mention& m : pool) {
    bool clash = false;
    for (const Mention& kept : out) {
      if (overlaps(m, kept)) {
        clash = true;
        break;
      }
    }
    if (!clash) out.push_back(m);
  }
}

}  // namespace

std::vector<Mention> resolve_overlaps(const std::vector<Mention>& proper_dict,
                                      const std::vector<Mention>& ner_mentions,
                                      OverlapMode mode) {
  std::vector<Mention> out;

  switch (mode) {
    case OverlapMode::NerOnly: {
      for (const Mention& n : ner_mentions) {
        Mention m = n;
        m.linkable = exact_span_match(n, proper_dict);
        if (m.linkable) m.source = Source::Both;
        out.push_back(std::move(m));
      }
      break;
    }
    case OverlapMode::DictOnly: {
      greedy_by_ld(proper_dict, out);
      break;
    }
    case OverlapMode::Hybrid: {
      for (const Mention& n : ner_mentions) {
        Mention m = n;
        m.linkable = exact_span_match(n, proper_dict);
        if (m.linkable) m.source = Source::Both;
        out.push_back(std::move(m));
      }
      // dictionary mentions clear of every NER span compete among
      // themselves by the same greedy rule as DICT_ONLY
      std::vector<Mention> survivors;
      for (const Mention& d : proper_dict) {
        bool clash = false;
        for (const Mention& n : ner_mentions) {
          if (overlaps(d, n)) {
            clash = true;
            break;
          }
        }
        if (!clash) survivors.push_back(d);
      }
      greedy_by_ld(std::move(survivors), out);
      break;
    }
  }

  std::sort(out.begin(), out.end(), [](const Mention& a, const Mention& b) {
    return a.begin < b.begin;
  });
  return out;
}

}  // namespace ugglan::mention
