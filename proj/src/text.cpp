#include "ugglan/text.hpp"

#include <cctype>

namespace ugglan::text {

namespace {

bool is_ascii_upper(char32_t c) { return c >= U'A' && c <= U'Z'; }
bool is_ascii_lower(char32_t c) { return c >= U'a' && c <= U'z'; }
bool is_cased(char32_t c) { return is_ascii_upper(c) || is_ascii_lower(c); }

bool is_space_cp(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' ||
         cp == U'\f' || cp == U'\v' || cp == 0x00A0 || cp == 0x3000;
}

bool is_punct_cp(char32_t cp) {
  if (cp < 128) {
    return std::ispunct(static_cast<int>(cp)) != 0;
  }
  return (cp >= 0x00A1 && cp <= 0x00BF) ||  // Latin-1 punctuation and signs
         (cp >= 0x2000 && cp <= 0x206F) ||  // general punctuation
         (cp >= 0x3001 && cp <= 0x303F) ||  // CJK symbols and punctuation
         (cp >= 0xFE30 && cp <= 0xFE4F) ||  // CJK compatibility forms
         (cp >= 0xFF01 && cp <= 0xFF0F) ||  // fullwidth forms
         (cp >= 0xFF1A && cp <= 0xFF20) ||
         (cp >= 0xFF3B && cp <= 0xFF40) ||
         (cp >= 0xFF5B && cp <= 0xFF65);
}

}  // namespace

std::size_t decode_utf8(std::string_view s, std::size_t pos, char32_t* out) {
  const auto byte = [&](std::size_t i) -> unsigned char {
    return static_cast<unsigned char>(s[i]);
  };
  unsigned char b0 = byte(pos);
  std::size_t remaining = s.size() - pos;
  if (b0 < 0x80) {
    *out = b0;
    return 1;
  }
  auto cont = [&](std::size_t i) {
    return i < s.size() && (byte(i) & 0xC0) == 0x80;
  };
  if ((b0 & 0xE0) == 0xC0 && remaining >= 2 && cont(pos + 1)) {
    *out = (static_cast<char32_t>(b0 & 0x1F) << 6) | (byte(pos + 1) & 0x3F);
    return 2;
  }
  if ((b0 & 0xF0) == 0xE0 && remaining >= 3 && cont(pos + 1) && cont(pos + 2)) {
    *out = (static_cast<char32_t>(b0 & 0x0F) << 12) |
           (static_cast<char32_t>(byte(pos + 1) & 0x3F) << 6) |
           (byte(pos + 2) & 0x3F);
    return 3;
  }
  if ((b0 & 0xF8) == 0xF0 && remaining >= 4 && cont(pos + 1) && cont(pos + 2) &&
      cont(pos + 3)) {
    *out = (static_cast<char32_t>(b0 & 0x07) << 18) |
           (static_cast<char32_t>(byte(pos + 1) & 0x3F) << 12) |
           (static_cast<char32_t>(byte(pos + 2) & 0x3F) << 6) |
           (byte(pos + 3) & 0x3F);
    return 4;
  }
  // Invalid byte: treat as one opaque codepoint so offsets stay exact.
  *out = 0xFFFD;
  return 1;
}

bool is_cjk_codepoint(char32_t cp) {
  return (cp >= 0x3040 && cp <= 0x30FF) ||    // hiragana, katakana
         (cp >= 0x3400 && cp <= 0x4DBF) ||    // CJK extension A
         (cp >= 0x4E00 && cp <= 0x9FFF) ||    // CJK unified ideographs
         (cp >= 0xAC00 && cp <= 0xD7AF) ||    // hangul syllables
         (cp >= 0xF900 && cp <= 0xFAFF) ||    // CJK compatibility
         (cp >= 0x20000 && cp <= 0x2A6DF);    // CJK extension B
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string ascii_title(std::string_view s) {
  std::string out = ascii_lower(s);
  for (char& c : out) {
    if (c >= 'a' && c <= 'z') {
      c = static_cast<char>(c - 'a' + 'A');
      break;
    }
  }
  return out;
}

CaseClass classify_case(std::string_view token_text) {
  bool has_cased = false;
  bool all_upper = true;
  bool all_lower = true;
  bool first_cased_upper = false;
  bool rest_all_lower = true;
  bool internal_upper_after_lower = false;
  bool seen_lower = false;
  bool first = true;

  std::size_t pos = 0;
  while (pos < token_text.size()) {
    char32_t cp;
    pos += decode_utf8(token_text, pos, &cp);
    if (!is_cased(cp)) continue;
    has_cased = true;
    bool up = is_ascii_upper(cp);
    if (up) {
      all_lower = false;
      if (seen_lower) internal_upper_after_lower = true;
    } else {
      all_upper = false;
      seen_lower = true;
    }
    if (first) {
      first_cased_upper = up;
      first = false;
    } else if (up) {
      rest_all_lower = false;
    }
  }

  if (!has_cased) return CaseClass::Other;
  if (all_upper) return CaseClass::Upper;
  if (all_lower) return CaseClass::Lower;
  if (first_cased_upper && rest_all_lower) return CaseClass::Title;
  if (internal_upper_after_lower) return CaseClass::Camel;
  return CaseClass::Other;
}

std::vector<Token> tokenize(std::string_view doc, TokenizeMode mode) {
  std::vector<Token> tokens;
  std::size_t run_start = 0;
  bool in_run = false;

  auto flush = [&](std::size_t end) {
    if (!in_run) return;
    Token t;
    t.text.assign(doc.substr(run_start, end - run_start));
    t.start = run_start;
    t.end = end;
    tokens.push_back(std::move(t));
    in_run = false;
  };

  std::size_t pos = 0;
  while (pos < doc.size()) {
    char32_t cp;
    std::size_t len = decode_utf8(doc, pos, &cp);
    if (is_space_cp(cp)) {
      flush(pos);
    } else if (is_punct_cp(cp)) {
      flush(pos);
      Token t;
      t.text.assign(doc.substr(pos, len));
      t.start = pos;
      t.end = pos + len;
      tokens.push_back(std::move(t));
    } else if (mode == TokenizeMode::LogographicMixed && is_cjk_codepoint(cp)) {
      flush(pos);
      Token t;
      t.text.assign(doc.substr(pos, len));
      t.start = pos;
      t.end = pos + len;
      t.is_cjk = true;
      tokens.push_back(std::move(t));
    } else {
      if (!in_run) {
        run_start = pos;
        in_run = true;
      }
    }
    pos += len;
  }
  flush(doc.size());

  for (Token& t : tokens) {
    t.case_class = classify_case(t.text);
    if (!t.is_cjk) {
      bool all_cjk = !t.text.empty();
      std::size_t p = 0;
      while (p < t.text.size()) {
        char32_t cp;
        p += decode_utf8(t.text, p, &cp);
        if (!is_cjk_codepoint(cp)) {
          all_cjk = false;
          break;
        }
      }
      t.is_cjk = all_cjk;
    }
  }
  return tokens;
}

std::vector<Sentence> segment_sentences(const std::vector<Token>& tokens) {
  std::vector<Sentence> sentences;
  if (tokens.empty()) return sentences;

  auto is_terminator = [](const std::string& s) {
    return s == "." || s == "!" || s == "?" || s == "。" ||
           s == "！" || s == "？";
  };

  std::size_t begin = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!is_terminator(tokens[i].text)) continue;
    bool lower_follows = i + 1 < tokens.size() &&
                         tokens[i + 1].case_class == CaseClass::Lower;
    if (lower_follows) continue;
    sentences.push_back({begin, i + 1});
    begin = i + 1;
  }
  if (begin < tokens.size()) sentences.push_back({begin, tokens.size()});
  return sentences;
}

void CaseStats::add(const Token& token) {
  Counts& c = counts[ascii_lower(token.text)];
  switch (token.case_class) {
    case CaseClass::Upper: ++c.upper; break;
    case CaseClass::Lower: ++c.lower; break;
    case CaseClass::Title: ++c.title; break;
    case CaseClass::Camel: ++c.camel; break;
    case CaseClass::Other: ++c.other; break;
  }
}

void CaseStats::prune() {
  for (auto it = counts.begin(); it != counts.end();) {
    if (it->second.total() <= min_frequency) {
      it = counts.erase(it);
    } else {
      ++it;
    }
  }
}

std::optional<CaseClass> CaseStats::dominant(const std::string& lower_key) const {
  auto it = counts.find(lower_key);
  if (it == counts.end()) return std::nullopt;
  const Counts& c = it->second;
  std::uint64_t total = c.total();
  if (total <= min_frequency) return std::nullopt;

  struct Entry { CaseClass cls; std::uint64_t n; };
  const Entry entries[] = {
      {CaseClass::Upper, c.upper}, {CaseClass::Lower, c.lower},
      {CaseClass::Title, c.title}, {CaseClass::Camel, c.camel},
      {CaseClass::Other, c.other}};
  for (const Entry& e : entries) {
    if (e.n * 2 > total) return e.cls;  // strict majority, ties yield nothing
  }
  return std::nullopt;
}

std::string normalize_case(const Token& token, const CaseStats& stats) {
  if (token.case_class != CaseClass::Upper) return token.text;
  auto dom = stats.dominant(ascii_lower(token.text));
  if (dom && *dom == CaseClass::Title) return ascii_title(token.text);
  return token.text;
}

}  // namespace ugglan::text
