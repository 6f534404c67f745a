#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ugglan::text {

enum class CaseClass { Upper, Lower, Title, Camel, Other };

enum class TokenizeMode { Alphabetic, LogographicMixed };

struct Token {
  std::string text;
  std::size_t start = 0;  // byte offset into the document (UTF-8)
  std::size_t end = 0;    // exclusive
  CaseClass case_class = CaseClass::Other;
  bool is_cjk = false;
};

// Half-open index interval into the document token list.
struct Sentence {
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Per-surface capitalization counts, keyed by the lowercased token text.
// Only keys whose total count exceeds min_frequency take part in lookups.
struct CaseStats {
  struct Counts {
    std::uint64_t upper = 0;
    std::uint64_t lower = 0;
    std::uint64_t title = 0;
    std::uint64_t camel = 0;
    std::uint64_t other = 0;
    std::uint64_t total() const { return upper + lower + title + camel + other; }
  };

  std::map<std::string, Counts> counts;
  std::uint64_t min_frequency = 5;

  void add(const Token& token);
  // Drops entries at or below min_frequency. Lookups already apply the
  // frequency cutoff; pruning only shrinks the serialized form.
  void prune();
  // Strict-majority case class for a lowercased key, or nullopt when the
  // key is unknown, below the frequency cutoff, or tied.
  std::optional<CaseClass> dominant(const std::string& lower_key) const;
};

// UTF-8 helpers shared with the other modules.
std::size_t decode_utf8(std::string_view s, std::size_t pos, char32_t* out);
bool is_cjk_codepoint(char32_t cp);
std::string ascii_lower(std::string_view s);
std::string ascii_title(std::string_view s);

CaseClass classify_case(std::string_view token_text);

std::vector<Token> tokenize(std::string_view doc, TokenizeMode mode);

std::vector<Sentence> segment_sentences(const std::vector<Token>& tokens);

std::string normalize_case(const Token& token, const CaseStats& stats);

}  // namespace ugglan::text
