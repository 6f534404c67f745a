#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ugglan/text.hpp"

namespace ugglan::fstdict {

// A dictionary match over a token range [begin, end).
struct DictMatch {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string surface;  // space-joined tokens of the range
};

// Deterministic acceptor over token sequences. States form a trie; a lookup
// of a token sequence costs one map probe per token.
class Automaton {
 public:
  static Automaton build(const std::set<std::string>& surfaces);

  bool accepts(const std::vector<std::string>& tokens) const;
  std::size_t surface_count() const { return surface_count_; }

  // All dictionary matches at all start positions, overlaps included,
  // bounded by max_tokens per match, sorted by (begin, end).
  std::vector<DictMatch> find_all(const std::vector<std::string>& tokens,
                                  std::size_t max_tokens = 8) const;
  std::vector<DictMatch> find_all(const std::vector<text::Token>& tokens,
                                  std::size_t max_tokens = 8) const;

 private:
  struct Node {
    std::map<std::string, int> next;
    bool accept = false;
  };
  std::vector<Node> nodes_{Node{}};
  std::size_t surface_count_ = 0;

  int step(int state, const std::string& token) const;
};

// Splits a stored surface key back into its tokens (single-space joined).
std::vector<std::string> split_surface(const std::string& surface);

}  // namespace ugglan::fstdict
