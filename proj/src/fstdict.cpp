#include "ugglan/fstdict.hpp"

#include <sstream>

namespace ugglan::fstdict {

std::vector<std::string> split_surface(const std::string& surface) {
  std::vector<std::string> tokens;
  std::istringstream in(surface);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

Automaton Automaton::build(const std::set<std::string>& surfaces) {
  Automaton a;
  for (const std::string& surface : surfaces) {
    std::vector<std::string> tokens = split_surface(surface);
    if (tokens.empty()) continue;
    int state = 0;
    for (const std::string& tok : tokens) {
      auto [it, inserted] = a.nodes_[state].next.try_emplace(
          tok, static_cast<int>(a.nodes_.size()));
      if (inserted) a.nodes_.emplace_back();
      state = it->second;
    }
    if (!a.nodes_[state].accept) {
      a.nodes_[state].accept = true;
      ++a.surface_count_;
    }
  }
  return a;
}

int Automaton::step(int state, const std::string& token) const {
  auto it = nodes_[state].next.find(token);
  return it == nodes_[state].next.end() ? -1 : it->second;
}

bool Automaton::accepts(const std::vector<std::string>& tokens) const {
  int state = 0;
  for (const std::string& tok : tokens) {
    state = step(state, tok);
    if (state < 0) return false;
  }
  return nodes_[state].accept && !tokens.empty();
}

std::vector<DictMatch> Automaton::find_all(const std::vector<std::string>& tokens,
                                           std::size_t max_tokens) const {
  std::vector<DictMatch> matches;
  for (std::size_t begin = 0; begin < tokens.size(); ++begin) {
    int state = 0;
    std::string surface;
    for (std::size_t end = begin;
         end < tokens.size() && end - begin < max_tokens; ++end) {
      state = step(state, tokens[end]);
      if (state < 0) break;
      if (end > begin) surface += ' ';
      surface += tokens[end];
      if (nodes_[state].accept) {
        matches.push_back({begin, end + 1, surface});
      }
    }
  }
  return matches;  // outer/inner loop order already yields (begin, end) order
}

std::vector<DictMatch> Automaton::find_all(const std::vector<text::Token>& tokens,
                                           std::size_t max_tokens) const {
  std::vector<std::string> texts;
  texts.reserve(tokens.size());
  for (const text::Token& t : tokens) texts.push_back(t.text);
  return find_all(texts, max_tokens);
}

}  // namespace ugglan::fstdict
