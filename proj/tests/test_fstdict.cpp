#include <random>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "ugglan/fstdict.hpp"

using namespace ugglan;
using fstdict::Automaton;
using fstdict::DictMatch;

namespace {

// O(n^2) window scan oracle.
std::vector<DictMatch> brute_force(const std::vector<std::string>& tokens,
                                   const std::set<std::string>& surfaces,
                                   std::size_t max_tokens) {
  std::vector<DictMatch> out;
  for (std::size_t b = 0; b < tokens.size(); ++b) {
    std::string joined;
    for (std::size_t e = b + 1; e <= tokens.size() && e - b <= max_tokens; ++e) {
      if (e > b + 1) joined += ' ';
      joined += tokens[e - 1];
      if (surfaces.count(joined)) out.push_back({b, e, joined});
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("fstdict") {

TEST_CASE("acceptance equals set membership") {
  Automaton empty = Automaton::build({});
  CHECK_FALSE(empty.accepts({"x"}));

  Automaton a = Automaton::build({"New York", "New York City"});
  CHECK(a.accepts({"New", "York"}));
  CHECK(a.accepts({"New", "York", "City"}));
  CHECK_FALSE(a.accepts({"New"}));
  CHECK_FALSE(a.accepts({"York", "City"}));
}

TEST_CASE("random surfaces: acceptance equals hash-set membership") {
  std::mt19937_64 rng(31);
  std::vector<std::string> words = {"a", "b", "c", "d", "e", "f"};
  std::set<std::string> surfaces;
  while (surfaces.size() < 1000) {
    std::string s;
    std::size_t len = 1 + rng() % 4;
    for (std::size_t i = 0; i < len; ++i) {
      if (i) s += ' ';
      s += words[rng() % words.size()];
    }
    surfaces.insert(s);
  }
  Automaton a = Automaton::build(surfaces);
  for (int probe = 0; probe < 10000; ++probe) {
    std::vector<std::string> seq;
    std::size_t len = 1 + rng() % 5;
    std::string joined;
    for (std::size_t i = 0; i < len; ++i) {
      seq.push_back(words[rng() % words.size()]);
      if (i) joined += ' ';
      joined += seq.back();
    }
    CHECK(a.accepts(seq) == (surfaces.count(joined) > 0));
  }
}

TEST_CASE("find_all reports overlapping matches in order") {
  std::set<std::string> surfaces = {"a b"};
  Automaton a = Automaton::build(surfaces);
  std::vector<std::string> doc = {"a", "b", "a", "b"};
  std::vector<DictMatch> matches = a.find_all(doc);
  REQUIRE(matches.size() == 2);
  CHECK(matches[0].begin == 0);
  CHECK(matches[1].begin == 2);
}

TEST_CASE("find_all equals the brute-force window scan") {
  std::mt19937_64 rng(37);
  std::vector<std::string> words = {"x", "y", "z", "w"};
  for (int trial = 0; trial < 50; ++trial) {
    std::set<std::string> surfaces;
    std::size_t n_surf = rng() % 200;
    for (std::size_t i = 0; i < n_surf; ++i) {
      std::string s;
      std::size_t len = 1 + rng() % 9;  // up to 9 tokens: exceeds the cap
      for (std::size_t k = 0; k < len; ++k) {
        if (k) s += ' ';
        s += words[rng() % words.size()];
      }
      surfaces.insert(s);
    }
    Automaton a = Automaton::build(surfaces);
    std::vector<std::string> doc;
    std::size_t doc_len = rng() % 300;
    for (std::size_t i = 0; i < doc_len; ++i) doc.push_back(words[rng() % words.size()]);

    std::vector<DictMatch> got = a.find_all(doc);
    std::vector<DictMatch> want = brute_force(doc, surfaces, 8);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].begin == want[i].begin);
      CHECK(got[i].end == want[i].end);
      CHECK(got[i].surface == want[i].surface);
    }
  }
}

TEST_CASE("adding a surface never removes matches") {
  std::vector<std::string> doc = {"p", "q", "r"};
  std::set<std::string> base = {"p q"};
  std::set<std::string> more = {"p q", "q r"};
  std::vector<DictMatch> before = Automaton::build(base).find_all(doc);
  std::vector<DictMatch> after = Automaton::build(more).find_all(doc);
  for (const DictMatch& m : before) {
    bool found = false;
    for (const DictMatch& n : after)
      if (n.begin == m.begin && n.end == m.end) found = true;
    CHECK(found);
  }
  CHECK(after.size() > before.size());
}

}  // TEST_SUITE
