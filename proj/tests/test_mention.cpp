#include <algorithm>
#include <random>
#include <vector>

#include "doctest.h"
#include "ugglan/mention.hpp"

using namespace ugglan;
using mention::Mention;
using mention::OverlapMode;

namespace {

Mention make(std::size_t b, std::size_t e, double ld = 0.0, std::int64_t lc = 0,
             const std::string& surface = "x") {
  Mention m;
  m.begin = b;
  m.end = e;
  m.surface = surface;
  m.ld = ld;
  m.lc = lc;
  return m;
}

bool disjoint(const std::vector<Mention>& ms) {
  for (std::size_t i = 0; i < ms.size(); ++i)
    for (std::size_t j = i + 1; j < ms.size(); ++j)
      if (ms[i].begin < ms[j].end && ms[j].begin < ms[i].end) return false;
  return true;
}

// Independent greedy: repeatedly pick the best remaining by (ld desc,
// length desc, start asc) and discard everything overlapping it.
std::vector<Mention> greedy_oracle(std::vector<Mention> pool) {
  std::vector<Mention> kept;
  while (!pool.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < pool.size(); ++i) {
      const Mention& a = pool[i];
      const Mention& b = pool[best];
      std::size_t la = a.end - a.begin, lb = b.end - b.begin;
      if (a.ld > b.ld || (a.ld == b.ld && la > lb) ||
          (a.ld == b.ld && la == lb && a.begin < b.begin))
        best = i;
    }
    Mention chosen = pool[best];
    kept.push_back(chosen);
    std::vector<Mention> rest;
    for (const Mention& m : pool)
      if (m.end <= chosen.begin || chosen.end <= m.begin) rest.push_back(m);
    pool = std::move(rest);
  }
  std::sort(kept.begin(), kept.end(),
            [](const Mention& a, const Mention& b) { return a.begin < b.begin; });
  return kept;
}

}  // namespace

TEST_SUITE("mention") {

TEST_CASE("threshold classification") {
  mention::Thresholds th{0.1, 5};
  auto strong = mention::classify_mentions({make(0, 1, 0.5, 100, "acme")}, th);
  CHECK(strong.proper.size() == 1);
  auto weak = mention::classify_mentions({make(0, 2, 0.001, 1, "the it")}, th);
  CHECK(weak.dubious.size() == 1);
  // title-case override regardless of statistics
  auto titled = mention::classify_mentions({make(0, 3, 0.0, 0, "New York City")}, th);
  CHECK(titled.proper.size() == 1);
}

TEST_CASE("title case override counts alphabetic tokens only") {
  CHECK(mention::title_case_override({"New", "York", "City"}));
  CHECK(mention::title_case_override({"New", "York", "-", "City"}));  // 3/3 letters
  CHECK_FALSE(mention::title_case_override({"New", "york", "city", "now"}));
  CHECK(mention::title_case_override({"Aa", "Bb", "Cc", "dd"}));  // exactly 0.75
  CHECK_FALSE(mention::title_case_override({"42", "--"}));
}

TEST_CASE("raising ld_min never promotes a mention") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    Mention m = make(0, 1, (rng() % 100) / 100.0, rng() % 5, "lower case");
    mention::Thresholds low{0.1, 2}, high{0.4, 2};
    bool proper_low =
        !mention::classify_mentions({m}, low).proper.empty();
    bool proper_high =
        !mention::classify_mentions({m}, high).proper.empty();
    if (proper_high) CHECK(proper_low);
  }
}

TEST_CASE("DICT_ONLY applies the greedy rule") {
  std::vector<Mention> dict = {make(0, 2, 0.8), make(1, 3, 0.9), make(3, 4, 0.5)};
  auto out = mention::resolve_overlaps(dict, {}, OverlapMode::DictOnly);
  REQUIRE(out.size() == 2);
  CHECK(out[0].begin == 1);
  CHECK(out[1].begin == 3);
}

TEST_CASE("NER_ONLY keeps NER mentions and marks linkability") {
  std::vector<Mention> dict = {make(0, 2, 0.9)};
  Mention n1 = make(0, 2);
  n1.source = mention::Source::Ner;
  Mention n2 = make(3, 5);
  n2.source = mention::Source::Ner;
  auto out = mention::resolve_overlaps(dict, {n1, n2}, OverlapMode::NerOnly);
  REQUIRE(out.size() == 2);
  CHECK(out[0].linkable);
  CHECK(out[0].source == mention::Source::Both);
  CHECK_FALSE(out[1].linkable);  // kept, marked unlinkable
}

TEST_CASE("HYBRID suppresses dictionary mentions under NER spans") {
  std::vector<Mention> dict = {make(0, 2, 0.9), make(4, 6, 0.8)};
  Mention n = make(1, 3);
  n.source = mention::Source::Ner;
  auto out = mention::resolve_overlaps(dict, {n}, OverlapMode::Hybrid);
  REQUIRE(out.size() == 2);
  CHECK(out[0].begin == 1);  // the NER mention wins its span
  CHECK(out[1].begin == 4);  // non-overlapping dictionary mention survives
}

TEST_CASE("fuzzed overlap resolution: disjoint outputs, oracle equality") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 3000; ++trial) {
    std::vector<Mention> dict;
    std::size_t nd = rng() % 10;
    for (std::size_t i = 0; i < nd; ++i) {
      std::size_t b = rng() % 12;
      dict.push_back(make(b, b + 1 + rng() % 4, (rng() % 10) / 10.0));
    }
    // non-overlapping NER mentions built left to right
    std::vector<Mention> ners;
    std::size_t pos = rng() % 3;
    while (pos < 12 && ners.size() < 5) {
      std::size_t e = pos + 1 + rng() % 3;
      Mention m = make(pos, e);
      m.source = mention::Source::Ner;
      ners.push_back(m);
      pos = e + rng() % 3;
    }

    for (OverlapMode mode :
         {OverlapMode::NerOnly, OverlapMode::DictOnly, OverlapMode::Hybrid}) {
      auto out = mention::resolve_overlaps(dict, ners, mode);
      CHECK(disjoint(out));
    }
    auto got = mention::resolve_overlaps(dict, ners, OverlapMode::DictOnly);
    auto want = greedy_oracle(dict);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].begin == want[i].begin);
      CHECK(got[i].end == want[i].end);
    }
  }
}

}  // TEST_SUITE
