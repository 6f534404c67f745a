#include "ugglan/linker.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "ugglan/fstdict.hpp"

namespace ugglan::linker {

void init_candidates(LinkMention& mention, const kb::MentionEntry& entry) {
  std::int64_t total = 0;
  for (const kb::CandidateCount& c : entry.candidates) total += c.pair_count;
  mention.candidates.clear();
  mention.candidates.reserve(entry.candidates.size());
  for (const kb::CandidateCount& c : entry.candidates) {
    Candidate cand;
    cand.entity = c.entity;
    cand.pair_count = c.pair_count;
    cand.commonness = total > 0 ? static_cast<double>(c.pair_count) / total : 0.0;
    mention.candidates.push_back(std::move(cand));
  }
}

namespace {

bool is_affix(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() || a.size() >= b.size()) return false;
  bool prefix = std::equal(a.begin(), a.end(), b.begin());
  bool suffix = std::equal(a.rbegin(), a.rend(), b.rbegin());
  return prefix || suffix;
}

}  // namespace

void expand_candidates(std::vector<LinkMention>& mentions) {
  // Distinct surfaces with their pre-expansion candidates.
  std::map<std::string, std::vector<Candidate>> original;
  for (const LinkMention& m : mentions) {
    if (!original.count(m.surface)) original[m.surface] = m.candidates;
  }
  std::map<std::string, std::vector<std::string>> toks;
  for (const auto& [surface, _] : original)
    toks[surface] = fstdict::split_surface(surface);

  // Per surface, the union of candidates inherited from longer surfaces.
  std::map<std::string, std::vector<Candidate>> gained;
  for (const auto& [a, a_cands] : original) {
    std::map<kb::EntityId, Candidate> extra;
    std::set<kb::EntityId> own;
    for (const Candidate& c : a_cands) own.insert(c.entity);
    for (const auto& [b, b_cands] : original) {
      if (a == b || !is_affix(toks[a], toks[b])) continue;
      for (const Candidate& c : b_cands) {
        if (own.count(c.entity)) continue;
        auto it = extra.find(c.entity);
        if (it == extra.end() || c.pair_count > it->second.pair_count) {
          Candidate inh = c;
          inh.inherited = true;
          extra[c.entity] = std::move(inh);
        }
      }
    }
    if (extra.empty()) continue;
    std::vector<Candidate>& v = gained[a];
    for (auto& [_, c] : extra) v.push_back(std::move(c));
    std::sort(v.begin(), v.end(), [](const Candidate& x, const Candidate& y) {
      if (x.pair_count != y.pair_count) return x.pair_count > y.pair_count;
      return x.entity < y.entity;
    });
  }

  for (LinkMention& m : mentions) {
    auto it = gained.find(m.surface);
    if (it == gained.end()) continue;
    m.candidates.insert(m.candidates.end(), it->second.begin(), it->second.end());
  }
}

std::vector<double> pagerank(const Graph& graph, double damping, double tol,
                             std::size_t max_iter) {
  const std::size_t n = graph.nodes;
  if (n == 0) return {};

  struct In {
    std::uint32_t src;
    double w;
  };
  std::vector<std::vector<In>> incoming(n);
  std::vector<double> out_weight(n, 0.0);
  auto add = [&](std::uint32_t from, std::uint32_t to, double w) {
    incoming[to].push_back({from, w});
    out_weight[from] += w;
  };
  for (const Edge& e : graph.edges) {
    add(e.from, e.to, e.weight);
    if (e.undirected) add(e.to, e.from, e.weight);
  }

  std::vector<double> x(n, 1.0 / n), y(n);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    double dangling = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (out_weight[i] == 0.0) dangling += x[i];
    const double base = (1.0 - damping) / n + damping * dangling / n;
    std::fill(y.begin(), y.end(), base);
    for (std::size_t i = 0; i < n; ++i) {
      for (const In& in : incoming[i])
        y[i] += damping * x[in.src] * in.w / out_weight[in.src];
    }
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) diff += std::fabs(y[i] - x[i]);
    x.swap(y);
    if (diff < tol) break;
  }
  return x;
}

void disambiguate_window(std::span<LinkMention> window, const kb::KnowledgeBase& kb) {
  // Mentions with candidates get graph nodes; others pass through.
  std::vector<std::size_t> active;
  std::set<kb::EntityId> entity_set;
  for (std::size_t i = 0; i < window.size(); ++i) {
    if (window[i].candidates.empty()) continue;
    active.push_back(i);
    for (const Candidate& c : window[i].candidates) entity_set.insert(c.entity);
  }
  if (active.empty()) return;

  std::vector<kb::EntityId> entities(entity_set.begin(), entity_set.end());
  std::map<kb::EntityId, std::uint32_t> entity_node;
  const std::uint32_t mention_nodes = static_cast<std::uint32_t>(active.size());
  for (std::size_t j = 0; j < entities.size(); ++j)
    entity_node[entities[j]] = mention_nodes + static_cast<std::uint32_t>(j);

  Graph g;
  g.nodes = mention_nodes + entities.size();
  for (std::size_t a = 0; a < active.size(); ++a) {
    for (const Candidate& c : window[active[a]].candidates) {
      g.edges.push_back({static_cast<std::uint32_t>(a), entity_node[c.entity],
                         static_cast<double>(c.pair_count + 1), false});
    }
  }
  for (std::size_t j = 0; j < entities.size(); ++j) {
    for (std::size_t k = j + 1; k < entities.size(); ++k) {
      auto it = kb.cooccur.find({entities[j], entities[k]});
      if (it != kb.cooccur.end() && it->second > 0) {
        g.edges.push_back({entity_node[entities[j]], entity_node[entities[k]],
                           static_cast<double>(it->second), true});
      }
    }
  }
  for (const kb::EntityId& target : entities) {
    auto it = kb.inlinks.find(target);
    if (it == kb.inlinks.end()) continue;
    for (const kb::EntityId& src : it->second) {
      if (src == target) continue;
      auto sit = entity_node.find(src);
      if (sit != entity_node.end())
        g.edges.push_back({sit->second, entity_node[target], 1.0, false});
    }
  }

  std::vector<double> weight = pagerank(g);

  for (std::size_t i : active) {
    LinkMention& m = window[i];
    if (m.ranked) continue;
    double sum = 0.0;
    for (const Candidate& c : m.candidates) sum += weight[entity_node[c.entity]];
    for (Candidate& c : m.candidates) {
      c.rank_value = sum > 0.0 ? weight[entity_node[c.entity]] / sum
                               : 1.0 / m.candidates.size();
    }
    std::stable_sort(m.candidates.begin(), m.candidates.end(),
                     [](const Candidate& a, const Candidate& b) {
                       if (a.rank_value != b.rank_value)
                         return a.rank_value > b.rank_value;
                       return a.entity < b.entity;
                     });
    // Exact-title promotion within the top three.
    std::size_t top = std::min<std::size_t>(3, m.candidates.size());
    for (std::size_t k = 0; k < top; ++k) {
      auto tit = kb.titles.find(m.candidates[k].entity);
      if (tit != kb.titles.end() && tit->second == m.surface) {
        std::rotate(m.candidates.begin(), m.candidates.begin() + k,
                    m.candidates.begin() + k + 1);
        break;
      }
    }
    m.ranked = true;
  }
}

void disambiguate_document(std::vector<LinkMention>& mentions,
                           const kb::KnowledgeBase& kb, std::size_t window,
                           std::size_t step) {
  const std::size_t n = mentions.size();
  if (n == 0) return;
  std::size_t start = 0;
  while (true) {
    std::size_t end = std::min(start + window, n);
    disambiguate_window(std::span<LinkMention>(mentions.data() + start, end - start),
                        kb);
    if (end >= n) break;
    start += step;
  }
}

}  // namespace ugglan::linker
