#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ugglan/kb.hpp"

namespace ugglan::linker {

struct Candidate {
  kb::EntityId entity;
  double rank_value = 0.0;  // per-mention normalized PageRank mass
  std::int64_t pair_count = 0;
  double commonness = 0.0;
  bool inherited = false;  // gained via prefix/suffix expansion
  double rerank_score = 1.0;
  double final_score = 0.0;
};

struct LinkMention {
  std::size_t begin = 0, end = 0;  // token indices
  std::string surface;
  std::vector<Candidate> candidates;
  bool ranked = false;
  bool nil = false;
};

// Fills candidates from a dictionary entry; commonness is the candidate's
// share of the entry's total pair count.
void init_candidates(LinkMention& mention, const kb::MentionEntry& entry);

// Token-prefix/suffix expansion within one document: if surface A is a
// proper token-prefix or token-suffix of surface B, A's candidate set gains
// B's candidates (union, keeping B's pair counts, tagged inherited).
// Relationships are computed over the pre-expansion candidate sets.
void expand_candidates(std::vector<LinkMention>& mentions);

struct Edge {
  std::uint32_t from = 0, to = 0;
  double weight = 0.0;
  bool undirected = false;
};

struct Graph {
  std::size_t nodes = 0;
  std::vector<Edge> edges;
};

// Power iteration with uniform teleport; dangling mass redistributed
// uniformly. Weights are non-negative and sum to 1.
std::vector<double> pagerank(const Graph& graph, double damping = 0.85,
                             double tol = 1e-9, std::size_t max_iter = 200);

// Ranks candidates of every not-yet-ranked mention in the window using a
// local graph over all window mentions plus KB cooccurrence/inlink edges.
void disambiguate_window(std::span<LinkMention> window, const kb::KnowledgeBase& kb);

// Windows of `window` mentions shifted by `step`; the leftmost window that
// covers a mention decides its ranking.
void disambiguate_document(std::vector<LinkMention>& mentions,
                           const kb::KnowledgeBase& kb, std::size_t window = 20,
                           std::size_t step = 10);

}  // namespace ugglan::linker
