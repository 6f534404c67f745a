#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ugglan::fofe {

// Sparse non-negative vector; entries sorted by index, zero weights omitted.
struct SparseVec {
  std::vector<std::pair<int, double>> items;
  int dim = 0;

  double at(int index) const;
  bool operator==(const SparseVec&) const = default;
};

// z_0 = 0; z_n = alpha * z_{n-1} + e_n. Returns z for the whole sequence.
// Weights below machine-epsilon * dim are dropped from the sparse form.
SparseVec encode(std::span<const int> indices, double alpha, int dim);

// Greedy inverse of encode, valid for alpha <= 0.5 where the encoding is
// injective. Returns nullopt when no preimage of length <= max_len exists.
std::optional<std::vector<int>> recover(const SparseVec& z, double alpha,
                                        int vocab, int max_len);

// Word id view of a sentence: one case-sensitive and one lowercased id per
// token, plus the BOS/EOS padding ids of each vocabulary.
struct SentenceIds {
  std::vector<int> raw;
  std::vector<int> lower;
  int raw_dim = 0;
  int lower_dim = 0;
  int bos_raw = 0, eos_raw = 0;
  int bos_lower = 0, eos_lower = 0;
};

// The ten word-level feature vectors, five per case variant:
// [0] focus bag-of-words, [1] left context excluding focus,
// [2] left context including focus, [3] right context excluding focus,
// [4] right context including focus; indices 5-9 repeat this layout for
// the lowercased ids. Left contexts read toward the focus from BOS; right
// contexts read toward the focus from EOS, so recency means proximity.
std::array<SparseVec, 10> word_features(const SentenceIds& sentence,
                                        std::size_t focus_begin,
                                        std::size_t focus_end,
                                        double alpha = 0.5);

// The four character-level vectors over the focus words with alpha = 0.8:
// [0] per character left-to-right, [1] per character right-to-left,
// [2] first character of each word left-to-right, [3] same right-to-left.
// Characters hash to codepoint mod 128.
std::array<SparseVec, 4> char_features(const std::vector<std::string>& focus_words,
                                       double alpha = 0.8);

constexpr int kCharDim = 128;

}  // namespace ugglan::fofe
