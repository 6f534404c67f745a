#include "ugglan/fofe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "ugglan/text.hpp"

namespace ugglan::fofe {

namespace {

double prune_threshold(int dim) {
  return std::numeric_limits<double>::epsilon() * static_cast<double>(dim);
}

SparseVec from_map(const std::map<int, double>& m, int dim) {
  SparseVec v;
  v.dim = dim;
  double tol = prune_threshold(dim);
  for (const auto& [idx, w] : m) {
    if (w > tol) v.items.emplace_back(idx, w);
  }
  return v;
}

}  // namespace

double SparseVec::at(int index) const {
  auto it = std::lower_bound(items.begin(), items.end(), index,
                             [](const auto& p, int i) { return p.first < i; });
  if (it != items.end() && it->first == index) return it->second;
  return 0.0;
}

SparseVec encode(std::span<const int> indices, double alpha, int dim) {
  if (alpha < 0.0 || alpha >= 1.0) {
    throw std::invalid_argument("fofe: alpha must satisfy 0 <= alpha < 1");
  }
  std::map<int, double> acc;
  // Position i of n carries weight alpha^(n-1-i); walk from the end so the
  // factor is a plain running product.
  double factor = 1.0;
  for (std::size_t k = indices.size(); k-- > 0;) {
    int idx = indices[k];
    if (idx < 0 || idx >= dim) {
      throw std::invalid_argument("fofe: index out of range");
    }
    acc[idx] += factor;
    factor *= alpha;
  }
  return from_map(acc, dim);
}

std::optional<std::vector<int>> recover(const SparseVec& z, double alpha,
                                        int vocab, int max_len) {
  if (alpha <= 0.0 || alpha > 0.5) {
    throw std::invalid_argument("fofe: recovery requires 0 < alpha <= 0.5");
  }
  constexpr double kTol = 1e-9;
  std::map<int, double> work;
  for (const auto& [idx, w] : z.items) {
    if (idx >= vocab) return std::nullopt;
    if (w > kTol) work[idx] = w;
  }

  std::vector<int> rev;
  for (int step = 0; step <= max_len; ++step) {
    if (work.empty()) {
      std::reverse(rev.begin(), rev.end());
      return rev;
    }
    if (step == max_len) return std::nullopt;
    // The last symbol of the remaining sequence contributes a full +1; for
    // alpha <= 0.5 every other coordinate stays strictly below 1.
    int last = -1;
    for (const auto& [idx, w] : work) {
      if (w >= 1.0 - kTol) {
        if (last != -1) return std::nullopt;
        last = idx;
      }
    }
    if (last == -1) return std::nullopt;
    rev.push_back(last);
    work[last] -= 1.0;
    for (auto it = work.begin(); it != work.end();) {
      it->second /= alpha;
      if (it->second <= kTol) {
        it = work.erase(it);
      } else {
        ++it;
      }
    }
  }
  return std::nullopt;
}

std::array<SparseVec, 10> word_features(const SentenceIds& sentence,
                                        std::size_t focus_begin,
                                        std::size_t focus_end, double alpha) {
  const std::size_t n = sentence.raw.size();
  if (sentence.lower.size() != n || focus_begin > focus_end || focus_end > n) {
    throw std::invalid_argument("word_features: bad focus interval");
  }

  std::array<SparseVec, 10> out;
  for (int variant = 0; variant < 2; ++variant) {
    const std::vector<int>& ids = variant == 0 ? sentence.raw : sentence.lower;
    int dim = variant == 0 ? sentence.raw_dim : sentence.lower_dim;
    int bos = variant == 0 ? sentence.bos_raw : sentence.bos_lower;
    int eos = variant == 0 ? sentence.eos_raw : sentence.eos_lower;

    std::map<int, double> bow;
    for (std::size_t i = focus_begin; i < focus_end; ++i) bow[ids[i]] += 1.0;
    out[variant * 5 + 0] = from_map(bow, dim);

    auto left_seq = [&](std::size_t end) {
      std::vector<int> seq;
      seq.reserve(end + 1);
      seq.push_back(bos);
      for (std::size_t i = 0; i < end; ++i) seq.push_back(ids[i]);
      return seq;
    };
    auto right_seq = [&](std::size_t begin) {
      std::vector<int> seq;
      seq.reserve(n - begin + 1);
      seq.push_back(eos);
      for (std::size_t i = n; i-- > begin;) seq.push_back(ids[i]);
      return seq;
    };

    out[variant * 5 + 1] = encode(left_seq(focus_begin), alpha, dim);
    out[variant * 5 + 2] = encode(left_seq(focus_end), alpha, dim);
    out[variant * 5 + 3] = encode(right_seq(focus_end), alpha, dim);
    out[variant * 5 + 4] = encode(right_seq(focus_begin), alpha, dim);
  }
  return out;
}

std::array<SparseVec, 4> char_features(const std::vector<std::string>& focus_words,
                                       double alpha) {
  std::vector<int> chars;
  std::vector<int> firsts;
  for (const std::string& word : focus_words) {
    bool first = true;
    std::size_t pos = 0;
    while (pos < word.size()) {
      char32_t cp;
      pos += text::decode_utf8(word, pos, &cp);
      int idx = static_cast<int>(cp % kCharDim);
      chars.push_back(idx);
      if (first) {
        firsts.push_back(idx);
        first = false;
      }
    }
  }
  std::vector<int> chars_rev(chars.rbegin(), chars.rend());
  std::vector<int> firsts_rev(firsts.rbegin(), firsts.rend());

  return {encode(chars, alpha, kCharDim), encode(chars_rev, alpha, kCharDim),
          encode(firsts, alpha, kCharDim), encode(firsts_rev, alpha, kCharDim)};
}

}  // namespace ugglan::fofe
