#include "ugglan/ner.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ugglan/text.hpp"

namespace ugglan::ner {

namespace {
using json = nlohmann::json;
}

std::string to_string(NerClass c) {
  static const char* names[] = {"PER-NAM", "GPE-NAM", "ORG-NAM", "LOC-NAM",
                                "FAC-NAM", "PER-NOM", "GPE-NOM", "ORG-NOM",
                                "LOC-NOM", "FAC-NOM", "NONE"};
  return names[static_cast<int>(c)];
}

std::optional<NerClass> ner_class_from_string(const std::string& s) {
  for (int i = 0; i < static_cast<int>(kClassCount); ++i) {
    if (to_string(static_cast<NerClass>(i)) == s) return static_cast<NerClass>(i);
  }
  return std::nullopt;
}

kb::Klass klass_of(NerClass c) {
  switch (c) {
    case NerClass::PER_NAM:
    case NerClass::PER_NOM: return kb::Klass::PER;
    case NerClass::GPE_NAM:
    case NerClass::GPE_NOM: return kb::Klass::GPE;
    case NerClass::ORG_NAM:
    case NerClass::ORG_NOM: return kb::Klass::ORG;
    case NerClass::LOC_NAM:
    case NerClass::LOC_NOM: return kb::Klass::LOC;
    case NerClass::FAC_NAM:
    case NerClass::FAC_NOM: return kb::Klass::FAC;
    case NerClass::NONE: return kb::Klass::OTHER;
  }
  return kb::Klass::OTHER;
}

bool is_nominal(NerClass c) {
  return c >= NerClass::PER_NOM && c <= NerClass::FAC_NOM;
}

std::vector<std::pair<std::size_t, std::size_t>> generate_candidates(
    std::size_t token_count, std::size_t max_width) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t begin = 0; begin < token_count; ++begin) {
    for (std::size_t k = 1; k <= max_width && begin + k <= token_count; ++k) {
      out.emplace_back(begin, begin + k);
    }
  }
  return out;
}

std::vector<CandidateWindow> label_candidates(std::size_t sentence_index,
                                              std::size_t token_count,
                                              const std::vector<GoldSpan>& gold,
                                              std::size_t max_width) {
  std::vector<GoldSpan> sorted = gold;
  std::sort(sorted.begin(), sorted.end(),
            [](const GoldSpan& a, const GoldSpan& b) { return a.begin < b.begin; });
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    if (sorted[i].end > sorted[i + 1].begin) {
      throw std::invalid_argument("label_candidates: overlapping gold annotations");
    }
  }
  for (const GoldSpan& g : sorted) {
    if (g.begin >= g.end || g.end > token_count) {
      throw std::invalid_argument("label_candidates: gold span out of bounds");
    }
  }

  std::vector<bool> annotated(token_count, false);
  for (const GoldSpan& g : sorted) {
    for (std::size_t i = g.begin; i < g.end; ++i) annotated[i] = true;
  }

  std::vector<CandidateWindow> out;
  for (const auto& [begin, end] : generate_candidates(token_count, max_width)) {
    CandidateWindow w;
    w.sentence = sentence_index;
    w.begin = begin;
    w.end = end;
    const GoldSpan* exact = nullptr;
    bool touches = false;
    for (const GoldSpan& g : sorted) {
      if (g.begin == begin && g.end == end) exact = &g;
    }
    for (std::size_t i = begin; i < end && !touches; ++i) {
      touches = annotated[i];
    }
    if (exact) {
      w.label = exact->cls;
      w.kind = SampleKind::Positive;
    } else if (!touches) {
      w.label = NerClass::NONE;
      w.kind = SampleKind::Disjoint;
    } else {
      w.label = NerClass::NONE;
      w.kind = SampleKind::Overlapping;
    }
    out.push_back(w);
  }
  return out;
}

std::vector<std::size_t> sample_epoch(const std::vector<CandidateWindow>& windows,
                                      const SampleRatios& ratios,
                                      std::mt19937_64& rng, bool* warned) {
  std::vector<std::size_t> positives, overlapping, disjoint;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    switch (windows[i].kind) {
      case SampleKind::Positive: positives.push_back(i); break;
      case SampleKind::Overlapping: overlapping.push_back(i); break;
      case SampleKind::Disjoint: disjoint.push_back(i); break;
    }
  }
  if (warned) *warned = false;
  if (positives.empty()) {
    if (warned) *warned = true;
    std::cerr << "[ner] warning: no positive windows, empty epoch\n";
    return {};
  }

  const double p = static_cast<double>(positives.size());
  std::size_t want_over =
      static_cast<std::size_t>(p * ratios.overlapping / ratios.positive + 0.5);
  std::size_t want_dis =
      static_cast<std::size_t>(p * ratios.disjoint / ratios.positive + 0.5);

  if (overlapping.size() < want_over || disjoint.size() < want_dis) {
    // Shrink both negative kinds by the same factor to keep their ratio.
    double scale = 1.0;
    if (want_over > 0) {
      scale = std::min(scale, static_cast<double>(overlapping.size()) /
                                  static_cast<double>(want_over));
    }
    if (want_dis > 0) {
      scale = std::min(scale, static_cast<double>(disjoint.size()) /
                                  static_cast<double>(want_dis));
    }
    want_over = static_cast<std::size_t>(static_cast<double>(want_over) * scale);
    want_dis = static_cast<std::size_t>(static_cast<double>(want_dis) * scale);
    if (warned) *warned = true;
    std::cerr << "[ner] warning: negative pools short, epoch shrunk\n";
  }

  std::vector<std::size_t> out = positives;
  std::sample(overlapping.begin(), overlapping.end(), std::back_inserter(out),
              want_over, rng);
  std::sample(disjoint.begin(), disjoint.end(), std::back_inserter(out), want_dis,
              rng);
  return out;
}

// ---------------------------------------------------------------------------
// Vocabulary and features.

Vocab Vocab::from_word_lists(std::vector<std::string> raw,
                             std::vector<std::string> lower) {
  Vocab v;
  v.raw_words = std::move(raw);
  v.lower_words = std::move(lower);
  // The last four raw ids / last three lower ids are the specials, appended
  // by build() in this order.
  if (v.raw_words.size() < 4 || v.lower_words.size() < 3) {
    throw std::invalid_argument("Vocab: word lists too short");
  }
  for (std::size_t i = 0; i < v.raw_words.size(); ++i) {
    v.raw_index[v.raw_words[i]] = static_cast<int>(i);
  }
  for (std::size_t i = 0; i < v.lower_words.size(); ++i) {
    v.lower_index[v.lower_words[i]] = static_cast<int>(i);
  }
  v.bos_raw = static_cast<int>(v.raw_words.size()) - 4;
  v.eos_raw = v.bos_raw + 1;
  v.unk_raw = v.bos_raw + 2;
  v.unk_raw_lower = v.bos_raw + 3;
  v.bos_lower = static_cast<int>(v.lower_words.size()) - 3;
  v.eos_lower = v.bos_lower + 1;
  v.unk_lower = v.bos_lower + 2;
  return v;
}

Vocab Vocab::build(const std::vector<SentenceData>& corpus) {
  std::set<std::string> raw_set, lower_set;
  for (const SentenceData& s : corpus) {
    for (const std::string& t : s.tokens) {
      raw_set.insert(t);
      lower_set.insert(text::ascii_lower(t));
    }
  }
  std::vector<std::string> raw(raw_set.begin(), raw_set.end());
  std::vector<std::string> lower(lower_set.begin(), lower_set.end());
  raw.insert(raw.end(), {"<BOS>", "<EOS>", "<UNK>", "<unk>"});
  lower.insert(lower.end(), {"<bos>", "<eos>", "<unk>"});
  return from_word_lists(std::move(raw), std::move(lower));
}

int Vocab::raw_id(const std::string& word) const {
  auto it = raw_index.find(word);
  if (it != raw_index.end()) return it->second;
  return word == text::ascii_lower(word) ? unk_raw_lower : unk_raw;
}

int Vocab::lower_id(const std::string& word) const {
  auto it = lower_index.find(text::ascii_lower(word));
  return it == lower_index.end() ? unk_lower : it->second;
}

neuro::Example extract_features(const Vocab& vocab, const FeatureConfig& fc,
                                const std::vector<std::string>& tokens,
                                std::size_t focus_begin, std::size_t focus_end) {
  fofe::SentenceIds ids;
  ids.raw_dim = vocab.raw_dim();
  ids.lower_dim = vocab.lower_dim();
  ids.bos_raw = vocab.bos_raw;
  ids.eos_raw = vocab.eos_raw;
  ids.bos_lower = vocab.bos_lower;
  ids.eos_lower = vocab.eos_lower;
  ids.raw.reserve(tokens.size());
  ids.lower.reserve(tokens.size());
  for (const std::string& t : tokens) {
    ids.raw.push_back(vocab.raw_id(t));
    ids.lower.push_back(vocab.lower_id(t));
  }

  auto word_vecs = fofe::word_features(ids, focus_begin, focus_end, fc.word_alpha);
  neuro::Example ex(word_vecs.begin(), word_vecs.end());
  if (fc.char_features) {
    std::vector<std::string> focus(tokens.begin() + focus_begin,
                                   tokens.begin() + focus_end);
    auto char_vecs = fofe::char_features(focus, fc.char_alpha);
    ex.insert(ex.end(), char_vecs.begin(), char_vecs.end());
  }
  return ex;
}

// ---------------------------------------------------------------------------
// Decoding.

std::vector<TypedSpan> select_nonoverlapping(std::vector<TypedSpan> scored,
                                             DecodeStrategy strategy) {
  if (strategy == DecodeStrategy::HighestProb) {
    std::sort(scored.begin(), scored.end(), [](const TypedSpan& a, const TypedSpan& b) {
      if (a.prob != b.prob) return a.prob > b.prob;
      if (a.begin != b.begin) return a.begin < b.begin;  // leftmost
      return a.end - a.begin < b.end - b.begin;          // shortest
    });
  } else {
    std::sort(scored.begin(), scored.end(), [](const TypedSpan& a, const TypedSpan& b) {
      std::size_t la = a.end - a.begin, lb = b.end - b.begin;
      if (la != lb) return la > lb;    // longest
      return a.begin > b.begin;        // rightmost
    });
  }

  std::vector<TypedSpan> kept;
  for (const TypedSpan& s : scored) {
    bool overlaps = false;
    for (const TypedSpan& k : kept) {
      if (s.begin < k.end && k.begin < s.end) {
        overlaps = true;
        break;
      }
    }
    if (!overlaps) kept.push_back(s);
  }
  std::sort(kept.begin(), kept.end(),
            [](const TypedSpan& a, const TypedSpan& b) { return a.begin < b.begin; });
  return kept;
}

std::vector<TypedSpan> decode(const std::vector<std::string>& tokens,
                              const NerModel& model, double threshold,
                              DecodeStrategy strategy) {
  auto windows = generate_candidates(tokens.size(), model.max_width);
  if (windows.empty()) return {};

  std::vector<neuro::Example> examples;
  examples.reserve(windows.size());
  for (const auto& [b, e] : windows) {
    examples.push_back(extract_features(model.vocab, model.features, tokens, b, e));
  }
  std::vector<const neuro::Example*> ptrs;
  ptrs.reserve(examples.size());
  for (const neuro::Example& ex : examples) ptrs.push_back(&ex);
  neuro::Matrix probs = model.net.predict(ptrs);

  std::vector<TypedSpan> scored;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < kClassCount; ++j) {
      if (probs.at(i, j) > probs.at(i, best)) best = j;
    }
    if (best == static_cast<std::size_t>(NerClass::NONE)) continue;
    if (probs.at(i, best) < threshold) continue;
    scored.push_back({windows[i].first, windows[i].second,
                      static_cast<NerClass>(best), probs.at(i, best)});
  }
  return select_nonoverlapping(std::move(scored), strategy);
}

// ---------------------------------------------------------------------------
// Training.

NerModel train_ner(const std::vector<SentenceData>& corpus, const TrainOptions& opt,
                   std::vector<double>* loss_trace) {
  NerModel model;
  model.vocab = Vocab::build(corpus);
  model.features.char_features = opt.char_features;
  model.max_width = opt.max_width;

  neuro::NetConfig cfg;
  cfg.projections.push_back(
      {static_cast<std::size_t>(model.vocab.raw_dim()), opt.word_proj, 5});
  cfg.projections.push_back(
      {static_cast<std::size_t>(model.vocab.lower_dim()), opt.word_proj, 5});
  if (opt.char_features) {
    cfg.projections.push_back({fofe::kCharDim, opt.char_proj, 4});
  }
  cfg.hidden = opt.hidden;
  cfg.outputs = kClassCount;
  model.net = neuro::Net::init(cfg, opt.init_seed);

  std::vector<CandidateWindow> windows;
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    auto labeled = label_candidates(s, corpus[s].tokens.size(), corpus[s].gold,
                                    opt.max_width);
    windows.insert(windows.end(), labeled.begin(), labeled.end());
  }

  // Positive windows recur in every epoch; cache their features.
  std::map<std::size_t, neuro::Example> positive_cache;
  auto features_of = [&](const CandidateWindow& w) {
    return extract_features(model.vocab, model.features, corpus[w.sentence].tokens,
                            w.begin, w.end);
  };

  auto storage = std::make_shared<std::vector<neuro::Example>>();
  neuro::Sampler sampler = [&, storage](std::size_t, std::mt19937_64& rng) {
    std::vector<std::size_t> picked = sample_epoch(windows, opt.ratios, rng);
    storage->clear();
    storage->reserve(picked.size());
    neuro::EpochData data;
    data.xs.reserve(picked.size());
    data.ys.reserve(picked.size());
    for (std::size_t idx : picked) {
      const CandidateWindow& w = windows[idx];
      if (w.kind == SampleKind::Positive) {
        auto it = positive_cache.find(idx);
        if (it == positive_cache.end()) {
          it = positive_cache.emplace(idx, features_of(w)).first;
        }
        data.xs.push_back(&it->second);
      } else {
        storage->push_back(features_of(w));
        data.xs.push_back(&storage->back());
      }
      data.ys.push_back(static_cast<int>(w.label));
    }
    return data;
  };

  std::vector<double> trace = neuro::train(model.net, opt.train, sampler);
  if (loss_trace) *loss_trace = trace;
  return model;
}

// ---------------------------------------------------------------------------
// Persistence and file formats.

void save_ner_model(const NerModel& model, const std::string& path) {
  json extra;
  extra["kind"] = "ner";
  extra["raw_words"] = model.vocab.raw_words;
  extra["lower_words"] = model.vocab.lower_words;
  extra["char_features"] = model.features.char_features;
  extra["word_alpha"] = model.features.word_alpha;
  extra["char_alpha"] = model.features.char_alpha;
  extra["max_width"] = model.max_width;
  neuro::save_model(model.net, path, extra.dump());
}

NerModel load_ner_model(const std::string& path) {
  std::string extra_text;
  NerModel model;
  model.net = neuro::load_model(path, &extra_text);
  json extra = json::parse(extra_text);
  if (extra.value("kind", "") != "ner") {
    throw std::runtime_error(path + ": not a ner model");
  }
  model.vocab = Vocab::from_word_lists(
      extra.at("raw_words").get<std::vector<std::string>>(),
      extra.at("lower_words").get<std::vector<std::string>>());
  model.features.char_features = extra.at("char_features").get<bool>();
  model.features.word_alpha = extra.at("word_alpha").get<double>();
  model.features.char_alpha = extra.at("char_alpha").get<double>();
  model.max_width = extra.at("max_width").get<std::size_t>();
  return model;
}

std::vector<SentenceData> read_training_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open training file: " + path);

  std::vector<SentenceData> out;
  SentenceData cur;
  std::string line;
  std::size_t lineno = 0;
  auto flush = [&] {
    if (!cur.tokens.empty()) out.push_back(std::move(cur));
    cur = {};
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) {
      flush();
      continue;
    }
    if (line.rfind("#SPAN ", 0) == 0) {
      std::istringstream ls(line.substr(6));
      std::size_t b, e;
      std::string cls;
      if (!(ls >> b >> e >> cls)) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": malformed span line");
      }
      auto c = ner_class_from_string(cls);
      if (!c || *c == NerClass::NONE) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": unknown class " + cls);
      }
      cur.gold.push_back({b, e, *c});
    } else {
      cur.tokens.push_back(line);
    }
  }
  flush();
  return out;
}

}  // namespace ugglan::ner
