#include "ugglan/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "ugglan/fstdict.hpp"
#include "ugglan/linker.hpp"

namespace ugglan::pipeline {

namespace {

using nlohmann::json;

mention::OverlapMode mode_from_string(const std::string& s) {
  if (s == "DICT_ONLY") return mention::OverlapMode::DictOnly;
  if (s == "NER_ONLY") return mention::OverlapMode::NerOnly;
  if (s == "HYBRID") return mention::OverlapMode::Hybrid;
  throw ConfigError("unknown overlap mode: " + s);
}

}  // namespace

Config read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  try {
    Config cfg;
    cfg.kb_path = j.at("kb").get<std::string>();
    cfg.input_path = j.at("input").get<std::string>();
    cfg.output_path = j.at("output").get<std::string>();
    cfg.mode = mode_from_string(j.value("mode", "DICT_ONLY"));
    cfg.run_id = j.value("run_id", cfg.run_id);
    std::string lang = j.value("language_mode", "alphabetic");
    if (lang == "alphabetic") {
      cfg.tokenize_mode = text::TokenizeMode::Alphabetic;
    } else if (lang == "logographic") {
      cfg.tokenize_mode = text::TokenizeMode::LogographicMixed;
    } else {
      throw ConfigError("unknown language_mode: " + lang);
    }
    if (j.contains("ner_model")) cfg.ner_model_path = j["ner_model"].get<std::string>();
    if (j.contains("reranker_model"))
      cfg.reranker_model_path = j["reranker_model"].get<std::string>();
    cfg.thresholds.ld_min = j.value("ld_min", cfg.thresholds.ld_min);
    cfg.thresholds.lc_min = j.value("lc_min", cfg.thresholds.lc_min);
    cfg.decode_threshold = j.value("decode_threshold", cfg.decode_threshold);
    std::string strat = j.value("decode_strategy", "HIGHEST_PROB");
    if (strat == "HIGHEST_PROB") {
      cfg.decode_strategy = ner::DecodeStrategy::HighestProb;
    } else if (strat == "LONGEST") {
      cfg.decode_strategy = ner::DecodeStrategy::Longest;
    } else {
      throw ConfigError("unknown decode_strategy: " + strat);
    }
    if (j.contains("alpha")) cfg.alpha = j["alpha"].get<double>();
    cfg.nil_threshold = j.value("nil_threshold", cfg.nil_threshold);
    cfg.window = j.value("window", cfg.window);
    cfg.step = j.value("step", cfg.step);
    cfg.coref = j.value("coref", cfg.coref);
    cfg.nominals = j.value("nominals", cfg.nominals);
    cfg.workers = j.value("workers", cfg.workers);
    cfg.seed = j.value("seed", cfg.seed);
    if (cfg.step == 0 || cfg.window == 0)
      throw ConfigError("window and step must be positive");
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string Report::to_string() const {
  std::ostringstream os;
  os << "documents\t" << documents << '\n'
     << "dict_matches\t" << dict_matches << '\n'
     << "ner_mentions\t" << ner_mentions << '\n'
     << "resolved_mentions\t" << resolved_mentions << '\n'
     << "linked_mentions\t" << linked_mentions << '\n'
     << "nil_mentions\t" << nil_mentions << '\n'
     << "coref_additions\t" << coref_additions << '\n'
     << "nominal_additions\t" << nominal_additions << '\n'
     << "dropped_no_class\t" << dropped_no_class << '\n'
     << "emitted_mentions\t" << emitted_mentions << '\n'
     << "elapsed_ms\t" << static_cast<long long>(elapsed_ms) << '\n';
  return os.str();
}

Artifacts load_artifacts(const Config& cfg) {
  Artifacts art;
  if (cfg.kb_path.empty()) throw ConfigError("kb path missing");
  bool needs_ner = cfg.mode != mention::OverlapMode::DictOnly;
  if (needs_ner && !cfg.ner_model_path)
    throw ConfigError("NER_ONLY and HYBRID modes require an NER model");

  try {
    art.kb = kb::load_kb(cfg.kb_path);
  } catch (const std::exception& e) {
    throw DataError(e.what());
  }
  std::set<std::string> surfaces;
  for (const auto& [surface, _] : art.kb.dictionary) surfaces.insert(surface);
  art.automaton = fstdict::Automaton::build(surfaces);

  if (cfg.ner_model_path) {
    try {
      art.ner = ner::load_ner_model(*cfg.ner_model_path);
    } catch (const std::exception& e) {
      throw DataError(e.what());
    }
  }
  if (cfg.reranker_model_path) {
    try {
      art.reranker = rerank::load_rerank_model(*cfg.reranker_model_path);
    } catch (const std::exception& e) {
      throw DataError(e.what());
    }
    if (art.reranker->spec.context) {
      if (!art.ner)
        throw ConfigError("context reranker requires an NER model for its vocabulary");
      if (art.reranker->spec.vocab_dim !=
          static_cast<std::size_t>(art.ner->vocab.lower_dim()))
        throw ConfigError("context reranker vocabulary does not match the NER model");
    }
  }
  return art;
}

namespace {

std::string join_tokens(const std::vector<text::Token>& tokens, std::size_t begin,
                        std::size_t end) {
  std::string s;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) s += ' ';
    s += tokens[i].text;
  }
  return s;
}

// Sentence containing the token span, for context feature extraction.
text::Sentence enclosing_sentence(const std::vector<text::Sentence>& sentences,
                                  std::size_t begin, std::size_t token_count) {
  for (const text::Sentence& s : sentences)
    if (begin >= s.begin && begin < s.end) return s;
  return {0, token_count};
}

void score_candidates(std::vector<linker::LinkMention>& lms,
                      const std::vector<text::Token>& tokens,
                      const std::vector<text::Sentence>& sentences,
                      const Artifacts& art) {
  const rerank::RerankModel& model = *art.reranker;
  std::vector<neuro::Example> features;
  std::vector<std::pair<std::size_t, std::size_t>> where;  // (mention, candidate)
  for (std::size_t i = 0; i < lms.size(); ++i) {
    linker::LinkMention& m = lms[i];
    if (m.candidates.empty()) continue;
    fofe::SparseVec lctx, rctx;
    if (model.spec.context) {
      text::Sentence s = enclosing_sentence(sentences, m.begin, tokens.size());
      std::vector<int> left, right;
      for (std::size_t t = s.begin; t < m.begin; ++t)
        left.push_back(art.ner->vocab.lower_id(text::ascii_lower(tokens[t].text)));
      for (std::size_t t = m.end; t < s.end; ++t)
        right.push_back(art.ner->vocab.lower_id(text::ascii_lower(tokens[t].text)));
      auto [l, r] = rerank::context_vectors(left, right, model.spec.vocab_dim,
                                            model.spec.context_alpha);
      lctx = std::move(l);
      rctx = std::move(r);
    }
    for (std::size_t c = 0; c < m.candidates.size(); ++c) {
      const linker::Candidate& cand = m.candidates[c];
      auto tit = art.kb.titles.find(cand.entity);
      double jac =
          tit != art.kb.titles.end() ? rerank::jaccard(tit->second, m.surface) : 0.0;
      features.push_back(rerank::make_features(
          jac, cand.rank_value, cand.commonness, model.spec,
          model.spec.context ? &lctx : nullptr, model.spec.context ? &rctx : nullptr));
      where.emplace_back(i, c);
    }
  }
  if (features.empty()) return;
  std::vector<const neuro::Example*> batch;
  batch.reserve(features.size());
  for (const neuro::Example& f : features) batch.push_back(&f);
  neuro::Matrix probs = model.net.predict(batch);
  for (std::size_t k = 0; k < where.size(); ++k)
    lms[where[k].first].candidates[where[k].second].rerank_score = probs.at(k, 0);
}

}  // namespace

std::vector<postprocess::LinkedMention> process_document(
    const kb::CorpusDocument& doc, const Config& cfg, const Artifacts& art,
    Report* report) {
  std::vector<text::Token> tokens = text::tokenize(doc.text, cfg.tokenize_mode);
  std::vector<text::Sentence> sentences = text::segment_sentences(tokens);

  // Dictionary discovery.
  std::vector<mention::Mention> dict_mentions;
  for (const fstdict::DictMatch& dm : art.automaton.find_all(tokens)) {
    const kb::MentionEntry* entry = art.kb.find(dm.surface);
    if (!entry) continue;
    mention::Mention m;
    m.begin = dm.begin;
    m.end = dm.end;
    m.surface = dm.surface;
    m.source = mention::Source::Dict;
    m.ld = entry->link_density();
    m.lc = entry->link_count;
    dict_mentions.push_back(std::move(m));
  }
  if (report) report->dict_matches += dict_mentions.size();

  mention::Classified classified =
      mention::classify_mentions(std::move(dict_mentions), cfg.thresholds);

  // Neural discovery.
  std::vector<mention::Mention> ner_mentions;
  if (art.ner && cfg.mode != mention::OverlapMode::DictOnly) {
    for (const text::Sentence& s : sentences) {
      std::vector<std::string> words;
      words.reserve(s.end - s.begin);
      for (std::size_t t = s.begin; t < s.end; ++t) words.push_back(tokens[t].text);
      for (const ner::TypedSpan& span :
           ner::decode(words, *art.ner, cfg.decode_threshold, cfg.decode_strategy)) {
        mention::Mention m;
        m.begin = s.begin + span.begin;
        m.end = s.begin + span.end;
        m.surface = join_tokens(tokens, m.begin, m.end);
        m.source = mention::Source::Ner;
        m.ner_class = span.cls;
        ner_mentions.push_back(std::move(m));
      }
    }
  }
  if (report) report->ner_mentions += ner_mentions.size();

  std::vector<mention::Mention> resolved =
      mention::resolve_overlaps(classified.proper, ner_mentions, cfg.mode);
  if (report) report->resolved_mentions += resolved.size();

  // Linking.
  std::vector<linker::LinkMention> lms(resolved.size());
  for (std::size_t i = 0; i < resolved.size(); ++i) {
    lms[i].begin = resolved[i].begin;
    lms[i].end = resolved[i].end;
    lms[i].surface = resolved[i].surface;
    if (resolved[i].linkable) {
      if (const kb::MentionEntry* entry = art.kb.find(resolved[i].surface))
        linker::init_candidates(lms[i], *entry);
    }
  }
  linker::expand_candidates(lms);
  linker::disambiguate_document(lms, art.kb, cfg.window, cfg.step);

  if (art.reranker) score_candidates(lms, tokens, sentences, art);
  double alpha = cfg.alpha.value_or(art.reranker ? art.reranker->alpha : 0.0);
  for (linker::LinkMention& m : lms)
    rerank::apply_final_scores(m, alpha, cfg.nil_threshold);

  // Assemble, assign classes, drop the unclassifiable.
  std::vector<postprocess::LinkedMention> out;
  for (std::size_t i = 0; i < lms.size(); ++i) {
    const linker::LinkMention& m = lms[i];
    postprocess::LinkedMention lm;
    lm.doc_id = doc.doc_id;
    lm.tok_begin = m.begin;
    lm.tok_end = m.end;
    lm.start = tokens[m.begin].start;
    lm.end = tokens[m.end - 1].end;
    lm.surface = m.surface;
    if (!m.nil) {
      lm.entity = m.candidates.front().entity;
      lm.confidence = std::clamp(m.candidates.front().final_score, 1e-4, 1.0);
    } else {
      lm.confidence = 0.5;
    }
    std::optional<kb::Klass> klass =
        postprocess::assign_class(lm.entity, art.kb, resolved[i].ner_class);
    if (!klass) {
      if (report) ++report->dropped_no_class;
      continue;
    }
    lm.klass = *klass;
    lm.mention_type = resolved[i].ner_class && ner::is_nominal(*resolved[i].ner_class)
                          ? postprocess::MentionType::NOM
                          : postprocess::MentionType::NAM;
    if (report) ++(m.nil ? report->nil_mentions : report->linked_mentions);
    out.push_back(std::move(lm));
  }

  if (cfg.coref) {
    std::vector<postprocess::LinkedMention> added =
        postprocess::coref_by_string(out, tokens, doc.doc_id);
    if (report) report->coref_additions += added.size();
    out.insert(out.end(), added.begin(), added.end());
  }
  if (cfg.nominals) {
    std::vector<postprocess::LinkedMention> added =
        postprocess::discover_nominals(tokens, out, art.kb, doc.doc_id);
    if (report) report->nominal_additions += added.size();
    out.insert(out.end(), added.begin(), added.end());
  }

  std::sort(out.begin(), out.end(),
            [](const postprocess::LinkedMention& a, const postprocess::LinkedMention& b) {
              if (a.start != b.start) return a.start < b.start;
              return a.end < b.end;
            });
  if (report) {
    ++report->documents;
    report->emitted_mentions += out.size();
  }
  return out;
}

Report run_pipeline(const Config& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  Artifacts art = load_artifacts(cfg);

  std::vector<kb::CorpusDocument> docs;
  try {
    docs = kb::read_corpus_jsonl(cfg.input_path);
  } catch (const std::exception& e) {
    throw DataError(e.what());
  }

  std::size_t workers = std::max<std::size_t>(1, cfg.workers);
  workers = std::min(workers, std::max<std::size_t>(1, docs.size()));

  std::vector<std::vector<postprocess::LinkedMention>> results(docs.size());
  std::vector<Report> reports(workers);
  std::atomic<std::size_t> next{0};
  std::vector<std::string> errors(workers);

  auto worker = [&](std::size_t w) {
    try {
      for (std::size_t i = next.fetch_add(1); i < docs.size(); i = next.fetch_add(1))
        results[i] = process_document(docs[i], cfg, art, &reports[w]);
    } catch (const std::exception& e) {
      errors[w] = e.what();
    }
  };
  if (workers == 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(worker, w);
    for (std::thread& t : threads) t.join();
  }
  for (const std::string& err : errors)
    if (!err.empty()) throw DataError(err);

  Report report;
  for (const Report& r : reports) {
    report.documents += r.documents;
    report.dict_matches += r.dict_matches;
    report.ner_mentions += r.ner_mentions;
    report.resolved_mentions += r.resolved_mentions;
    report.linked_mentions += r.linked_mentions;
    report.nil_mentions += r.nil_mentions;
    report.coref_additions += r.coref_additions;
    report.nominal_additions += r.nominal_additions;
    report.dropped_no_class += r.dropped_no_class;
    report.emitted_mentions += r.emitted_mentions;
  }

  std::vector<postprocess::LinkedMention> all;
  all.reserve(report.emitted_mentions);
  for (std::vector<postprocess::LinkedMention>& r : results)
    all.insert(all.end(), std::make_move_iterator(r.begin()),
               std::make_move_iterator(r.end()));
  postprocess::cluster_nils(all);

  std::ofstream out(cfg.output_path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + cfg.output_path);
  postprocess::write_output(out, cfg.run_id, all);

  report.elapsed_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
  return report;
}

rerank::RerankModel train_reranker_from_corpus(
    const std::vector<kb::CorpusDocument>& corpus, const Artifacts& art,
    const Config& cfg, const rerank::RerankTrainOptions& opt) {
  rerank::FeatureSpec spec;  // candidate mode

  auto link_document = [&](const kb::CorpusDocument& doc) {
    std::vector<text::Token> tokens = text::tokenize(doc.text, cfg.tokenize_mode);
    std::vector<mention::Mention> dict_mentions;
    for (const fstdict::DictMatch& dm : art.automaton.find_all(tokens)) {
      const kb::MentionEntry* entry = art.kb.find(dm.surface);
      if (!entry) continue;
      mention::Mention m;
      m.begin = dm.begin;
      m.end = dm.end;
      m.surface = dm.surface;
      m.ld = entry->link_density();
      m.lc = entry->link_count;
      dict_mentions.push_back(std::move(m));
    }
    mention::Classified classified =
        mention::classify_mentions(std::move(dict_mentions), cfg.thresholds);
    std::vector<mention::Mention> resolved = mention::resolve_overlaps(
        classified.proper, {}, mention::OverlapMode::DictOnly);

    std::vector<linker::LinkMention> lms(resolved.size());
    for (std::size_t i = 0; i < resolved.size(); ++i) {
      lms[i].begin = resolved[i].begin;
      lms[i].end = resolved[i].end;
      lms[i].surface = resolved[i].surface;
      if (const kb::MentionEntry* entry = art.kb.find(resolved[i].surface))
        linker::init_candidates(lms[i], *entry);
    }
    linker::expand_candidates(lms);
    linker::disambiguate_document(lms, art.kb, cfg.window, cfg.step);

    std::vector<rerank::TrainMention> out;
    for (const linker::LinkMention& m : lms) {
      std::size_t start = tokens[m.begin].start;
      std::size_t end = tokens[m.end - 1].end;
      rerank::TrainMention tm;
      tm.surface = m.surface;
      tm.candidates = m.candidates;
      for (const kb::Anchor& a : doc.anchors) {
        if (a.start < end && start < a.end) {
          tm.gold = a.entity;
          break;
        }
      }
      out.push_back(std::move(tm));
    }
    return out;
  };

  // Every fifth document is held out for the alpha grid search.
  std::vector<rerank::TrainMention> train_mentions;
  std::vector<rerank::TrainMention> val_mentions;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    std::vector<rerank::TrainMention> ms = link_document(corpus[i]);
    bool validation = corpus.size() >= 5 && i % 5 == 4;
    auto& dst = validation ? val_mentions : train_mentions;
    dst.insert(dst.end(), std::make_move_iterator(ms.begin()),
               std::make_move_iterator(ms.end()));
  }

  std::vector<rerank::TrainingExample> examples =
      rerank::build_training_set(train_mentions, art.kb, spec);
  rerank::RerankModel model = rerank::train_reranker(examples, spec, opt);

  std::vector<rerank::ValidationMention> valset;
  for (const rerank::TrainMention& tm : val_mentions.empty() ? train_mentions
                                                             : val_mentions) {
    if (!tm.gold || tm.candidates.empty()) continue;
    rerank::ValidationMention vm;
    for (const linker::Candidate& c : tm.candidates) {
      auto tit = art.kb.titles.find(c.entity);
      double jac =
          tit != art.kb.titles.end() ? rerank::jaccard(tit->second, tm.surface) : 0.0;
      neuro::Example f = rerank::make_features(jac, c.rank_value, c.commonness, spec);
      vm.push_back({c.rank_value, rerank::rerank_probability(model, f),
                    c.entity == *tm.gold});
    }
    valset.push_back(std::move(vm));
  }
  if (!valset.empty()) {
    rerank::GridResult grid = rerank::grid_search_alpha({valset});
    model.alpha = grid.alpha;
  }
  return model;
}

}  // namespace ugglan::pipeline
