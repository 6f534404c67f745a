#include "ugglan/rerank.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "ugglan/fstdict.hpp"
#include "ugglan/text.hpp"

namespace ugglan::rerank {

double jaccard(const std::string& title, const std::string& mention) {
  auto tokens_of = [](const std::string& s) {
    std::set<std::string> out;
    for (const std::string& t : fstdict::split_surface(s))
      out.insert(text::ascii_lower(t));
    return out;
  };
  std::set<std::string> a = tokens_of(title), b = tokens_of(mention);
  if (a.empty() && b.empty()) return 0.0;
  std::size_t inter = 0;
  for (const std::string& t : a) inter += b.count(t);
  return static_cast<double>(inter) / (a.size() + b.size() - inter);
}

int quantize(double v, int bins) {
  if (v <= 0.0) return 0;
  if (v >= 1.0) return bins - 1;
  int b = static_cast<int>(v * bins);
  return b >= bins ? bins - 1 : b;
}

neuro::Example make_features(double jac, double rv, double commonness,
                             const FeatureSpec& spec,
                             const fofe::SparseVec* left_ctx,
                             const fofe::SparseVec* right_ctx) {
  neuro::Example ex;
  for (double v : {jac, rv, commonness}) {
    fofe::SparseVec one_hot;
    one_hot.dim = spec.bins;
    one_hot.items.emplace_back(quantize(v, spec.bins), 1.0);
    ex.push_back(std::move(one_hot));
  }
  if (spec.context) {
    fofe::SparseVec empty;
    empty.dim = static_cast<int>(spec.vocab_dim);
    ex.push_back(left_ctx ? *left_ctx : empty);
    ex.push_back(right_ctx ? *right_ctx : empty);
  }
  return ex;
}

std::pair<fofe::SparseVec, fofe::SparseVec> context_vectors(
    const std::vector<int>& left_ids, const std::vector<int>& right_ids,
    std::size_t vocab_dim, double alpha) {
  std::vector<int> rev(right_ids.rbegin(), right_ids.rend());
  return {fofe::encode(left_ids, alpha, static_cast<int>(vocab_dim)),
          fofe::encode(rev, alpha, static_cast<int>(vocab_dim))};
}

std::vector<TrainingExample> build_training_set(
    const std::vector<TrainMention>& mentions, const kb::KnowledgeBase& kb,
    const FeatureSpec& spec) {
  std::vector<TrainingExample> out;
  for (const TrainMention& m : mentions) {
    if (!m.gold) continue;

    std::size_t gold_rank = m.candidates.size();
    for (std::size_t i = 0; i < m.candidates.size(); ++i) {
      if (m.candidates[i].entity == *m.gold) {
        gold_rank = i;
        break;
      }
    }
    std::size_t take = std::min<std::size_t>(3, m.candidates.size());
    if (gold_rank < m.candidates.size()) take = std::max(take, gold_rank + 1);

    fofe::SparseVec lctx, rctx;
    if (spec.context) {
      auto [l, r] = context_vectors(m.left_ids, m.right_ids, spec.vocab_dim,
                                    spec.context_alpha);
      lctx = std::move(l);
      rctx = std::move(r);
    }
    for (std::size_t i = 0; i < take; ++i) {
      const linker::Candidate& c = m.candidates[i];
      auto tit = kb.titles.find(c.entity);
      double jac = tit != kb.titles.end() ? jaccard(tit->second, m.surface) : 0.0;
      TrainingExample ex;
      ex.features = make_features(jac, c.rank_value, c.commonness, spec,
                                  spec.context ? &lctx : nullptr,
                                  spec.context ? &rctx : nullptr);
      ex.label = i == gold_rank ? 1 : 0;
      out.push_back(std::move(ex));
    }
  }
  return out;
}

RerankModel train_reranker(const std::vector<TrainingExample>& examples,
                           const FeatureSpec& spec,
                           const RerankTrainOptions& opt,
                           std::vector<double>* loss_trace) {
  if (examples.empty()) throw std::invalid_argument("reranker: no training examples");

  neuro::NetConfig cfg;
  cfg.projections.push_back({static_cast<std::size_t>(spec.bins), opt.block_proj, 3});
  if (spec.context)
    cfg.projections.push_back({spec.vocab_dim, opt.ctx_proj, 2});
  std::size_t width = spec.context ? 128 : 64;
  cfg.hidden = {width, width, width};
  cfg.outputs = 1;

  RerankModel model;
  model.spec = spec;
  model.net = neuro::Net::init(cfg, opt.init_seed);

  neuro::Sampler sampler = [&](std::size_t, std::mt19937_64&) {
    neuro::EpochData data;
    data.xs.reserve(examples.size());
    data.ys.reserve(examples.size());
    for (const TrainingExample& ex : examples) {
      data.xs.push_back(&ex.features);
      data.ys.push_back(ex.label);
    }
    return data;
  };
  std::vector<double> trace = neuro::train(model.net, opt.train, sampler);
  if (loss_trace) *loss_trace = std::move(trace);
  return model;
}

void save_rerank_model(const RerankModel& model, const std::string& path) {
  nlohmann::json extra;
  extra["kind"] = "rerank";
  extra["bins"] = model.spec.bins;
  extra["context"] = model.spec.context;
  extra["vocab_dim"] = model.spec.vocab_dim;
  extra["context_alpha"] = model.spec.context_alpha;
  extra["alpha"] = model.alpha;
  neuro::save_model(model.net, path, extra.dump());
}

RerankModel load_rerank_model(const std::string& path) {
  std::string extra_json;
  RerankModel model;
  model.net = neuro::load_model(path, &extra_json);
  nlohmann::json extra = nlohmann::json::parse(extra_json);
  if (extra.value("kind", "") != "rerank")
    throw std::runtime_error(path + ": not a reranker model");
  model.spec.bins = extra.at("bins").get<int>();
  model.spec.context = extra.at("context").get<bool>();
  model.spec.vocab_dim = extra.at("vocab_dim").get<std::size_t>();
  model.spec.context_alpha = extra.at("context_alpha").get<double>();
  model.alpha = extra.at("alpha").get<double>();
  return model;
}

double rerank_probability(const RerankModel& model, const neuro::Example& features) {
  const neuro::Example* ptr = &features;
  neuro::Matrix probs = model.net.predict(std::span<const neuro::Example* const>(&ptr, 1));
  return probs.at(0, 0);
}

double final_score(double rv, double rrs, double alpha) {
  rrs = std::clamp(rrs, 1e-6, 1.0);
  return rv * std::pow(rrs, alpha);
}

GridResult grid_search_alpha(
    const std::vector<std::vector<ValidationMention>>& per_model,
    const std::vector<double>& alphas) {
  if (per_model.empty() || alphas.empty())
    throw std::invalid_argument("grid search: empty validation set");
  for (const auto& set : per_model)
    if (set.empty()) throw std::invalid_argument("grid search: empty validation set");

  GridResult best;
  bool first = true;
  for (std::size_t m = 0; m < per_model.size(); ++m) {
    for (double alpha : alphas) {
      std::size_t correct = 0;
      for (const ValidationMention& mention : per_model[m]) {
        if (mention.empty()) continue;
        std::size_t argmax = 0;
        double top = -1.0;
        for (std::size_t i = 0; i < mention.size(); ++i) {
          double s = final_score(mention[i].rv, mention[i].rrs, alpha);
          if (s > top) {
            top = s;
            argmax = i;
          }
        }
        if (mention[argmax].gold) ++correct;
      }
      double acc = static_cast<double>(correct) / per_model[m].size();
      // Strict improvement only: ties keep the smaller alpha and the
      // earlier model (alphas scan inner, models outer).
      if (first || acc > best.accuracy) {
        best = {alpha, m, acc};
        first = false;
      }
    }
  }
  return best;
}

void apply_final_scores(linker::LinkMention& mention, double alpha,
                        double nil_threshold) {
  if (mention.candidates.empty()) {
    mention.nil = true;
    return;
  }
  for (linker::Candidate& c : mention.candidates)
    c.final_score = final_score(c.rank_value, c.rerank_score, alpha);
  std::stable_sort(mention.candidates.begin(), mention.candidates.end(),
                   [](const linker::Candidate& a, const linker::Candidate& b) {
                     if (a.final_score != b.final_score)
                       return a.final_score > b.final_score;
                     return a.entity < b.entity;
                   });
  mention.nil = mention.candidates.front().final_score < nil_threshold;
}

}  // namespace ugglan::rerank
