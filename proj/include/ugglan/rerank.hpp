#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ugglan/kb.hpp"
#include "ugglan/linker.hpp"
#include "ugglan/neuro.hpp"

namespace ugglan::rerank {

// Token-set Jaccard over case-folded surfaces.
double jaccard(const std::string& title, const std::string& mention);

// Bin index for v in [0,1]; values outside are clamped.
int quantize(double v, int bins);

struct FeatureSpec {
  int bins = 32;
  bool context = false;        // appends left/right context FOFE vectors
  std::size_t vocab_dim = 0;   // context vocabulary size (context mode)
  double context_alpha = 0.5;
};

// Three one-hot blocks (Jaccard, RV, commonness), plus left/right context
// FOFE vectors in context mode.
neuro::Example make_features(double jac, double rv, double commonness,
                             const FeatureSpec& spec,
                             const fofe::SparseVec* left_ctx = nullptr,
                             const fofe::SparseVec* right_ctx = nullptr);

// Left-to-right FOFE of the left context ids and right-to-left FOFE of the
// right context ids, mention tokens excluded by construction.
std::pair<fofe::SparseVec, fofe::SparseVec> context_vectors(
    const std::vector<int>& left_ids, const std::vector<int>& right_ids,
    std::size_t vocab_dim, double alpha);

struct TrainingExample {
  neuro::Example features;
  int label = 0;
};

struct TrainMention {
  std::string surface;
  std::vector<linker::Candidate> candidates;  // ranked by the disambiguator
  std::optional<kb::EntityId> gold;           // nullopt: no gold overlap
  std::vector<int> left_ids, right_ids;       // context mode only
};

// Top-3 candidates per gold-overlapping mention, extended down to the gold
// candidate's rank when it sits below 3. Mentions whose gold entity is
// missing from the candidates contribute negatives only; mentions without
// gold overlap are dropped.
std::vector<TrainingExample> build_training_set(
    const std::vector<TrainMention>& mentions, const kb::KnowledgeBase& kb,
    const FeatureSpec& spec);

struct RerankModel {
  neuro::Net net;
  FeatureSpec spec;
  double alpha = 1.0;  // exponent picked by grid search
};

struct RerankTrainOptions {
  neuro::TrainConfig train;
  std::size_t block_proj = 16;  // projection width per one-hot block
  std::size_t ctx_proj = 32;    // projection width per context vector
  std::uint64_t init_seed = 1;
};

RerankModel train_reranker(const std::vector<TrainingExample>& examples,
                           const FeatureSpec& spec,
                           const RerankTrainOptions& opt,
                           std::vector<double>* loss_trace = nullptr);

void save_rerank_model(const RerankModel& model, const std::string& path);
RerankModel load_rerank_model(const std::string& path);

// Predicted probability for one candidate's feature row.
double rerank_probability(const RerankModel& model, const neuro::Example& features);

// rv * rrs^alpha with rrs clamped into [1e-6, 1].
double final_score(double rv, double rrs, double alpha);

inline std::vector<double> default_alphas() {
  return {0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
}

struct ValidationCandidate {
  double rv = 0.0;
  double rrs = 1.0;
  bool gold = false;
};
using ValidationMention = std::vector<ValidationCandidate>;

struct GridResult {
  double alpha = 0.0;
  std::size_t model = 0;  // index into per_model
  double accuracy = 0.0;
};

// Linking accuracy (gold at final rank 1) per alpha per model; ties prefer
// the smaller alpha, then the earlier model.
GridResult grid_search_alpha(
    const std::vector<std::vector<ValidationMention>>& per_model,
    const std::vector<double>& alphas = default_alphas());

// Recomputes final scores, re-sorts the candidates, and sets the NIL flag
// when there are no candidates or the best final score is below the
// threshold. Candidate rerank_score fields must be set beforehand.
void apply_final_scores(linker::LinkMention& mention, double alpha,
                        double nil_threshold);

}  // namespace ugglan::rerank
