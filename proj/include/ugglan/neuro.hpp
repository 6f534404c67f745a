#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ugglan/fofe.hpp"

namespace ugglan::neuro {

// One sparse vector per input slot, in the order given by the projection
// specs (a projection with N slots consumes N consecutive vectors).
using Example = std::vector<fofe::SparseVec>;

struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> v;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c, 0.0) {}
  double* row(std::size_t i) { return v.data() + i * cols; }
  const double* row(std::size_t i) const { return v.data() + i * cols; }
  double& at(std::size_t i, std::size_t j) { return v[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return v[i * cols + j]; }
  void zero() { std::fill(v.begin(), v.end(), 0.0); }
};

// A weight matrix shared by `slots` sparse input vectors; each slot's
// product contributes output_dim columns to the concatenated dense input.
struct ProjectionSpec {
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;
  std::size_t slots = 1;
};

struct NetConfig {
  std::vector<ProjectionSpec> projections;
  std::vector<std::size_t> hidden;  // unit counts, e.g. {512, 512, 512}
  std::size_t outputs = 2;          // 1 selects a sigmoid head, else softmax
  double leak = 0.01;               // leaky-ReLU negative slope
  bool batch_norm = true;

  std::size_t concat_dim() const;
  std::size_t total_slots() const;
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Feed-forward classifier: sparse projections, hidden stack with
// batch normalization and leaky-ReLU, softmax or sigmoid head.
class Net {
 public:
  Net() = default;
  static Net init(const NetConfig& cfg, std::uint64_t seed);

  const NetConfig& config() const { return cfg_; }
  std::size_t param_count() const { return params_.size(); }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  std::vector<double>& running_stats() { return running_; }
  const std::vector<double>& running_stats() const { return running_; }
  AdamConfig& adam() { return adam_; }
  const AdamConfig& adam() const { return adam_; }

  // Inference-mode probabilities, one row per example.
  Matrix predict(std::span<const Example* const> batch) const;

  // Mean loss over the batch and the gradient w.r.t. all parameters.
  // Train-mode forward: batch statistics for batch norm, optional dropout
  // with a deterministic per-call mask seed.
  double loss_and_grad(std::span<const Example* const> batch,
                       std::span<const int> labels, double dropout,
                       std::uint64_t dropout_seed, std::vector<double>& grad,
                       bool update_running = true);

  // Loss only, for finite-difference checks; same semantics as above.
  double loss(std::span<const Example* const> batch, std::span<const int> labels,
              bool train_mode, double dropout = 0.0,
              std::uint64_t dropout_seed = 0);

  // Direct access to a projection matrix (rows = input_dim).
  std::size_t projection_offset(std::size_t index) const;

 private:
  NetConfig cfg_;
  AdamConfig adam_;
  std::vector<double> params_;
  std::vector<double> running_;  // per batch-norm layer: means then variances

  friend struct NetAccess;
};

struct TrainConfig {
  double lr_start = 0.1024;
  double lr_end = 0.0064;
  double dropout_start = 0.4096;
  double dropout_end = 0.1024;
  std::size_t epochs = 160;
  std::size_t batch_size = 512;
  double l2 = 0.0;
  std::uint64_t seed = 1;
};

double lr_at(const TrainConfig& cfg, std::size_t epoch);
double dropout_at(const TrainConfig& cfg, std::size_t epoch);

// Supplies the epoch's examples; called once per epoch so negative samples
// can be re-drawn. Returned pointers must stay valid for the epoch.
struct EpochData {
  std::vector<const Example*> xs;
  std::vector<int> ys;
};
using Sampler = std::function<EpochData(std::size_t epoch, std::mt19937_64& rng)>;

// ADAM training with per-epoch shuffling and linear lr/dropout decay.
// Returns the per-epoch mean loss trace. Throws on non-finite loss.
std::vector<double> train(Net& net, const TrainConfig& cfg, const Sampler& sampler);

// Model persistence: "UGNN1" header, config JSON, caller-supplied metadata
// JSON, raw little-endian doubles.
void save_model(const Net& net, const std::string& path, const std::string& extra_json);
Net load_model(const std::string& path, std::string* extra_json = nullptr);

// Plain-text embeddings: "word v1 v2 ..." per line; the first max_words
// lines are kept. Unknown words map to the UNK row, or to the distinct unk
// row when the word equals its own lowercased form.
struct EmbeddingTable {
  std::vector<std::string> words;
  Matrix weights;  // words.size() + 2 rows
  std::size_t unk_row = 0;        // unknown, case-distinct word
  std::size_t unk_lower_row = 0;  // unknown word equal to its lowercase form

  std::map<std::string, std::size_t> index;

  std::size_t lookup(const std::string& word) const;
};

EmbeddingTable load_embeddings(const std::string& path, std::size_t max_words = 100000);

}  // namespace ugglan::neuro
