#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lamp/encoder.hpp"
#include "lamp/graph.hpp"
#include "lamp/rng.hpp"

namespace lamp {

/// Frozen graph embeddings with their class labels, in dataset order.
struct EmbeddingSet {
  Tensor embeddings;
  std::vector<int> labels;
  std::string dataset_name;
  std::string checkpoint_id;
};

/// Dense-branch (unmasked) readout embeddings for every graph, computed in
/// chunks of `chunk` graphs without a tape. Every graph must carry a label.
EmbeddingSet embed_dataset(const Encoder& encoder, const Dataset& dataset,
                           Readout readout = Readout::Sum, std::size_t chunk = 256);

struct EvalOptions {
  int folds = 10;
  int repeats = 5;
  std::uint64_t seed = 0;
  int iterations = 500;
  double learning_rate = 0.1;
  double l2 = 1e-4;
};

struct EvalResult {
  /// folds * repeats accuracies in [0, 1], repeat-major.
  std::vector<double> fold_accuracies;
  double mean = 0.0;
  /// Population standard deviation of fold_accuracies.
  double std = 0.0;
  int folds = 0;
  int repeats = 0;
  std::vector<std::uint64_t> seeds;
};

/// Stratified split: result[f] holds the test indices of fold f. Each class is
/// shuffled and dealt round-robin, continuing the deal across classes.
std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<int>& labels, int folds, Rng& rng);

/// Column standardization fitted on a subset of rows.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const Tensor& x, const std::vector<std::size_t>& rows);
  Tensor apply(const Tensor& x, const std::vector<std::size_t>& rows) const;
};

/// Multinomial logistic regression trained by full-batch gradient descent.
class LogisticRegression {
 public:
  void fit(const Tensor& x, const std::vector<int>& y, int num_classes, int iterations,
           double learning_rate, double l2);
  std::vector<int> predict(const Tensor& x) const;

  const Tensor& weights() const noexcept { return w_; }

 private:
  Tensor w_;  // [classes x dim]
  Tensor b_;  // [1 x classes]
};

/// Repeated stratified k-fold accuracy of a standardized logistic-regression probe.
/// Throws StratificationError when a class is missing from some training split.
EvalResult kfold_eval(const EmbeddingSet& embeds, const EvalOptions& options);

/// `graph_index,label,e0..e{d-1}`
std::string embeddings_csv(const EmbeddingSet& embeds);
EmbeddingSet embeddings_from_csv(std::string_view csv, std::string dataset_name = {});

std::string eval_result_json(const EvalResult& result);

}  // namespace lamp
