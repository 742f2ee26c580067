#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "lamp/autodiff.hpp"
#include "lamp/graph.hpp"
#include "lamp/pruning.hpp"
#include "lamp/rng.hpp"

namespace lamp {

enum class Readout { Sum, Mean };

std::string_view to_string(Readout r) noexcept;
std::optional<Readout> parse_readout(std::string_view name) noexcept;

/// GIN update: H' = ReLU(W2 ReLU(W1 ((1 + eps) H + sum_{u in N(v)} H_u) + b1) + b2).
///
/// Weights are stored [out x in], so each row is one output neuron.
struct GinLayer {
  Parameter w1;
  Parameter b1;
  Parameter w2;
  Parameter b2;
  double eps = 0.0;
};

/// Stack of GIN layers; node embeddings are the post-activation output of the last layer.
class Encoder {
 public:
  Encoder() = default;
  /// Xavier-uniform weights drawn from `rng`, zero biases. num_layers must be >= 2.
  Encoder(std::size_t input_dim, std::size_t hidden_dim, std::size_t num_layers, Rng& rng);

  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t hidden_dim() const noexcept { return hidden_dim_; }
  std::size_t num_layers() const noexcept { return layers_.size(); }

  std::vector<GinLayer>& layers() noexcept { return layers_; }
  const std::vector<GinLayer>& layers() const noexcept { return layers_; }

  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
  /// w1, w2 of every layer, in layer order. These are what masks cover.
  std::vector<const Parameter*> prunable_weights() const;

 private:
  std::size_t input_dim_ = 0;
  std::size_t hidden_dim_ = 0;
  std::vector<GinLayer> layers_;
};

/// Two-layer perceptron g(h) = W2 ReLU(W1 h + b1) + b2, shared by both branches.
struct ProjectionHead {
  Parameter w1;
  Parameter b1;
  Parameter w2;
  Parameter b2;

  ProjectionHead() = default;
  ProjectionHead(std::size_t hidden_dim, Rng& rng);

  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
};

/// Xavier-uniform matrix [fan_out x fan_in].
Tensor xavier_uniform(std::size_t fan_out, std::size_t fan_in, Rng& rng);

/// Node embeddings [total_nodes x hidden] recorded on `tape`. With a mask the
/// layer weights are replaced by mask (.) W; without one the raw weights are used.
Var encode(Encoder& encoder, const GraphBatch& batch, const PruneMask* mask, Tape& tape);
/// Inference-mode node embeddings (no gradients).
Tensor encode(const Encoder& encoder, const GraphBatch& batch, const PruneMask* mask = nullptr);

/// Per-graph pooling of node embeddings, [batch_size x hidden].
Var readout(Var node_embeds, const GraphBatch& batch, Readout kind = Readout::Sum);

Var project(ProjectionHead& head, Var graph_embeds);
Tensor project(const ProjectionHead& head, const Tensor& graph_embeds);

}  // namespace lamp
