#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lamp/tensor.hpp"

namespace lamp {

/// Undirected edge; canonical form has u < v.
struct Edge {
  int u = 0;
  int v = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Immutable simple undirected graph with node features and an optional class label.
///
/// Construction canonicalizes edges to u < v and sorts them. Self-loops,
/// duplicate pairs, out-of-range endpoints and a feature matrix whose row
/// count differs from node_count are rejected with ArgumentError.
class Graph {
 public:
  Graph(int node_count, std::vector<Edge> edges, Tensor features,
        std::optional<int> label = std::nullopt);

  int node_count() const noexcept { return node_count_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const Tensor& features() const noexcept { return features_; }
  std::size_t feature_dim() const noexcept { return features_.cols(); }
  std::optional<int> label() const noexcept { return label_; }

  std::vector<int> degrees() const;

  Graph with_features(Tensor features) const;

  /// Induced subgraph on `keep` (node indices, any order); nodes are re-indexed
  /// in ascending original order and feature rows follow them.
  Graph induced_subgraph(std::vector<int> keep) const;

  /// Relabel node i as perm[i].
  Graph permuted(const std::vector<int>& perm) const;

 private:
  int node_count_;
  std::vector<Edge> edges_;
  Tensor features_;
  std::optional<int> label_;
};

struct DatasetMetadata {
  /// original_labels[k] is the raw label value mapped to class index k.
  std::vector<std::int64_t> original_labels;
  /// Raw node label values, in one-hot column order. Empty when absent.
  std::vector<std::int64_t> node_label_values;
  bool has_node_labels = false;
  /// Cap used by featurize_degrees, 0 when degree features were never applied.
  int degree_cap = 0;
  std::string source_dir;
};

struct Dataset {
  std::string name;
  std::vector<Graph> graphs;
  int num_classes = 0;
  std::size_t feature_dim = 0;
  DatasetMetadata metadata;
};

/// Throws ArgumentError when graphs disagree on feature_dim or a label is out of range.
void validate_dataset(const Dataset& dataset);

/// Replaces node features with one-hot(min(degree, max_degree)) over max_degree + 1 bins.
Dataset featurize_degrees(const Dataset& dataset, int max_degree);

/// Disjoint union of graphs for a single forward pass.
struct GraphBatch {
  int total_nodes = 0;
  std::vector<Edge> edges;       ///< endpoints shifted by each member's node offset
  Tensor features;               ///< stacked [total_nodes x feature_dim]
  std::vector<int> graph_ids;    ///< per node, in [0, batch_size)
  std::vector<int> node_offsets; ///< batch_size + 1 prefix sums
  int batch_size = 0;
};

GraphBatch make_batch(const std::vector<const Graph*>& graphs);
GraphBatch make_batch(const std::vector<Graph>& graphs);

/// Splits a batch back into member graphs (labels are not carried by batches).
std::vector<Graph> unbatch(const GraphBatch& batch);

/// Sum of node degrees, always 2 * edge_count.
std::int64_t volume(const Graph& graph);

// Small fixtures used by tests, examples and benchmarks.
Graph make_complete_graph(int n, std::size_t feature_dim = 1);
Graph make_star_graph(int leaves, std::size_t feature_dim = 1);
Graph make_path_graph(int n, std::size_t feature_dim = 1);
Graph make_cycle_graph(int n, std::size_t feature_dim = 1);

}  // namespace lamp
