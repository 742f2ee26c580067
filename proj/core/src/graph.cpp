#include "lamp/graph.hpp"

#include <algorithm>
#include <numeric>

#include "lamp/error.hpp"

namespace lamp {

Graph::Graph(int node_count, std::vector<Edge> edges, Tensor features, std::optional<int> label)
    : node_count_(node_count), edges_(std::move(edges)), features_(std::move(features)),
      label_(label) {
  if (node_count_ < 1) throw ArgumentError("graph must have at least one node");
  if (features_.rows() != static_cast<std::size_t>(node_count_)) {
    throw ArgumentError("feature rows (" + std::to_string(features_.rows()) +
                        ") differ from node_count (" + std::to_string(node_count_) + ")");
  }
  for (Edge& e : edges_) {
    if (e.u < 0 || e.v < 0 || e.u >= node_count_ || e.v >= node_count_) {
      throw ArgumentError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                          ") outside [0," + std::to_string(node_count_) + ")");
    }
    if (e.u == e.v) throw ArgumentError("self-loop on node " + std::to_string(e.u));
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    throw ArgumentError("duplicate edge in graph");
  }
}

std::vector<int> Graph::degrees() const {
  std::vector<int> deg(node_count_, 0);
  for (const Edge& e : edges_) {
    ++deg[e.u];
    ++deg[e.v];
  }
  return deg;
}

Graph Graph::with_features(Tensor features) const {
  return Graph(node_count_, edges_, std::move(features), label_);
}

Graph Graph::induced_subgraph(std::vector<int> keep) const {
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  if (keep.empty()) throw ArgumentError("induced_subgraph: empty node set");
  std::vector<int> remap(node_count_, -1);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] < 0 || keep[i] >= node_count_) throw ArgumentError("induced_subgraph: bad node");
    remap[keep[i]] = static_cast<int>(i);
  }
  std::vector<Edge> sub_edges;
  for (const Edge& e : edges_) {
    if (remap[e.u] >= 0 && remap[e.v] >= 0) sub_edges.push_back({remap[e.u], remap[e.v]});
  }
  Tensor sub_features(keep.size(), features_.cols());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    auto src = features_.row(keep[i]);
    std::copy(src.begin(), src.end(), sub_features.row(i).begin());
  }
  return Graph(static_cast<int>(keep.size()), std::move(sub_edges), std::move(sub_features), label_);
}

Graph Graph::permuted(const std::vector<int>& perm) const {
  if (perm.size() != static_cast<std::size_t>(node_count_)) {
    throw ArgumentError("permutation size mismatch");
  }
  std::vector<Edge> e2;
  e2.reserve(edges_.size());
  for (const Edge& e : edges_) e2.push_back({perm[e.u], perm[e.v]});
  Tensor f2(features_.rows(), features_.cols());
  for (int i = 0; i < node_count_; ++i) {
    auto src = features_.row(i);
    std::copy(src.begin(), src.end(), f2.row(perm[i]).begin());
  }
  return Graph(node_count_, std::move(e2), std::move(f2), label_);
}

void validate_dataset(const Dataset& dataset) {
  for (std::size_t i = 0; i < dataset.graphs.size(); ++i) {
    const Graph& g = dataset.graphs[i];
    if (g.feature_dim() != dataset.feature_dim) {
      throw ArgumentError("graph " + std::to_string(i) + " has feature_dim " +
                          std::to_string(g.feature_dim()) + ", dataset expects " +
                          std::to_string(dataset.feature_dim));
    }
    if (g.label() && (*g.label() < 0 || *g.label() >= dataset.num_classes)) {
      throw ArgumentError("graph " + std::to_string(i) + " label out of range");
    }
  }
}

Dataset featurize_degrees(const Dataset& dataset, int max_degree) {
  if (max_degree < 1) throw ArgumentError("featurize_degrees: max_degree must be >= 1");
  Dataset out = dataset;
  out.feature_dim = static_cast<std::size_t>(max_degree) + 1;
  out.metadata.degree_cap = max_degree;
  out.graphs.clear();
  out.graphs.reserve(dataset.graphs.size());
  for (const Graph& g : dataset.graphs) {
    Tensor f(g.node_count(), out.feature_dim);
    const auto deg = g.degrees();
    for (int v = 0; v < g.node_count(); ++v) f(v, std::min(deg[v], max_degree)) = 1.0;
    out.graphs.push_back(g.with_features(std::move(f)));
  }
  return out;
}

GraphBatch make_batch(const std::vector<const Graph*>& graphs) {
  if (graphs.empty()) throw ArgumentError("make_batch: empty graph list");
  const std::size_t dim = graphs.front()->feature_dim();
  GraphBatch batch;
  batch.batch_size = static_cast<int>(graphs.size());
  batch.node_offsets.reserve(graphs.size() + 1);
  batch.node_offsets.push_back(0);
  for (const Graph* g : graphs) {
    if (g->feature_dim() != dim) throw ArgumentError("make_batch: non-uniform feature_dim");
    batch.total_nodes += g->node_count();
    batch.node_offsets.push_back(batch.total_nodes);
  }
  batch.features = Tensor(batch.total_nodes, dim);
  batch.graph_ids.reserve(batch.total_nodes);
  auto dst = batch.features.values();
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    const Graph& g = *graphs[gi];
    const int off = batch.node_offsets[gi];
    for (const Edge& e : g.edges()) batch.edges.push_back({e.u + off, e.v + off});
    auto src = g.features().values();
    std::copy(src.begin(), src.end(), dst.begin() + static_cast<std::ptrdiff_t>(off) * dim);
    batch.graph_ids.insert(batch.graph_ids.end(), g.node_count(), static_cast<int>(gi));
  }
  return batch;
}

GraphBatch make_batch(const std::vector<Graph>& graphs) {
  std::vector<const Graph*> ptrs;
  ptrs.reserve(graphs.size());
  for (const Graph& g : graphs) ptrs.push_back(&g);
  return make_batch(ptrs);
}

std::vector<Graph> unbatch(const GraphBatch& batch) {
  std::vector<std::vector<Edge>> edges(batch.batch_size);
  for (const Edge& e : batch.edges) {
    const int gi = batch.graph_ids[e.u];
    const int off = batch.node_offsets[gi];
    edges[gi].push_back({e.u - off, e.v - off});
  }
  std::vector<Graph> out;
  out.reserve(batch.batch_size);
  const std::size_t dim = batch.features.cols();
  for (int gi = 0; gi < batch.batch_size; ++gi) {
    const int lo = batch.node_offsets[gi];
    const int n = batch.node_offsets[gi + 1] - lo;
    Tensor f(n, dim);
    for (int v = 0; v < n; ++v) {
      auto src = batch.features.row(lo + v);
      std::copy(src.begin(), src.end(), f.row(v).begin());
    }
    out.emplace_back(n, std::move(edges[gi]), std::move(f));
  }
  return out;
}

std::int64_t volume(const Graph& graph) { return 2 * static_cast<std::int64_t>(graph.edge_count()); }

Graph make_complete_graph(int n, std::size_t feature_dim) {
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.push_back({i, j});
  return Graph(n, std::move(e), Tensor(n, feature_dim, 1.0));
}

Graph make_star_graph(int leaves, std::size_t feature_dim) {
  std::vector<Edge> e;
  for (int i = 1; i <= leaves; ++i) e.push_back({0, i});
  return Graph(leaves + 1, std::move(e), Tensor(leaves + 1, feature_dim, 1.0));
}

Graph make_path_graph(int n, std::size_t feature_dim) {
  std::vector<Edge> e;
  for (int i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  return Graph(n, std::move(e), Tensor(n, feature_dim, 1.0));
}

Graph make_cycle_graph(int n, std::size_t feature_dim) {
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i) e.push_back({i, (i + 1) % n});
  return Graph(n, std::move(e), Tensor(n, feature_dim, 1.0));
}

}  // namespace lamp
