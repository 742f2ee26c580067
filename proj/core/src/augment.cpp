#include "lamp/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "lamp/error.hpp"

namespace lamp {
namespace {

void check_ratio(double ratio, const char* op) {
  if (!(ratio >= 0.0 && ratio < 1.0)) {
    throw ArgumentError(std::string(op) + ": ratio must lie in [0, 1), got " + std::to_string(ratio));
  }
}

std::uint64_t edge_key(int u, int v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(v);
}

}  // namespace

std::string_view to_string(Augmentation a) noexcept {
  switch (a) {
    case Augmentation::Identity: return "identity";
    case Augmentation::NodeDrop: return "node_drop";
    case Augmentation::EdgePerturb: return "edge_perturb";
    case Augmentation::Subgraph: return "subgraph";
  }
  return "unknown";
}

std::optional<Augmentation> parse_augmentation(std::string_view name) noexcept {
  if (name == "identity") return Augmentation::Identity;
  if (name == "node_drop") return Augmentation::NodeDrop;
  if (name == "edge_perturb") return Augmentation::EdgePerturb;
  if (name == "subgraph") return Augmentation::Subgraph;
  return std::nullopt;
}

Graph augment_node_drop(const Graph& graph, double ratio, Rng& rng) {
  check_ratio(ratio, "augment_node_drop");
  const int n = graph.node_count();
  int drop = static_cast<int>(std::floor(ratio * n));
  drop = std::min(drop, n - 1);
  if (drop <= 0) return graph;
  const auto dropped = rng.sample_without_replacement(n, drop);
  std::vector<int> keep;
  keep.reserve(n - drop);
  std::size_t d = 0;
  for (int v = 0; v < n; ++v) {
    if (d < dropped.size() && dropped[d] == static_cast<std::size_t>(v)) {
      ++d;
      continue;
    }
    keep.push_back(v);
  }
  return graph.induced_subgraph(std::move(keep));
}

Graph augment_edge_perturb(const Graph& graph, double ratio, Rng& rng) {
  check_ratio(ratio, "augment_edge_perturb");
  const auto actions = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(graph.edge_count())));
  if (actions == 0) return graph;

  const int n = graph.node_count();
  const std::uint64_t max_edges = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  std::vector<Edge> edges = graph.edges();
  std::unordered_set<std::uint64_t> present;
  present.reserve(edges.size() * 2 + actions);
  for (const Edge& e : edges) present.insert(edge_key(e.u, e.v));

  for (std::size_t a = 0; a < actions; ++a) {
    if (rng.coin()) {
      if (edges.empty()) continue;
      const std::size_t i = rng.uniform_index(edges.size());
      present.erase(edge_key(edges[i].u, edges[i].v));
      edges[i] = edges.back();
      edges.pop_back();
    } else {
      if (present.size() >= max_edges) continue;
      // Rejection sampling; expected tries stay small unless the graph is nearly complete.
      if (present.size() * 2 <= max_edges) {
        for (;;) {
          const int u = static_cast<int>(rng.uniform_index(n));
          const int v = static_cast<int>(rng.uniform_index(n));
          if (u == v || present.count(edge_key(u, v))) continue;
          present.insert(edge_key(u, v));
          edges.push_back({std::min(u, v), std::max(u, v)});
          break;
        }
      } else {
        std::vector<Edge> absent;
        for (int u = 0; u < n; ++u)
          for (int v = u + 1; v < n; ++v)
            if (!present.count(edge_key(u, v))) absent.push_back({u, v});
        const Edge e = absent[rng.uniform_index(absent.size())];
        present.insert(edge_key(e.u, e.v));
        edges.push_back(e);
      }
    }
  }
  return Graph(n, std::move(edges), graph.features(), graph.label());
}

Graph augment_subgraph(const Graph& graph, double ratio, Rng& rng) {
  check_ratio(ratio, "augment_subgraph");
  const int n = graph.node_count();
  const int target = std::clamp(static_cast<int>(std::ceil(ratio * n)), 1, n);
  if (target == n) return graph;

  std::vector<std::vector<int>> adj(n);
  for (const Edge& e : graph.edges()) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  // Component id and size, so an exhausted component triggers a restart.
  std::vector<int> comp(n, -1);
  std::vector<int> comp_size;
  for (int s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    const int id = static_cast<int>(comp_size.size());
    comp_size.push_back(0);
    std::vector<int> stack{s};
    comp[s] = id;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      ++comp_size[id];
      for (int w : adj[v])
        if (comp[w] < 0) {
          comp[w] = id;
          stack.push_back(w);
        }
    }
  }

  std::vector<char> visited(n, 0);
  std::vector<int> visited_in_comp(comp_size.size(), 0);
  std::vector<int> keep;
  keep.reserve(target);
  auto visit = [&](int v) {
    if (!visited[v]) {
      visited[v] = 1;
      ++visited_in_comp[comp[v]];
      keep.push_back(v);
    }
  };
  auto restart = [&]() {
    std::vector<int> pool;
    for (int v = 0; v < n; ++v)
      if (!visited[v]) pool.push_back(v);
    return pool[rng.uniform_index(pool.size())];
  };

  int current = static_cast<int>(rng.uniform_index(n));
  visit(current);
  while (static_cast<int>(keep.size()) < target) {
    if (visited_in_comp[comp[current]] == comp_size[comp[current]]) {
      current = restart();
    } else {
      const auto& nbrs = adj[current];
      current = nbrs[rng.uniform_index(nbrs.size())];
    }
    visit(current);
  }
  return graph.induced_subgraph(std::move(keep));
}

Graph augment(const Graph& graph, Augmentation kind, double ratio, Rng& rng) {
  switch (kind) {
    case Augmentation::Identity: return graph;
    case Augmentation::NodeDrop: return augment_node_drop(graph, ratio, rng);
    case Augmentation::EdgePerturb: return augment_edge_perturb(graph, ratio, rng);
    case Augmentation::Subgraph: return augment_subgraph(graph, ratio, rng);
  }
  throw ArgumentError("unknown augmentation");
}

}  // namespace lamp
