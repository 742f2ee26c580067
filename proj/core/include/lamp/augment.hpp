#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "lamp/graph.hpp"
#include "lamp/rng.hpp"

namespace lamp {

enum class Augmentation { Identity, NodeDrop, EdgePerturb, Subgraph };

std::string_view to_string(Augmentation a) noexcept;
/// Accepts "identity", "node_drop", "edge_perturb", "subgraph".
std::optional<Augmentation> parse_augmentation(std::string_view name) noexcept;

/// Removes floor(ratio * n) uniformly chosen nodes (at most n - 1) with their edges.
Graph augment_node_drop(const Graph& graph, double ratio, Rng& rng);

/// floor(ratio * |E|) actions; each drops a uniform existing edge or adds a
/// uniform absent non-loop pair with probability 1/2. Impossible actions are skipped.
Graph augment_edge_perturb(const Graph& graph, double ratio, Rng& rng);

/// Random walk from a uniform start until ceil(ratio * n) distinct nodes are
/// visited, restarting at a uniform unvisited node when the current component
/// is exhausted. Returns the induced subgraph on the visited nodes.
Graph augment_subgraph(const Graph& graph, double ratio, Rng& rng);

Graph augment(const Graph& graph, Augmentation kind, double ratio, Rng& rng);

}  // namespace lamp
