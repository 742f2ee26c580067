#pragma once

#include "lamp/graph.hpp"

namespace lamp {

/// One-level structural entropy in bits: -sum_v (d_v / vol) log2(d_v / vol).
///
/// Isolated nodes contribute 0. Throws DomainError for an edgeless graph,
/// where vol = 0 leaves the quantity undefined.
double structural_entropy(const Graph& graph);

/// 1 - H(augmented) / H(original). Positive values are information loss.
///
/// An edgeless `augmented` graph counts as total loss (1.0). The original
/// must have at least one edge.
double entropy_percent_change(const Graph& original, const Graph& augmented);

}  // namespace lamp
