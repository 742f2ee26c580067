#include "lamp/entropy.hpp"

#include <cmath>

#include "lamp/error.hpp"

namespace lamp {

double structural_entropy(const Graph& graph) {
  const std::int64_t vol = volume(graph);
  if (vol == 0) throw DomainError("structural entropy undefined for an edgeless graph");
  const double inv_vol = 1.0 / static_cast<double>(vol);
  double h = 0.0;
  for (int d : graph.degrees()) {
    if (d == 0) continue;
    const double p = d * inv_vol;
    h -= p * std::log2(p);
  }
  return h;
}

double entropy_percent_change(const Graph& original, const Graph& augmented) {
  const double h0 = structural_entropy(original);
  if (augmented.edge_count() == 0) return 1.0;
  // A single edge has H = 1 bit, so h0 > 0 always holds here.
  return 1.0 - structural_entropy(augmented) / h0;
}

}  // namespace lamp
