#pragma once

#include <span>
#include <vector>

#include "lamp/autodiff.hpp"
#include "lamp/rng.hpp"

namespace lamp {

/// Denominator of the graph-level loss.
enum class DenominatorForm {
  /// sum over j != i: the positive pair is excluded, so the loss can go negative.
  ExcludePositive,
  /// sum over all j (SimCLR form), kept for comparison runs.
  IncludePositive,
};

struct LossBreakdown {
  double total = 0.0;
  double graph_loss = 0.0;
  double local_loss = 0.0;
  double alpha = 0.0;
  double temperature = 0.0;
};

/// Symmetrized NT-Xent over N paired graph embeddings with cosine similarity.
///
/// For anchor i of view 1 the term is -s_ii / tau + log sum_j exp(s_ij / tau),
/// with s_ij = sim(z1_i, z2_j); view 2 anchors mirror it. Returns the mean
/// over all 2N anchor terms. N < 2 or tau <= 0 throws ArgumentError.
Var nt_xent(Var z1, Var z2, double tau,
            DenominatorForm form = DenominatorForm::ExcludePositive);

/// Anchor nodes used by local_contrastive: every node when n <= n_s,
/// otherwise n_s nodes sampled uniformly without replacement (sorted).
std::vector<std::size_t> sample_anchors(std::size_t n, std::size_t n_s, Rng& rng);

/// Node-level contrast between two row-aligned views of the same batch.
///
/// The positive of anchor v is v itself in the other view; negatives are all
/// nodes of other graphs in the batch, taken from the other view. Both views
/// serve as anchors; returns the mean over 2 * |anchors| terms. Fewer than
/// two distinct graphs throws ContractError.
Var local_contrastive(Var h1, Var h2, std::span<const int> graph_ids, double tau, std::size_t n_s,
                      Rng& rng);

/// graph_loss + alpha * local_loss. alpha < 0 throws ArgumentError.
Var total_loss(Var graph_loss, Var local_loss, double alpha);

}  // namespace lamp
