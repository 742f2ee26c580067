#include "lamp/losses.hpp"

#include <set>

#include "lamp/error.hpp"

namespace lamp {
namespace {

void check_tau(double tau) {
  if (!(tau > 0.0)) throw ArgumentError("temperature must be positive");
}

// Column of -pos + logsumexp(denominator) per anchor row of `sim`.
Var anchor_terms(Var sim, std::vector<std::pair<std::size_t, std::size_t>> positives,
                 std::vector<int> row_groups, std::vector<int> col_groups) {
  Var lse = row_logsumexp(sim, std::move(row_groups), std::move(col_groups));
  return sub(lse, pick(sim, std::move(positives)));
}

}  // namespace

Var nt_xent(Var z1, Var z2, double tau, DenominatorForm form) {
  check_tau(tau);
  const std::size_t n = z1.rows();
  if (n < 2) throw ArgumentError("nt_xent needs at least 2 graphs per batch, got " + std::to_string(n));
  require_shape(z1.value().same_shape(z2.value()), "nt_xent", z1.value(), z2.value());

  std::vector<std::pair<std::size_t, std::size_t>> diag(n);
  std::vector<int> ids;
  if (form == DenominatorForm::ExcludePositive) ids.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    diag[i] = {i, i};
    if (!ids.empty()) ids[i] = static_cast<int>(i);
  }
  Var s12 = scale(cosine_sim_matrix(z1, z2), 1.0 / tau);
  Var s21 = scale(cosine_sim_matrix(z2, z1), 1.0 / tau);
  Var t1 = anchor_terms(s12, diag, ids, ids);
  Var t2 = anchor_terms(s21, diag, ids, ids);
  return mean(concat_rows(t1, t2));
}

std::vector<std::size_t> sample_anchors(std::size_t n, std::size_t n_s, Rng& rng) {
  if (n_s == 0) throw ArgumentError("n_s must be >= 1");
  if (n <= n_s) {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    return all;
  }
  return rng.sample_without_replacement(n, n_s);
}

Var local_contrastive(Var h1, Var h2, std::span<const int> graph_ids, double tau, std::size_t n_s,
                      Rng& rng) {
  check_tau(tau);
  require_shape(h1.value().same_shape(h2.value()), "local_contrastive", h1.value(), h2.value());
  const std::size_t n = h1.rows();
  if (graph_ids.size() != n) throw ShapeError("local_contrastive: graph_ids size differs from node count");
  if (std::set<int>(graph_ids.begin(), graph_ids.end()).size() < 2) {
    throw ContractError("local_contrastive needs nodes from at least 2 graphs (no cross-graph negatives)");
  }

  const std::vector<std::size_t> anchors = sample_anchors(n, n_s, rng);
  std::vector<std::pair<std::size_t, std::size_t>> positives(anchors.size());
  std::vector<int> row_groups(anchors.size());
  for (std::size_t k = 0; k < anchors.size(); ++k) {
    positives[k] = {k, anchors[k]};
    row_groups[k] = graph_ids[anchors[k]];
  }
  std::vector<int> col_groups(graph_ids.begin(), graph_ids.end());

  Var s12 = scale(cosine_sim_matrix(gather_rows(h1, anchors), h2), 1.0 / tau);
  Var s21 = scale(cosine_sim_matrix(gather_rows(h2, anchors), h1), 1.0 / tau);
  Var t1 = anchor_terms(s12, positives, row_groups, col_groups);
  Var t2 = anchor_terms(s21, positives, row_groups, col_groups);
  return mean(concat_rows(t1, t2));
}

Var total_loss(Var graph_loss, Var local_loss, double alpha) {
  if (!(alpha >= 0.0)) throw ArgumentError("alpha must be >= 0");
  return add(graph_loss, scale(local_loss, alpha));
}

}  // namespace lamp
