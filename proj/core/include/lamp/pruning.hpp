#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lamp/autodiff.hpp"

namespace lamp {

class Encoder;

enum class PruneStrategy { Magnitude, SoftFilter };

std::string_view to_string(PruneStrategy s) noexcept;
/// Accepts "magnitude" and "soft_filter".
std::optional<PruneStrategy> parse_prune_strategy(std::string_view name) noexcept;

/// Binary masks for the prunable weight matrices of an encoder, in
/// Encoder::prunable_weights() order.
struct PruneMask {
  std::vector<std::string> names;
  std::vector<Tensor> matrices;
  double gamma = 0.0;
  PruneStrategy strategy = PruneStrategy::Magnitude;
  int epoch_derived = 0;
};

/// Number of entries to mask: floor(gamma * count), robust to round-off in gamma * count.
std::size_t masked_count(double gamma, std::size_t count);

/// Zeroes the floor(gamma * size) smallest |w|; ties go to the lower flat index.
Tensor magnitude_mask_matrix(const Tensor& weight, double gamma);
/// Zeroes the floor(gamma * rows) output rows of smallest L2 norm; ties go to the lower row.
Tensor soft_filter_mask_matrix(const Tensor& weight, double gamma);

/// Per-matrix (layer-local) masks. gamma outside [0, 1) throws ArgumentError.
PruneMask magnitude_mask(const std::vector<const Parameter*>& weights, double gamma);
PruneMask soft_filter_mask(const std::vector<const Parameter*>& weights, double gamma);

/// Mask for the encoder's current weights; biases and the projection head are never pruned.
PruneMask derive_mask(const Encoder& encoder, PruneStrategy strategy, double gamma, int epoch = 0);

/// Elementwise product; on a tape the gradient reaching `weight` is masked too.
Tensor apply_mask(const Tensor& weight, const Tensor& mask);
Var apply_mask(Var weight, const Tensor& mask);

/// Fraction of zero entries across all mask matrices.
double sparsity(const PruneMask& mask);

/// {"gamma", "strategy", "epoch", "sparsity", "masks": {name: [0/1, ...]}, "shapes": {name: [r, c]}}
std::string mask_json(const PruneMask& mask);

}  // namespace lamp
