#include "lamp/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "lamp/encoder.hpp"
#include "lamp/error.hpp"

namespace lamp {

std::string_view to_string(PruneStrategy s) noexcept {
  return s == PruneStrategy::Magnitude ? "magnitude" : "soft_filter";
}

std::optional<PruneStrategy> parse_prune_strategy(std::string_view name) noexcept {
  if (name == "magnitude") return PruneStrategy::Magnitude;
  if (name == "soft_filter") return PruneStrategy::SoftFilter;
  return std::nullopt;
}

namespace {

void check_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw ArgumentError("pruning ratio gamma must lie in [0, 1), got " + std::to_string(gamma));
  }
}

}  // namespace

std::size_t masked_count(double gamma, std::size_t count) {
  // 0.29 * 100 evaluates to 28.999999999999996; the guard keeps floor() at 29.
  return static_cast<std::size_t>(std::floor(gamma * static_cast<double>(count) + 1e-9));
}

Tensor magnitude_mask_matrix(const Tensor& weight, double gamma) {
  check_gamma(gamma);
  Tensor mask(weight.rows(), weight.cols(), 1.0);
  const std::size_t k = masked_count(gamma, weight.size());
  if (k == 0) return mask;
  auto w = weight.values();
  std::vector<std::size_t> order(w.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(w[a]) < std::abs(w[b]); });
  auto m = mask.values();
  for (std::size_t i = 0; i < k; ++i) m[order[i]] = 0.0;
  return mask;
}

Tensor soft_filter_mask_matrix(const Tensor& weight, double gamma) {
  check_gamma(gamma);
  Tensor mask(weight.rows(), weight.cols(), 1.0);
  const std::size_t k = masked_count(gamma, weight.rows());
  if (k == 0) return mask;
  std::vector<double> norms(weight.rows());
  for (std::size_t r = 0; r < weight.rows(); ++r) {
    double s = 0.0;
    for (double v : weight.row(r)) s += v * v;
    norms[r] = std::sqrt(s);
  }
  std::vector<std::size_t> order(weight.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return norms[a] < norms[b]; });
  for (std::size_t i = 0; i < k; ++i)
    for (double& v : mask.row(order[i])) v = 0.0;
  return mask;
}

namespace {

PruneMask build_mask(const std::vector<const Parameter*>& weights, double gamma,
                     PruneStrategy strategy) {
  check_gamma(gamma);
  PruneMask mask;
  mask.gamma = gamma;
  mask.strategy = strategy;
  for (const Parameter* p : weights) {
    mask.names.push_back(p->name);
    mask.matrices.push_back(strategy == PruneStrategy::Magnitude
                                ? magnitude_mask_matrix(p->value, gamma)
                                : soft_filter_mask_matrix(p->value, gamma));
  }
  return mask;
}

}  // namespace

PruneMask magnitude_mask(const std::vector<const Parameter*>& weights, double gamma) {
  return build_mask(weights, gamma, PruneStrategy::Magnitude);
}

PruneMask soft_filter_mask(const std::vector<const Parameter*>& weights, double gamma) {
  return build_mask(weights, gamma, PruneStrategy::SoftFilter);
}

PruneMask derive_mask(const Encoder& encoder, PruneStrategy strategy, double gamma, int epoch) {
  PruneMask mask = build_mask(encoder.prunable_weights(), gamma, strategy);
  mask.epoch_derived = epoch;
  return mask;
}

Tensor apply_mask(const Tensor& weight, const Tensor& mask) {
  require_shape(weight.same_shape(mask), "apply_mask", weight, mask);
  Tensor out = weight;
  auto o = out.values();
  auto m = mask.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] *= m[i];
  return out;
}

Var apply_mask(Var weight, const Tensor& mask) { return hadamard(weight, mask); }

double sparsity(const PruneMask& mask) {
  std::size_t zeros = 0;
  std::size_t total = 0;
  for (const Tensor& m : mask.matrices) {
    total += m.size();
    for (double v : m.values()) zeros += v == 0.0 ? 1 : 0;
  }
  return total == 0 ? 0.0 : static_cast<double>(zeros) / static_cast<double>(total);
}

std::string mask_json(const PruneMask& mask) {
  nlohmann::json j;
  j["gamma"] = mask.gamma;
  j["strategy"] = std::string(to_string(mask.strategy));
  j["epoch"] = mask.epoch_derived;
  j["sparsity"] = sparsity(mask);
  nlohmann::json masks = nlohmann::json::object();
  nlohmann::json shapes = nlohmann::json::object();
  for (std::size_t i = 0; i < mask.matrices.size(); ++i) {
    std::vector<int> flat;
    flat.reserve(mask.matrices[i].size());
    for (double v : mask.matrices[i].values()) flat.push_back(v != 0.0 ? 1 : 0);
    masks[mask.names[i]] = flat;
    shapes[mask.names[i]] = {mask.matrices[i].rows(), mask.matrices[i].cols()};
  }
  j["masks"] = std::move(masks);
  j["shapes"] = std::move(shapes);
  return j.dump();
}

}  // namespace lamp
