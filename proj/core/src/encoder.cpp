#include "lamp/encoder.hpp"

#include <cmath>

#include "lamp/error.hpp"

namespace lamp {

std::string_view to_string(Readout r) noexcept { return r == Readout::Sum ? "sum" : "mean"; }

std::optional<Readout> parse_readout(std::string_view name) noexcept {
  if (name == "sum") return Readout::Sum;
  if (name == "mean") return Readout::Mean;
  return std::nullopt;
}

Tensor xavier_uniform(std::size_t fan_out, std::size_t fan_in, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor w(fan_out, fan_in);
  for (double& v : w.values()) v = rng.uniform(-bound, bound);
  return w;
}

Encoder::Encoder(std::size_t input_dim, std::size_t hidden_dim, std::size_t num_layers, Rng& rng)
    : input_dim_(input_dim), hidden_dim_(hidden_dim) {
  if (num_layers < 2) throw ArgumentError("encoder needs at least 2 layers");
  if (input_dim == 0 || hidden_dim == 0) throw ArgumentError("encoder dimensions must be positive");
  for (std::size_t l = 0; l < num_layers; ++l) {
    const std::string prefix = "encoder.layers." + std::to_string(l) + ".";
    const std::size_t in = l == 0 ? input_dim : hidden_dim;
    GinLayer layer;
    layer.w1 = Parameter(prefix + "w1", xavier_uniform(hidden_dim, in, rng));
    layer.b1 = Parameter(prefix + "b1", Tensor(1, hidden_dim));
    layer.w2 = Parameter(prefix + "w2", xavier_uniform(hidden_dim, hidden_dim, rng));
    layer.b2 = Parameter(prefix + "b2", Tensor(1, hidden_dim));
    layers_.push_back(std::move(layer));
  }
}

std::vector<Parameter*> Encoder::parameters() {
  std::vector<Parameter*> out;
  for (GinLayer& l : layers_) out.insert(out.end(), {&l.w1, &l.b1, &l.w2, &l.b2});
  return out;
}

std::vector<const Parameter*> Encoder::parameters() const {
  std::vector<const Parameter*> out;
  for (const GinLayer& l : layers_) out.insert(out.end(), {&l.w1, &l.b1, &l.w2, &l.b2});
  return out;
}

std::vector<const Parameter*> Encoder::prunable_weights() const {
  std::vector<const Parameter*> out;
  for (const GinLayer& l : layers_) out.insert(out.end(), {&l.w1, &l.w2});
  return out;
}

ProjectionHead::ProjectionHead(std::size_t hidden_dim, Rng& rng)
    : w1("head.w1", xavier_uniform(hidden_dim, hidden_dim, rng)),
      b1("head.b1", Tensor(1, hidden_dim)),
      w2("head.w2", xavier_uniform(hidden_dim, hidden_dim, rng)),
      b2("head.b2", Tensor(1, hidden_dim)) {}

std::vector<Parameter*> ProjectionHead::parameters() { return {&w1, &b1, &w2, &b2}; }
std::vector<const Parameter*> ProjectionHead::parameters() const { return {&w1, &b1, &w2, &b2}; }

namespace {

// Shared forward for the trainable and inference paths; `bind` turns a
// parameter into a tape variable.
template <typename EncoderT, typename Bind>
Var encode_impl(EncoderT& encoder, const GraphBatch& batch, const PruneMask* mask, Tape& tape,
                Bind bind) {
  if (batch.features.cols() != encoder.input_dim()) {
    throw ShapeError("encode: batch feature dim " + std::to_string(batch.features.cols()) +
                     " differs from encoder input dim " + std::to_string(encoder.input_dim()));
  }
  if (mask && mask->matrices.size() != 2 * encoder.num_layers()) {
    throw ShapeError("encode: mask has " + std::to_string(mask->matrices.size()) +
                     " matrices, encoder has " + std::to_string(2 * encoder.num_layers()) +
                     " prunable weights");
  }
  Var h = tape.constant(batch.features);
  for (std::size_t l = 0; l < encoder.num_layers(); ++l) {
    auto& layer = encoder.layers()[l];
    Var w1 = bind(layer.w1);
    Var w2 = bind(layer.w2);
    if (mask) {
      w1 = apply_mask(w1, mask->matrices[2 * l]);
      w2 = apply_mask(w2, mask->matrices[2 * l + 1]);
    }
    Var self = layer.eps == 0.0 ? h : scale(h, 1.0 + layer.eps);
    Var agg = add(self, scatter_sum(h, batch.edges));
    Var z = relu(add_bias(matmul_bt(agg, w1), bind(layer.b1)));
    h = relu(add_bias(matmul_bt(z, w2), bind(layer.b2)));
  }
  return h;
}

}  // namespace

Var encode(Encoder& encoder, const GraphBatch& batch, const PruneMask* mask, Tape& tape) {
  return encode_impl(encoder, batch, mask, tape, [&](Parameter& p) { return tape.parameter(p); });
}

Tensor encode(const Encoder& encoder, const GraphBatch& batch, const PruneMask* mask) {
  Tape tape(false);
  Var h = encode_impl(encoder, batch, mask, tape,
                      [&](const Parameter& p) { return tape.constant(p.value); });
  return h.value();
}

Var readout(Var node_embeds, const GraphBatch& batch, Readout kind) {
  const auto segments = static_cast<std::size_t>(batch.batch_size);
  return kind == Readout::Sum ? segment_sum(node_embeds, batch.graph_ids, segments)
                              : segment_mean(node_embeds, batch.graph_ids, segments);
}

namespace {

template <typename HeadT, typename Bind>
Var project_impl(HeadT& head, Var x, Bind bind) {
  Var hidden = relu(add_bias(matmul_bt(x, bind(head.w1)), bind(head.b1)));
  return add_bias(matmul_bt(hidden, bind(head.w2)), bind(head.b2));
}

}  // namespace

Var project(ProjectionHead& head, Var graph_embeds) {
  Tape& tape = graph_embeds.tape();
  return project_impl(head, graph_embeds, [&](Parameter& p) { return tape.parameter(p); });
}

Tensor project(const ProjectionHead& head, const Tensor& graph_embeds) {
  Tape tape(false);
  Var x = tape.constant(graph_embeds);
  return project_impl(head, x, [&](const Parameter& p) { return tape.constant(p.value); }).value();
}

}  // namespace lamp
