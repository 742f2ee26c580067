#include <benchmark/benchmark.h>

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lamp/augment.hpp"
#include "lamp/encoder.hpp"
#include "lamp/entropy.hpp"
#include "lamp/losses.hpp"
#include "lamp/pruning.hpp"
#include "lamp/trainer.hpp"

using namespace lamp;

namespace {

// Random graphs about the size of a MUTAG batch member.
std::vector<Graph> random_graphs(int count, int nodes, std::size_t dim, Rng& rng) {
  std::vector<Graph> out;
  for (int g = 0; g < count; ++g) {
    std::set<std::pair<int, int>> pairs;
    for (int u = 1; u < nodes; ++u) pairs.insert({static_cast<int>(rng.uniform_index(u)), u});
    for (int k = 0; k < nodes / 4; ++k) {
      const int u = static_cast<int>(rng.uniform_index(nodes)), v = static_cast<int>(rng.uniform_index(nodes));
      if (u != v) pairs.insert({std::min(u, v), std::max(u, v)});
    }
    std::vector<Edge> edges;
    for (auto [u, v] : pairs) edges.push_back({u, v});
    Tensor x(static_cast<std::size_t>(nodes), dim);
    for (int i = 0; i < nodes; ++i) x(static_cast<std::size_t>(i), rng.uniform_index(dim)) = 1.0;
    out.emplace_back(nodes, std::move(edges), std::move(x));
  }
  return out;
}

void BM_EncodeForward(benchmark::State& state) {
  Rng rng(1);
  const auto graphs = random_graphs(static_cast<int>(state.range(0)), 18, 7, rng);
  const GraphBatch batch = make_batch(graphs);
  Encoder enc(7, 32, 3, rng);
  for (auto _ : state) benchmark::DoNotOptimize(encode(enc, batch));
  state.SetItemsProcessed(state.iterations() * batch.total_nodes);
}
BENCHMARK(BM_EncodeForward)->Arg(32)->Arg(128);

void BM_PairForwardBackward(benchmark::State& state) {
  Rng rng(2);
  const auto graphs = random_graphs(static_cast<int>(state.range(0)), 18, 7, rng);
  const GraphBatch batch = make_batch(graphs);
  TrainConfig config;
  Encoder enc(7, 32, 3, rng);
  ProjectionHead head(32, rng);
  const PruneMask mask = derive_mask(enc, config.strategy, config.gamma);
  for (auto _ : state) {
    Rng anchors(3);
    Tape tape;
    tape.backward(forward_pair(enc, head, batch, mask, config, anchors, tape).total);
    for (Parameter* p : enc.parameters()) p->zero_grad();
    for (Parameter* p : head.parameters()) p->zero_grad();
  }
  state.SetItemsProcessed(state.iterations() * batch.batch_size);
}
BENCHMARK(BM_PairForwardBackward)->Arg(32)->Arg(128);

void BM_StructuralEntropy(benchmark::State& state) {
  Rng rng(4);
  const Graph g = random_graphs(1, static_cast<int>(state.range(0)), 1, rng).front();
  for (auto _ : state) benchmark::DoNotOptimize(structural_entropy(g));
}
BENCHMARK(BM_StructuralEntropy)->Arg(20)->Arg(500);

void BM_DeriveMask(benchmark::State& state) {
  Rng rng(5);
  Encoder enc(7, static_cast<std::size_t>(state.range(0)), 3, rng);
  const auto strategy = static_cast<PruneStrategy>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(derive_mask(enc, strategy, 0.3));
}
BENCHMARK(BM_DeriveMask)->Args({32, 0})->Args({32, 1})->Args({256, 0})->Args({256, 1});

void BM_Augment(benchmark::State& state) {
  Rng rng(6);
  const Graph g = random_graphs(1, 400, 1, rng).front();
  const auto kind = static_cast<Augmentation>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(augment(g, kind, 0.2, rng));
  state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_Augment)->DenseRange(0, 3);

}  // namespace
BENCHMARK_MAIN();
